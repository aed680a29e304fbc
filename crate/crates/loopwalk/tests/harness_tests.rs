use loopwalk::error::Error;
use loopwalk::harness::output::{
    distribution_sibling, format_value, write_rows_csv, write_rows_json, CSV_HEADER,
};
use loopwalk::harness::presets::{figure_preset, run_figure, FigureSpec, PRESET_NAMES};
use loopwalk::harness::{
    expand_grid, run_experiment, run_experiment_with_engine, run_sweep, rows_from_records, Axis,
    AxisParam, Engine, ExperimentConfig, ObservableFlags, SweepSpec,
};
use loopwalk::noise::{NoiseKind, NoiseSpec};
use loopwalk::walk::{CoinSpec, LoopConfig};
use std::path::Path;

fn basic_config(n: usize, k: usize, r: f64, t_max: usize) -> ExperimentConfig {
    ExperimentConfig::new(LoopConfig::new(n, k, r), NoiseSpec::none(), t_max)
}

fn csv_bytes(rows: &[loopwalk::harness::SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows_csv(&mut buf, rows, None).unwrap();
    buf
}

#[test]
fn experiment_records_every_step() {
    let records = run_experiment(&basic_config(8, 4, 1.0, 40)).unwrap();
    assert_eq!(records.len(), 41);
    assert_eq!(records.first().unwrap().t, 0);
    assert_eq!(records.last().unwrap().t, 40);
    for w in records.windows(2) {
        assert!(w[1].te >= w[0].te - 1e-12);
    }
}

#[test]
fn engines_agree_without_noise() {
    let config = basic_config(9, 4, 0.7, 25);
    let dens = run_experiment_with_engine(&config, Engine::Density).unwrap();
    let pure = run_experiment_with_engine(&config, Engine::Statevector).unwrap();
    for (a, b) in dens.iter().zip(&pure) {
        assert!((a.te - b.te).abs() <= 1e-12);
    }
}

#[test]
fn statevector_engine_rejects_noise() {
    let mut config = basic_config(9, 4, 0.7, 5);
    config.noise = NoiseSpec::depolarizing(0.2);
    let err = run_experiment_with_engine(&config, Engine::Statevector).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("run"), "label missing: {err}");
}

#[test]
fn axisless_sweep_equals_single_experiment() {
    let config = basic_config(7, 3, 0.6, 15);
    let spec = SweepSpec { base: config.clone(), axes: vec![] };
    let rows = run_sweep(&spec, 2).unwrap();
    let direct = rows_from_records(&config, run_experiment(&config).unwrap());
    assert_eq!(rows.len(), direct.len());
    for (a, b) in rows.iter().zip(&direct) {
        assert_eq!(a.label, b.label);
        assert_eq!(a.record, b.record);
    }
    // The sweep keeps the base label verbatim: no per-point suffix.
    assert!(rows.iter().all(|row| row.label == "run"));
}

#[test]
fn grid_expansion_order_is_first_axis_slowest() {
    let spec = SweepSpec {
        base: basic_config(7, 1, 0.5, 3),
        axes: vec![
            Axis { parameter: AxisParam::R, values: vec![0.0, 1.0] },
            Axis { parameter: AxisParam::P, values: vec![0.0, 0.5, 0.9] },
        ],
    };
    let grid = expand_grid(&spec).unwrap();
    let got: Vec<(f64, f64)> = grid
        .iter()
        .map(|c| (c.r#loop.sink_strength, c.noise.strength))
        .collect();
    let expected = [(0.0, 0.0), (0.0, 0.5), (0.0, 0.9), (1.0, 0.0), (1.0, 0.5), (1.0, 0.9)];
    assert_eq!(got, expected);
}

#[test]
fn sweep_output_is_deterministic_and_worker_independent() {
    let spec = SweepSpec {
        base: {
            let mut c = basic_config(8, 1, 0.6, 12);
            c.noise = NoiseSpec::depolarizing(0.0);
            c
        },
        axes: vec![
            Axis { parameter: AxisParam::K, values: vec![1.0, 4.0] },
            Axis { parameter: AxisParam::P, values: vec![0.0, 0.1, 0.2, 0.3] },
        ],
    };
    let reference = csv_bytes(&run_sweep(&spec, 1).unwrap());
    for workers in [2, 4, 8] {
        let bytes = csv_bytes(&run_sweep(&spec, workers).unwrap());
        assert_eq!(bytes, reference, "workers = {workers}");
    }
    let again = csv_bytes(&run_sweep(&spec, 1).unwrap());
    assert_eq!(again, reference);
}

#[test]
fn grid_errors_carry_the_failing_point() {
    let spec = SweepSpec {
        base: basic_config(7, 1, 0.5, 3),
        axes: vec![Axis { parameter: AxisParam::K, values: vec![1.0, 9.0] }],
    };
    let err = expand_grid(&spec).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("k=9"), "point missing from {msg:?}");
    assert!(matches!(err, Error::Labeled { .. }));
    let fractional = SweepSpec {
        base: basic_config(7, 1, 0.5, 3),
        axes: vec![Axis { parameter: AxisParam::N, values: vec![7.5] }],
    };
    assert!(expand_grid(&fractional).unwrap_err().to_string().contains("7.5"));
    let empty = SweepSpec {
        base: basic_config(7, 1, 0.5, 3),
        axes: vec![Axis { parameter: AxisParam::P, values: vec![] }],
    };
    assert!(expand_grid(&empty).unwrap_err().to_string().contains("no values"));
}

#[test]
fn csv_header_and_empty_fields() {
    let header_line = CSV_HEADER.join(",");
    assert_eq!(
        header_line,
        "label,n,k,r,noise,P,delta_phase,theta,delta_init,eta,t,te,trace,mid"
    );
    let config = basic_config(5, 1, 1.0, 1);
    let rows = rows_from_records(&config, run_experiment(&config).unwrap());
    let text = String::from_utf8(csv_bytes(&rows)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], header_line);
    assert_eq!(lines.len(), 3);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 14);
    assert_eq!(fields[0], "run");
    assert_eq!(fields[4], "none");
    assert_eq!(fields[7], "", "symmetric coin has no angle column");
    assert_eq!(fields[13], "", "mid was not requested");
    // No rows at all still produces the header.
    let empty = String::from_utf8(csv_bytes(&[])).unwrap();
    assert_eq!(empty.trim_end(), header_line);
}

#[test]
fn rotation_coin_and_mid_fill_their_columns() {
    let mut config = basic_config(5, 1, 0.5, 2);
    config.r#loop.coin = CoinSpec::Rotation { theta: 0.25 };
    config.observables = ObservableFlags { te: true, distribution: false, mid: true };
    let rows = rows_from_records(&config, run_experiment(&config).unwrap());
    let text = String::from_utf8(csv_bytes(&rows)).unwrap();
    let line: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(line[7], "0.25");
    assert!(!line[13].is_empty());
}

#[test]
fn format_value_examples() {
    assert_eq!(format_value(0.0), "0");
    assert_eq!(format_value(-0.0), "0");
    assert_eq!(format_value(0.5), "0.5");
    assert_eq!(format_value(1.0), "1");
    assert_eq!(format_value(-2.0), "-2");
    assert_eq!(format_value(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_value(std::f64::consts::PI), "3.14159265359");
    assert_eq!(format_value(0.000123456), "0.000123456");
    assert_eq!(format_value(2.5e-7), "2.5e-07");
    assert_eq!(format_value(1e-5), "1e-05");
    assert_eq!(format_value(1e12), "1e+12");
    assert_eq!(format_value(123456789012.0), "123456789012");
    assert_eq!(format_value(0.867024582271887), "0.867024582272");
    assert_eq!(format_value(f64::INFINITY), "inf");
    assert_eq!(format_value(f64::NEG_INFINITY), "-inf");
    assert_eq!(format_value(f64::NAN), "nan");
}

#[test]
fn distribution_sibling_paths() {
    assert_eq!(
        distribution_sibling(Path::new("runs/fig2.csv")),
        Path::new("runs/fig2.dist.csv")
    );
    assert_eq!(distribution_sibling(Path::new("out.json")), Path::new("out.dist.json"));
    assert_eq!(distribution_sibling(Path::new("bare")), Path::new("bare.dist"));
}

#[test]
fn json_rows_mirror_the_csv_columns() {
    let mut config = basic_config(5, 2, 1.0, 1);
    config.observables = ObservableFlags { te: true, distribution: false, mid: true };
    let rows = rows_from_records(&config, run_experiment(&config).unwrap());
    let mut buf = Vec::new();
    write_rows_json(&mut buf, &rows).unwrap();
    let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    let arr = parsed.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    let first = &arr[0];
    for key in ["label", "n", "k", "r", "noise", "P", "delta_phase", "theta", "delta_init", "eta", "t", "te", "trace", "mid"] {
        assert!(first.get(key).is_some(), "missing key {key}");
    }
    assert!(first["theta"].is_null());
    assert_eq!(first["n"], 5);
    assert_eq!(first["noise"], "none");
    assert!(first["mid"].is_number());
}

#[test]
fn toml_sweep_round_trip() {
    let text = r#"
        [base]
        t_max = 10
        label = "demo"

        [base.loop]
        n = 8
        sink_site = 4
        sink_strength = 1.0

        [base.noise]
        kind = "depolarizing"
        strength = 0.0

        [[axes]]
        parameter = "P"
        values = [0.0, 0.1]
    "#;
    let spec: SweepSpec = toml::from_str(text).unwrap();
    assert_eq!(spec.base.r#loop.n, 8);
    assert_eq!(spec.base.noise.kind, NoiseKind::Depolarizing);
    assert_eq!(spec.axes.len(), 1);
    let rows = run_sweep(&spec, 2).unwrap();
    assert_eq!(rows.len(), 2 * 11);
    assert!(rows.iter().all(|row| row.label == "demo"));
    // The P = 0 half reproduces the noiseless reference point.
    let noiseless: Vec<_> = rows.iter().filter(|row| row.p == 0.0).collect();
    assert!((noiseless[10].record.te - 0.59375).abs() <= 1e-12);
}

#[test]
fn toml_rejects_unknown_and_malformed_fields() {
    let unknown = r#"
        [base]
        t_max = 10
        typo_field = 3

        [base.loop]
        n = 8
        sink_site = 4
        sink_strength = 1.0
    "#;
    assert!(toml::from_str::<SweepSpec>(unknown).is_err());
    let bad_axis = r#"
        [base]
        t_max = 10

        [base.loop]
        n = 8
        sink_site = 4
        sink_strength = 1.0

        [[axes]]
        parameter = "Q"
        values = [0.0]
    "#;
    assert!(toml::from_str::<SweepSpec>(bad_axis).is_err());
    let bad_coin = r#"
        [base]
        t_max = 10

        [base.loop]
        n = 8
        sink_site = 4
        sink_strength = 1.0
        coin = { variant = "hadamard" }
    "#;
    assert!(toml::from_str::<SweepSpec>(bad_coin).is_err());
}

#[test]
fn mid_cadence_defaults_scale_with_ring_size() {
    assert_eq!(basic_config(21, 1, 1.0, 5).effective_mid_every(), 1);
    assert_eq!(basic_config(22, 1, 1.0, 5).effective_mid_every(), 5);
    let mut config = basic_config(100, 1, 1.0, 5);
    config.mid_every = Some(3);
    assert_eq!(config.effective_mid_every(), 3);
    config.mid_every = Some(0);
    assert!(matches!(config.validate(), Err(Error::Config(_))));
}

#[test]
fn mid_cadence_leaves_gaps_in_records() {
    let mut config = basic_config(6, 2, 0.5, 6);
    config.observables.mid = true;
    config.mid_every = Some(3);
    let records = run_experiment(&config).unwrap();
    for rec in &records {
        assert_eq!(rec.mid.is_some(), rec.t % 3 == 0, "t = {}", rec.t);
    }
}

#[test]
fn unknown_preset_is_an_error() {
    let err = figure_preset("fig99").unwrap_err();
    assert!(matches!(err, Error::UnknownPreset(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn preset_catalog_expands() {
    for name in PRESET_NAMES {
        let spec = figure_preset(name).unwrap();
        assert!(!spec.panels.is_empty(), "{name} has no panels");
        for panel in &spec.panels {
            assert!(!panel.sweeps.is_empty(), "{name}/{} has no sweeps", panel.file_stem);
            for sweep in &panel.sweeps {
                assert!(sweep.base.validate().is_ok(), "{name}/{}", panel.file_stem);
                expand_grid(sweep).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }
}

#[test]
fn preset_shapes_match_their_panels() {
    let fig2 = figure_preset("fig2").unwrap();
    assert_eq!(fig2.panels.len(), 1);
    assert_eq!(fig2.panels[0].sweeps.len(), 2);
    assert_eq!(fig2.panels[0].keep_t, Some(vec![25]));
    assert!(fig2.panels[0].sweeps.iter().all(|s| s.base.observables.distribution));

    let fig3b = figure_preset("fig3b").unwrap();
    let sinks: Vec<(usize, usize)> = fig3b.panels[0]
        .sweeps
        .iter()
        .map(|s| (s.base.r#loop.n, s.base.r#loop.sink_site))
        .collect();
    assert_eq!(sinks, [(7, 3), (8, 4), (9, 4), (21, 10)]);

    let fig5 = figure_preset("fig5").unwrap();
    assert_eq!(fig5.panels.len(), 10);
    assert!(fig5.panels.iter().any(|p| p.file_stem == "fig5_n100_k50"));

    let fig10 = figure_preset("fig10").unwrap();
    assert_eq!(fig10.panels.len(), 2);
    for panel in &fig10.panels {
        assert_eq!(panel.sweeps.len(), 3);
        for sweep in &panel.sweeps {
            assert_eq!(sweep.axes.len(), 1);
            assert_eq!(sweep.axes[0].parameter, AxisParam::DeltaPhase);
            assert_eq!(sweep.axes[0].values.len(), 41);
            assert_eq!(sweep.base.noise.kind, NoiseKind::Dephasing);
        }
        let labels: Vec<&str> = panel.sweeps.iter().map(|s| s.base.label.as_str()).collect();
        assert!(labels[0].contains("P=0.1") && labels[2].contains("P=0.3"), "{labels:?}");
    }

    let fig13 = figure_preset("fig13").unwrap();
    assert_eq!(fig13.panels.len(), 4);
    for panel in &fig13.panels {
        assert_eq!(panel.sweeps.len(), 4);
        assert!(panel.sweeps.iter().all(|s| s.base.observables.mid));
        assert!(panel.sweeps.iter().all(|s| s.base.mid_every == Some(1)));
    }
}

#[test]
fn snapshot_panel_keeps_only_requested_steps() {
    let fig2 = figure_preset("fig2").unwrap();
    let panels = run_figure(&fig2, 2).unwrap();
    assert_eq!(panels.len(), 1);
    let panel = &panels[0];
    assert!(panel.comment.starts_with("# preset=fig2 panel=fig2 keep_t=25"));
    assert_eq!(panel.rows.len(), 2);
    assert!(panel.rows.iter().all(|row| row.record.t == 25));
    let labels: Vec<&str> = panel.rows.iter().map(|row| row.label.as_str()).collect();
    assert_eq!(labels, ["fig2[k=1]", "fig2[k=10]"]);
    let dist_rows: usize = panel
        .rows
        .iter()
        .map(|row| row.record.distribution.as_ref().unwrap().len())
        .sum();
    assert_eq!(dist_rows, 42);
}

#[test]
fn phase_flip_panel_peaks_at_half_strength() {
    // Dephasing with a pi angle at t = 10 on the 8-ring, near sink: the
    // transport maximum sits mid-grid, not at the noiseless end.
    let fig11 = figure_preset("fig11").unwrap();
    let near_panel = fig11
        .panels
        .iter()
        .find(|p| p.file_stem == "fig11_n8_k1")
        .expect("near-sink panel exists");
    let one = FigureSpec { name: fig11.name.clone(), panels: vec![near_panel.clone()] };
    let rows = &run_figure(&one, 2).unwrap()[0].rows;
    let at_t10: Vec<_> = rows.iter().filter(|row| row.record.t == 10).collect();
    assert_eq!(at_t10.len(), 51);
    let best = at_t10
        .iter()
        .max_by(|a, b| a.record.te.total_cmp(&b.record.te))
        .unwrap();
    assert!((best.p - 0.5).abs() <= 1e-12);
    assert!((best.record.te - 0.7734375).abs() <= 1e-12);
}

#[test]
fn write_results_creates_main_and_sibling_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = basic_config(5, 1, 1.0, 3);
    config.observables.distribution = true;
    let rows = rows_from_records(&config, run_experiment(&config).unwrap());
    let path = dir.path().join("out.csv");
    let report =
        loopwalk::harness::write_results(&rows, loopwalk::harness::output::OutputFormat::Csv, &path)
            .unwrap();
    assert_eq!(report.main, path);
    let sibling = report.distribution.unwrap();
    assert_eq!(sibling, dir.path().join("out.dist.csv"));
    let dist = std::fs::read_to_string(&sibling).unwrap();
    let mut lines = dist.lines();
    assert_eq!(lines.next().unwrap(), "label,t,site,probability");
    // 4 recorded steps x 5 sites.
    assert_eq!(lines.count(), 20);
}
