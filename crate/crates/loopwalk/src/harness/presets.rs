//! Canned parameter grids reproducing the figure panels this crate was
//! calibrated against. Each preset expands to one or more panels; each panel
//! becomes one CSV file whose first line documents the grid that produced it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harness::output::{format_value, noise_name};
use crate::harness::{
    run_sweep, Axis, AxisParam, ExperimentConfig, ObservableFlags, SweepRow, SweepSpec,
};
use crate::noise::NoiseSpec;
use crate::walk::LoopConfig;

/// All preset names, in catalog order.
pub const PRESET_NAMES: [&str; 14] = [
    "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
    "fig11", "fig12", "fig13",
];

/// A preset expanded into concrete sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub name: String,
    pub panels: Vec<FigurePanel>,
}

/// One output file: some sweeps run back to back, optionally filtered to a
/// few recorded steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePanel {
    pub file_stem: String,
    /// Keep only these steps in the output; `None` keeps every step.
    pub keep_t: Option<Vec<usize>>,
    pub sweeps: Vec<SweepSpec>,
}

/// Rows for one panel, ready to be written.
#[derive(Debug, Clone)]
pub struct PanelRows {
    pub file_stem: String,
    pub comment: String,
    pub rows: Vec<SweepRow>,
}

fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + i as f64 * step).collect()
}

fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
        .collect()
}

/// 0, 0.02, ..., 1: the default grid for noise strengths.
fn p_grid() -> Vec<f64> {
    grid(0.0, 0.02, 51)
}

/// Farthest site from the start site 0 on an n-cycle. For odd n the two
/// antipodal sites tie; we take the lower index.
fn far_site(n: usize) -> usize {
    n / 2
}

const NEAR: usize = 1;

fn near_far(n: usize) -> [usize; 2] {
    [NEAR, far_site(n)]
}

fn base_config(name: &str, n: usize, k: usize, r: f64, noise: NoiseSpec, t_max: usize) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(LoopConfig::new(n, k, r), noise, t_max);
    config.label = format!("{name}[n={n};k={k}]");
    config
}

fn axis(parameter: AxisParam, values: Vec<f64>) -> Axis {
    Axis { parameter, values }
}

fn sweep(base: ExperimentConfig, axes: Vec<Axis>) -> SweepSpec {
    SweepSpec { base, axes }
}

fn panel(file_stem: impl Into<String>, keep_t: Option<Vec<usize>>, sweeps: Vec<SweepSpec>) -> FigurePanel {
    FigurePanel { file_stem: file_stem.into(), keep_t, sweeps }
}

/// Expand a preset name into its panels and sweeps.
pub fn figure_preset(name: &str) -> Result<FigureSpec> {
    let panels = match name {
        // Snapshot of the position distribution on 21 sites at t = 25 with a
        // fully absorbing sink nearest to / farthest from the start.
        "fig2" => {
            let sweeps = [1usize, 10]
                .iter()
                .map(|&k| {
                    let mut base = base_config("fig2", 21, k, 1.0, NoiseSpec::none(), 25);
                    base.label = format!("fig2[k={k}]");
                    base.observables = ObservableFlags { te: true, distribution: true, mid: false };
                    sweep(base, vec![])
                })
                .collect();
            vec![panel("fig2", Some(vec![25]), sweeps)]
        }
        // Transport efficiency against time for a fully absorbing sink,
        // nearest (a) and farthest (b) placement, several ring sizes.
        "fig3a" | "fig3b" => {
            let far = name == "fig3b";
            let sweeps = [7usize, 8, 9, 21]
                .iter()
                .map(|&n| {
                    let k = if far { far_site(n) } else { NEAR };
                    sweep(base_config(name, n, k, 1.0, NoiseSpec::none(), 40), vec![])
                })
                .collect();
            vec![panel(name, None, sweeps)]
        }
        // Transport efficiency against sink strength at t = 40.
        "fig4a" | "fig4b" => {
            let far = name == "fig4b";
            let sweeps = [7usize, 8, 9, 21]
                .iter()
                .map(|&n| {
                    let k = if far { far_site(n) } else { NEAR };
                    sweep(
                        base_config(name, n, k, 1.0, NoiseSpec::none(), 40),
                        vec![axis(AxisParam::R, grid(0.0, 0.05, 21))],
                    )
                })
                .collect();
            vec![panel(name, Some(vec![40]), sweeps)]
        }
        // Transport efficiency against depolarizing strength, r = 0.6, every
        // step up to t = 40 recorded; one panel per (n, k).
        "fig5" => [7usize, 8, 9, 21, 100]
            .iter()
            .flat_map(|&n| near_far(n).map(|k| (n, k)))
            .map(|(n, k)| {
                panel(
                    format!("fig5_n{n}_k{k}"),
                    None,
                    vec![sweep(
                        base_config("fig5", n, k, 0.6, NoiseSpec::depolarizing(0.0), 40),
                        vec![axis(AxisParam::P, p_grid())],
                    )],
                )
            })
            .collect(),
        // Transport efficiency over the (r, P) plane at t = 10.
        "fig6" => [8usize, 9]
            .iter()
            .flat_map(|&n| near_far(n).map(|k| (n, k)))
            .map(|(n, k)| {
                panel(
                    format!("fig6_n{n}_k{k}"),
                    Some(vec![10]),
                    vec![sweep(
                        base_config("fig6", n, k, 0.6, NoiseSpec::depolarizing(0.0), 10),
                        vec![
                            axis(AxisParam::R, grid(0.0, 0.05, 21)),
                            axis(AxisParam::P, p_grid()),
                        ],
                    )],
                )
            })
            .collect(),
        // Transport efficiency over the (r, P) plane at t = 40, r from 0.5.
        "fig7" => [7usize, 8, 9, 21]
            .iter()
            .flat_map(|&n| near_far(n).map(|k| (n, k)))
            .map(|(n, k)| {
                panel(
                    format!("fig7_n{n}_k{k}"),
                    Some(vec![40]),
                    vec![sweep(
                        base_config("fig7", n, k, 0.6, NoiseSpec::depolarizing(0.0), 40),
                        vec![
                            axis(AxisParam::R, grid(0.5, 0.05, 11)),
                            axis(AxisParam::P, p_grid()),
                        ],
                    )],
                )
            })
            .collect(),
        // Transport efficiency against depolarizing strength at t = 40, both
        // sink placements per panel; r = 0.6 (fig8) or 1 (fig9).
        "fig8" | "fig9" => {
            let r = if name == "fig8" { 0.6 } else { 1.0 };
            [7usize, 8, 9, 21]
                .iter()
                .map(|&n| {
                    let sweeps = near_far(n)
                        .iter()
                        .map(|&k| {
                            sweep(
                                base_config(name, n, k, r, NoiseSpec::depolarizing(0.0), 40),
                                vec![axis(AxisParam::P, p_grid())],
                            )
                        })
                        .collect();
                    panel(format!("{name}_n{n}"), Some(vec![40]), sweeps)
                })
                .collect()
        }
        // Transport efficiency against the dephasing angle at t = 40 for a
        // few noise levels, 8-site ring, full sink.
        "fig10" => near_far(8)
            .iter()
            .map(|&k| {
                let sweeps = [0.1f64, 0.2, 0.3]
                    .iter()
                    .map(|&p| {
                        let mut base =
                            base_config("fig10", 8, k, 1.0, NoiseSpec::dephasing(p, 0.0), 40);
                        base.label = format!("fig10[n=8;k={k};P={}]", format_value(p));
                        sweep(base, vec![axis(AxisParam::DeltaPhase, linspace(0.0, PI, 41))])
                    })
                    .collect();
                panel(format!("fig10_n8_k{k}"), Some(vec![40]), sweeps)
            })
            .collect(),
        // Transport efficiency over (P, t) for phase-flip dephasing
        // (delta = pi), full sink, 8-site ring.
        "fig11" => near_far(8)
            .iter()
            .map(|&k| {
                panel(
                    format!("fig11_n8_k{k}"),
                    None,
                    vec![sweep(
                        base_config("fig11", 8, k, 1.0, NoiseSpec::dephasing(0.0, PI), 50),
                        vec![axis(AxisParam::P, p_grid())],
                    )],
                )
            })
            .collect(),
        // Same channel as fig11, sliced at t = 40, 45, 50.
        "fig12" => near_far(8)
            .iter()
            .map(|&k| {
                panel(
                    format!("fig12_n8_k{k}"),
                    Some(vec![40, 45, 50]),
                    vec![sweep(
                        base_config("fig12", 8, k, 1.0, NoiseSpec::dephasing(0.0, PI), 50),
                        vec![axis(AxisParam::P, p_grid())],
                    )],
                )
            })
            .collect(),
        // Transport efficiency and MID against time under weak depolarizing
        // noise, full sink.
        "fig13" => [(7usize, 1usize), (7, 3), (8, 4), (9, 4)]
            .iter()
            .map(|&(n, k)| {
                let sweeps = [0.0f64, 0.02, 0.06, 0.1]
                    .iter()
                    .map(|&p| {
                        let mut base =
                            base_config("fig13", n, k, 1.0, NoiseSpec::depolarizing(p), 40);
                        base.label = format!("fig13[n={n};k={k};P={}]", format_value(p));
                        base.observables = ObservableFlags { te: true, distribution: false, mid: true };
                        base.mid_every = Some(1);
                        sweep(base, vec![])
                    })
                    .collect();
                panel(format!("fig13_n{n}_k{k}"), None, sweeps)
            })
            .collect(),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(FigureSpec { name: name.to_string(), panels })
}

fn axis_summary(a: &Axis) -> String {
    if a.values.len() <= 8 {
        let vals: Vec<String> = a.values.iter().map(|&v| format_value(v)).collect();
        format!("{}={{{}}}", a.parameter.name(), vals.join(","))
    } else {
        format!(
            "{}=[{}..{};{}]",
            a.parameter.name(),
            format_value(a.values[0]),
            format_value(*a.values.last().expect("axis is nonempty")),
            a.values.len()
        )
    }
}

fn sweep_summary(s: &SweepSpec) -> String {
    let b = &s.base;
    let mut parts = vec![format!(
        "label={} n={} k={} r={} noise={} P={} delta_phase={} t_max={}",
        b.label,
        b.r#loop.n,
        b.r#loop.sink_site,
        format_value(b.r#loop.sink_strength),
        noise_name(b.noise.kind),
        format_value(b.noise.strength),
        format_value(b.noise.dephase_angle),
        b.t_max,
    )];
    if b.observables.mid {
        parts.push(format!("mid_every={}", b.effective_mid_every()));
    }
    for a in &s.axes {
        parts.push(format!("axis {}", axis_summary(a)));
    }
    parts.join(" ")
}

/// The metadata line written above a panel's CSV header.
pub fn panel_comment(preset: &str, p: &FigurePanel) -> String {
    let keep = match &p.keep_t {
        Some(ts) => ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
        None => "all".into(),
    };
    let sweeps: Vec<String> = p.sweeps.iter().map(sweep_summary).collect();
    format!(
        "# preset={} panel={} keep_t={} | {}",
        preset,
        p.file_stem,
        keep,
        sweeps.join(" | ")
    )
}

/// Run every panel of a figure preset.
pub fn run_figure(spec: &FigureSpec, workers: usize) -> Result<Vec<PanelRows>> {
    spec.panels
        .iter()
        .map(|p| {
            let mut rows = Vec::new();
            for s in &p.sweeps {
                rows.extend(run_sweep(s, workers)?);
            }
            if let Some(keep) = &p.keep_t {
                rows.retain(|row| keep.contains(&row.record.t));
            }
            Ok(PanelRows {
                file_stem: p.file_stem.clone(),
                comment: panel_comment(&spec.name, p),
                rows,
            })
        })
        .collect()
}

/// Full textual rendering of every preset grid; pinned by a golden test so
/// the catalog cannot drift silently.
pub fn catalog_description() -> String {
    let mut out = String::new();
    for name in PRESET_NAMES {
        let spec = figure_preset(name).expect("catalog names expand");
        for p in &spec.panels {
            out.push_str(&panel_comment(name, p));
            out.push('\n');
        }
    }
    out
}
