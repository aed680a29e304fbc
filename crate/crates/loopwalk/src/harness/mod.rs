//! Experiment orchestration: single runs, parameter sweeps over cartesian
//! axis grids, figure presets, and serialization of the results.

pub mod output;
pub mod presets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseSpec};
use crate::observables::{RecordFlags, ResultRecord};
use crate::walk::{self, CoinSpec, LoopConfig};

/// Which observables to record on each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservableFlags {
    pub te: bool,
    pub distribution: bool,
    pub mid: bool,
}

impl Default for ObservableFlags {
    fn default() -> Self {
        ObservableFlags { te: true, distribution: false, mid: false }
    }
}

/// One fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub r#loop: LoopConfig,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub t_max: usize,
    #[serde(default)]
    pub observables: ObservableFlags,
    /// Evaluate MID only at steps divisible by this. Unset picks 1 for rings
    /// up to 21 sites and 5 beyond that, where the eigensolves get costly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mid_every: Option<usize>,
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    "run".into()
}

impl ExperimentConfig {
    pub fn new(r#loop: LoopConfig, noise: NoiseSpec, t_max: usize) -> Self {
        ExperimentConfig {
            r#loop,
            noise,
            t_max,
            observables: ObservableFlags::default(),
            mid_every: None,
            label: default_label(),
        }
    }

    pub fn effective_mid_every(&self) -> usize {
        self.mid_every
            .unwrap_or(if self.r#loop.n <= 21 { 1 } else { 5 })
            .max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.r#loop.validate()?;
        self.noise.validate()?;
        if self.mid_every == Some(0) {
            return Err(Error::Config("mid_every must be at least 1".into()));
        }
        Ok(())
    }

    fn record_flags(&self) -> RecordFlags {
        RecordFlags {
            te: self.observables.te,
            distribution: self.observables.distribution,
            mid: self.observables.mid,
            mid_every: self.effective_mid_every(),
        }
    }
}

/// Which state representation propagates the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Density,
    Statevector,
}

/// Run one experiment with the density-matrix engine.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    run_experiment_with_engine(config, Engine::Density)
}

/// Run one experiment with an explicit engine choice. The pure-state engine
/// is only valid for noiseless configurations.
pub fn run_experiment_with_engine(
    config: &ExperimentConfig,
    engine: Engine,
) -> Result<Vec<ResultRecord>> {
    let wrap = |e: Error| Error::labeled(config.label.clone(), e);
    config.validate().map_err(wrap)?;
    let flags = config.record_flags();
    match engine {
        Engine::Density => {
            walk::evolve(&config.r#loop, &config.noise, config.t_max, &flags).map_err(wrap)
        }
        Engine::Statevector => {
            walk::evolve_pure(&config.r#loop, &config.noise, config.t_max, &flags).map_err(wrap)
        }
    }
}

/// A sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisParam {
    #[serde(rename = "n")]
    N,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "r")]
    R,
    #[serde(rename = "P")]
    P,
    #[serde(rename = "delta_phase")]
    DeltaPhase,
    #[serde(rename = "theta")]
    Theta,
    #[serde(rename = "delta_init")]
    DeltaInit,
    #[serde(rename = "eta")]
    Eta,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::N => "n",
            AxisParam::K => "k",
            AxisParam::R => "r",
            AxisParam::P => "P",
            AxisParam::DeltaPhase => "delta_phase",
            AxisParam::Theta => "theta",
            AxisParam::DeltaInit => "delta_init",
            AxisParam::Eta => "eta",
        }
    }
}

/// One sweep axis: the parameter and the values it takes, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub parameter: AxisParam,
    pub values: Vec<f64>,
}

/// A cartesian sweep: every combination of axis values applied to a base
/// configuration. The first axis varies slowest. No axes means a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    #[serde(default)]
    pub axes: Vec<Axis>,
}

/// One output row: the resolved parameters of a grid point plus one recorded
/// step.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub noise: NoiseKind,
    pub p: f64,
    pub delta_phase: f64,
    /// Absent for the built-in symmetric coin, which has no angle.
    pub theta: Option<f64>,
    pub delta_init: f64,
    pub eta: f64,
    pub record: ResultRecord,
}

impl SweepRow {
    fn from_record(config: &ExperimentConfig, record: ResultRecord) -> Self {
        SweepRow {
            label: config.label.clone(),
            n: config.r#loop.n,
            k: config.r#loop.sink_site,
            r: config.r#loop.sink_strength,
            noise: config.noise.kind,
            p: config.noise.strength,
            delta_phase: config.noise.dephase_angle,
            theta: match config.r#loop.coin {
                CoinSpec::Rotation { theta } => Some(theta),
                CoinSpec::SymmetricDft => None,
            },
            delta_init: config.r#loop.initial.delta_init,
            eta: config.r#loop.initial.eta,
            record,
        }
    }
}

fn usize_axis_value(param: AxisParam, v: f64) -> Result<usize> {
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
        return Err(Error::Config(format!(
            "axis {} value {v} is not a nonnegative integer",
            param.name()
        )));
    }
    Ok(v as usize)
}

fn apply_axis_value(config: &mut ExperimentConfig, param: AxisParam, v: f64) -> Result<()> {
    match param {
        AxisParam::N => config.r#loop.n = usize_axis_value(param, v)?,
        AxisParam::K => config.r#loop.sink_site = usize_axis_value(param, v)?,
        AxisParam::R => config.r#loop.sink_strength = v,
        AxisParam::P => config.noise.strength = v,
        AxisParam::DeltaPhase => config.noise.dephase_angle = v,
        AxisParam::Theta => config.r#loop.coin = CoinSpec::Rotation { theta: v },
        AxisParam::DeltaInit => config.r#loop.initial.delta_init = v,
        AxisParam::Eta => config.r#loop.initial.eta = v,
    }
    Ok(())
}

fn describe_point(spec: &SweepSpec, choice: &[usize]) -> String {
    spec.axes
        .iter()
        .zip(choice)
        .map(|(axis, &i)| format!("{}={}", axis.parameter.name(), output::format_value(axis.values[i])))
        .collect::<Vec<_>>()
        .join(";")
}

/// Expand the cartesian grid into fully resolved experiment configs, first
/// axis slowest. Every point is validated before anything runs.
pub fn expand_grid(spec: &SweepSpec) -> Result<Vec<ExperimentConfig>> {
    for axis in &spec.axes {
        if axis.values.is_empty() {
            return Err(Error::Config(format!(
                "axis {} has no values",
                axis.parameter.name()
            )));
        }
    }
    let total: usize = spec.axes.iter().map(|a| a.values.len()).product();
    let mut grid = Vec::with_capacity(total);
    let mut choice = vec![0usize; spec.axes.len()];
    for flat in 0..total {
        let mut rem = flat;
        for ai in (0..spec.axes.len()).rev() {
            let len = spec.axes[ai].values.len();
            choice[ai] = rem % len;
            rem /= len;
        }
        let mut config = spec.base.clone();
        for (axis, &i) in spec.axes.iter().zip(&choice) {
            apply_axis_value(&mut config, axis.parameter, axis.values[i])
                .map_err(|e| Error::labeled(format!("{} [{}]", config.label, describe_point(spec, &choice)), e))?;
        }
        config
            .validate()
            .map_err(|e| Error::labeled(format!("{} [{}]", config.label, describe_point(spec, &choice)), e))?;
        grid.push(config);
    }
    Ok(grid)
}

/// Pair each record of one experiment with its resolved parameters, giving
/// the same row shape sweeps produce.
pub fn rows_from_records(config: &ExperimentConfig, records: Vec<ResultRecord>) -> Vec<SweepRow> {
    records
        .into_iter()
        .map(|rec| SweepRow::from_record(config, rec))
        .collect()
}

/// Write rows to `path` in the given format, plus a sibling distribution
/// file when any row recorded one.
pub fn write_results(
    rows: &[SweepRow],
    format: output::OutputFormat,
    path: &std::path::Path,
) -> Result<output::WriteReport> {
    output::write_rows_to_path(path, format, rows, None)
}

/// Run every grid point of a sweep on up to `workers` threads. Output order
/// and content are independent of the worker count: points are laid out in
/// grid order up front and stitched back by index.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    let grid = expand_grid(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("could not build a {workers}-thread pool: {e}")))?;
    let per_point: Vec<Result<Vec<SweepRow>>> = pool.install(|| {
        grid.par_iter()
            .map(|config| {
                let records = run_experiment(config)?;
                Ok(records
                    .into_iter()
                    .map(|rec| SweepRow::from_record(config, rec))
                    .collect())
            })
            .collect()
    });
    let mut rows = Vec::new();
    for point in per_point {
        rows.extend(point?);
    }
    Ok(rows)
}
