//! Discrete-time coined quantum walk on an n-site cycle with one partially
//! absorbing site.
//!
//! Basis index `c * n + j`: coin `c` (0 = up, 1 = down), site `j`. One step
//! is coin toss then conditional shift, with the up component moving from
//! `j` to `j - 1 (mod n)` and the down component from `j` to `j + 1 (mod n)`.
//! The sink at site `k` scales both coin amplitudes there by `sqrt(1 - r)`
//! after the unitary part; for a density matrix a noise channel acts first.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::noise::{apply_channel, NoiseSpec};
use crate::observables::{self, RecordFlags, ResultRecord};
use crate::qstate::{pure_to_density, CMatrix, CVector, DensityMatrix, PureState};

/// Coin operator choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoinSpec {
    /// [[cos t, sin t], [-sin t, cos t]]
    Rotation { theta: f64 },
    /// (1/sqrt 2) [[1, -i], [-i, 1]]; balanced and symmetric in both coin states.
    SymmetricDft,
}

impl Default for CoinSpec {
    fn default() -> Self {
        CoinSpec::SymmetricDft
    }
}

/// Initial coin superposition cos(d/2)|up> + e^{i eta} sin(d/2)|down>,
/// localized at `start_site`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialStateSpec {
    pub delta_init: f64,
    pub eta: f64,
    pub start_site: usize,
}

impl Default for InitialStateSpec {
    fn default() -> Self {
        InitialStateSpec { delta_init: FRAC_PI_2, eta: 0.0, start_site: 0 }
    }
}

/// Full description of one walk: geometry, sink, coin, initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub n: usize,
    pub sink_site: usize,
    pub sink_strength: f64,
    #[serde(default)]
    pub coin: CoinSpec,
    #[serde(default)]
    pub initial: InitialStateSpec,
}

impl LoopConfig {
    /// Cycle of `n` sites, sink of strength `r` at site `k`, symmetric coin
    /// and the balanced initial coin state at site 0.
    pub fn new(n: usize, sink_site: usize, sink_strength: f64) -> Self {
        LoopConfig {
            n,
            sink_site,
            sink_strength,
            coin: CoinSpec::default(),
            initial: InitialStateSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::BadDimension {
                dim: self.n,
                reason: "cycle needs at least 3 sites".into(),
            });
        }
        if self.sink_site >= self.n {
            return Err(Error::Config(format!(
                "sink_site {} out of range for n = {}",
                self.sink_site, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.sink_strength) {
            return Err(Error::BadProbability { value: self.sink_strength });
        }
        if let CoinSpec::Rotation { theta } = self.coin {
            if !theta.is_finite() {
                return Err(Error::Config("coin angle theta must be finite".into()));
            }
        }
        if !self.initial.delta_init.is_finite() || !self.initial.eta.is_finite() {
            return Err(Error::Config("initial state angles must be finite".into()));
        }
        if self.initial.start_site >= self.n {
            return Err(Error::Config(format!(
                "start_site {} out of range for n = {}",
                self.initial.start_site, self.n
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }
}

/// The 2x2 coin matrix.
pub fn build_coin(spec: &CoinSpec) -> CMatrix {
    match *spec {
        CoinSpec::Rotation { theta } => {
            let (s, c) = theta.sin_cos();
            CMatrix::from_row_slice(2, 2, &[
                Complex64::new(c, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(c, 0.0),
            ])
        }
        CoinSpec::SymmetricDft => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mi = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
            CMatrix::from_row_slice(2, 2, &[h, mi, mi, h])
        }
    }
}

/// Conditional shift on 2n dimensions: up moves j -> j-1, down moves j -> j+1,
/// both mod n.
pub fn build_shift(n: usize) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let mut s = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        s[((j + n - 1) % n, j)] = one;
        s[(n + (j + 1) % n, n + j)] = one;
    }
    s
}

/// One unitary walk step W = S (B (x) I_n).
pub fn build_walk(config: &LoopConfig) -> Result<CMatrix> {
    config.validate()?;
    let b = build_coin(&config.coin);
    let eye = CMatrix::identity(config.n, config.n);
    Ok(build_shift(config.n) * b.kronecker(&eye))
}

/// Diagonal sink factor: sqrt(1 - r) on both coin components of site `k`,
/// identity elsewhere. Returned as the full 2n x 2n matrix.
pub fn build_sink(n: usize, sink_site: usize, sink_strength: f64) -> Result<CMatrix> {
    let diag = sink_diagonal(n, sink_site, sink_strength)?;
    Ok(CMatrix::from_diagonal(&diag.map(|x| Complex64::new(x, 0.0))))
}

fn sink_diagonal(n: usize, sink_site: usize, sink_strength: f64) -> Result<DVector<f64>> {
    if sink_site >= n {
        return Err(Error::Config(format!(
            "sink_site {sink_site} out of range for n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&sink_strength) {
        return Err(Error::BadProbability { value: sink_strength });
    }
    let amp = (1.0 - sink_strength).sqrt();
    let mut d = DVector::from_element(2 * n, 1.0);
    d[sink_site] = amp;
    d[n + sink_site] = amp;
    Ok(d)
}

/// The configured initial state: a coin superposition at `start_site`.
pub fn initial_state(config: &LoopConfig) -> Result<PureState> {
    config.validate()?;
    let n = config.n;
    let init = &config.initial;
    let mut v = CVector::zeros(2 * n);
    let half = init.delta_init / 2.0;
    v[init.start_site] = Complex64::new(half.cos(), 0.0);
    v[n + init.start_site] = Complex64::from_polar(half.sin(), init.eta);
    Ok(PureState::from_vector_unchecked(v))
}

/// Precomputed operators for repeated stepping of one configuration.
pub struct StepOperators {
    n: usize,
    walk: CMatrix,
    sink_amp: DVector<f64>,
}

impl StepOperators {
    pub fn new(config: &LoopConfig) -> Result<Self> {
        let walk = build_walk(config)?;
        let sink_amp = sink_diagonal(config.n, config.sink_site, config.sink_strength)?;
        Ok(StepOperators { n: config.n, walk, sink_amp })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn walk_matrix(&self) -> &CMatrix {
        &self.walk
    }

    /// W then sink.
    pub fn apply_pure(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: psi.dim() });
        }
        let mut v = &self.walk * psi.amplitudes();
        for i in 0..v.len() {
            v[i] *= Complex64::new(self.sink_amp[i], 0.0);
        }
        Ok(PureState::from_vector_unchecked(v))
    }

    /// Noise channel, then W rho W^dagger, then the sink on both sides.
    pub fn apply_density(&self, rho: &DensityMatrix, noise: &NoiseSpec) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: rho.dim() });
        }
        let noisy = apply_channel(rho, noise)?;
        let mut m = &self.walk * noisy.matrix() * self.walk.adjoint();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let f = self.sink_amp[i] * self.sink_amp[j];
                if f != 1.0 {
                    m[(i, j)] *= Complex64::new(f, 0.0);
                }
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }
}

/// One noiseless step of a pure state. Builds the operators each call; use
/// [`StepOperators`] when stepping in a loop.
pub fn step_pure(psi: &PureState, config: &LoopConfig) -> Result<PureState> {
    StepOperators::new(config)?.apply_pure(psi)
}

/// One step of a density matrix, with the noise channel applied first.
pub fn step_density(
    rho: &DensityMatrix,
    config: &LoopConfig,
    noise: &NoiseSpec,
) -> Result<DensityMatrix> {
    StepOperators::new(config)?.apply_density(rho, noise)
}

/// Run the density-matrix engine for `t_max` steps, recording the requested
/// observables at every step, including the initial state at t = 0.
pub fn evolve(
    config: &LoopConfig,
    noise: &NoiseSpec,
    t_max: usize,
    flags: &RecordFlags,
) -> Result<Vec<ResultRecord>> {
    noise.validate()?;
    let ops = StepOperators::new(config)?;
    let mut rho = pure_to_density(&initial_state(config)?);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        out.push(observables::record(t, &rho, flags)?);
        if t < t_max {
            rho = ops.apply_density(&rho, noise)?;
        }
    }
    Ok(out)
}

/// Pure-state engine: same records as [`evolve`] but propagating amplitudes.
/// Only defined without noise; rejects any other channel.
pub fn evolve_pure(
    config: &LoopConfig,
    noise: &NoiseSpec,
    t_max: usize,
    flags: &RecordFlags,
) -> Result<Vec<ResultRecord>> {
    noise.validate()?;
    if !noise.is_none() {
        return Err(Error::Config(
            "the pure-state engine cannot apply noise channels; use the density engine".into(),
        ));
    }
    let ops = StepOperators::new(config)?;
    let mut psi = initial_state(config)?;
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        out.push(observables::record_pure(t, &psi, flags)?);
        if t < t_max {
            psi = ops.apply_pure(&psi)?;
        }
    }
    Ok(out)
}
