//! What we measure along a run: transport efficiency, the position
//! distribution, and measurement-induced disturbance (MID), a projective
//! measure of quantum correlations between coin and position.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{
    entropy_of_spectrum, hermitian_eigendecomposition, partial_trace, pure_to_density, CMatrix,
    DensityMatrix, PureState, Subsystem,
};

/// States with trace at or below this have effectively been fully absorbed;
/// normalizing them would amplify noise, so MID reports them as vanished.
pub const TRACE_FLOOR: f64 = 1e-12;

/// Relative gap below which neighboring marginal eigenvalues are treated as
/// one degenerate block when building the MID measurement.
pub const DEGENERACY_MERGE_TOL: f64 = 1e-10;

/// One recorded step of an evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub t: usize,
    /// Probability absorbed by the sink so far: 1 - trace, clamped to [0, 1].
    pub te: f64,
    /// Survival probability.
    pub trace: f64,
    /// Per-site occupation, subnormalized (sums to the trace).
    pub distribution: Option<Vec<f64>>,
    /// Quantum share of coin-position correlations, when requested and the
    /// state has not vanished.
    pub mid: Option<f64>,
    /// True when MID was requested at this step but the trace was below the
    /// floor, so there was no state left to measure.
    pub mid_vanished: bool,
}

/// Which observables [`crate::walk::evolve`] records, and how often MID runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordFlags {
    pub te: bool,
    pub distribution: bool,
    pub mid: bool,
    /// MID is evaluated at steps where `t % mid_every == 0`.
    pub mid_every: usize,
}

impl Default for RecordFlags {
    fn default() -> Self {
        RecordFlags { te: true, distribution: false, mid: false, mid_every: 1 }
    }
}

impl RecordFlags {
    fn mid_due(&self, t: usize) -> bool {
        self.mid && t % self.mid_every.max(1) == 0
    }
}

/// Fraction of the initial probability the sink has absorbed.
pub fn transport_efficiency(rho: &DensityMatrix) -> f64 {
    (1.0 - rho.trace()).clamp(0.0, 1.0)
}

/// Site occupation probabilities p(j) = rho[j,j] + rho[n+j,n+j], summing to
/// the (possibly subnormalized) trace.
pub fn position_distribution(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let dim = rho.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::BadDimension {
            dim,
            reason: "position distribution needs a coin (x) position state".into(),
        });
    }
    let n = dim / 2;
    let m = rho.matrix();
    Ok((0..n).map(|j| m[(j, j)].re + m[(n + j, n + j)].re).collect())
}

fn normalized(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let tr = rho.trace();
    if tr <= TRACE_FLOOR {
        return Err(Error::VanishedState { trace: tr, floor: TRACE_FLOOR });
    }
    Ok(DensityMatrix::from_matrix_unchecked(
        rho.matrix().map(|z| z / tr),
    ))
}

fn entropy_of(m: &CMatrix) -> Result<f64> {
    let (evals, _) = hermitian_eigendecomposition(m)?;
    entropy_of_spectrum(evals.iter().copied())
}

fn mutual_information_normalized(rho: &DensityMatrix) -> Result<f64> {
    let s_pos = entropy_of(partial_trace(rho, Subsystem::Position)?.matrix())?;
    let s_coin = entropy_of(partial_trace(rho, Subsystem::Coin)?.matrix())?;
    let s_full = entropy_of(rho.matrix())?;
    Ok((s_pos + s_coin - s_full).max(0.0))
}

/// Coin-position mutual information in nats. The state is normalized
/// internally; a trace at or below 1e-12 is reported as a vanished state.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    mutual_information_normalized(&normalized(rho)?)
}

/// Eigenprojectors of a Hermitian marginal, with near-degenerate eigenvalues
/// (relative gap below 1e-10) merged into a single projector so the
/// measurement does not depend on an arbitrary basis inside the block.
fn merged_eigenprojectors(m: &CMatrix) -> Result<Vec<CMatrix>> {
    let (evals, evecs) = hermitian_eigendecomposition(m)?;
    let d = evals.len();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d {
            let scale = 1.0f64.max(evals[end - 1].abs()).max(evals[end].abs());
            if evals[end] - evals[end - 1] < DEGENERACY_MERGE_TOL * scale {
                end += 1;
            } else {
                break;
            }
        }
        let block = evecs.columns(start, end - start);
        projectors.push(&block * block.adjoint());
        start = end;
    }
    Ok(projectors)
}

/// Dephase a normalized state in the product eigenbasis of its own marginals:
/// chi = sum_ab (Pb (x) Pa) rho (Pb (x) Pa), with Pa over position and Pb
/// over the coin. Leaves both marginals unchanged and is idempotent.
pub fn mid_projection(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { trace: tr });
    }
    let dim = rho.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::BadDimension {
            dim,
            reason: "MID needs a coin (x) position state".into(),
        });
    }
    let coin_projs = merged_eigenprojectors(partial_trace(rho, Subsystem::Coin)?.matrix())?;
    let pos_projs = merged_eigenprojectors(partial_trace(rho, Subsystem::Position)?.matrix())?;
    let mut chi = CMatrix::zeros(dim, dim);
    for pb in &coin_projs {
        for pa in &pos_projs {
            let p = pb.kronecker(pa);
            chi += &p * rho.matrix() * &p;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(chi))
}

/// Measurement-induced disturbance: mutual information lost when the state
/// is dephased in its marginal eigenbases. Normalizes internally; traces at
/// or below 1e-12 surface as [`Error::VanishedState`]. Tiny negative values
/// from roundoff are clamped to zero.
pub fn mid(rho: &DensityMatrix) -> Result<f64> {
    let norm = normalized(rho)?;
    let total = mutual_information_normalized(&norm)?;
    let classical = mutual_information_normalized(&mid_projection(&norm)?)?;
    let q = total - classical;
    debug_assert!(q > -1e-8, "MID fell below the roundoff floor: {q}");
    Ok(q.max(0.0))
}

/// Like [`mid`], but reports a vanished state as `(0.0, true)` instead of an
/// error so long evolutions can keep recording past full absorption.
pub fn mid_or_vanished(rho: &DensityMatrix) -> Result<(f64, bool)> {
    match mid(rho) {
        Ok(q) => Ok((q, false)),
        Err(Error::VanishedState { .. }) => Ok((0.0, true)),
        Err(e) => Err(e),
    }
}

/// Assemble the record for one step of the density engine.
pub(crate) fn record(t: usize, rho: &DensityMatrix, flags: &RecordFlags) -> Result<ResultRecord> {
    let (mid_value, mid_vanished) = if flags.mid_due(t) {
        let (q, vanished) = mid_or_vanished(rho)?;
        (if vanished { None } else { Some(q) }, vanished)
    } else {
        (None, false)
    };
    Ok(ResultRecord {
        t,
        te: transport_efficiency(rho),
        trace: rho.trace(),
        distribution: if flags.distribution { Some(position_distribution(rho)?) } else { None },
        mid: mid_value,
        mid_vanished,
    })
}

/// Assemble the record for one step of the pure-state engine.
pub(crate) fn record_pure(t: usize, psi: &PureState, flags: &RecordFlags) -> Result<ResultRecord> {
    let trace = psi.norm_squared();
    let dim = psi.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::BadDimension {
            dim,
            reason: "walk states live on coin (x) position".into(),
        });
    }
    let n = dim / 2;
    let distribution = if flags.distribution {
        let a = psi.amplitudes();
        Some((0..n).map(|j| a[j].norm_sqr() + a[n + j].norm_sqr()).collect())
    } else {
        None
    };
    let (mid_value, mid_vanished) = if flags.mid_due(t) {
        let (q, vanished) = mid_or_vanished(&pure_to_density(psi))?;
        (if vanished { None } else { Some(q) }, vanished)
    } else {
        (None, false)
    };
    Ok(ResultRecord {
        t,
        te: (1.0 - trace).clamp(0.0, 1.0),
        trace,
        distribution,
        mid: mid_value,
        mid_vanished,
    })
}
