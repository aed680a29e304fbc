//! Coin-space noise channels, applied to the whole walk state by acting on
//! the 2x2 block structure of a coin (x) position density matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Depolarizing,
    Dephasing,
}

/// A noise channel acting on the coin before each walk step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Probability that the noise acts this step.
    #[serde(default)]
    pub strength: f64,
    /// Phase angle for the dephasing channel; ignored otherwise.
    #[serde(default)]
    pub dephase_angle: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::none()
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { kind: NoiseKind::None, strength: 0.0, dephase_angle: 0.0 }
    }

    pub fn depolarizing(strength: f64) -> Self {
        NoiseSpec { kind: NoiseKind::Depolarizing, strength, dephase_angle: 0.0 }
    }

    pub fn dephasing(strength: f64, dephase_angle: f64) -> Self {
        NoiseSpec { kind: NoiseKind::Dephasing, strength, dephase_angle }
    }

    pub fn is_none(&self) -> bool {
        self.kind == NoiseKind::None
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::BadProbability { value: self.strength });
        }
        if !self.dephase_angle.is_finite() {
            return Err(Error::Config("dephase_angle must be finite".into()));
        }
        Ok(())
    }
}

fn coin_blocks(rho: &DensityMatrix) -> Result<usize> {
    let dim = rho.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::BadDimension {
            dim,
            reason: "coin channels need a coin (x) position state of dimension 2n".into(),
        });
    }
    Ok(dim / 2)
}

/// Depolarizing coin channel: with probability `p` the coin is hit by a
/// uniform mix of the three Pauli flips. On the position-resolved blocks this
/// mixes the two diagonal blocks toward each other and shrinks the
/// off-diagonal blocks:
///
///   out_00 = (1 - 2p/3) rho_00 + (2p/3) rho_11     (and 11 symmetrically)
///   out_01 = (1 - 4p/3) rho_01                     (and 10 conjugate)
pub fn apply_depolarizing(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability { value: p });
    }
    let n = coin_blocks(rho)?;
    let m = rho.matrix();
    let keep = Complex64::new(1.0 - 2.0 * p / 3.0, 0.0);
    let swap = Complex64::new(2.0 * p / 3.0, 0.0);
    let off = Complex64::new(1.0 - 4.0 * p / 3.0, 0.0);
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for jp in 0..n {
            let r00 = m[(j, jp)];
            let r01 = m[(j, n + jp)];
            let r10 = m[(n + j, jp)];
            let r11 = m[(n + j, n + jp)];
            out[(j, jp)] = keep * r00 + swap * r11;
            out[(n + j, n + jp)] = swap * r00 + keep * r11;
            out[(j, n + jp)] = off * r01;
            out[(n + j, jp)] = off * r10;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Dephasing coin channel: with probability `p` the down component of the
/// coin picks up the phase e^{-i delta}. Diagonal blocks are untouched; the
/// up-down block is scaled by p e^{i delta} + (1 - p), its conjugate for
/// down-up.
pub fn apply_dephasing(rho: &DensityMatrix, p: f64, delta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability { value: p });
    }
    if !delta.is_finite() {
        return Err(Error::Config("dephase_angle must be finite".into()));
    }
    let n = coin_blocks(rho)?;
    let factor = Complex64::from_polar(p, delta) + Complex64::new(1.0 - p, 0.0);
    let mut out = rho.matrix().clone();
    for j in 0..n {
        for jp in 0..n {
            out[(j, n + jp)] *= factor;
            out[(n + j, jp)] *= factor.conj();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Dispatch on the configured channel. `None` is the identity.
pub fn apply_channel(rho: &DensityMatrix, spec: &NoiseSpec) -> Result<DensityMatrix> {
    match spec.kind {
        NoiseKind::None => Ok(rho.clone()),
        NoiseKind::Depolarizing => apply_depolarizing(rho, spec.strength),
        NoiseKind::Dephasing => apply_dephasing(rho, spec.strength, spec.dephase_angle),
    }
}
