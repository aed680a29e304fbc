//! Finite-dimensional state containers and the linear-algebra helpers the
//! rest of the crate is built on: Hermitian eigendecomposition, von Neumann
//! entropy, partial traces over the coin/position split.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Max allowed deviation from exact Hermiticity, on the worst entry.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues of a density matrix may undershoot zero by at most this much.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as exactly zero in entropies.
pub const EIGENVALUE_ZERO_CUTOFF: f64 = 1e-14;
/// Entropy requires the trace to be within this of one.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Which subsystem `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Coin,
    Position,
}

/// A (possibly subnormalized) pure state: squared norm in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Config("pure state has non-finite amplitudes".into()));
        }
        let n2 = amps.norm_squared();
        if n2 > 1.0 + 1e-12 {
            return Err(Error::NotNormalized { trace: n2 });
        }
        Ok(PureState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// Squared norm; equals the survival probability for a decaying walk.
    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub(crate) fn from_vector_unchecked(amps: CVector) -> Self {
        PureState { amps }
    }
}

/// A (possibly subnormalized) density matrix: Hermitian, positive
/// semidefinite, trace in [0, 1]. The constructor enforces all three.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::BadDimension {
                dim: mat.nrows(),
                reason: format!("matrix is {}x{}, not square", mat.nrows(), mat.ncols()),
            });
        }
        let dev = hermiticity_deviation(&mat);
        if dev > HERMITICITY_TOL {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let tr = mat.trace().re;
        if !(-1e-12..=1.0 + 1e-10).contains(&tr) {
            return Err(Error::NotNormalized { trace: tr });
        }
        // PSD check via the full spectrum; construction is not a hot path.
        let (evals, _) = hermitian_eigendecomposition(&mat)?;
        if let Some(min) = evals.iter().copied().reduce(f64::min) {
            if min < -PSD_TOL {
                return Err(Error::PsdViolation { min_eigenvalue: min });
            }
        }
        Ok(DensityMatrix { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// For evolution steps that preserve the invariants by construction.
    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        debug_assert!(mat.is_square());
        debug_assert!(hermiticity_deviation(&mat) <= 1e-9);
        DensityMatrix { mat }
    }
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues ascending and a
/// deterministic order for ties. Returns `(eigenvalues, eigenvectors)` with
/// eigenvectors in the columns, ordered to match.
///
/// Rejects matrices whose worst-entry deviation from Hermiticity exceeds
/// 1e-10; smaller deviations are symmetrized away before decomposing.
pub fn hermitian_eigendecomposition(m: &CMatrix) -> Result<(DVector<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::BadDimension {
            dim: m.nrows(),
            reason: format!("matrix is {}x{}, not square", m.nrows(), m.ncols()),
        });
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITICITY_TOL {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);

    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    // Stable sort keyed on the eigenvalue; ties keep the solver's order,
    // which is itself deterministic for identical input bytes.
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Von Neumann entropy in nats of a normalized density matrix.
///
/// The trace must be within 1e-10 of one. Eigenvalues at or below 1e-14 are
/// treated as exact zeros (0 ln 0 = 0); anything below -1e-10 is rejected as
/// a positivity violation.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { trace: tr });
    }
    let (evals, _) = hermitian_eigendecomposition(rho.matrix())?;
    entropy_of_spectrum(evals.iter().copied())
}

/// Shared entropy kernel: applies the zero cutoff and positivity check.
pub(crate) fn entropy_of_spectrum(evals: impl Iterator<Item = f64>) -> Result<f64> {
    let mut s = 0.0;
    for lambda in evals {
        if lambda < -PSD_TOL {
            return Err(Error::PsdViolation { min_eigenvalue: lambda });
        }
        if lambda > EIGENVALUE_ZERO_CUTOFF {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s)
}

/// Trace out half of a coin (x) position state of dimension 2n, keeping
/// either the 2x2 coin marginal or the n x n position marginal.
///
/// Basis convention throughout the crate: index `c * n + j` means coin state
/// `c` (0 = up, 1 = down) at site `j`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::BadDimension {
            dim,
            reason: "partial trace needs a coin (x) position state of dimension 2n".into(),
        });
    }
    let n = dim / 2;
    let m = rho.matrix();
    let out = match keep {
        Subsystem::Coin => CMatrix::from_fn(2, 2, |c, cp| {
            (0..n).map(|j| m[(c * n + j, cp * n + j)]).sum()
        }),
        Subsystem::Position => CMatrix::from_fn(n, n, |j, jp| {
            (0..2).map(|c| m[(c * n + j, c * n + jp)]).sum()
        }),
    };
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// |psi><psi| as a density matrix.
pub fn pure_to_density(psi: &PureState) -> DensityMatrix {
    let v = psi.amplitudes();
    DensityMatrix::from_matrix_unchecked(v * v.adjoint())
}
