//! Shared test helpers: an independent recurrence-based walk oracle (no
//! matrices), a tiny deterministic RNG, and matrix comparison utilities.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use loopwalk::qstate::{CMatrix, CVector, DensityMatrix, PureState};

pub const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent implementation of the same walk, written directly from the
/// per-site amplitude recurrences with wraparound index arithmetic: the up
/// component at site j comes from the coin output at j+1, the down component
/// from j-1, and the sink scales both of its coin amplitudes afterwards.
/// Deliberately matrix-free so it shares no code with the engine under test.
pub struct RecurrenceWalk {
    pub n: usize,
    sink: usize,
    keep_amp: f64,
    b: [[Complex64; 2]; 2],
    pub up: Vec<Complex64>,
    pub dn: Vec<Complex64>,
}

impl RecurrenceWalk {
    /// Symmetric coin, balanced initial coin state at site 0.
    pub fn symmetric(n: usize, sink: usize, r: f64) -> Self {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let mi = c(0.0, -FRAC_1_SQRT_2);
        Self::with_coin(n, sink, r, [[h, mi], [mi, h]], std::f64::consts::FRAC_PI_2, 0.0, 0)
    }

    pub fn with_coin(
        n: usize,
        sink: usize,
        r: f64,
        b: [[Complex64; 2]; 2],
        delta_init: f64,
        eta: f64,
        start: usize,
    ) -> Self {
        let mut up = vec![c(0.0, 0.0); n];
        let mut dn = vec![c(0.0, 0.0); n];
        up[start] = c((delta_init / 2.0).cos(), 0.0);
        dn[start] = Complex64::from_polar((delta_init / 2.0).sin(), eta);
        RecurrenceWalk { n, sink, keep_amp: (1.0 - r).sqrt(), b, up, dn }
    }

    pub fn step(&mut self) {
        let n = self.n;
        let mut up = vec![c(0.0, 0.0); n];
        let mut dn = vec![c(0.0, 0.0); n];
        for j in 0..n {
            let right = (j + 1) % n;
            let left = (j + n - 1) % n;
            up[j] = self.b[0][0] * self.up[right] + self.b[0][1] * self.dn[right];
            dn[j] = self.b[1][0] * self.up[left] + self.b[1][1] * self.dn[left];
        }
        up[self.sink] *= self.keep_amp;
        dn[self.sink] *= self.keep_amp;
        self.up = up;
        self.dn = dn;
    }

    pub fn survival(&self) -> f64 {
        self.up.iter().chain(&self.dn).map(|a| a.norm_sqr()).sum()
    }

    pub fn te(&self) -> f64 {
        1.0 - self.survival()
    }

    pub fn distribution(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.up[j].norm_sqr() + self.dn[j].norm_sqr()).collect()
    }

    /// Coin-major amplitude vector matching the engine's basis layout.
    pub fn amplitudes(&self) -> CVector {
        CVector::from_iterator(2 * self.n, self.up.iter().chain(&self.dn).copied())
    }
}

/// splitmix64: tiny, deterministic, good enough for test sampling.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.f64()
    }

    pub fn usize_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn complex(&mut self) -> Complex64 {
        c(self.range(-1.0, 1.0), self.range(-1.0, 1.0))
    }
}

pub fn random_hermitian(rng: &mut TestRng, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| rng.complex());
    (&a + a.adjoint()).scale(0.5)
}

/// Random density matrix with the given trace (default callers pass 1.0).
pub fn random_density(rng: &mut TestRng, dim: usize, trace: f64) -> DensityMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| rng.complex());
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.map(|z| z * (trace / tr))).expect("A A^dagger is a valid state")
}

pub fn random_pure(rng: &mut TestRng, dim: usize) -> PureState {
    let v = CVector::from_fn(dim, |_, _| rng.complex());
    let norm = v.norm();
    PureState::new(v.map(|z| z / norm)).expect("normalized vector is a valid state")
}

/// Max entrywise absolute difference.
pub fn mat_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "comparing different shapes");
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn vec_diff(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len(), "comparing different lengths");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn identity(dim: usize) -> CMatrix {
    DMatrix::identity(dim, dim)
}
