//! Coined discrete-time quantum walk on a ring with a partially absorbing
//! sink site, optional coin noise (depolarizing or dephasing), and the
//! observables needed to study transport through the sink: transport
//! efficiency, the position distribution, and measurement-induced
//! disturbance as a probe of coin-position quantum correlations.
//!
//! The crate is organized bottom-up:
//!
//! * [`qstate`]: state containers and Hermitian linear algebra,
//! * [`walk`]: the walk operators and the two evolution engines,
//! * [`noise`]: coin channels applied between steps,
//! * [`observables`]: per-step measurements,
//! * [`harness`]: experiments, sweeps, figure presets, CSV/JSON output.

pub mod error;
pub mod harness;
pub mod noise;
pub mod observables;
pub mod qstate;
pub mod walk;

pub use error::{Error, Result};
