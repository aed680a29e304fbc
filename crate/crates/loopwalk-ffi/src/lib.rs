//! C ABI over the loopwalk engine: build an experiment, run it, read the
//! per-step observables back out.
//!
//! Conventions: every function is null-safe and returns either a status code
//! or null on failure; `lw_last_error` retrieves a thread-local message for
//! the most recent failure. Handles are created and released by this library
//! only (`lw_experiment_new`/`lw_experiment_free`, run/`lw_results_free`).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use loopwalk::error::Error;
use loopwalk::harness::{run_experiment, ExperimentConfig};
use loopwalk::noise::{NoiseKind, NoiseSpec};
use loopwalk::observables::ResultRecord;
use loopwalk::walk::{CoinSpec, InitialStateSpec, LoopConfig};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was out of range or the configuration is inconsistent.
    InvalidArgument = 2,
    /// A numerical contract was violated while running.
    Numerical = 3,
    /// The state's trace fell below the floor, so the value does not exist.
    Vanished = 4,
    /// The requested observable was not recorded at this step.
    Unavailable = 5,
    /// The engine panicked; state may be lost but the process survives.
    Panic = 6,
}

/// Coin noise channel selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwNoiseKind {
    None = 0,
    Depolarizing = 1,
    Dephasing = 2,
}

/// An experiment being configured. Opaque.
pub struct LwExperiment {
    config: ExperimentConfig,
}

/// Records from one finished run. Opaque.
pub struct LwResults {
    sites: usize,
    records: Vec<ResultRecord>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").expect("empty is valid"));
}

fn set_last_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes removed");
    });
}

fn status_for(err: &Error) -> LwStatus {
    match err {
        Error::BadDimension { .. }
        | Error::DimensionMismatch { .. }
        | Error::BadProbability { .. }
        | Error::UnknownPreset(_)
        | Error::Config(_) => LwStatus::InvalidArgument,
        Error::NonHermitianInput { .. }
        | Error::NotNormalized { .. }
        | Error::PsdViolation { .. }
        | Error::Io { .. } => LwStatus::Numerical,
        Error::VanishedState { .. } => LwStatus::Vanished,
        Error::Labeled { source, .. } => status_for(source),
    }
}

fn fail(err: &Error) -> LwStatus {
    set_last_error(&err.to_string());
    status_for(err)
}

fn guard<F: FnOnce() -> LwStatus>(f: F) -> LwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("panic inside loopwalk");
            LwStatus::Panic
        }
    }
}

/// Copy the last error message (NUL-terminated) into `buf`. Returns the full
/// length of the message including the NUL, regardless of how much fit; a
/// null or empty buffer just queries the needed size.
#[no_mangle]
pub unsafe extern "C" fn lw_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // Whatever happened, the copied prefix must stay a C string.
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Create an experiment: `n` ring sites, sink of strength `sink_strength`
/// at `sink_site`, symmetric coin, balanced initial coin state at site 0,
/// no noise. Returns null (see `lw_last_error`) when the parameters are
/// invalid. Free with `lw_experiment_free`.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_new(
    n: usize,
    sink_site: usize,
    sink_strength: f64,
) -> *mut LwExperiment {
    let result = catch_unwind(|| {
        let config =
            ExperimentConfig::new(LoopConfig::new(n, sink_site, sink_strength), NoiseSpec::none(), 0);
        match config.validate() {
            Ok(()) => Box::into_raw(Box::new(LwExperiment { config })),
            Err(e) => {
                fail(&e);
                std::ptr::null_mut()
            }
        }
    });
    result.unwrap_or_else(|_| {
        set_last_error("panic inside loopwalk");
        std::ptr::null_mut()
    })
}

/// Release an experiment handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_free(exp: *mut LwExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

unsafe fn with_experiment<F>(exp: *mut LwExperiment, f: F) -> LwStatus
where
    F: FnOnce(&mut ExperimentConfig) -> LwStatus,
{
    if exp.is_null() {
        set_last_error("experiment handle is null");
        return LwStatus::NullPointer;
    }
    guard(AssertUnwindSafe(|| f(&mut (*exp).config)))
}

fn revalidated(config: &mut ExperimentConfig, previous: ExperimentConfig) -> LwStatus {
    match config.validate() {
        Ok(()) => LwStatus::Ok,
        Err(e) => {
            *config = previous;
            fail(&e)
        }
    }
}

/// Use the rotation coin with angle `theta`.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_set_coin_rotation(
    exp: *mut LwExperiment,
    theta: f64,
) -> LwStatus {
    with_experiment(exp, |config| {
        let previous = config.clone();
        config.r#loop.coin = CoinSpec::Rotation { theta };
        revalidated(config, previous)
    })
}

/// Use the built-in symmetric coin (the default).
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_set_coin_symmetric(exp: *mut LwExperiment) -> LwStatus {
    with_experiment(exp, |config| {
        config.r#loop.coin = CoinSpec::SymmetricDft;
        LwStatus::Ok
    })
}

/// Set the initial coin state cos(delta/2)|up> + e^{i eta} sin(delta/2)|down>
/// at `start_site`.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_set_initial(
    exp: *mut LwExperiment,
    delta_init: f64,
    eta: f64,
    start_site: usize,
) -> LwStatus {
    with_experiment(exp, |config| {
        let previous = config.clone();
        config.r#loop.initial = InitialStateSpec { delta_init, eta, start_site };
        revalidated(config, previous)
    })
}

/// Select the coin noise channel applied before each step.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_set_noise(
    exp: *mut LwExperiment,
    kind: LwNoiseKind,
    strength: f64,
    dephase_angle: f64,
) -> LwStatus {
    with_experiment(exp, |config| {
        let previous = config.clone();
        config.noise = NoiseSpec {
            kind: match kind {
                LwNoiseKind::None => NoiseKind::None,
                LwNoiseKind::Depolarizing => NoiseKind::Depolarizing,
                LwNoiseKind::Dephasing => NoiseKind::Dephasing,
            },
            strength,
            dephase_angle,
        };
        revalidated(config, previous)
    })
}

/// Record the per-site occupation at every step.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_record_distribution(
    exp: *mut LwExperiment,
    enable: bool,
) -> LwStatus {
    with_experiment(exp, |config| {
        config.observables.distribution = enable;
        LwStatus::Ok
    })
}

/// Record MID at every step divisible by `every` (0 means every step).
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_record_mid(
    exp: *mut LwExperiment,
    enable: bool,
    every: usize,
) -> LwStatus {
    with_experiment(exp, |config| {
        config.observables.mid = enable;
        config.mid_every = Some(every.max(1));
        LwStatus::Ok
    })
}

/// Evolve for `t_max` steps with the density-matrix engine. Returns records
/// for steps 0..=t_max, or null on failure (see `lw_last_error`). Free with
/// `lw_results_free`. The experiment handle stays valid and reusable.
#[no_mangle]
pub unsafe extern "C" fn lw_experiment_run(
    exp: *mut LwExperiment,
    t_max: usize,
) -> *mut LwResults {
    if exp.is_null() {
        set_last_error("experiment handle is null");
        return std::ptr::null_mut();
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let mut config = (*exp).config.clone();
        config.t_max = t_max;
        match run_experiment(&config) {
            Ok(records) => Box::into_raw(Box::new(LwResults {
                sites: config.r#loop.n,
                records,
            })),
            Err(e) => {
                fail(&e);
                std::ptr::null_mut()
            }
        }
    }));
    result.unwrap_or_else(|_| {
        set_last_error("panic inside loopwalk");
        std::ptr::null_mut()
    })
}

/// Release a results handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lw_results_free(res: *mut LwResults) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Number of recorded steps (t_max + 1), or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lw_results_len(res: *const LwResults) -> usize {
    if res.is_null() {
        0
    } else {
        (&*res).records.len()
    }
}

/// Ring size the results were produced with, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lw_results_sites(res: *const LwResults) -> usize {
    if res.is_null() {
        0
    } else {
        (*res).sites
    }
}

unsafe fn with_record<F>(res: *const LwResults, t: usize, out_null: bool, f: F) -> LwStatus
where
    F: FnOnce(&ResultRecord) -> LwStatus,
{
    if res.is_null() || out_null {
        set_last_error("null pointer argument");
        return LwStatus::NullPointer;
    }
    let results = &*res;
    match results.records.get(t) {
        Some(record) => f(record),
        None => {
            set_last_error(&format!(
                "step {t} out of range; {} steps recorded",
                results.records.len()
            ));
            LwStatus::InvalidArgument
        }
    }
}

/// Transport efficiency at step `t`.
#[no_mangle]
pub unsafe extern "C" fn lw_results_te(
    res: *const LwResults,
    t: usize,
    out: *mut f64,
) -> LwStatus {
    with_record(res, t, out.is_null(), |record| {
        *out = record.te;
        LwStatus::Ok
    })
}

/// Survival probability (state trace) at step `t`.
#[no_mangle]
pub unsafe extern "C" fn lw_results_trace(
    res: *const LwResults,
    t: usize,
    out: *mut f64,
) -> LwStatus {
    with_record(res, t, out.is_null(), |record| {
        *out = record.trace;
        LwStatus::Ok
    })
}

/// MID at step `t`. `LW_STATUS_UNAVAILABLE` when MID was not recorded at
/// this step, `LW_STATUS_VANISHED` when the state had been fully absorbed.
#[no_mangle]
pub unsafe extern "C" fn lw_results_mid(
    res: *const LwResults,
    t: usize,
    out: *mut f64,
) -> LwStatus {
    with_record(res, t, out.is_null(), |record| match record.mid {
        Some(q) => {
            *out = q;
            LwStatus::Ok
        }
        None if record.mid_vanished => {
            set_last_error("state vanished; MID undefined at this step");
            LwStatus::Vanished
        }
        None => {
            set_last_error("MID was not recorded at this step");
            LwStatus::Unavailable
        }
    })
}

/// Copy the per-site occupation at step `t` into `buf` (capacity `len`,
/// which must be at least the ring size).
#[no_mangle]
pub unsafe extern "C" fn lw_results_distribution(
    res: *const LwResults,
    t: usize,
    buf: *mut f64,
    len: usize,
) -> LwStatus {
    if res.is_null() || buf.is_null() {
        set_last_error("null pointer argument");
        return LwStatus::NullPointer;
    }
    let sites = (*res).sites;
    with_record(res, t, false, |record| match &record.distribution {
        Some(dist) => {
            if len < sites {
                set_last_error(&format!("buffer holds {len} values, need {sites}"));
                return LwStatus::InvalidArgument;
            }
            std::ptr::copy_nonoverlapping(dist.as_ptr(), buf, sites);
            LwStatus::Ok
        }
        None => {
            set_last_error("distribution was not recorded");
            LwStatus::Unavailable
        }
    })
}
