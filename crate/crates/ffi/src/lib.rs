//! C ABI for `cmab-core`.
//!
//! Every fallible function returns a status code (`CMAB_OK` on success) and
//! writes results through out-pointers. On failure the message is kept in
//! thread-local storage and can be read with [`cmab_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;
use std::sync::Arc;

use cmab_core::analysis;
use cmab_core::arm_model::Environment;
use cmab_core::environments::Smoothness;
use cmab_core::harness::{self, ExperimentConfig, Prepared, RunState};
use cmab_core::CmabError;

pub const CMAB_OK: i32 = 0;
pub const CMAB_ERR_NULL_POINTER: i32 = 1;
pub const CMAB_ERR_INVALID_UTF8: i32 = 2;
pub const CMAB_ERR_INVALID_ARGUMENT: i32 = 3;
pub const CMAB_ERR_CONFIG: i32 = 4;
pub const CMAB_ERR_IO: i32 = 5;
pub const CMAB_ERR_UNSUPPORTED: i32 = 6;
pub const CMAB_ERR_PANIC: i32 = 7;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Null(&'static str),
    Utf8(&'static str),
    Core(CmabError),
}

impl From<CmabError> for Failure {
    fn from(e: CmabError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Null(_) => CMAB_ERR_NULL_POINTER,
            Failure::Utf8(_) => CMAB_ERR_INVALID_UTF8,
            Failure::Core(e) => match e {
                CmabError::Config(_) => CMAB_ERR_CONFIG,
                CmabError::Io(_) => CMAB_ERR_IO,
                CmabError::UnsupportedInstance { .. } | CmabError::ImplicitSpace | CmabError::EnumerationCap { .. } => {
                    CMAB_ERR_UNSUPPORTED
                }
                _ => CMAB_ERR_INVALID_ARGUMENT,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Null(what) => format!("{what} is null"),
            Failure::Utf8(what) => format!("{what} is not valid UTF-8"),
            Failure::Core(e) => e.to_string(),
        }
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CMAB_OK,
        Ok(Err(failure)) => {
            set_last_error(failure.message());
            failure.code()
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CMAB_ERR_PANIC
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cmab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread
/// or [`cmab_clear_last_error`].
#[no_mangle]
pub extern "C" fn cmab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn cmab_clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// A prepared experiment: instance, oracle, gap profile and reward table.
pub struct CmabExperiment {
    prep: Arc<Prepared>,
}

/// One repetition of an experiment, advanced round by round.
pub struct CmabRun {
    prep: Arc<Prepared>,
    state: RunState,
}

/// One row of a trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CmabRecord {
    pub run_id: u32,
    pub t: u64,
    pub super_arm: u64,
    pub realized_reward: f64,
    pub expected_reward: f64,
    pub regret: f64,
    pub cumulative_regret: f64,
    pub oracle_failed: bool,
}

/// Builds an experiment from TOML text. Instance files are resolved against
/// the current directory.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_new(config_toml: *const c_char, out: *mut *mut CmabExperiment) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let text = read_str(config_toml, "config_toml")?;
        let mut config = ExperimentConfig::from_toml(text)?;
        config.resolve_files(Path::new("."))?;
        let prep = harness::prepare(&config)?;
        out.write(Box::into_raw(Box::new(CmabExperiment { prep: Arc::new(prep) })));
        Ok(())
    })
}

/// # Safety
/// `experiment` must come from [`cmab_experiment_new`] and not be freed yet.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_free(experiment: *mut CmabExperiment) {
    if !experiment.is_null() {
        drop(Box::from_raw(experiment));
    }
}

/// # Safety
/// Pointers must be valid; `experiment` must be live.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_num_arms(experiment: *const CmabExperiment, out: *mut u64) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        write_out(out, e.prep.instance.num_arms() as u64, "out")
    })
}

/// # Safety
/// Pointers must be valid; `experiment` must be live.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_horizon(experiment: *const CmabExperiment, out: *mut u64) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        write_out(out, e.prep.config.horizon, "out")
    })
}

/// Expected reward of the best super arm under the true means.
///
/// # Safety
/// Pointers must be valid; `experiment` must be live.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_opt(experiment: *const CmabExperiment, out: *mut f64) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        write_out(out, e.prep.rewards.opt, "out")
    })
}

/// Evaluates the named regret bound at horizon `n`.
///
/// # Safety
/// Pointers must be valid; `name` NUL-terminated; `experiment` live.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_bound(
    experiment: *const CmabExperiment,
    name: *const c_char,
    n: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        let name = read_str(name, "name")?;
        let report = harness::evaluate_bound(&e.prep, name, n)?;
        write_out(out, report.value, "out")
    })
}

/// Plays repetition `run_id` to the horizon and reports its cumulative regret.
///
/// # Safety
/// Pointers must be valid; `experiment` must be live.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_run(
    experiment: *const CmabExperiment,
    run_id: u32,
    out_cumulative_regret: *mut f64,
) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        let summary = harness::simulate(&e.prep, run_id, |_| Ok(()))?;
        write_out(
            out_cumulative_regret,
            summary.final_cumulative_regret,
            "out_cumulative_regret",
        )
    })
}

/// Runs all repetitions and writes the CSV and metadata files under `dir`.
///
/// # Safety
/// Pointers must be valid; `dir` NUL-terminated; `experiment` live.
#[no_mangle]
pub unsafe extern "C" fn cmab_experiment_write(experiment: *const CmabExperiment, dir: *const c_char) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        let mut config = e.prep.config.clone();
        config.output = PathBuf::from(read_str(dir, "dir")?);
        harness::run_experiment(&config)?;
        Ok(())
    })
}

/// Starts repetition `run_id`. The run keeps the experiment data alive on
/// its own, so the experiment may be freed first.
///
/// # Safety
/// Pointers must be valid; `experiment` must be live.
#[no_mangle]
pub unsafe extern "C" fn cmab_run_new(experiment: *const CmabExperiment, run_id: u32, out: *mut *mut CmabRun) -> i32 {
    guard(|| {
        let e = handle(experiment, "experiment")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let state = RunState::new(&e.prep, run_id)?;
        out.write(Box::into_raw(Box::new(CmabRun {
            prep: Arc::clone(&e.prep),
            state,
        })));
        Ok(())
    })
}

/// Plays the next round.
///
/// # Safety
/// Pointers must be valid; `run` must come from [`cmab_run_new`].
#[no_mangle]
pub unsafe extern "C" fn cmab_run_step(run: *mut CmabRun, out: *mut CmabRecord) -> i32 {
    guard(|| {
        let r = run.as_mut().ok_or(Failure::Null("run"))?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let rec = r.state.step(&r.prep)?;
        out.write(CmabRecord {
            run_id: rec.run_id,
            t: rec.t,
            super_arm: rec.super_arm as u64,
            realized_reward: rec.realized_reward,
            expected_reward: rec.expected_reward,
            regret: rec.regret,
            cumulative_regret: rec.cumulative_regret,
            oracle_failed: rec.oracle_failed,
        });
        Ok(())
    })
}

/// # Safety
/// `run` must come from [`cmab_run_new`] and not be freed yet. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cmab_run_free(run: *mut CmabRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Sampling threshold for `f(x) = gamma * x^omega`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmab_sampling_threshold(
    delta: f64,
    p: f64,
    n: f64,
    gamma: f64,
    omega: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        if !(gamma > 0.0) || !(omega > 0.0 && omega <= 1.0) {
            return Err(CmabError::InvalidParameter(format!(
                "need gamma > 0 and omega in (0, 1], got {gamma}, {omega}"
            ))
            .into());
        }
        let f = Smoothness::Power { gamma, omega };
        write_out(out, analysis::sampling_threshold(delta, p, n, &f)?, "out")
    })
}

/// Riemann zeta for `c > 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmab_zeta(c: f64, out: *mut f64) -> i32 {
    guard(|| write_out(out, analysis::zeta(c)?, "out"))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmab_hoeffding_tail(n: u64, delta: f64, out: *mut f64) -> i32 {
    guard(|| write_out(out, analysis::hoeffding_tail(n, delta)?, "out"))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmab_chernoff_tail(n: u64, mu: f64, delta: f64, out: *mut f64) -> i32 {
    guard(|| write_out(out, analysis::chernoff_tail(n, mu, delta)?, "out"))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmab_bernstein_tail(n: u64, bound: f64, variance_sum: f64, t: f64, out: *mut f64) -> i32 {
    guard(|| write_out(out, analysis::bernstein_tail(n, bound, variance_sum, t)?, "out"))
}
