//! C ABI over the `dfrc-hbf` solver.
//!
//! Scenarios and solutions live behind opaque handles created and released
//! by this library. Every fallible entry point returns a [`DfrcStatus`]; on
//! failure a human-readable message is kept per thread and can be fetched
//! with [`dfrc_last_error`]. Complex matrices are exported row-major as
//! interleaved `(re, im)` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dfrc_hbf::cadmm::rate_summary;
use dfrc_hbf::{generate_channel, run, CMat, HbfError, RunOutput, ScenarioConfig, Task, Termination};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfrcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Unknown preset, malformed TOML, or a configuration that fails validation.
    InvalidConfig = 3,
    /// A rate threshold stayed unreachable past the grace window.
    InfeasibleQos = 4,
    /// NaN or infinity appeared during the iterations.
    Numerical = 5,
    /// Any other solver failure.
    Solver = 6,
    /// An index was out of range or a caller buffer too small.
    OutOfRange = 7,
    /// The library panicked; the handle arguments should be considered poisoned.
    Panic = 8,
}

/// Detection task selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfrcTask {
    ScanDetect = 0,
    TargetTracking = 1,
}

/// Opaque scenario configuration.
pub struct DfrcConfig {
    inner: ScenarioConfig,
}

/// Opaque solver output.
pub struct DfrcResult {
    inner: RunOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(DfrcStatus, String);

impl From<HbfError> for Failure {
    fn from(e: HbfError) -> Self {
        let status = match e {
            HbfError::InvalidConfig(_) | HbfError::Toml(_) => DfrcStatus::InvalidConfig,
            HbfError::InfeasibleQos { .. } => DfrcStatus::InfeasibleQos,
            HbfError::Numerical { .. } => DfrcStatus::Numerical,
            _ => DfrcStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DfrcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DfrcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DfrcStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(DfrcStatus::NullArgument, format!("`{name}` is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(DfrcStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn export_matrix(m: &CMat, out: *mut f64, len: usize) -> Result<(), Failure> {
    let need = 2 * m.len();
    if out.is_null() {
        return Err(null("out"));
    }
    if len < need {
        return Err(Failure(DfrcStatus::OutOfRange, format!("buffer holds {len} doubles, {need} needed")));
    }
    let buf = unsafe { std::slice::from_raw_parts_mut(out, need) };
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let at = 2 * (i * m.ncols() + j);
            buf[at] = z.re;
            buf[at + 1] = z.im;
        }
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null when the last
/// call succeeded. The pointer stays valid until the next library call on the
/// same thread.
#[no_mangle]
pub extern "C" fn dfrc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dfrc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a bundled preset (`desk`, `single_carrier_A`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_config_from_preset(name: *const c_char, out: *mut *mut DfrcConfig) -> DfrcStatus {
    guard(|| {
        let cfg = ScenarioConfig::preset(text(name, "name")?)?;
        put(out, Box::into_raw(Box::new(DfrcConfig { inner: cfg })), "out")
    })
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_config_from_toml(toml: *const c_char, out: *mut *mut DfrcConfig) -> DfrcStatus {
    guard(|| {
        let cfg = ScenarioConfig::from_toml_str(text(toml, "toml")?)?;
        put(out, Box::into_raw(Box::new(DfrcConfig { inner: cfg })), "out")
    })
}

/// Applies a `key=value` override (dotted keys reach nested tables). The
/// configuration is left untouched when the result fails validation.
///
/// # Safety
/// `config` must come from this library; `assignment` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dfrc_config_set(config: *mut DfrcConfig, assignment: *const c_char) -> DfrcStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        cfg.inner = cfg.inner.with_override(text(assignment, "assignment")?)?;
        Ok(())
    })
}

/// Sets a uniform rate threshold for every subcarrier and user.
///
/// # Safety
/// `config` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dfrc_config_set_chi(config: *mut DfrcConfig, chi: f64) -> DfrcStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let next = cfg.inner.clone().with_chi(chi);
        next.validate()?;
        cfg.inner = next;
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dfrc_config_set_task(config: *mut DfrcConfig, task: DfrcTask) -> DfrcStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        cfg.inner.task = match task {
            DfrcTask::ScanDetect => Task::SD,
            DfrcTask::TargetTracking => Task::TT,
        };
        Ok(())
    })
}

/// Releases a configuration; null is ignored.
///
/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dfrc_config_free(config: *mut DfrcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Draws the channel from the configured seed and runs the solver.
///
/// # Safety
/// `config` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_solve(config: *const DfrcConfig, out: *mut *mut DfrcResult) -> DfrcStatus {
    guard(|| {
        let cfg = &handle(config, "config")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let channels = generate_channel(cfg, cfg.seed)?;
        let result = run(cfg, &channels)?;
        put(out, Box::into_raw(Box::new(DfrcResult { inner: result })), "out")
    })
}

/// Releases a result; null is ignored.
///
/// # Safety
/// `result` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_free(result: *mut DfrcResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Array sizes of a result: transmit antennas, RF chains, users, subcarriers.
///
/// # Safety
/// `result` must come from this library; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_dims(
    result: *const DfrcResult,
    m_t: *mut usize,
    n_t: *mut usize,
    users: *mut usize,
    subcarriers: *mut usize,
) -> DfrcStatus {
    guard(|| {
        let r = &handle(result, "result")?.inner;
        let (rows, cols) = r.hbf.f_rf.shape();
        put(m_t, rows, "m_t")?;
        put(n_t, cols, "n_t")?;
        put(users, r.hbf.f_bb.first().map_or(0, |f| f.ncols()), "users")?;
        put(subcarriers, r.hbf.f_bb.len(), "subcarriers")
    })
}

/// Iteration count, convergence flag (1 when the residual test stopped the
/// run), final task objective, and minimum achieved rate.
///
/// # Safety
/// `result` must come from this library; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_summary(
    result: *const DfrcResult,
    iterations: *mut usize,
    converged: *mut i32,
    objective: *mut f64,
    min_rate: *mut f64,
) -> DfrcStatus {
    guard(|| {
        let r = &handle(result, "result")?.inner;
        put(iterations, r.trace.records.len(), "iterations")?;
        put(converged, i32::from(r.trace.termination == Termination::Converged), "converged")?;
        put(objective, r.trace.final_objective, "objective")?;
        put(min_rate, rate_summary(&r.rates).0, "min_rate")
    })
}

/// Copies `F_RF` (`M_t x N_t`) into `out`, which must hold `2 M_t N_t` doubles.
///
/// # Safety
/// `result` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_analog(result: *const DfrcResult, out: *mut f64, len: usize) -> DfrcStatus {
    guard(|| export_matrix(&handle(result, "result")?.inner.hbf.f_rf, out, len))
}

/// Copies `F_k` (`N_t x U`) of subcarrier `k` into `out`, which must hold
/// `2 N_t U` doubles.
///
/// # Safety
/// `result` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_digital(
    result: *const DfrcResult,
    k: usize,
    out: *mut f64,
    len: usize,
) -> DfrcStatus {
    guard(|| {
        let r = &handle(result, "result")?.inner;
        let f = r
            .hbf
            .f_bb
            .get(k)
            .ok_or_else(|| Failure(DfrcStatus::OutOfRange, format!("subcarrier {k} of {}", r.hbf.f_bb.len())))?;
        export_matrix(f, out, len)
    })
}

/// Achieved rates, `K x U` row-major, into `out` of at least `K U` doubles.
///
/// # Safety
/// `result` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_rates(result: *const DfrcResult, out: *mut f64, len: usize) -> DfrcStatus {
    guard(|| {
        let r = &handle(result, "result")?.inner;
        let flat: Vec<f64> = r.rates.iter().flatten().copied().collect();
        if out.is_null() {
            return Err(null("out"));
        }
        if len < flat.len() {
            return Err(Failure(DfrcStatus::OutOfRange, format!("buffer holds {len} doubles, {} needed", flat.len())));
        }
        std::slice::from_raw_parts_mut(out, flat.len()).copy_from_slice(&flat);
        Ok(())
    })
}

/// Per-iteration objective trace. Writes `min(len, iterations)` values.
///
/// # Safety
/// `result` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dfrc_result_objective_trace(
    result: *const DfrcResult,
    out: *mut f64,
    len: usize,
) -> DfrcStatus {
    guard(|| {
        let r = &handle(result, "result")?.inner;
        let n = len.min(r.trace.records.len());
        if n > 0 {
            if out.is_null() {
                return Err(null("out"));
            }
            let buf = std::slice::from_raw_parts_mut(out, n);
            for (b, rec) in buf.iter_mut().zip(&r.trace.records) {
                *b = rec.objective;
            }
        }
        Ok(())
    })
}
