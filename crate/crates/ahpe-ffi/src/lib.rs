//! C ABI for the experiment harness: opaque handles, integer status codes,
//! and a thread-local last-error message. The companion header
//! `include/ahpe.h` is regenerated on every build.
//!
//! Conventions:
//! - Every fallible call returns an [`AhpeStatus`]; `AHPE_STATUS_OK` is 0 and
//!   the first four codes match the CLI's exit codes.
//! - On any non-OK return the calling thread's error message is updated;
//!   read it with [`ahpe_last_error_message`].
//! - Handles own their data. Release each exactly once with its matching
//!   `_free` function; every `_free` accepts NULL as a no-op.
//! - No call takes ownership of caller memory, and string-filling functions
//!   follow the `snprintf` convention: they NUL-terminate whenever the
//!   capacity allows and return the full untruncated length.
//!
//! `examples/smoke.c` is a complete C program against this surface; its
//! header comment has the compile line.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};

use ahpe::harness::{parse_config, preset, run_experiment, ExperimentConfig, ExperimentOutcome, PRESETS};
use ahpe::solvers::TraceRecord;
use ahpe::Error;

/// Status codes returned by every fallible call. `Validation`, `Certificate`
/// (which also covers internal numeric failures), and `Io` carry the same
/// numbers the CLI uses as exit codes; the remaining codes are
/// ABI-boundary problems that cannot arise through the CLI.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AhpeStatus {
    Ok = 0,
    Validation = 1,
    Certificate = 2,
    Io = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    BufferTooSmall = 6,
}

/// Per-iteration trace columns, one per CSV column of a written trace.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AhpeColumn {
    /// Iteration index (exact for every representable run length).
    K = 0,
    /// `f(x_k) - f*`.
    FGap,
    /// Potential `A_k·(f(x_k) - f*) + B_k·d²(z_k, x*)`.
    Potential,
    /// Aggregated weight `A_k`.
    AccWeight,
    /// Distance coefficient `B_k`.
    DistWeight,
    /// Incremental weight `a_k`.
    IncWeight,
    Theta,
    Delta,
    Xi,
    DistToOpt,
    /// `d(w_k, z_k)`.
    DWz,
    IproxResidual,
    YYprimeGap,
    XiRecursionResidual,
}

/// Worst-case run diagnostics, maximized over all iterations.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AhpeDiagnostic {
    WorstIproxResidual = 0,
    WorstPotentialIncrease,
    WorstPotentialExcess,
    WorstYGapExcess,
    WorstRebaseExcess,
    WorstXiResidual,
    WorstDomainViolation,
}

/// A parsed and validated experiment description.
pub struct AhpeExperiment {
    cfg: ExperimentConfig,
}

/// A finished run: the per-iteration trace plus run-level diagnostics.
pub struct AhpeRun {
    out: ExperimentOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_message(msg: &str) {
    LAST_ERROR.with(|e| msg.clone_into(&mut e.borrow_mut()));
}

fn fail(e: &Error) -> AhpeStatus {
    set_message(&e.to_string());
    match e {
        Error::Validation(_) => AhpeStatus::Validation,
        Error::Certificate(_) | Error::Numeric(_) => AhpeStatus::Certificate,
        Error::Io(_) => AhpeStatus::Io,
    }
}

fn null_arg(what: &str) -> AhpeStatus {
    set_message(&format!("{what}: unexpected NULL pointer"));
    AhpeStatus::NullPointer
}

/// Read a caller string, reporting NULL and bad encodings through the usual
/// status-plus-message channel.
unsafe fn read_str<'a>(what: &str, ptr: *const c_char) -> Result<&'a str, AhpeStatus> {
    if ptr.is_null() {
        return Err(null_arg(what));
    }
    // SAFETY: caller guarantees `ptr` is a live NUL-terminated string.
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_message(&format!("{what}: not valid UTF-8"));
        AhpeStatus::InvalidUtf8
    })
}

/// Copy `text` into `buf` snprintf-style: write at most `cap - 1` bytes plus
/// a NUL when `cap > 0`, and return the full untruncated length.
unsafe fn fill_buffer(text: &str, buf: *mut c_char, cap: usize) -> usize {
    if !buf.is_null() && cap > 0 {
        let n = text.len().min(cap - 1);
        // SAFETY: caller guarantees `buf` has room for `cap` bytes.
        std::ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    text.len()
}

/// Fill `buf` with the calling thread's most recent error message and return
/// its full length. The message persists until the next failing call on the
/// same thread. `buf` may be NULL (with `cap` 0) to query the length alone.
///
/// # Safety
/// `buf` must be NULL or valid for `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ahpe_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| fill_buffer(&e.borrow(), buf, cap))
}

/// Fill `buf` with the newline-separated names of the bundled experiment
/// presets (see [`ahpe_experiment_preset`]) and return the full length.
///
/// # Safety
/// `buf` must be NULL or valid for `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ahpe_preset_names(buf: *mut c_char, cap: usize) -> usize {
    let names: Vec<&str> = PRESETS.iter().map(|(name, _, _)| *name).collect();
    fill_buffer(&names.join("\n"), buf, cap)
}

/// Parse and validate a TOML experiment description. On success, store a new
/// handle in `*out`; the caller must release it with
/// [`ahpe_experiment_free`]. On failure `*out` is untouched.
///
/// # Safety
/// `text` must be a live NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ahpe_experiment_from_toml(
    text: *const c_char,
    out: *mut *mut AhpeExperiment,
) -> AhpeStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let text = match read_str("text", text) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match parse_config(text) {
        Ok(cfg) => {
            // SAFETY: `out` is valid per the caller contract.
            *out = Box::into_raw(Box::new(AhpeExperiment { cfg }));
            AhpeStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Look up a bundled preset by name (names via [`ahpe_preset_names`]). On
/// success, store a new handle in `*out`; release with
/// [`ahpe_experiment_free`].
///
/// # Safety
/// `name` must be a live NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ahpe_experiment_preset(
    name: *const c_char,
    out: *mut *mut AhpeExperiment,
) -> AhpeStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let name = match read_str("name", name) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match preset(name) {
        Ok(cfg) => {
            // SAFETY: `out` is valid per the caller contract.
            *out = Box::into_raw(Box::new(AhpeExperiment { cfg }));
            AhpeStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Release an experiment handle. NULL is a no-op.
///
/// # Safety
/// `cfg` must be NULL or a handle from [`ahpe_experiment_from_toml`] /
/// [`ahpe_experiment_preset`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ahpe_experiment_free(cfg: *mut AhpeExperiment) {
    if !cfg.is_null() {
        // SAFETY: caller guarantees `cfg` came from Box::into_raw above.
        drop(Box::from_raw(cfg));
    }
}

/// Run the experiment to completion (deterministically: equal configurations
/// produce bit-identical runs). On success, store a new run handle in `*out`;
/// the caller must release it with [`ahpe_run_free`].
///
/// # Safety
/// `cfg` must be a live experiment handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ahpe_experiment_run(
    cfg: *const AhpeExperiment,
    out: *mut *mut AhpeRun,
) -> AhpeStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if cfg.is_null() {
        return null_arg("cfg");
    }
    // SAFETY: `cfg` is a live handle per the caller contract.
    match run_experiment(&(*cfg).cfg) {
        Ok(run) => {
            // SAFETY: `out` is valid per the caller contract.
            *out = Box::into_raw(Box::new(AhpeRun { out: run }));
            AhpeStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Release a run handle. NULL is a no-op.
///
/// # Safety
/// `run` must be NULL or a handle from [`ahpe_experiment_run`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_free(run: *mut AhpeRun) {
    if !run.is_null() {
        // SAFETY: caller guarantees `run` came from Box::into_raw above.
        drop(Box::from_raw(run));
    }
}

/// Number of trace records in the run (iterations plus one, or fewer when a
/// gap target stopped it early). Returns 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_len(run: *const AhpeRun) -> usize {
    // SAFETY: `run` is NULL or live per the caller contract.
    run.as_ref().map_or(0, |r| r.out.records.len())
}

/// The step size the run actually used (relevant when the config said
/// `"auto"`). Returns NaN for NULL.
///
/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_lambda(run: *const AhpeRun) -> f64 {
    // SAFETY: `run` is NULL or live per the caller contract.
    run.as_ref().map_or(f64::NAN, |r| r.out.lambda)
}

/// The relative error budget the run actually used. Returns NaN for NULL.
///
/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_sigma(run: *const AhpeRun) -> f64 {
    // SAFETY: `run` is NULL or live per the caller contract.
    run.as_ref().map_or(f64::NAN, |r| r.out.sigma)
}

/// Final objective gap `f(x_n) - f*`. Returns NaN for NULL or empty runs.
///
/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_final_gap(run: *const AhpeRun) -> f64 {
    // SAFETY: `run` is NULL or live per the caller contract.
    run.as_ref()
        .and_then(|r| r.out.records.last())
        .map_or(f64::NAN, |rec| rec.f_gap)
}

/// Whether the run ended by reaching its configured gap target. Returns
/// false for NULL.
///
/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_stopped_at_target(run: *const AhpeRun) -> bool {
    // SAFETY: `run` is NULL or live per the caller contract.
    run.as_ref().is_some_and(|r| r.out.diagnostics.stopped_at_target)
}

/// Whether the run used a rule outside the supported theory (the
/// experimental midpoint anchor rule), in which case the potential-based
/// conformance checks were informational only. Returns false for NULL.
///
/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_off_theory(run: *const AhpeRun) -> bool {
    // SAFETY: `run` is NULL or live per the caller contract.
    run.as_ref().is_some_and(|r| r.out.diagnostics.off_theory)
}

fn column_value(rec: &TraceRecord, column: AhpeColumn) -> f64 {
    match column {
        AhpeColumn::K => rec.k as f64,
        AhpeColumn::FGap => rec.f_gap,
        AhpeColumn::Potential => rec.potential,
        AhpeColumn::AccWeight => rec.acc_weight,
        AhpeColumn::DistWeight => rec.dist_weight,
        AhpeColumn::IncWeight => rec.inc_weight,
        AhpeColumn::Theta => rec.theta,
        AhpeColumn::Delta => rec.delta,
        AhpeColumn::Xi => rec.xi,
        AhpeColumn::DistToOpt => rec.dist_to_opt,
        AhpeColumn::DWz => rec.d_wz,
        AhpeColumn::IproxResidual => rec.iprox_residual,
        AhpeColumn::YYprimeGap => rec.y_yprime_gap,
        AhpeColumn::XiRecursionResidual => rec.xi_recursion_residual,
    }
}

/// Copy one trace column — [`ahpe_run_len`] values, iteration order — into
/// `buf`. `cap` is the buffer's capacity in doubles and must cover the whole
/// column; nothing is written otherwise.
///
/// # Safety
/// `run` must be a live run handle and `buf` valid for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_column(
    run: *const AhpeRun,
    column: AhpeColumn,
    buf: *mut f64,
    cap: usize,
) -> AhpeStatus {
    if run.is_null() {
        return null_arg("run");
    }
    if buf.is_null() {
        return null_arg("buf");
    }
    // SAFETY: `run` is live per the caller contract.
    let records = &(*run).out.records;
    if cap < records.len() {
        set_message(&format!(
            "column buffer holds {cap} values but the trace has {}",
            records.len()
        ));
        return AhpeStatus::BufferTooSmall;
    }
    for (i, rec) in records.iter().enumerate() {
        // SAFETY: `buf` covers `cap >= records.len()` doubles.
        *buf.add(i) = column_value(rec, column);
    }
    AhpeStatus::Ok
}

/// Read one worst-case diagnostic of the run into `*value`.
///
/// # Safety
/// `run` must be a live run handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ahpe_run_diagnostic(
    run: *const AhpeRun,
    which: AhpeDiagnostic,
    value: *mut f64,
) -> AhpeStatus {
    if run.is_null() {
        return null_arg("run");
    }
    if value.is_null() {
        return null_arg("value");
    }
    // SAFETY: `run` is live per the caller contract.
    let d = &(*run).out.diagnostics;
    let v = match which {
        AhpeDiagnostic::WorstIproxResidual => d.worst_iprox_residual,
        AhpeDiagnostic::WorstPotentialIncrease => d.worst_potential_increase,
        AhpeDiagnostic::WorstPotentialExcess => d.worst_potential_excess,
        AhpeDiagnostic::WorstYGapExcess => d.worst_y_gap_excess,
        AhpeDiagnostic::WorstRebaseExcess => d.worst_rebase_excess,
        AhpeDiagnostic::WorstXiResidual => d.worst_xi_residual,
        AhpeDiagnostic::WorstDomainViolation => d.worst_domain_violation,
    };
    // SAFETY: `value` is valid per the caller contract.
    *value = v;
    AhpeStatus::Ok
}
