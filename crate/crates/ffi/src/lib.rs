//! C ABI over `abplab`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`AbpStatus`]; on failure the message is available from
//! [`abp_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use abplab::eigensolve::{Bc, Operator, SolverOptions};
use abplab::emit::{render, Format};
use abplab::geometry::{DomainKind, DomainSpec};
use abplab::operators::Ellipticity;
use abplab::scenario::{solve_eigen, ConfigFile, EigenRequest, RunOptions, RunSummary, SolverKind};
use abplab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    NotConverged = 5,
    OutOfRange = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbpFormat {
    Json = 0,
    Csv = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbpOperator {
    Laplace = 0,
    MongeAmpere = 1,
    Pucci = 2,
}

/// Borrowed view of one report. `id` stays valid until the owning run is freed.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AbpReport {
    pub id: *const c_char,
    pub lhs: f64,
    pub rhs: f64,
    /// NaN when lhs/rhs is undefined.
    pub ratio: f64,
    /// 1 pass, 0 fail, -1 report-only.
    pub pass: c_int,
}

/// Parsed scenario configuration.
pub struct AbpConfig(ConfigFile);

/// Results of one run, with report ids kept as C strings.
pub struct AbpRun {
    summaries: Vec<RunSummary>,
    ids: Vec<Vec<CString>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> AbpStatus {
    match e {
        Error::Scenario { source, .. } => status_of(source),
        Error::Config(_) | Error::UnknownName(_) | Error::Json(_) => AbpStatus::Config,
        Error::NotConverged { .. } | Error::Bracketing { .. } => AbpStatus::NotConverged,
        Error::Io(_) | Error::Write { .. } => AbpStatus::Io,
        _ => AbpStatus::InvalidArgument,
    }
}

fn fail(status: AbpStatus, msg: &str) -> AbpStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), AbpStatus>) -> AbpStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AbpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(AbpStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: abplab::Result<T>) -> Result<T, AbpStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, AbpStatus> {
    if p.is_null() {
        return Err(fail(AbpStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AbpStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, AbpStatus> {
    p.as_mut().ok_or_else(|| fail(AbpStatus::NullPointer, "null output pointer"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, AbpStatus> {
    p.as_ref().ok_or_else(|| fail(AbpStatus::NullPointer, "null handle"))
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn abp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn abp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Built-in scenario registry.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn abp_config_builtin(out: *mut *mut AbpConfig) -> AbpStatus {
    guard(|| {
        *out_arg(out)? = Box::into_raw(Box::new(AbpConfig(ConfigFile::builtin())));
        Ok(())
    })
}

/// Parses a TOML config from a NUL-terminated string.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` as in [`abp_config_builtin`].
#[no_mangle]
pub unsafe extern "C" fn abp_config_parse(toml: *const c_char, out: *mut *mut AbpConfig) -> AbpStatus {
    guard(|| {
        let out = out_arg(out)?;
        let cfg = lift(ConfigFile::parse(str_arg(toml)?))?;
        *out = Box::into_raw(Box::new(AbpConfig(cfg)));
        Ok(())
    })
}

/// Loads a TOML config file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as in [`abp_config_builtin`].
#[no_mangle]
pub unsafe extern "C" fn abp_config_load(path: *const c_char, out: *mut *mut AbpConfig) -> AbpStatus {
    guard(|| {
        let out = out_arg(out)?;
        let cfg = lift(ConfigFile::load(Path::new(str_arg(path)?)))?;
        *out = Box::into_raw(Box::new(AbpConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abp_config_free(cfg: *mut AbpConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs a scenario or suite, or every scenario when `name` is null.
/// `resolution` 0 keeps each scenario's own resolutions, `threads` 0 the default pool.
///
/// # Safety
/// `cfg` must be a live config handle, `name` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abp_run(
    cfg: *const AbpConfig,
    name: *const c_char,
    resolution: usize,
    threads: usize,
    out: *mut *mut AbpRun,
) -> AbpStatus {
    guard(|| {
        let cfg = &handle(cfg)?.0;
        let out = out_arg(out)?;
        let selection = if name.is_null() { None } else { Some(lift(cfg.select(str_arg(name)?))?) };
        let opts = RunOptions {
            resolutions: (resolution > 0).then(|| vec![resolution]),
            seed: None,
            threads: (threads > 0).then_some(threads),
        };
        let summaries = lift(cfg.run(selection.as_deref(), &opts))?;
        let ids = summaries
            .iter()
            .map(|s| s.reports.iter().map(|r| CString::new(r.id.as_str()).unwrap_or_default()).collect())
            .collect();
        *out = Box::into_raw(Box::new(AbpRun { summaries, ids }));
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle from [`abp_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abp_run_free(run: *mut AbpRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of (scenario, resolution) summaries; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn abp_run_len(run: *const AbpRun) -> usize {
    run.as_ref().map_or(0, |r| r.summaries.len())
}

/// 1 when every scoped report passes, 0 otherwise or for a null handle.
///
/// # Safety
/// `run` must be null or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn abp_run_passed(run: *const AbpRun) -> c_int {
    run.as_ref().map_or(0, |r| c_int::from(r.summaries.iter().all(RunSummary::pass)))
}

/// Scenario name and resolution of summary `index`. The name pointer is
/// written into `name` (may be null to skip) and is freed with [`abp_string_free`].
///
/// # Safety
/// `run` must be a live run handle; `name` null or writable; `resolution` writable.
#[no_mangle]
pub unsafe extern "C" fn abp_run_summary(
    run: *const AbpRun,
    index: usize,
    name: *mut *mut c_char,
    resolution: *mut usize,
    report_count: *mut usize,
) -> AbpStatus {
    guard(|| {
        let run = handle(run)?;
        let s = run.summaries.get(index).ok_or_else(|| fail(AbpStatus::OutOfRange, "summary index out of range"))?;
        *out_arg(resolution)? = s.resolution;
        *out_arg(report_count)? = s.reports.len();
        if !name.is_null() {
            *name = CString::new(s.scenario.as_str()).unwrap_or_default().into_raw();
        }
        Ok(())
    })
}

/// Report `report` of summary `summary`.
///
/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abp_run_report(
    run: *const AbpRun,
    summary: usize,
    report: usize,
    out: *mut AbpReport,
) -> AbpStatus {
    guard(|| {
        let run = handle(run)?;
        let out = out_arg(out)?;
        let oob = || fail(AbpStatus::OutOfRange, "report index out of range");
        let r = run.summaries.get(summary).and_then(|s| s.reports.get(report)).ok_or_else(oob)?;
        *out = AbpReport {
            id: run.ids[summary][report].as_ptr(),
            lhs: r.lhs,
            rhs: r.rhs,
            ratio: r.ratio().unwrap_or(f64::NAN),
            pass: r.pass().map_or(-1, c_int::from),
        };
        Ok(())
    })
}

/// Serializes a run as JSON or CSV into a new string freed with [`abp_string_free`].
///
/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abp_run_render(run: *const AbpRun, format: AbpFormat, out: *mut *mut c_char) -> AbpStatus {
    guard(|| {
        let run = handle(run)?;
        let out = out_arg(out)?;
        let f = match format {
            AbpFormat::Json => Format::Json,
            AbpFormat::Csv => Format::Csv,
        };
        let text = lift(render(&run.summaries, f))?;
        *out = CString::new(text).map_err(|_| fail(AbpStatus::Io, "output contains NUL"))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Principal eigenvalue on a domain given in short form (`disk:1`, `rect:1x2`,
/// `ball:3`). A NaN `alpha` selects Dirichlet, otherwise Robin with that
/// parameter. `theta`/`big_theta` are read for Pucci only.
///
/// # Safety
/// `domain` must be NUL-terminated and `lambda` writable.
#[no_mangle]
pub unsafe extern "C" fn abp_principal_eigenvalue(
    op: AbpOperator,
    domain: *const c_char,
    resolution: usize,
    alpha: f64,
    theta: f64,
    big_theta: f64,
    lambda: *mut f64,
) -> AbpStatus {
    guard(|| {
        let lambda = out_arg(lambda)?;
        let spec: DomainSpec = lift(str_arg(domain)?.parse())?;
        let op = match op {
            AbpOperator::Laplace => Operator::Laplace,
            AbpOperator::MongeAmpere => Operator::MongeAmpere,
            AbpOperator::Pucci => Operator::Pucci(lift(Ellipticity::new(theta, big_theta))?),
        };
        let bc = if alpha.is_nan() { Bc::Dirichlet } else { lift(Bc::robin(alpha))? };
        let radial = matches!(spec.kind, DomainKind::RadialBall { .. });
        let solver = if matches!(op, Operator::Laplace) && !radial { SolverKind::Fd } else { SolverKind::Shooting };
        let req = EigenRequest { op, bc, p: 1.0, resolution, radial_resolution: None };
        *lambda = lift(solve_eigen(&spec, &req, solver, &SolverOptions::default()))?.lambda;
        Ok(())
    })
}
