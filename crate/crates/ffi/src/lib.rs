//! C interface to viscoshell: scenario configs and run results behind opaque
//! handles, closed-form reference solutions as plain functions. Every call
//! returns a `VsStatus`; on failure the message is kept per thread and can be
//! read with `vs_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use viscoshell::oracles::{self, BalloonParams, PressureSplit, PureBendParams, SphereParams};
use viscoshell::scenario::config::{CaseConfig, ScenarioConfig};
use viscoshell::scenario::output::run_case;
use viscoshell::scenario::run::{run, run_point, Row, RunOutput};
use viscoshell::{Error, ErrorCategory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsStatus {
    Ok = 0,
    NullArgument = 1,
    Input = 2,
    Io = 3,
    Geometry = 4,
    Solver = 5,
    Panic = 6,
    OutOfRange = 7,
}

/// A validated scenario configuration.
pub struct VsScenario {
    cfg: ScenarioConfig,
}

/// Time series and summary of a finished run.
pub struct VsRun {
    out: RunOutput,
}

/// One output row; tensor entries are contravariant components on the
/// current basis.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsRow {
    pub t: f64,
    pub drive: f64,
    pub sigma11: f64,
    pub sigma12: f64,
    pub sigma22: f64,
    pub j: f64,
    pub j_el: f64,
    pub j_in: f64,
    pub kappa: f64,
    pub kappa_in: f64,
    pub dissipation: f64,
    /// NaN when the case has none.
    pub pressure: f64,
    /// NaN for point-driver runs.
    pub monitor: [f64; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsSummary {
    pub steps: usize,
    pub dt: f64,
    pub t_end: f64,
    pub max_newton_iterations: usize,
    pub max_local_iterations: usize,
    pub max_split_defect: f64,
    pub dissipation_nondecreasing: bool,
    pub final_dissipation: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsBalloonParams {
    pub radius: f64,
    pub mu: f64,
    pub mu1: f64,
    pub eta_s: f64,
    pub t_end: f64,
    pub lambda_end: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsSphereParams {
    pub radius: f64,
    pub mu: f64,
    pub mu1: f64,
    pub c1: f64,
    pub k: f64,
    pub h0: f64,
    pub eta_s: f64,
    pub eta_b: f64,
    pub t_end: f64,
    pub lambda_end: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsPureBendParams {
    pub c: f64,
    pub c1: f64,
    pub eta_b: f64,
    pub t_end: f64,
    pub kappa_end: f64,
    pub length: f64,
}

/// Inflation pressure split into elastic and viscous parts.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsPressure {
    pub lambda: f64,
    pub p_el: f64,
    pub p_visc: f64,
    pub p_total: f64,
    pub ahat_ev: f64,
    pub bhat_ev: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VsPureBendState {
    pub kappa: f64,
    pub kappa_in: f64,
    pub moment: f64,
    pub u_y: f64,
    pub pressure: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Range(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            VsStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for `{what}`"));
            VsStatus::NullArgument
        }
        Ok(Err(Failure::Range(m))) => {
            set_error(m);
            VsStatus::OutOfRange
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            match e.category() {
                ErrorCategory::Input => VsStatus::Input,
                ErrorCategory::Io => VsStatus::Io,
                ErrorCategory::Geometry => VsStatus::Geometry,
                ErrorCategory::Solver => VsStatus::Solver,
            }
        }
        Err(p) => {
            let m = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            set_error(format!("internal panic: {}", m.unwrap_or_default()));
            VsStatus::Panic
        }
    }
}

unsafe fn reference<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn output<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn string(p: *const c_char, what: &'static str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Lib(Error::InvalidParameter(format!("`{what}` is not valid UTF-8"))))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length including the NUL, or
/// 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Loads and validates a TOML scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_load(path: *const c_char, out: *mut *mut VsScenario) -> VsStatus {
    guard(|| {
        let out = output(out, "out")?;
        let cfg = ScenarioConfig::load(Path::new(&string(path, "path")?))?;
        *out = Box::into_raw(Box::new(VsScenario { cfg }));
        Ok(())
    })
}

/// Parses and validates a scenario from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_from_toml(text: *const c_char, out: *mut *mut VsScenario) -> VsStatus {
    guard(|| {
        let out = output(out, "out")?;
        let cfg = ScenarioConfig::from_toml(&string(text, "text")?)?;
        cfg.validate()?;
        *out = Box::into_raw(Box::new(VsScenario { cfg }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from `vs_scenario_load` /
/// `vs_scenario_from_toml` not freed before.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_free(scenario: *mut VsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Overrides the step size and end time; the scenario is left unchanged when
/// the new values fail validation.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_set_time(scenario: *mut VsScenario, dt: f64, t_end: f64) -> VsStatus {
    guard(|| {
        let s = output(scenario, "scenario")?;
        let mut cfg = s.cfg.clone();
        cfg.time.dt = dt;
        cfg.time.t_end = t_end;
        cfg.validate()?;
        s.cfg = cfg;
        Ok(())
    })
}

/// Runs the scenario's case.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_run(scenario: *const VsScenario, out: *mut *mut VsRun) -> VsStatus {
    guard(|| {
        let s = reference(scenario, "scenario")?;
        let out = output(out, "out")?;
        *out = Box::into_raw(Box::new(VsRun { out: run(&s.cfg)? }));
        Ok(())
    })
}

/// Runs the scenario's homogeneous kinematic program through the material
/// point driver (point and membrane cases only).
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_run_point(scenario: *const VsScenario, out: *mut *mut VsRun) -> VsStatus {
    guard(|| {
        let s = reference(scenario, "scenario")?;
        let out = output(out, "out")?;
        let cfg = &s.cfg;
        let program = match &cfg.case {
            CaseConfig::Point { program } | CaseConfig::Membrane { program, .. } => program.to_program(cfg.time.t_end)?,
            _ => return Err(Error::UnsupportedStudy(format!("`{}` has no homogeneous program", cfg.name)).into()),
        };
        let result = run_point(&cfg.name, &program, &cfg.material, cfg.time.dt, cfg.time.t_end)?;
        *out = Box::into_raw(Box::new(VsRun { out: result }));
        Ok(())
    })
}

/// Runs the scenario and writes `<name>.csv` and `<name>_summary.toml` into
/// `out_dir`, creating it if needed.
///
/// # Safety
/// `scenario` must be a live handle; `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vs_scenario_write(scenario: *const VsScenario, out_dir: *const c_char) -> VsStatus {
    guard(|| {
        let s = reference(scenario, "scenario")?;
        run_case(&s.cfg, Path::new(&string(out_dir, "out_dir")?))?;
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle from a run function not freed before.
#[no_mangle]
pub unsafe extern "C" fn vs_run_free(run: *mut VsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of rows, including the initial state; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vs_run_row_count(run: *const VsRun) -> usize {
    run.as_ref().map_or(0, |r| r.out.rows.len())
}

fn row(r: &Row) -> VsRow {
    VsRow {
        t: r.t,
        drive: r.drive,
        sigma11: r.sigma[(0, 0)],
        sigma12: r.sigma[(0, 1)],
        sigma22: r.sigma[(1, 1)],
        j: r.j,
        j_el: r.j_el,
        j_in: r.j_in,
        kappa: r.kappa,
        kappa_in: r.kappa_in,
        dissipation: r.dissipation,
        pressure: r.pressure,
        monitor: [r.monitor.x, r.monitor.y, r.monitor.z],
    }
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_run_row(run: *const VsRun, index: usize, out: *mut VsRow) -> VsStatus {
    guard(|| {
        let r = reference(run, "run")?;
        let out = output(out, "out")?;
        let rows = &r.out.rows;
        let src = rows.get(index).ok_or_else(|| Failure::Range(format!("row {index} out of range (0..{})", rows.len())))?;
        *out = row(src);
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_run_summary(run: *const VsRun, out: *mut VsSummary) -> VsStatus {
    guard(|| {
        let s = &reference(run, "run")?.out.summary;
        *output(out, "out")? = VsSummary {
            steps: s.steps,
            dt: s.dt,
            t_end: s.t_end,
            max_newton_iterations: s.max_newton_iterations,
            max_local_iterations: s.max_local_iterations,
            max_split_defect: s.max_split_defect,
            dissipation_nondecreasing: s.dissipation_nondecreasing,
            final_dissipation: s.final_dissipation,
        };
        Ok(())
    })
}

fn pressure(p: PressureSplit) -> VsPressure {
    VsPressure { lambda: p.lambda, p_el: p.p_el, p_visc: p.p_visc, p_total: p.p_total, ahat_ev: p.ahat_ev, bhat_ev: p.bhat_ev }
}

/// Pressure of the membrane balloon inflated at an exponential stretch rate.
///
/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_balloon_pressure(params: *const VsBalloonParams, t: f64, out: *mut VsPressure) -> VsStatus {
    guard(|| {
        let p = reference(params, "params")?;
        let out = output(out, "out")?;
        let q = BalloonParams { radius: p.radius, mu: p.mu, mu1: p.mu1, eta_s: p.eta_s, t_end: p.t_end, lambda_end: p.lambda_end };
        *out = pressure(oracles::balloon_pressure(&q, t)?);
        Ok(())
    })
}

/// Pressure of the inflated spherical shell with membrane and bending
/// viscosity.
///
/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_sphere_pressure(params: *const VsSphereParams, t: f64, out: *mut VsPressure) -> VsStatus {
    guard(|| {
        let p = reference(params, "params")?;
        let out = output(out, "out")?;
        let q = SphereParams {
            radius: p.radius,
            mu: p.mu,
            mu1: p.mu1,
            c1: p.c1,
            k: p.k,
            h0: p.h0,
            eta_s: p.eta_s,
            eta_b: p.eta_b,
            t_end: p.t_end,
            lambda_end: p.lambda_end,
        };
        *out = pressure(oracles::sphere_pressure(&q, t)?);
        Ok(())
    })
}

/// State of the strip bent at a linearly increasing moment.
///
/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_pure_bend_solution(
    params: *const VsPureBendParams,
    t: f64,
    out: *mut VsPureBendState,
) -> VsStatus {
    guard(|| {
        let p = reference(params, "params")?;
        let out = output(out, "out")?;
        let q =
            PureBendParams { c: p.c, c1: p.c1, eta_b: p.eta_b, t_end: p.t_end, kappa_end: p.kappa_end, length: p.length };
        let s = oracles::pure_bend_solution(&q, t)?;
        *out = VsPureBendState { kappa: s.kappa, kappa_in: s.kappa_in, moment: s.moment, u_y: s.u_y, pressure: s.pressure };
        Ok(())
    })
}
