//! C ABI over the dephase core.
//!
//! Every fallible call returns a [`DephaseStatus`]; on failure a message is
//! stored per thread and can be fetched with [`dephase_last_error`]. Handles
//! are opaque and owned by the caller until passed to their `_free` function.
//! Complex arrays are interleaved `(re, im)` pairs in row-major order.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dephase::bath::{BathSpec, Mode};
use dephase::cli::{run_command, Command, RunConfig};
use dephase::kraus::{
    build_common_nonru, build_common_ru, build_schur_matrix, build_single_qubit_parity,
    ru_sign_basis, solve_ru_weights, Channel, KrausSet,
};
use dephase::numerics::{ComplexMatrix, C64};
use dephase::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephaseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Infeasible = 4,
    CutoffTooSmall = 5,
    SchemeUnavailable = 6,
    Numerical = 7,
    Config = 8,
    Panic = 9,
}

/// Bath mode list.
pub struct DephaseBath(BathSpec);

/// Kraus operator set.
pub struct DephaseKrausSet(KrausSet);

/// Channel coefficients at one time.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DephaseCoefficients {
    pub t: f64,
    pub l1_re: f64,
    pub l1_im: f64,
    pub l2: f64,
    pub l3: f64,
    pub gamma: f64,
    pub g_total: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> DephaseStatus {
    match e {
        Error::InfeasibleWeights { .. } => DephaseStatus::Infeasible,
        Error::CutoffTooSmall { .. } => DephaseStatus::CutoffTooSmall,
        Error::SchemeUnavailable(_) => DephaseStatus::SchemeUnavailable,
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::NotSquare { .. } => {
            DephaseStatus::InvalidArgument
        }
        _ => DephaseStatus::Numerical,
    }
}

fn fail(status: DephaseStatus, msg: impl Into<String>) -> DephaseStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), DephaseStatus>) -> DephaseStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DephaseStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(DephaseStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: dephase::Result<T>) -> Result<T, DephaseStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, DephaseStatus> {
    p.as_ref()
        .ok_or_else(|| fail(DephaseStatus::NullPointer, "null pointer argument"))
}

fn check_out<T>(p: *mut T) -> Result<(), DephaseStatus> {
    if p.is_null() {
        Err(fail(DephaseStatus::NullPointer, "null output pointer"))
    } else {
        Ok(())
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, DephaseStatus> {
    if p.is_null() {
        return Err(fail(DephaseStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DephaseStatus::InvalidUtf8, "string is not valid UTF-8"))
}

/// Copy of the calling thread's last error message, or null when the last
/// call succeeded. Free with [`dephase_string_free`].
#[no_mangle]
pub extern "C" fn dephase_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |s| s.clone().into_raw())
    })
}

/// Frees a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dephase_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a bath from `n_modes` angular frequencies and couplings.
#[no_mangle]
pub unsafe extern "C" fn dephase_bath_new(
    omegas: *const f64,
    gs: *const f64,
    n_modes: usize,
    out: *mut *mut DephaseBath,
) -> DephaseStatus {
    guard(|| {
        check_out(out)?;
        if n_modes > 0 && (omegas.is_null() || gs.is_null()) {
            return Err(fail(DephaseStatus::NullPointer, "null mode array"));
        }
        let modes = if n_modes == 0 {
            Vec::new()
        } else {
            let w = std::slice::from_raw_parts(omegas, n_modes);
            let g = std::slice::from_raw_parts(gs, n_modes);
            w.iter().zip(g).map(|(&w, &g)| Mode::new(w, g)).collect()
        };
        let spec = core(BathSpec::new(modes))?;
        *out = Box::into_raw(Box::new(DephaseBath(spec)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dephase_bath_free(bath: *mut DephaseBath) {
    if !bath.is_null() {
        drop(Box::from_raw(bath));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dephase_bath_coefficients(
    bath: *const DephaseBath,
    t: f64,
    out: *mut DephaseCoefficients,
) -> DephaseStatus {
    guard(|| {
        let bath = deref(bath)?;
        check_out(out)?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(fail(
                DephaseStatus::InvalidArgument,
                format!("time {t} must be finite and >= 0"),
            ));
        }
        let c = bath.0.coefficients(t);
        *out = DephaseCoefficients {
            t: c.t,
            l1_re: c.l1.re,
            l1_im: c.l1.im,
            l2: c.l2,
            l3: c.l3,
            gamma: c.gamma,
            g_total: c.g_total,
        };
        Ok(())
    })
}

unsafe fn emit(out: *mut *mut DephaseKrausSet, set: KrausSet) {
    *out = Box::into_raw(Box::new(DephaseKrausSet(set)));
}

unsafe fn bath_time<'a>(bath: *const DephaseBath, t: f64) -> Result<&'a BathSpec, DephaseStatus> {
    let bath = deref(bath)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(fail(
            DephaseStatus::InvalidArgument,
            format!("time {t} must be finite and >= 0"),
        ));
    }
    Ok(&bath.0)
}

/// Vacuum/odd/even triple for two qubits in a common bath.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_common_nonru(
    bath: *const DephaseBath,
    t: f64,
    out: *mut *mut DephaseKrausSet,
) -> DephaseStatus {
    guard(|| {
        let spec = bath_time(bath, t)?;
        check_out(out)?;
        emit(out, build_common_nonru(&spec.coefficients(t)));
        Ok(())
    })
}

/// Four-operator RU set for two qubits in a common bath, phase included.
/// Returns `Infeasible` above the coherence threshold.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_common_ru(
    bath: *const DephaseBath,
    t: f64,
    out: *mut *mut DephaseKrausSet,
) -> DephaseStatus {
    guard(|| {
        let spec = bath_time(bath, t)?;
        check_out(out)?;
        let ru = core(build_common_ru(&spec.coefficients(t)))?;
        emit(out, ru.composed());
        Ok(())
    })
}

/// Even/odd pair for one qubit in its own bath.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_single_qubit_parity(
    bath: *const DephaseBath,
    t: f64,
    out: *mut *mut DephaseKrausSet,
) -> DephaseStatus {
    guard(|| {
        let spec = bath_time(bath, t)?;
        check_out(out)?;
        emit(out, build_single_qubit_parity(spec, t));
        Ok(())
    })
}

/// Sign-basis RU decomposition of the `n_qubits` Schur channel at `gamma`.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_schur_ru(
    n_qubits: usize,
    gamma: f64,
    out: *mut *mut DephaseKrausSet,
) -> DephaseStatus {
    guard(|| {
        check_out(out)?;
        let basis = core(ru_sign_basis(n_qubits))?;
        let schur = core(build_schur_matrix(n_qubits, gamma))?;
        emit(out, core(solve_ru_weights(&basis, &schur))?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_free(set: *mut DephaseKrausSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Hilbert-space dimension, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_dim(set: *const DephaseKrausSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.dim())
}

/// Number of operators, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_len(set: *const DephaseKrausSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

fn index(set: &KrausSet, i: usize) -> Result<(), DephaseStatus> {
    if i >= set.len() {
        return Err(fail(
            DephaseStatus::InvalidArgument,
            format!("operator {i} out of range for {} operators", set.len()),
        ));
    }
    Ok(())
}

/// RU weight of operator `i`; `InvalidArgument` for sets without weights.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_weight(
    set: *const DephaseKrausSet,
    i: usize,
    out: *mut f64,
) -> DephaseStatus {
    guard(|| {
        let set = &deref(set)?.0;
        check_out(out)?;
        index(set, i)?;
        let w = set
            .weights()
            .ok_or_else(|| fail(DephaseStatus::InvalidArgument, "set carries no weights"))?;
        *out = w[i];
        Ok(())
    })
}

/// Writes operator `i` into `buf`, which must hold `2 * dim * dim` doubles.
/// The label is not exposed here.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_operator(
    set: *const DephaseKrausSet,
    i: usize,
    buf: *mut f64,
    buf_len: usize,
) -> DephaseStatus {
    guard(|| {
        let set = &deref(set)?.0;
        check_out(buf)?;
        index(set, i)?;
        let m = &set.ops()[i].matrix;
        let need = 2 * m.rows() * m.cols();
        if buf_len < need {
            return Err(fail(
                DephaseStatus::InvalidArgument,
                format!("buffer needs {need} doubles"),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (k, z) in m.as_slice().iter().enumerate() {
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
        Ok(())
    })
}

/// `max |Σ K†K - I|`.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_completeness_deviation(
    set: *const DephaseKrausSet,
    out: *mut f64,
) -> DephaseStatus {
    guard(|| {
        let set = &deref(set)?.0;
        check_out(out)?;
        *out = set.completeness_defect();
        Ok(())
    })
}

/// `Σ K ρ K†` for a `dim × dim` interleaved complex input; `rho_out` must
/// hold `2 * dim * dim` doubles and may not alias `rho_in`.
#[no_mangle]
pub unsafe extern "C" fn dephase_kraus_apply(
    set: *const DephaseKrausSet,
    rho_in: *const f64,
    rho_out: *mut f64,
    dim: usize,
) -> DephaseStatus {
    guard(|| {
        let set = &deref(set)?.0;
        check_out(rho_out)?;
        if rho_in.is_null() {
            return Err(fail(DephaseStatus::NullPointer, "null input matrix"));
        }
        if dim != set.dim() {
            return Err(fail(
                DephaseStatus::InvalidArgument,
                format!("dimension {dim} does not match set dimension {}", set.dim()),
            ));
        }
        let n = dim * dim;
        let raw = std::slice::from_raw_parts(rho_in, 2 * n);
        let data = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let x = core(ComplexMatrix::new(dim, dim, data))?;
        let y = core(set.apply_matrix(&x))?;
        let out = std::slice::from_raw_parts_mut(rho_out, 2 * n);
        for (k, z) in y.as_slice().iter().enumerate() {
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
        Ok(())
    })
}

/// Runs a CLI command (`coefficients`, `decompose`, `fock`, `basis`,
/// `restore`) on a JSON config without touching the filesystem.
///
/// `*out_report` receives the pretty-printed report (free with
/// [`dephase_string_free`]) and `*out_exit_code` the CLI exit code. Schema
/// errors still produce a report and return `Config`.
#[no_mangle]
pub unsafe extern "C" fn dephase_run_config(
    command: *const c_char,
    config_json: *const c_char,
    out_report: *mut *mut c_char,
    out_exit_code: *mut i32,
) -> DephaseStatus {
    guard(|| {
        let cmd: Command = c_str(command)?
            .parse()
            .map_err(|e: String| fail(DephaseStatus::InvalidArgument, e))?;
        let text = c_str(config_json)?;
        check_out(out_report)?;
        check_out(out_exit_code)?;
        let (output, status) = match RunConfig::from_json(text) {
            Ok(cfg) => (run_command(cmd, &cfg, None), DephaseStatus::Ok),
            Err(e) => {
                set_error(e.to_string());
                (dephase::cli::config_failure(cmd, &e), DephaseStatus::Config)
            }
        };
        let report = CString::new(output.report_text())
            .map_err(|_| fail(DephaseStatus::Numerical, "report contains a NUL byte"))?;
        *out_report = report.into_raw();
        *out_exit_code = output.exit_code;
        if status == DephaseStatus::Ok {
            Ok(())
        } else {
            Err(status)
        }
    })
}
