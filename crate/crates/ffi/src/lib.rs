//! C ABI over `breather-lab`.
//!
//! Objects are opaque handles created by `bl_*_new` / `bl_integrate*` and
//! released with the matching `bl_*_free`. Every fallible call returns a
//! [`BlStatus`]; on failure the message is available from [`bl_last_error`]
//! on the same thread. Absent optional reals are reported as NaN.
//!
//! Buffers are caller-allocated; a call with a too-short buffer fails with
//! `BL_STATUS_BUFFER_TOO_SMALL` and writes nothing.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use breather_lab::creutz::equivalence_check;
use breather_lab::evolve::{averaged_observables, extract_period, integrate, Trajectory};
use breather_lab::lattice::{GammaProfile, LatticeParams, StateVector};
use breather_lab::spectral::{analytic_defect, build_linear_model, eigensolve};
use breather_lab::{Complex64, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Domain = 3,
    Dimension = 4,
    SingularTransform = 5,
    NotLocalized = 6,
    NoBoundState = 7,
    NoConvergence = 8,
    BlowUp = 9,
    Config = 10,
    Io = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// Lattice parameters.
pub struct BlParams(LatticeParams);

/// A sampled time evolution.
pub struct BlTrajectory(Trajectory);

/// Closed-form end-defect quantities; NaN where undefined.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BlDefect {
    pub kappa_d: f64,
    pub kappa_0: f64,
    pub r: f64,
    pub gamma_c: f64,
    pub a: f64,
    pub b: f64,
    pub e_d: f64,
    pub period: f64,
    pub norm_sq: f64,
    pub weight: f64,
    pub gamma_s_c: f64,
    pub gamma_0_c: f64,
    pub kappa_s_c: f64,
    pub kappa_0_c: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BlStatus {
    match err {
        Error::InvalidParams(_) => BlStatus::InvalidParams,
        Error::Domain(_) => BlStatus::Domain,
        Error::Dimension { .. } => BlStatus::Dimension,
        Error::SingularTransform { .. } => BlStatus::SingularTransform,
        Error::NotLocalized { .. } => BlStatus::NotLocalized,
        Error::NoBoundState { .. } => BlStatus::NoBoundState,
        Error::NoConvergence { .. } => BlStatus::NoConvergence,
        Error::BlowUp { .. } => BlStatus::BlowUp,
        Error::Config { .. } => BlStatus::Config,
        Error::Io(_) | Error::Csv(_) => BlStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Small { need: usize, got: usize },
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BlStatus::NullPointer
        }
        Ok(Err(Fail::Small { need, got })) => {
            set_error(format!("buffer holds {got} elements, need {need}"));
            BlStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            BlStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    if len < need {
        return Err(Fail::Small { need, got: len });
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    p.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to a `BlParams *`.
#[no_mangle]
pub unsafe extern "C" fn bl_params_new(
    n_cells: usize,
    kappa: f64,
    nu: f64,
    gamma0: f64,
    gammas: f64,
    i_sat: f64,
    out: *mut *mut BlParams,
) -> BlStatus {
    guard(|| {
        let p = LatticeParams::new(n_cells, kappa, nu, gamma0, gammas, i_sat)?;
        write_out(out, Box::into_raw(Box::new(BlParams(p))), "out")
    })
}

/// # Safety
/// `params` must come from `bl_params_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bl_params_free(params: *mut BlParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Saturable hopping `gamma(I)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_gamma_of_intensity(
    params: *const BlParams,
    intensity: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let p = as_ref(params, "params")?;
        write_out(out, p.0.gamma_of_intensity(intensity)?, "out")
    })
}

/// Critical nonreciprocity `sqrt(kappa^2 - nu^2)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_gamma_c(params: *const BlParams, out: *mut f64) -> BlStatus {
    guard(|| {
        let p = as_ref(params, "params")?;
        write_out(out, p.0.gamma_c(), "out")
    })
}

/// Evolves the state `re + i im` (length `2 * n_cells`).
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_integrate(
    params: *const BlParams,
    re: *const f64,
    im: *const f64,
    len: usize,
    t_final: f64,
    dt: f64,
    stride: usize,
    out: *mut *mut BlTrajectory,
) -> BlStatus {
    guard(|| {
        let p = as_ref(params, "params")?;
        if re.is_null() || im.is_null() {
            return Err(Fail::Null("re/im"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let amps = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let s0 = StateVector::new(amps)?;
        let traj = integrate(&p.0, &s0, t_final, dt, stride)?;
        write_out(out, Box::into_raw(Box::new(BlTrajectory(traj))), "out")
    })
}

/// Evolves `sqrt(i_in)` on the first site.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_integrate_single_site(
    params: *const BlParams,
    i_in: f64,
    t_final: f64,
    dt: f64,
    stride: usize,
    out: *mut *mut BlTrajectory,
) -> BlStatus {
    guard(|| {
        let p = as_ref(params, "params")?;
        let s0 = StateVector::single_site(p.0.n_cells, i_in)?;
        let traj = integrate(&p.0, &s0, t_final, dt, stride)?;
        write_out(out, Box::into_raw(Box::new(BlTrajectory(traj))), "out")
    })
}

/// # Safety
/// `traj` must come from `bl_integrate*` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bl_trajectory_free(traj: *mut BlTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of stored samples; 0 for NULL.
///
/// # Safety
/// `traj` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn bl_trajectory_len(traj: *const BlTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Number of cells; 0 for NULL.
///
/// # Safety
/// `traj` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn bl_trajectory_n_cells(traj: *const BlTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.n_cells())
}

/// Sample times into `out[0 .. len(traj)]`.
///
/// # Safety
/// `out` must hold `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_trajectory_times(
    traj: *const BlTrajectory,
    out: *mut f64,
    out_len: usize,
) -> BlStatus {
    guard(|| {
        let t = as_ref(traj, "traj")?;
        let dst = out_slice(out, out_len, t.0.len(), "out")?;
        dst.copy_from_slice(t.0.times());
        Ok(())
    })
}

/// Cell intensities of one sample into `out[0 .. n_cells]`.
///
/// # Safety
/// `out` must hold `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_trajectory_intensities(
    traj: *const BlTrajectory,
    sample: usize,
    out: *mut f64,
    out_len: usize,
) -> BlStatus {
    guard(|| {
        let t = as_ref(traj, "traj")?;
        if sample >= t.0.len() {
            return Err(Error::Domain(format!("sample {sample} out of range for {} samples", t.0.len())).into());
        }
        let dst = out_slice(out, out_len, t.0.n_cells(), "out")?;
        dst.copy_from_slice(&t.0.intensities_at(sample));
        Ok(())
    })
}

/// Time averages of `I_n` and `gamma_n` over `[t_start, t_end]`, each into a
/// buffer of `n_cells` doubles.
///
/// # Safety
/// Pointers must be valid; buffers must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_averages(
    traj: *const BlTrajectory,
    params: *const BlParams,
    t_start: f64,
    t_end: f64,
    i_bar: *mut f64,
    gamma_bar: *mut f64,
    out_len: usize,
) -> BlStatus {
    guard(|| {
        let t = as_ref(traj, "traj")?;
        let p = as_ref(params, "params")?;
        let n = t.0.n_cells();
        let i_dst = out_slice(i_bar, out_len, n, "i_bar")?;
        let g_dst = out_slice(gamma_bar, out_len, n, "gamma_bar")?;
        let avg = averaged_observables(&t.0, &p.0, t_start, t_end)?;
        i_dst.copy_from_slice(&avg.i_bar_cells);
        g_dst.copy_from_slice(&avg.gamma_bar_cells);
        Ok(())
    })
}

/// Period of `I_cell(t)` after `t_transient` (0-based cell); NaN when the
/// signal is not periodic.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_period(
    traj: *const BlTrajectory,
    cell: usize,
    t_transient: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let t = as_ref(traj, "traj")?;
        let period = extract_period(&t.0, cell, t_transient)?;
        write_out(out, period.unwrap_or(f64::NAN), "out")
    })
}

/// Closed-form defect solution for `gamma_1 = gamma_d`, others `gamma_0`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_analytic_defect(
    kappa: f64,
    nu: f64,
    gamma_d: f64,
    gamma_0: f64,
    out: *mut BlDefect,
) -> BlStatus {
    guard(|| {
        let s = analytic_defect(kappa, nu, gamma_d, gamma_0)?;
        let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
        let d = BlDefect {
            kappa_d: s.kappa_d,
            kappa_0: s.kappa_0,
            r: s.r,
            gamma_c: s.gamma_c,
            a: nan(s.a),
            b: nan(s.b),
            e_d: nan(s.e_d),
            period: nan(s.period),
            norm_sq: nan(s.norm_sq),
            weight: nan(s.weight),
            gamma_s_c: nan(s.gamma_sc),
            gamma_0_c: nan(s.gamma_0c),
            kappa_s_c: nan(s.kappa_sc),
            kappa_0_c: nan(s.kappa_0c),
        };
        write_out(out, d, "out")
    })
}

/// Ascending eigenvalues of the linear chain with per-cell `gammas`
/// (`n_cells` entries) into `energies[0 .. 2 n_cells]`; `in_gap` may be NULL,
/// otherwise it receives 0/1 flags.
///
/// # Safety
/// `gammas` must hold `n_cells` doubles; output buffers must hold `out_len`
/// elements.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum(
    kappa: f64,
    nu: f64,
    gammas: *const f64,
    n_cells: usize,
    energies: *mut f64,
    in_gap: *mut u8,
    out_len: usize,
) -> BlStatus {
    guard(|| {
        if gammas.is_null() {
            return Err(Fail::Null("gammas"));
        }
        let g = std::slice::from_raw_parts(gammas, n_cells).to_vec();
        let profile = GammaProfile::new(g, kappa)?;
        let spec = eigensolve(&build_linear_model(kappa, nu, &profile)?)?;
        let e_dst = out_slice(energies, out_len, spec.eigenvalues.len(), "energies")?;
        e_dst.copy_from_slice(&spec.eigenvalues);
        if !in_gap.is_null() {
            let g_dst = out_slice(in_gap, out_len, spec.in_gap.len(), "in_gap")?;
            for (d, &f) in g_dst.iter_mut().zip(&spec.in_gap) {
                *d = u8::from(f);
            }
        }
        Ok(())
    })
}

/// Largest relative cell-intensity deviation between the chain and its
/// Creutz-ladder image for a single-site start.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bl_creutz_equivalence(
    params: *const BlParams,
    i_in: f64,
    t_final: f64,
    dt: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let p = as_ref(params, "params")?;
        let s0 = StateVector::single_site(p.0.n_cells, i_in)?;
        write_out(out, equivalence_check(&p.0, &s0, t_final, dt)?, "out")
    })
}
