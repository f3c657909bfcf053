//! C ABI over `sqzvac`.
//!
//! Every entry point returns an [`SqzStatus`]; results are written through
//! caller-supplied pointers. The message for the most recent failure on the
//! calling thread is available from [`sqz_last_error`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sqzvac::cli::parse_config;
use sqzvac::coherence::timescales_from_params;
use sqzvac::dynamics::{integrate_bloch_at, steady_state_analytic, BlochEquations, BlochState};
use sqzvac::ode::IntegratorOptions;
use sqzvac::spectra::{lambda_mu, spectrum_m_abs, spectrum_n};
use sqzvac::sustainability::solve_phi_closed_form;
use sqzvac::zeno::zeno_summary;
use sqzvac::{effective_params, AtomConfig, BathConfig, Error, PhaseModel};

use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    AmplificationThreshold = 3,
    DegenerateDrive = 4,
    SingularDenominator = 5,
    /// Integrator or quadrature failure.
    NumericalFailure = 6,
    DegenerateCondition = 7,
    UndefinedCondition = 8,
    InvalidConfig = 9,
    /// A Rust panic was caught at the boundary.
    Internal = 10,
}

/// `phi` is the squeezing phase.
pub const SQZ_PHASE_CONSTANT: i32 = 0;
/// `phi` is the phase at the atomic frequency; the phase advances by
/// `pi Delta / Omega`.
pub const SQZ_PHASE_LINEAR: i32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SqzParams {
    pub gamma: f64,
    pub epsilon: f64,
    pub omega_rabi: f64,
    pub delta: f64,
    pub xi_abs: f64,
    pub delta_n: f64,
    pub delta_m: f64,
    /// `SQZ_PHASE_CONSTANT` or `SQZ_PHASE_LINEAR`.
    pub phase_model: i32,
    pub phi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqzEffectiveParams {
    pub n_tilde: f64,
    pub m_tilde_re: f64,
    pub m_tilde_im: f64,
    pub delta_eff: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub omega_prime: f64,
    pub d: f64,
    pub phi: f64,
    /// `N~(N~+1) - |M~|^2`.
    pub physicality_margin: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqzBlochState {
    pub sigma_minus_re: f64,
    pub sigma_minus_im: f64,
    pub sigma_z: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqzTimescales {
    /// Negative when the model predicts gain.
    pub gamma_decay: f64,
    /// `INFINITY` when `gamma_decay` is zero.
    pub tau_c: f64,
    pub d: f64,
    pub alpha: f64,
    pub im_m_tilde: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqzZeno {
    pub tau_c: f64,
    pub tau_d_exact: f64,
    pub tau_d_frequent: f64,
    pub ratio: f64,
    pub sustainable: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqzSustainability {
    pub phi_star: f64,
    pub phi_companion: f64,
    pub zeta: f64,
    /// `NAN` when `delta_M <= 0`.
    pub omega_tilde_required: f64,
    /// 1 feasible, 0 infeasible, -1 not applicable.
    pub feasible: i32,
    pub residual: f64,
}

/// Opaque model handle.
pub struct SqzModel {
    atom: AtomConfig,
    bath: BathConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SqzStatus {
    match e {
        Error::InvalidParameter { .. } | Error::LinearPhaseWithoutDrive | Error::OutsideWindow { .. } => {
            SqzStatus::InvalidParameter
        }
        Error::AmplificationThreshold { .. } => SqzStatus::AmplificationThreshold,
        Error::DegenerateDrive => SqzStatus::DegenerateDrive,
        Error::SingularDenominator { .. } | Error::SingularSystem | Error::SingularWeakValue => {
            SqzStatus::SingularDenominator
        }
        Error::StepSizeUnderflow { .. }
        | Error::MaxStepsExceeded { .. }
        | Error::SteadyStateNotReached { .. }
        | Error::QuadratureNotConverged { .. } => SqzStatus::NumericalFailure,
        Error::DegenerateCondition => SqzStatus::DegenerateCondition,
        Error::UndefinedCondition(_) => SqzStatus::UndefinedCondition,
    }
}

/// Runs `f`, recording its error message and converting panics.
fn guard<F: FnOnce() -> Result<(), (SqzStatus, String)>>(f: F) -> SqzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SqzStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SqzStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (SqzStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (SqzStatus, String) {
    (SqzStatus::NullPointer, "null pointer argument".into())
}

unsafe fn model_ref<'a>(model: *const SqzModel) -> Result<&'a SqzModel, (SqzStatus, String)> {
    model.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (SqzStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn install(model: SqzModel, out: *mut *mut SqzModel) -> Result<(), (SqzStatus, String)> {
    model.bath.validate().map_err(lib_err)?;
    model.atom.validate(&model.bath).map_err(lib_err)?;
    unsafe { write(out, Box::into_raw(Box::new(model))) }
}

/// Creates a model from explicit parameters. Free it with [`sqz_model_free`].
#[no_mangle]
pub unsafe extern "C" fn sqz_model_new(params: *const SqzParams, out: *mut *mut SqzModel) -> SqzStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(null)?;
        let phase_model = match p.phase_model {
            SQZ_PHASE_CONSTANT => PhaseModel::Constant(p.phi),
            SQZ_PHASE_LINEAR => PhaseModel::Linear {
                phi_atomic: p.phi,
                rabi: p.omega_rabi,
            },
            other => {
                return Err((SqzStatus::InvalidParameter, format!("unknown phase model {other}")));
            }
        };
        let bath = BathConfig::new(p.gamma, p.epsilon)
            .with_phase(phase_model)
            .with_shifts(p.delta_n, p.delta_m);
        let atom = AtomConfig::new(p.omega_rabi, p.delta).with_xi(p.xi_abs);
        install(SqzModel { atom, bath }, out)
    })
}

/// Creates a model from the text of a run configuration.
#[no_mangle]
pub unsafe extern "C" fn sqz_model_from_config(text: *const c_char, out: *mut *mut SqzModel) -> SqzStatus {
    guard(|| {
        if text.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (SqzStatus::InvalidConfig, "configuration is not valid UTF-8".to_string()))?;
        let cfg = parse_config(text).map_err(|e| (SqzStatus::InvalidConfig, e.to_string()))?;
        install(
            SqzModel {
                atom: cfg.atom,
                bath: cfg.bath,
            },
            out,
        )
    })
}

/// Releases a model. Null is accepted.
#[no_mangle]
pub unsafe extern "C" fn sqz_model_free(model: *mut SqzModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Reservoir spectra `N(x)` and `|M(x)|`.
#[no_mangle]
pub unsafe extern "C" fn sqz_spectra(
    model: *const SqzModel,
    x: f64,
    n_out: *mut f64,
    m_abs_out: *mut f64,
) -> SqzStatus {
    guard(|| {
        let m = model_ref(model)?;
        let pair = lambda_mu(&m.bath).map_err(lib_err)?;
        write(n_out, spectrum_n(x, &pair))?;
        write(m_abs_out, spectrum_m_abs(x, &pair))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sqz_effective_params(model: *const SqzModel, out: *mut SqzEffectiveParams) -> SqzStatus {
    guard(|| {
        let m = model_ref(model)?;
        let p = effective_params(&m.atom, &m.bath).map_err(lib_err)?;
        write(
            out,
            SqzEffectiveParams {
                n_tilde: p.n_tilde,
                m_tilde_re: p.m_tilde.re,
                m_tilde_im: p.m_tilde.im,
                delta_eff: p.delta_eff,
                beta_re: p.beta.re,
                beta_im: p.beta.im,
                omega_prime: p.omega_prime,
                d: p.d,
                phi: p.phi,
                physicality_margin: p.physicality().margin,
            },
        )
    })
}

/// Closed-form steady state.
#[no_mangle]
pub unsafe extern "C" fn sqz_steady_state(model: *const SqzModel, out: *mut SqzBlochState) -> SqzStatus {
    guard(|| {
        let m = model_ref(model)?;
        let p = effective_params(&m.atom, &m.bath).map_err(lib_err)?;
        let ss = steady_state_analytic(&p, &m.atom, &m.bath).map_err(lib_err)?;
        write(
            out,
            SqzBlochState {
                sigma_minus_re: ss.sigma_minus_ss.re,
                sigma_minus_im: ss.sigma_minus_ss.im,
                sigma_z: ss.sigma_z_ss,
            },
        )
    })
}

/// Integrates the Bloch equations from `initial` and writes the state at
/// each of the `count` non-decreasing `times` into `out`.
#[no_mangle]
pub unsafe extern "C" fn sqz_bloch_trajectory(
    model: *const SqzModel,
    initial: SqzBlochState,
    times: *const f64,
    count: usize,
    out: *mut SqzBlochState,
) -> SqzStatus {
    guard(|| {
        let m = model_ref(model)?;
        if count == 0 {
            return Ok(());
        }
        if times.is_null() || out.is_null() {
            return Err(null());
        }
        let times = std::slice::from_raw_parts(times, count);
        let p = effective_params(&m.atom, &m.bath).map_err(lib_err)?;
        let eqs = BlochEquations::new(&p, &m.atom, &m.bath);
        let start = BlochState::new(
            Complex64::new(initial.sigma_minus_re, initial.sigma_minus_im),
            initial.sigma_z,
        );
        let traj = integrate_bloch_at(&eqs, start, times, &IntegratorOptions::default()).map_err(lib_err)?;
        let out = std::slice::from_raw_parts_mut(out, count);
        for (slot, point) in out.iter_mut().zip(traj) {
            *slot = SqzBlochState {
                sigma_minus_re: point.state.sigma_minus.re,
                sigma_minus_im: point.state.sigma_minus.im,
                sigma_z: point.state.sigma_z,
            };
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sqz_timescales(model: *const SqzModel, out: *mut SqzTimescales) -> SqzStatus {
    guard(|| {
        let m = model_ref(model)?;
        let p = effective_params(&m.atom, &m.bath).map_err(lib_err)?;
        let r = timescales_from_params(&m.atom, &p, &m.bath).map_err(lib_err)?;
        write(
            out,
            SqzTimescales {
                gamma_decay: r.gamma_decay,
                tau_c: r.tau_c,
                d: r.d,
                alpha: r.alpha,
                im_m_tilde: r.im_m_tilde,
            },
        )
    })
}

/// Dwell-time figures for decay parameter `gamma_decay` and measurement
/// time `tau_m`.
#[no_mangle]
pub unsafe extern "C" fn sqz_zeno(gamma_decay: f64, tau_m: f64, out: *mut SqzZeno) -> SqzStatus {
    guard(|| {
        let s = zeno_summary(gamma_decay, tau_m).map_err(lib_err)?;
        write(
            out,
            SqzZeno {
                tau_c: s.tau_c,
                tau_d_exact: s.tau_d_exact,
                tau_d_frequent: s.tau_d_frequent,
                ratio: s.ratio.ratio,
                sustainable: s.ratio.sustainable,
            },
        )
    })
}

/// Squeezing phase at which `Im M~` vanishes.
#[no_mangle]
pub unsafe extern "C" fn sqz_sustainability(model: *const SqzModel, out: *mut SqzSustainability) -> SqzStatus {
    guard(|| {
        let m = model_ref(model)?;
        let s = solve_phi_closed_form(&m.atom, &m.bath).map_err(lib_err)?;
        write(
            out,
            SqzSustainability {
                phi_star: s.phi_star,
                phi_companion: s.phi_companion,
                zeta: s.zeta,
                omega_tilde_required: s.omega_tilde_required.unwrap_or(f64::NAN),
                feasible: s.feasible.map_or(-1, i32::from),
                residual: s.residual,
            },
        )
    })
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sqz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sqz_status_name(status: SqzStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SqzStatus::Ok => c"ok",
        SqzStatus::NullPointer => c"null pointer",
        SqzStatus::InvalidParameter => c"invalid parameter",
        SqzStatus::AmplificationThreshold => c"amplification threshold",
        SqzStatus::DegenerateDrive => c"degenerate drive",
        SqzStatus::SingularDenominator => c"singular denominator",
        SqzStatus::NumericalFailure => c"numerical failure",
        SqzStatus::DegenerateCondition => c"degenerate condition",
        SqzStatus::UndefinedCondition => c"undefined condition",
        SqzStatus::InvalidConfig => c"invalid configuration",
        SqzStatus::Internal => c"internal error",
    };
    s.as_ptr()
}
