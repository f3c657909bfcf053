//! Temporal coherence of an exponentially decaying evolution
//! `U(t) = exp[i alpha t - Gamma t]` and the decay parameter produced by
//! the squeezed bath.

use num_complex::Complex64;

use crate::effective::{effective_params, AtomConfig, EffectiveParams};
use crate::error::{require, Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, QuadratureOptions};
use crate::spectra::BathConfig;

/// `Im M~` below this multiple of its term scale is rounding noise.
pub const IM_M_TILDE_FLOOR: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionSpec {
    pub alpha: f64,
    pub gamma_decay: f64,
}

impl EvolutionSpec {
    pub fn new(alpha: f64, gamma_decay: f64) -> Result<Self> {
        require(
            gamma_decay >= 0.0 && gamma_decay.is_finite(),
            "Gamma",
            format!("decay parameter must be finite and non-negative, got {gamma_decay}"),
        )?;
        require(alpha.is_finite(), "alpha", "must be finite")?;
        Ok(EvolutionSpec { alpha, gamma_decay })
    }

    /// `U(t)`.
    pub fn evolution(&self, t: f64) -> Complex64 {
        (Complex64::new(-self.gamma_decay, self.alpha) * t).exp()
    }
}

/// `g(tau) = exp[i alpha tau - Gamma tau]`.
pub fn degree_of_coherence(spec: &EvolutionSpec, tau: f64) -> Complex64 {
    Complex64::from_polar((-spec.gamma_decay * tau).exp(), spec.alpha * tau)
}

/// Closed form of the windowed coherence function,
/// `sinh(2 Gamma T)/(2 Gamma T) g(tau)`.
pub fn coherence_function_closed(spec: &EvolutionSpec, tau: f64, half_width: f64) -> Complex64 {
    let x = 2.0 * spec.gamma_decay * half_width;
    let window = if x < 1e-4 { 1.0 + x * x / 6.0 } else { x.sinh() / x };
    degree_of_coherence(spec, tau) * window
}

/// Windowed average `(1/2T) int_{-T}^{T} U*(t) U(t + tau) dt` by adaptive
/// quadrature of the product of evolution factors.
pub fn coherence_function_numeric(
    spec: &EvolutionSpec,
    tau: f64,
    half_width: f64,
    opts: QuadratureOptions,
) -> Result<Complex64> {
    require(
        half_width > 0.0 && half_width.is_finite(),
        "T",
        format!("window half-width must be positive, got {half_width}"),
    )?;
    let integrand = |t: f64| spec.evolution(t).conj() * spec.evolution(t + tau);
    // The integrand magnitude peaks at t = -T.
    let peak = integrand(-half_width).norm().max(integrand(half_width).norm());
    let opts = QuadratureOptions {
        abs_tol: opts.abs_tol.max(1e-15 * peak * half_width),
        ..opts
    };
    let re = integrate(|t| integrand(t).re, -half_width, half_width, opts)?;
    let im = integrate(|t| integrand(t).im, -half_width, half_width, opts)?;
    Ok(Complex64::new(re.value, im.value) / (2.0 * half_width))
}

/// `tau_C = 1/(2 Gamma)`; infinite when `Gamma = 0`.
pub fn coherence_time(gamma_decay: f64) -> Result<f64> {
    require(
        gamma_decay >= 0.0,
        "Gamma",
        format!("decay parameter must be non-negative, got {gamma_decay}"),
    )?;
    Ok(if gamma_decay == 0.0 {
        f64::INFINITY
    } else {
        0.5 / gamma_decay
    })
}

/// `tau_C = int_0^inf |g(tau)|^2 dtau` evaluated by quadrature.
pub fn coherence_time_numeric(spec: &EvolutionSpec, opts: QuadratureOptions) -> Result<f64> {
    if spec.gamma_decay == 0.0 {
        return Ok(f64::INFINITY);
    }
    // Rescale so the integrand decays on an O(1) scale.
    let scale = 1.0 / spec.gamma_decay;
    let r = integrate_to_infinity(|u| degree_of_coherence(spec, u * scale).norm_sqr(), 0.0, opts)?;
    Ok(r.value * scale)
}

/// `Im M~` with values inside the rounding band of its constituent terms
/// mapped to exactly zero.
pub fn resolved_im_m_tilde(p: &EffectiveParams) -> f64 {
    let im = p.m_tilde.im;
    if im.abs() <= IM_M_TILDE_FLOOR * p.im_m_tilde_scale {
        0.0
    } else {
        im
    }
}

fn check_denominator(p: &EffectiveParams, bath: &BathConfig) -> Result<()> {
    if !(p.d.abs() >= 1e-14 * bath.gamma.powi(3)) {
        return Err(Error::SingularDenominator { d: p.d });
    }
    Ok(())
}

/// `Gamma = |xi| Omega gamma^2 Im M~ / (4 d)`.
///
/// Negative values (gain rather than decay) are returned as is.
pub fn decay_parameter_squeezed(atom: &AtomConfig, p: &EffectiveParams, bath: &BathConfig) -> Result<f64> {
    check_denominator(p, bath)?;
    let g = bath.gamma;
    Ok(atom.xi_abs * atom.omega_rabi * g * g * resolved_im_m_tilde(p) / (4.0 * p.d))
}

/// Oscillation frequency `alpha` read off the steady-state evolution
/// operator. It does not enter `tau_C`.
pub fn oscillation_frequency(atom: &AtomConfig, p: &EffectiveParams, bath: &BathConfig) -> Result<f64> {
    check_denominator(p, bath)?;
    let g = bath.gamma;
    let (n, dl, om) = (p.n_tilde, p.delta_eff, atom.omega_rabi);
    let k = 0.25 + n * (n + 1.0) - p.m_tilde.norm_sqr() + dl * dl;
    Ok(0.5 * (om * g * g * g * k / p.d - atom.xi_abs * om * g * g * dl / (2.0 * p.d)))
}

/// Timescales for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimescaleReport {
    pub gamma_decay: f64,
    pub tau_c: f64,
    /// Weak dwell time in the frequent-measurement form, once a measurement
    /// time is supplied.
    pub tau_d: Option<f64>,
    /// `tau_C / tau_D`.
    pub ratio: Option<f64>,
    pub d: f64,
    pub alpha: f64,
    pub im_m_tilde: f64,
}

impl TimescaleReport {
    /// The model predicts gain rather than decay.
    pub fn amplifying(&self) -> bool {
        self.gamma_decay < 0.0
    }
}

/// Decay parameter and coherence time from the full squeezed-bath pipeline.
/// `tau_C = 2 d / (|xi| Omega gamma^2 Im M~)`.
pub fn coherence_time_squeezed(atom: &AtomConfig, bath: &BathConfig) -> Result<TimescaleReport> {
    let p = effective_params(atom, bath)?;
    timescales_from_params(atom, &p, bath)
}

pub fn timescales_from_params(atom: &AtomConfig, p: &EffectiveParams, bath: &BathConfig) -> Result<TimescaleReport> {
    let gamma_decay = decay_parameter_squeezed(atom, p, bath)?;
    let g = bath.gamma;
    let im = resolved_im_m_tilde(p);
    let rate = atom.xi_abs * atom.omega_rabi * g * g * im;
    let tau_c = if rate == 0.0 { f64::INFINITY } else { 2.0 * p.d / rate };
    Ok(TimescaleReport {
        gamma_decay,
        tau_c,
        tau_d: None,
        ratio: None,
        d: p.d,
        alpha: oscillation_frequency(atom, p, bath)?,
        im_m_tilde: im,
    })
}
