//! Bandwidth-corrected master-equation coefficients.
//!
//! For a drive of Rabi frequency `Omega` at detuning `Delta` the dressed
//! splitting is `Omega' = sqrt(Omega^2 + Delta^2)`. The finite-bandwidth
//! bath is sampled at the laser frequency (offset 0) and at the dressed
//! sideband (offset `Omega'`), and those samples are folded into the
//! effective `N~`, `M~`, `delta`, `beta` together with the steady-state
//! denominator `d`.

use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::spectra::{lambda_mu, spectrum_m_abs, spectrum_n, squeezing_phase, BathConfig};

/// Two-level-atom parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomConfig {
    /// Rabi frequency `Omega`.
    pub omega_rabi: f64,
    /// Atomic transition frequency, optional; when given together with the
    /// laser frequency it must reproduce `delta`.
    pub omega_atomic: Option<f64>,
    /// Detuning `Delta = omega_L - omega_A`.
    pub delta: f64,
    /// Attenuation magnitude `|xi|`.
    pub xi_abs: f64,
}

impl AtomConfig {
    pub fn new(omega_rabi: f64, delta: f64) -> Self {
        AtomConfig {
            omega_rabi,
            omega_atomic: None,
            delta,
            xi_abs: 0.0,
        }
    }

    pub fn with_xi(mut self, xi_abs: f64) -> Self {
        self.xi_abs = xi_abs;
        self
    }

    pub fn validate(&self, bath: &BathConfig) -> Result<()> {
        require(
            self.omega_rabi.is_finite() && self.omega_rabi >= 0.0,
            "Omega",
            format!("must be finite and non-negative, got {}", self.omega_rabi),
        )?;
        require(
            self.xi_abs.is_finite() && self.xi_abs >= 0.0,
            "xi_abs",
            format!("must be finite and non-negative, got {}", self.xi_abs),
        )?;
        require(self.delta.is_finite(), "Delta", "must be finite")?;
        if let (Some(omega_a), Some(omega_l)) = (self.omega_atomic, bath.omega_laser) {
            let expected = omega_l - omega_a;
            let scale = omega_l.abs().max(omega_a.abs()).max(1.0);
            require(
                (self.delta - expected).abs() <= 1e-12 * scale,
                "Delta",
                format!("Delta = {} disagrees with omega_L - omega_A = {}", self.delta, expected),
            )?;
        }
        Ok(())
    }
}

/// Effective coefficients of the squeezed-bath master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub n_tilde: f64,
    pub m_tilde: Complex64,
    pub delta_eff: f64,
    pub beta: Complex64,
    pub omega_prime: f64,
    pub omega_tilde: f64,
    pub delta_tilde: f64,
    pub upsilon_minus: Complex64,
    /// Steady-state denominator.
    pub d: f64,
    /// Squeezing phase the coefficients were built with.
    pub phi: f64,
    /// Sum of the magnitudes of the terms that make up `Im M~`; sets the
    /// round-off floor below which `Im M~` is indistinguishable from zero.
    pub im_m_tilde_scale: f64,
}

/// `Upsilon_- = N(0) - N(Omega') - [|M(0)| - |M(Omega')|] e^{i phi}`.
pub fn upsilon_minus(bath: &BathConfig, omega_prime: f64, phi: f64) -> Result<Complex64> {
    let pair = lambda_mu(bath)?;
    let dn = spectrum_n(0.0, &pair) - spectrum_n(omega_prime, &pair);
    let dm = spectrum_m_abs(0.0, &pair) - spectrum_m_abs(omega_prime, &pair);
    Ok(Complex64::new(dn, 0.0) - dm * Complex64::from_polar(1.0, phi))
}

pub fn effective_params(atom: &AtomConfig, bath: &BathConfig) -> Result<EffectiveParams> {
    bath.validate()?;
    atom.validate(bath)?;
    let pair = lambda_mu(bath)?;

    let omega = atom.omega_rabi;
    let delta = atom.delta;
    let gamma = bath.gamma;
    let omega_prime = omega.hypot(delta);
    if omega_prime == 0.0 {
        return Err(Error::DegenerateDrive);
    }
    let omega_tilde = omega / omega_prime;
    let delta_tilde = delta / omega_prime;
    let phi = squeezing_phase(bath, delta)?;
    let e_phi = Complex64::from_polar(1.0, phi);
    let i = Complex64::i();

    let n_side = spectrum_n(omega_prime, &pair);
    let m_side = spectrum_m_abs(omega_prime, &pair);
    let m_center = spectrum_m_abs(0.0, &pair);
    let ups = upsilon_minus(bath, omega_prime, phi)?;
    // 1 - Delta~^2 = Omega~^2
    let weight = 0.5 * (1.0 - delta_tilde * delta_tilde);

    let n_tilde = n_side + weight * ups.re;
    let m_tilde = m_side * e_phi - weight * ups + i * delta_tilde * bath.delta_m * e_phi;
    let delta_eff = delta / gamma - weight * ups.im + delta_tilde * bath.delta_n;
    let beta = gamma * omega_tilde * (bath.delta_n + bath.delta_m * e_phi - i * delta_tilde * ups);

    let d = steady_state_denominator(gamma, omega, n_tilde, m_tilde, delta_eff, beta);

    let im_m_tilde_scale = (m_side * phi.sin()).abs()
        + (weight * (m_center - m_side) * phi.sin()).abs()
        + (delta_tilde * bath.delta_m * phi.cos()).abs();

    Ok(EffectiveParams {
        n_tilde,
        m_tilde,
        delta_eff,
        beta,
        omega_prime,
        omega_tilde,
        delta_tilde,
        upsilon_minus: ups,
        d,
        phi,
        im_m_tilde_scale,
    })
}

/// `d = gamma^3 (1 + 2N)(1/4 + N(N+1) - |M|^2 + delta^2)
///    + gamma Omega [(1/2 + N + Re M)(Omega + Re beta) + Im beta (Im M + delta)]`.
pub fn steady_state_denominator(gamma: f64, omega: f64, n: f64, m: Complex64, delta: f64, beta: Complex64) -> f64 {
    let k = 0.25 + n * (n + 1.0) - m.norm_sqr() + delta * delta;
    gamma.powi(3) * (1.0 + 2.0 * n) * k
        + gamma * omega * ((0.5 + n + m.re) * (omega + beta.re) + beta.im * (m.im + delta))
}

/// Outcome of the squeezing bound `|M~|^2 <= N~(N~+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub passes: bool,
    /// `N~(N~+1) - |M~|^2`; negative when violated.
    pub margin: f64,
}

pub fn physicality_check(n_tilde: f64, m_tilde: Complex64) -> Physicality {
    let margin = n_tilde * (n_tilde + 1.0) - m_tilde.norm_sqr();
    Physicality {
        passes: margin >= 0.0,
        margin,
    }
}

impl EffectiveParams {
    pub fn physicality(&self) -> Physicality {
        physicality_check(self.n_tilde, self.m_tilde)
    }
}
