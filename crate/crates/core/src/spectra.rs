//! Lorentzian squeezing spectra of a finite-bandwidth squeezed vacuum.
//!
//! The reservoir is described by a photon-number spectrum `N(x)` and a
//! two-photon correlation spectrum `M(x) = |M(x)| e^{i phi}`, both functions
//! of the offset `x = omega - omega_L` from the laser frequency. They are
//! built from two Lorentzians of half-widths `lambda = gamma/2 + epsilon`
//! and `mu = gamma/2 - epsilon`.

use std::f64::consts::PI;

use crate::error::{require, Error, Result};

/// Squeezing-phase model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseModel {
    /// A single phase independent of detuning.
    Constant(f64),
    /// `phi(Delta) = phi_atomic + pi * Delta / rabi`.
    Linear { phi_atomic: f64, rabi: f64 },
}

impl Default for PhaseModel {
    fn default() -> Self {
        PhaseModel::Constant(0.0)
    }
}

/// Squeezed-reservoir parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathConfig {
    /// Cavity damping rate, `gamma = 2 pi K(Omega)^2`.
    pub gamma: f64,
    /// Real amplification constant.
    pub epsilon: f64,
    /// Laser frequency. Spectra are evaluated at offsets from it, so it only
    /// matters for the detuning consistency check.
    pub omega_laser: Option<f64>,
    pub phase_model: PhaseModel,
    /// Squeezing-induced shift attached to `N`.
    pub delta_n: f64,
    /// Squeezing-induced shift attached to `M`.
    pub delta_m: f64,
}

impl BathConfig {
    /// Bath with the given damping and amplification, zero shifts and zero
    /// constant phase.
    pub fn new(gamma: f64, epsilon: f64) -> Self {
        BathConfig {
            gamma,
            epsilon,
            omega_laser: None,
            phase_model: PhaseModel::default(),
            delta_n: 0.0,
            delta_m: 0.0,
        }
    }

    pub fn with_phase(mut self, phase_model: PhaseModel) -> Self {
        self.phase_model = phase_model;
        self
    }

    pub fn with_shifts(mut self, delta_n: f64, delta_m: f64) -> Self {
        self.delta_n = delta_n;
        self.delta_m = delta_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.gamma.is_finite() && self.gamma > 0.0,
            "gamma",
            format!("must be finite and positive, got {}", self.gamma),
        )?;
        require(
            self.epsilon.is_finite() && self.epsilon >= 0.0,
            "epsilon",
            format!("must be finite and non-negative, got {}", self.epsilon),
        )?;
        if self.epsilon >= 0.5 * self.gamma {
            return Err(Error::AmplificationThreshold {
                epsilon: self.epsilon,
                half_gamma: 0.5 * self.gamma,
            });
        }
        require(self.delta_n.is_finite(), "delta_N", "must be finite")?;
        require(self.delta_m.is_finite(), "delta_M", "must be finite")?;
        require(self.omega_laser.is_none_or(f64::is_finite), "omega_L", "must be finite")?;
        match self.phase_model {
            PhaseModel::Constant(phi) => require(phi.is_finite(), "phi", "must be finite"),
            PhaseModel::Linear { phi_atomic, rabi } => {
                require(phi_atomic.is_finite(), "phi", "must be finite")?;
                require(rabi.is_finite(), "Omega", "must be finite")
            }
        }
    }
}

/// Lorentzian half-widths `(lambda, mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPair {
    pub lambda: f64,
    pub mu: f64,
}

impl SpectralPair {
    /// `(lambda^2 - mu^2) / 4`, formed as `(lambda - mu)(lambda + mu) / 4`.
    fn amplitude(&self) -> f64 {
        0.25 * (self.lambda - self.mu) * (self.lambda + self.mu)
    }
}

pub fn lambda_mu(cfg: &BathConfig) -> Result<SpectralPair> {
    cfg.validate()?;
    Ok(SpectralPair {
        lambda: 0.5 * cfg.gamma + cfg.epsilon,
        mu: 0.5 * cfg.gamma - cfg.epsilon,
    })
}

/// Photon-number spectrum `N(x)`.
///
/// The difference of Lorentzians is evaluated in product form,
/// `N = (lambda^2 - mu^2)^2 / (4 (x^2 + mu^2)(x^2 + lambda^2))`, which is
/// free of cancellation in the tails.
pub fn spectrum_n(x: f64, pair: &SpectralPair) -> f64 {
    let x2 = x * x;
    let a = pair.amplitude();
    4.0 * a * a / ((x2 + pair.mu * pair.mu) * (x2 + pair.lambda * pair.lambda))
}

/// Magnitude of the two-photon correlation spectrum `|M(x)|`.
pub fn spectrum_m_abs(x: f64, pair: &SpectralPair) -> f64 {
    let x2 = x * x;
    pair.amplitude() * (1.0 / (x2 + pair.mu * pair.mu) + 1.0 / (x2 + pair.lambda * pair.lambda))
}

/// Squeezing phase at detuning `delta`.
pub fn squeezing_phase(cfg: &BathConfig, delta: f64) -> Result<f64> {
    match cfg.phase_model {
        PhaseModel::Constant(phi) => Ok(phi),
        PhaseModel::Linear { phi_atomic, rabi } => {
            if rabi == 0.0 {
                return Err(Error::LinearPhaseWithoutDrive);
            }
            Ok(phi_atomic + PI * delta / rabi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(gamma: f64, epsilon: f64) -> SpectralPair {
        lambda_mu(&BathConfig::new(gamma, epsilon)).unwrap()
    }

    #[test]
    fn lambda_mu_cases() {
        assert_eq!(pair(1.0, 0.0), SpectralPair { lambda: 0.5, mu: 0.5 });
        assert_eq!(pair(1.0, 0.25), SpectralPair { lambda: 0.75, mu: 0.25 });
        assert!(matches!(
            lambda_mu(&BathConfig::new(1.0, 0.5)),
            Err(Error::AmplificationThreshold { .. })
        ));
        assert!(lambda_mu(&BathConfig::new(0.0, 0.0)).is_err());
        assert!(lambda_mu(&BathConfig::new(1.0, -0.1)).is_err());
    }

    #[test]
    fn pair_sums_to_gamma() {
        for &(g, e) in &[(1.0, 0.1), (2.5, 1.2), (0.3, 0.0)] {
            let p = pair(g, e);
            assert_eq!(p.lambda + p.mu, g);
            assert!(p.lambda >= p.mu && p.mu > 0.0);
        }
    }

    #[test]
    fn hand_substituted_values_at_zero_offset() {
        // lambda = 3/4, mu = 1/4: (lambda^2 - mu^2)/4 = 1/8,
        // N(0) = (1/8)(16 - 16/9) = 16/9, |M(0)| = (1/8)(16 + 16/9) = 20/9.
        let p = pair(1.0, 0.25);
        assert_relative_eq!(spectrum_n(0.0, &p), 16.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(spectrum_m_abs(0.0, &p), 20.0 / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn vacuum_spectra_vanish() {
        let p = pair(1.0, 0.0);
        for x in [-3.0, 0.0, 0.7, 100.0] {
            assert_eq!(spectrum_n(x, &p), 0.0);
            assert_eq!(spectrum_m_abs(x, &p), 0.0);
        }
    }

    #[test]
    fn lorentzian_tails() {
        let p = pair(1.0, 0.25);
        assert!(spectrum_n(100.0, &p) < 1e-3 * spectrum_n(0.0, &p));
        for x in [0.0, 0.3, 2.0, 50.0] {
            assert!(spectrum_m_abs(x, &p) >= spectrum_n(x, &p));
            assert_eq!(spectrum_n(x, &p), spectrum_n(-x, &p));
            assert_eq!(spectrum_m_abs(x, &p), spectrum_m_abs(-x, &p));
        }
    }

    #[test]
    fn n_at_zero_grows_with_epsilon() {
        let mut last = -1.0;
        for k in 0..40 {
            let n0 = spectrum_n(0.0, &pair(1.0, 0.0125 * k as f64));
            assert!(n0 > last);
            last = n0;
        }
    }

    #[test]
    fn phase_models() {
        let lin = BathConfig::new(1.0, 0.1).with_phase(PhaseModel::Linear {
            phi_atomic: 0.0,
            rabi: 10.0,
        });
        assert_eq!(squeezing_phase(&lin, 0.0).unwrap(), 0.0);
        assert_relative_eq!(squeezing_phase(&lin, 1.0).unwrap(), PI / 10.0, max_relative = 1e-15);
        let c = BathConfig::new(1.0, 0.1).with_phase(PhaseModel::Constant(0.3));
        assert_eq!(squeezing_phase(&c, 7.0).unwrap(), 0.3);
        let bad = BathConfig::new(1.0, 0.1).with_phase(PhaseModel::Linear {
            phi_atomic: 0.0,
            rabi: 0.0,
        });
        assert_eq!(squeezing_phase(&bad, 1.0), Err(Error::LinearPhaseWithoutDrive));
    }
}
