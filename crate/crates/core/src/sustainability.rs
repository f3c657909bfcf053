//! Squeezing phase at which `Im M~` vanishes.
//!
//! For fixed atom and bath parameters, `Im M~(phi) = a sin(phi) + b cos(phi)`
//! with `a = |M(Omega')| + (1 - Delta~^2)/2 (|M(0)| - |M(Omega')|) = -zeta`
//! and `b = Delta~ delta_M`, so the zeros are `tan(phi) = Delta~ delta_M / zeta`.
//! The closed form is cross-checked by bisection on the full pipeline.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::effective::{effective_params, AtomConfig};
use crate::error::{require, Error, Result};
use crate::spectra::{lambda_mu, spectrum_m_abs, BathConfig, PhaseModel};

/// `|phi*|` above which the small-angle step behind the Omega~ condition is
/// questionable.
pub const SMALL_ANGLE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SustainabilitySolution {
    /// Zero of `Im M~` on `(-pi/2, pi/2]`.
    pub phi_star: f64,
    /// The other zero, `phi_star + pi` up to root-finding error.
    pub phi_companion: f64,
    pub zeta: f64,
    /// `pi |zeta| / delta_M`, when `delta_M > 0`.
    pub omega_tilde_required: Option<f64>,
    /// `0 < omega_tilde_required <= 1`.
    pub feasible: Option<bool>,
    /// `|Im M~(phi_star)|`.
    pub residual: f64,
}

impl SustainabilitySolution {
    pub fn small_angle_valid(&self) -> bool {
        self.phi_star.abs() <= SMALL_ANGLE_LIMIT
    }
}

/// `Im M~` with the phase model replaced by the constant `phi`.
pub fn im_m_tilde(phi: f64, atom: &AtomConfig, bath: &BathConfig) -> Result<f64> {
    let fixed = BathConfig {
        phase_model: PhaseModel::Constant(phi),
        ..*bath
    };
    Ok(effective_params(atom, &fixed)?.m_tilde.im)
}

/// `zeta = (1 - Delta~^2)/2 [|M(Omega')| - |M(0)|] - |M(Omega')|`, together
/// with `Delta~`.
pub fn zeta(atom: &AtomConfig, bath: &BathConfig) -> Result<(f64, f64)> {
    bath.validate()?;
    atom.validate(bath)?;
    let pair = lambda_mu(bath)?;
    let omega_prime = atom.omega_rabi.hypot(atom.delta);
    if omega_prime == 0.0 {
        return Err(Error::DegenerateDrive);
    }
    let delta_tilde = atom.delta / omega_prime;
    let m_side = spectrum_m_abs(omega_prime, &pair);
    let m_center = spectrum_m_abs(0.0, &pair);
    let z = 0.5 * (1.0 - delta_tilde * delta_tilde) * (m_side - m_center) - m_side;
    Ok((z, delta_tilde))
}

fn omega_tilde_fields(z: f64, bath: &BathConfig) -> (Option<f64>, Option<bool>) {
    if bath.delta_m > 0.0 {
        let required = PI * z.abs() / bath.delta_m;
        (Some(required), Some(required > 0.0 && required <= 1.0))
    } else {
        (None, None)
    }
}

/// `phi* = arctan(Delta~ delta_M / zeta)`.
pub fn solve_phi_closed_form(atom: &AtomConfig, bath: &BathConfig) -> Result<SustainabilitySolution> {
    let (z, delta_tilde) = zeta(atom, bath)?;
    let num = delta_tilde * bath.delta_m;
    let phi_star = if z == 0.0 {
        if num == 0.0 {
            return Err(Error::DegenerateCondition);
        }
        // Infinite tangent; the principal branch includes +pi/2.
        FRAC_PI_2
    } else {
        (num / z).atan()
    };
    let residual = im_m_tilde(phi_star, atom, bath)?.abs();
    let (omega_tilde_required, feasible) = omega_tilde_fields(z, bath);
    Ok(SustainabilitySolution {
        phi_star,
        phi_companion: phi_star + PI,
        zeta: z,
        omega_tilde_required,
        feasible,
        residual,
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]` down to width `xtol`;
/// returns `None` when the endpoints do not bracket a root.
fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<Option<f64>> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= xtol {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // Pick the endpoint with the smaller residual.
    let (a, b) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(Some(if a <= b { lo } else { hi }))
}

/// Root of the sinusoid on `[lo, hi]`, falling back to whichever endpoint
/// is closest to zero when rounding hides the sign change at a boundary root.
fn bracket_root<F: Fn(f64) -> Result<f64>>(f: &F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    if let Some(root) = bisect(f, lo, hi, xtol)? {
        return Ok(root);
    }
    let (a, b) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(if b <= a { hi } else { lo })
}

/// Both zeros of `Im M~(phi)` by bisection on `(-pi/2, pi/2]` and
/// `(pi/2, 3pi/2]`, to machine precision.
pub fn solve_phi_root(atom: &AtomConfig, bath: &BathConfig) -> Result<SustainabilitySolution> {
    solve_phi_root_with_tol(atom, bath, 0.0)
}

/// As [`solve_phi_root`], stopping once the bracket is narrower than `xtol`.
pub fn solve_phi_root_with_tol(atom: &AtomConfig, bath: &BathConfig, xtol: f64) -> Result<SustainabilitySolution> {
    let f = |phi: f64| im_m_tilde(phi, atom, bath);
    if f(0.0)? == 0.0 && f(FRAC_PI_2)? == 0.0 {
        return Err(Error::DegenerateCondition);
    }
    let mut phi_star = bracket_root(&f, -FRAC_PI_2, FRAC_PI_2, xtol)?;
    if phi_star <= -FRAC_PI_2 {
        phi_star = FRAC_PI_2;
    }
    let mut phi_companion = bracket_root(&f, FRAC_PI_2, 3.0 * FRAC_PI_2, xtol)?;
    if phi_companion <= FRAC_PI_2 {
        phi_companion = 3.0 * FRAC_PI_2;
    }
    let (z, _) = zeta(atom, bath)?;
    let (omega_tilde_required, feasible) = omega_tilde_fields(z, bath);
    Ok(SustainabilitySolution {
        phi_star,
        phi_companion,
        zeta: z,
        omega_tilde_required,
        feasible,
        residual: f(phi_star)?.abs(),
    })
}

/// Condition `Omega~ = pi |zeta| / delta_M` for the linear phase model.
pub fn omega_tilde_condition(atom: &AtomConfig, bath: &BathConfig) -> Result<SustainabilitySolution> {
    if !matches!(bath.phase_model, PhaseModel::Linear { .. }) {
        return Err(Error::UndefinedCondition(
            "the linear squeezing-phase model is not active",
        ));
    }
    require(
        bath.delta_m >= 0.0,
        "delta_M",
        format!("must be non-negative for the Omega~ condition, got {}", bath.delta_m),
    )?;
    if bath.delta_m == 0.0 {
        return Err(Error::UndefinedCondition("delta_M = 0"));
    }
    solve_phi_closed_form(atom, bath)
}

/// Wrap an angle difference into `(-pi/2, pi/2]`.
pub fn difference_mod_pi(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(PI);
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn generic() -> (AtomConfig, BathConfig) {
        (
            AtomConfig::new(1.0, 0.2).with_xi(0.3),
            BathConfig::new(1.0, 0.25).with_shifts(0.1, 0.1),
        )
    }

    #[test]
    fn vanishes_without_squeezing() {
        let atom = AtomConfig::new(1.0, 0.3);
        let bath = BathConfig::new(1.0, 0.0);
        for k in 0..8 {
            assert_eq!(im_m_tilde(0.8 * k as f64, &atom, &bath).unwrap(), 0.0);
        }
        assert_eq!(solve_phi_root(&atom, &bath), Err(Error::DegenerateCondition));
        assert_eq!(solve_phi_closed_form(&atom, &bath), Err(Error::DegenerateCondition));
    }

    #[test]
    fn resonance_zero_phase() {
        let atom = AtomConfig::new(1.0, 0.0);
        let bath = BathConfig::new(1.0, 0.3).with_shifts(0.0, 0.2);
        assert_eq!(im_m_tilde(0.0, &atom, &bath).unwrap(), 0.0);
        assert_eq!(solve_phi_closed_form(&atom, &bath).unwrap().phi_star, 0.0);
    }

    #[test]
    fn no_m_shift_gives_zero_phase() {
        let atom = AtomConfig::new(1.0, 0.4);
        let bath = BathConfig::new(1.0, 0.3);
        assert_eq!(solve_phi_closed_form(&atom, &bath).unwrap().phi_star, 0.0);
    }

    #[test]
    fn sinusoidal_form() {
        let (atom, bath) = generic();
        let b = im_m_tilde(0.0, &atom, &bath).unwrap();
        let a = im_m_tilde(FRAC_PI_2, &atom, &bath).unwrap();
        for k in 0..10 {
            let phi = -2.9 + 0.61 * k as f64;
            let v = im_m_tilde(phi, &atom, &bath).unwrap();
            assert!((v - (a * phi.sin() + b * phi.cos())).abs() < 1e-12);
        }
        let (z, dt) = zeta(&atom, &bath).unwrap();
        assert_relative_eq!(a, -z, max_relative = 1e-12);
        assert_relative_eq!(b, dt * bath.delta_m, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_and_bisection_agree() {
        let (atom, bath) = generic();
        let c = solve_phi_closed_form(&atom, &bath).unwrap();
        let r = solve_phi_root(&atom, &bath).unwrap();
        assert!(c.residual <= 1e-10);
        assert!(r.residual <= 1e-12);
        assert!(difference_mod_pi(c.phi_star, r.phi_star).abs() <= 1e-10);
        assert!(difference_mod_pi(r.phi_companion, r.phi_star).abs() <= 1e-10);
        assert!(r.phi_star > -FRAC_PI_2 && r.phi_star <= FRAC_PI_2);
    }

    #[test]
    fn omega_tilde_feasibility() {
        let (atom, bath) = generic();
        assert!(matches!(
            omega_tilde_condition(&atom, &bath),
            Err(Error::UndefinedCondition(_))
        ));
        let lin = bath.with_phase(PhaseModel::Linear {
            phi_atomic: 0.0,
            rabi: 1.0,
        });
        let s = omega_tilde_condition(&atom, &lin).unwrap();
        let required = s.omega_tilde_required.unwrap();
        assert_relative_eq!(required, PI * s.zeta.abs() / 0.1, max_relative = 1e-15);
        assert_eq!(s.feasible, Some(required <= 1.0));
        let no_shift = lin.with_shifts(0.1, 0.0);
        assert!(omega_tilde_condition(&atom, &no_shift).is_err());
    }

    #[test]
    fn feasibility_bound() {
        assert_eq!(
            omega_tilde_fields(0.5 * 0.2 / PI, &BathConfig::new(1.0, 0.1).with_shifts(0.0, 0.2)).1,
            Some(true)
        );
        assert_eq!(
            omega_tilde_fields(3.0 * 0.2 / PI, &BathConfig::new(1.0, 0.1).with_shifts(0.0, 0.2)).1,
            Some(false)
        );
        assert_eq!(
            omega_tilde_fields(0.0, &BathConfig::new(1.0, 0.1).with_shifts(0.0, 0.2)).1,
            Some(false)
        );
    }

    #[test]
    fn mod_pi_wrap() {
        assert!(difference_mod_pi(PI + 0.1, 0.1).abs() < 1e-15);
        assert!((difference_mod_pi(0.2, -0.1) - 0.3).abs() < 1e-15);
        assert!(difference_mod_pi(FRAC_PI_2, -FRAC_PI_2).abs() < 1e-15);
    }
}
