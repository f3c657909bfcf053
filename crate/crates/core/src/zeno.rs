//! Survival weak values, weak-value dwell time and the coherence/dwell
//! ratio under repeated interaction with the field.
//!
//! With interactions at `t_i` and `t_f = t_i + tau_m` the survival weak
//! value is
//!
//! ```text
//! P_w(t) = e^{-Gamma (t - t_i)} (1 - e^{(-Gamma + i k dE)(t_f - t)}) / (1 - e^{(-Gamma + i k dE) tau_m})
//! ```
//!
//! and for `k dE = 0` its time integral over the window is the dwell time.

use num_complex::Complex64;

use crate::coherence::{coherence_time, TimescaleReport};
use crate::error::{require, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementWindow {
    t_i: f64,
    t_f: f64,
    tau_m: f64,
    /// Energy offset `k dE` of the post-selected state.
    pub k_delta_e: f64,
}

impl MeasurementWindow {
    pub fn new(t_i: f64, t_f: f64) -> Result<Self> {
        require(
            t_i.is_finite() && t_f.is_finite() && t_f > t_i,
            "t_f",
            format!("window must satisfy t_f > t_i, got [{t_i}, {t_f}]"),
        )?;
        Ok(MeasurementWindow {
            t_i,
            t_f,
            tau_m: t_f - t_i,
            k_delta_e: 0.0,
        })
    }

    /// Window `[t_i, t_i + tau_m]`.
    pub fn from_duration(t_i: f64, tau_m: f64) -> Result<Self> {
        require(
            tau_m > 0.0 && tau_m.is_finite(),
            "tau_m",
            format!("must be positive, got {tau_m}"),
        )?;
        Self::new(t_i, t_i + tau_m)
    }

    pub fn with_energy_offset(mut self, k_delta_e: f64) -> Self {
        self.k_delta_e = k_delta_e;
        self
    }

    pub fn t_i(&self) -> f64 {
        self.t_i
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn tau_m(&self) -> f64 {
        self.tau_m
    }

    fn check(&self, t: f64, gamma_decay: f64) -> Result<()> {
        require(
            gamma_decay >= 0.0,
            "Gamma",
            format!("decay parameter must be non-negative, got {gamma_decay}"),
        )?;
        if !(t >= self.t_i && t <= self.t_f) {
            return Err(Error::OutsideWindow {
                t,
                t_i: self.t_i,
                t_f: self.t_f,
            });
        }
        Ok(())
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
fn expm1_complex(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin,
        z.re.exp() * z.im.sin(),
    )
}

/// Complex survival weak value for a post-selected state offset by `k dE`.
pub fn survival_weak_value(t: f64, w: &MeasurementWindow, gamma_decay: f64) -> Result<Complex64> {
    w.check(t, gamma_decay)?;
    let rate = Complex64::new(-gamma_decay, w.k_delta_e);
    let prefactor = (-gamma_decay * (t - w.t_i)).exp();
    let num = expm1_complex(rate * (w.t_f - t));
    let den = expm1_complex(rate * w.tau_m);
    if den.norm() == 0.0 {
        if rate.norm() == 0.0 {
            // Gamma = k dE = 0: removable singularity, linear survival.
            return Ok(Complex64::new((w.t_f - t) / w.tau_m, 0.0));
        }
        return Err(Error::SingularWeakValue);
    }
    if den.norm() < 1e-12 * rate.norm() * w.tau_m {
        // Phase k dE tau_m wraps to a multiple of 2 pi with no damping.
        return Err(Error::SingularWeakValue);
    }
    Ok(prefactor * num / den)
}

/// Real survival weak value for `E_k = E_0`.
pub fn survival_probability_weak(t: f64, w: &MeasurementWindow, gamma_decay: f64) -> Result<f64> {
    w.check(t, gamma_decay)?;
    if gamma_decay == 0.0 {
        return Ok((w.t_f - t) / w.tau_m);
    }
    let decay = (-gamma_decay * (t - w.t_i)).exp();
    Ok(decay * (-gamma_decay * (w.t_f - t)).exp_m1() / (-gamma_decay * w.tau_m).exp_m1())
}

fn check_rates(gamma_decay: f64, tau_m: f64) -> Result<()> {
    require(
        gamma_decay >= 0.0 && gamma_decay.is_finite(),
        "Gamma",
        format!("decay parameter must be finite and non-negative, got {gamma_decay}"),
    )?;
    require(
        tau_m > 0.0 && tau_m.is_finite(),
        "tau_m",
        format!("measurement time must be positive, got {tau_m}"),
    )
}

/// `tau_D = (1/Gamma) [1 - Gamma tau_m / (e^{Gamma tau_m} - 1)]`, with the
/// `Gamma -> 0` limit `tau_m / 2`.
pub fn dwell_time_weak(gamma_decay: f64, tau_m: f64) -> Result<f64> {
    check_rates(gamma_decay, tau_m)?;
    let x = gamma_decay * tau_m;
    if x < 0.1 {
        // 1 - x/(e^x - 1) = x/2 - x^2/12 + x^4/720 - x^6/30240 + x^8/1209600 - ...
        let x2 = x * x;
        return Ok(tau_m * (0.5 - x / 12.0 + x * x2 * (1.0 / 720.0 - x2 / 30240.0 + x2 * x2 / 1_209_600.0)));
    }
    Ok((1.0 - x / x.exp_m1()) / gamma_decay)
}

/// `tau_D = 1 / (2/tau_m + Gamma)`, valid for `Gamma tau_m << 1`.
pub fn dwell_time_frequent(gamma_decay: f64, tau_m: f64) -> Result<f64> {
    check_rates(gamma_decay, tau_m)?;
    Ok(1.0 / (2.0 / tau_m + gamma_decay))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoRatio {
    /// `tau_C / tau_D = 1/2 + 1/(tau_m Gamma)`.
    pub ratio: f64,
    /// Coherence outlives the dwell time (`ratio > 1`).
    pub sustainable: bool,
}

pub fn coherence_dwell_ratio(gamma_decay: f64, tau_m: f64) -> Result<ZenoRatio> {
    check_rates(gamma_decay, tau_m)?;
    let ratio = if gamma_decay == 0.0 {
        f64::INFINITY
    } else {
        0.5 + 1.0 / (tau_m * gamma_decay)
    };
    Ok(ZenoRatio {
        ratio,
        sustainable: ratio > 1.0,
    })
}

/// Dwell-time figures for one `(Gamma, tau_m)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoSummary {
    pub gamma_decay: f64,
    pub tau_m: f64,
    pub tau_c: f64,
    pub tau_d_exact: f64,
    pub tau_d_frequent: f64,
    pub ratio: ZenoRatio,
}

pub fn zeno_summary(gamma_decay: f64, tau_m: f64) -> Result<ZenoSummary> {
    Ok(ZenoSummary {
        gamma_decay,
        tau_m,
        tau_c: coherence_time(gamma_decay)?,
        tau_d_exact: dwell_time_weak(gamma_decay, tau_m)?,
        tau_d_frequent: dwell_time_frequent(gamma_decay, tau_m)?,
        ratio: coherence_dwell_ratio(gamma_decay, tau_m)?,
    })
}

impl TimescaleReport {
    /// Fill `tau_d` and `ratio` from the report's own decay parameter.
    pub fn with_dwell(mut self, tau_m: f64) -> Result<Self> {
        self.tau_d = Some(dwell_time_frequent(self.gamma_decay, tau_m)?);
        self.ratio = Some(coherence_dwell_ratio(self.gamma_decay, tau_m)?.ratio);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn survival_boundaries() {
        let w = MeasurementWindow::new(1.0, 3.0).unwrap();
        assert_relative_eq!(
            survival_probability_weak(1.0, &w, 0.8).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert_eq!(survival_probability_weak(3.0, &w, 0.8).unwrap(), 0.0);
        let wk = w.with_energy_offset(1.7);
        assert_eq!(survival_weak_value(3.0, &wk, 0.8).unwrap().norm(), 0.0);
        assert!((survival_weak_value(1.0, &wk, 0.8).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn survival_midpoint_value() {
        let w = MeasurementWindow::new(0.0, 2.0).unwrap();
        let e = std::f64::consts::E;
        let expected = (1.0 / e) * (1.0 - 1.0 / e) / (1.0 - 1.0 / (e * e));
        assert_relative_eq!(
            survival_probability_weak(1.0, &w, 1.0).unwrap(),
            expected,
            max_relative = 1e-14
        );
        // independent straight-line form
        let direct = (-1.0f64).exp() * (1.0 - (-1.0f64).exp()) / (1.0 - (-2.0f64).exp());
        assert_relative_eq!(
            survival_weak_value(1.0, &w, 1.0).unwrap().re,
            direct,
            max_relative = 1e-14
        );
    }

    #[test]
    fn complex_and_real_paths_agree_at_zero_offset() {
        let w = MeasurementWindow::new(-0.5, 1.5).unwrap();
        for gamma in [0.0, 1e-9, 0.3, 4.0] {
            for k in 0..=10 {
                let t = -0.5 + 0.2 * k as f64;
                let c = survival_weak_value(t, &w, gamma).unwrap();
                let r = survival_probability_weak(t, &w, gamma).unwrap();
                assert!((c.re - r).abs() <= 1e-14 && c.im == 0.0, "gamma {gamma} t {t}");
            }
        }
    }

    #[test]
    fn window_errors() {
        assert!(MeasurementWindow::new(1.0, 1.0).is_err());
        let w = MeasurementWindow::new(0.0, 1.0).unwrap();
        assert!(matches!(
            survival_weak_value(1.5, &w, 0.1),
            Err(Error::OutsideWindow { .. })
        ));
        assert!(survival_weak_value(0.5, &w, -0.1).is_err());
        let wrap = w.with_energy_offset(2.0 * std::f64::consts::PI);
        assert_eq!(survival_weak_value(0.5, &wrap, 0.0), Err(Error::SingularWeakValue));
    }

    #[test]
    fn dwell_limits() {
        assert_eq!(dwell_time_weak(0.0, 3.0).unwrap(), 1.5);
        let tiny = dwell_time_weak(1e-8, 3.0).unwrap();
        assert!((tiny - 1.5).abs() < 1e-7);
        assert!(dwell_time_weak(1e3, 1.0).unwrap() > 0.99e-3);
        assert!(dwell_time_weak(-1.0, 1.0).is_err());
        assert!(dwell_time_weak(1.0, 0.0).is_err());
        assert_eq!(dwell_time_frequent(0.0, 4.0).unwrap(), 2.0);
    }

    #[test]
    fn frequent_form_gap_is_a_third_of_gamma_tau_m() {
        // tau_m (1/2 - x/12) against tau_m / (2 + x): relative gap x/3 + O(x^2)
        for x in [1e-4, 3e-4, 1e-3, 1e-2] {
            let exact = dwell_time_weak(x, 1.0).unwrap();
            let frequent = dwell_time_frequent(x, 1.0).unwrap();
            let gap = (exact - frequent) / exact;
            assert!((gap - x / 3.0).abs() < 0.5 * x * x, "x = {x}: gap {gap}");
        }
        let at = |x: f64| {
            (dwell_time_weak(x, 1.0).unwrap() - dwell_time_frequent(x, 1.0).unwrap()) / dwell_time_weak(x, 1.0).unwrap()
        };
        assert!(at(3e-4) < 1e-4);
        assert!(at(1e-2) > 1e-4);
    }

    #[test]
    fn series_branch_is_continuous() {
        let tau_m = 2.0;
        // d tau_D / d x = -tau_m / 12 + O(x^2) near the switch at x = 0.1
        let dx = 1e-9;
        let below = dwell_time_weak((0.1 - dx) / tau_m, tau_m).unwrap();
        let above = dwell_time_weak((0.1 + dx) / tau_m, tau_m).unwrap();
        let slope = tau_m * (1.0 / 12.0 - 3.0 * 0.01 / 720.0);
        assert!(((below - above) - 2.0 * dx * slope).abs() < 1e-14);
    }

    #[test]
    fn ratio_examples() {
        let r = coherence_dwell_ratio(1.0, 2.0).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(!r.sustainable);
        assert_relative_eq!(
            coherence_dwell_ratio(0.1, 1.0).unwrap().ratio,
            10.5,
            max_relative = 1e-15
        );
        let free = coherence_dwell_ratio(0.0, 1.0).unwrap();
        assert_eq!(free.ratio, f64::INFINITY);
        assert!(free.sustainable);
    }

    #[test]
    fn ratio_is_coherence_over_frequent_dwell() {
        for (g, t) in [(0.3, 0.7), (2.0, 0.01), (1e-3, 5.0)] {
            let r = coherence_dwell_ratio(g, t).unwrap().ratio;
            let via = coherence_time(g).unwrap() / dwell_time_frequent(g, t).unwrap();
            assert_relative_eq!(r, via, max_relative = 1e-12);
        }
    }

    #[test]
    fn report_gets_dwell_columns() {
        let rep = TimescaleReport {
            gamma_decay: 0.5,
            tau_c: 1.0,
            tau_d: None,
            ratio: None,
            d: 1.0,
            alpha: 0.0,
            im_m_tilde: 0.1,
        }
        .with_dwell(0.2)
        .unwrap();
        assert_relative_eq!(rep.ratio.unwrap(), 0.5 + 1.0 / 0.1, max_relative = 1e-15);
        assert_relative_eq!(rep.tau_d.unwrap(), 1.0 / 10.5, max_relative = 1e-15);
    }
}
