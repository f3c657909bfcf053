//! Explicit Runge-Kutta integration for small dense systems.
//!
//! The adaptive scheme is Dormand-Prince 5(4) with local extrapolation and
//! FSAL reuse of the last stage. A classical fixed-step RK4 path is kept for
//! reproducibility runs where the step sequence must not depend on error
//! estimates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Initial step; chosen from the problem scale when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Use fixed-step RK4 with this step instead of the adaptive scheme.
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            atol: 1e-10,
            rtol: 1e-8,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            fixed_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(atol: f64, rtol: f64) -> Self {
        IntegratorOptions {
            atol,
            rtol,
            ..Default::default()
        }
    }
}

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// Adaptive integrator state for an autonomous or time-dependent system
/// `y' = f(t, y)`.
pub struct Integrator<F, const N: usize>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    opts: IntegratorOptions,
    t: f64,
    y: [f64; N],
    h: f64,
    k1: [f64; N],
    steps: usize,
    attempts: usize,
}

impl<F, const N: usize> Integrator<F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: F, t0: f64, y0: [f64; N], opts: IntegratorOptions) -> Self {
        let k1 = f(t0, &y0);
        let mut this = Integrator {
            f,
            opts,
            t: t0,
            y: y0,
            h: 0.0,
            k1,
            steps: 0,
            attempts: 0,
        };
        this.h = opts.h_init.unwrap_or_else(|| this.initial_step());
        this
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn derivative(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    // Hairer-Norsett-Wanner starting step heuristic.
    fn initial_step(&self) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.k1[i] / sc).powi(2);
        }
        let n = N as f64;
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(&self.y, &[(h0, &self.k1)]);
        let k = (self.f)(self.t + h0, &y1);
        let mut d2 = 0.0;
        for ((ki, k1i), yi) in k.iter().zip(&self.k1).zip(&self.y) {
            d2 += ((ki - k1i) / self.scale(*yi, *yi)).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 5.0)
        };
        (100.0 * h0).min(h1).min(self.opts.h_max)
    }

    /// Advance to exactly `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        if let Some(h) = self.opts.fixed_step {
            return self.advance_fixed(t_end, h);
        }
        while self.t < t_end {
            self.step_toward(t_end)?;
        }
        Ok(())
    }

    /// Take one accepted adaptive step towards `t_end`, never overshooting.
    /// Returns the new time.
    pub fn step_toward(&mut self, t_end: f64) -> Result<f64> {
        if let Some(h) = self.opts.fixed_step {
            let target = (self.t + h).min(t_end);
            self.advance_fixed(target, h)?;
            return Ok(self.t);
        }
        while self.t < t_end {
            if self.attempts >= self.opts.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: self.opts.max_steps,
                    t_final: t_end,
                });
            }
            let remaining = t_end - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h <= 16.0 * f64::EPSILON * self.t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { t: self.t, h });
            }
            let (y_new, k7, err) = self.dp_step(h);
            let err = if err.is_nan() { f64::INFINITY } else { err };
            self.attempts += 1;
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                self.y = y_new;
                self.k1 = k7;
                self.steps += 1;
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                };
                // Keep the controller's proposal when the step was truncated
                // to hit the output time.
                if !last || fac < 1.0 {
                    self.h = (h * fac).min(self.opts.h_max);
                }
                return Ok(self.t);
            }
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            self.h = h * fac;
        }
        Ok(self.t)
    }

    fn dp_step(&self, h: f64) -> ([f64; N], [f64; N], f64) {
        let (t, y, k1) = (self.t, &self.y, &self.k1);
        let f = &self.f;
        let k2 = f(t + C2 * h, &axpy(y, &[(h * A21, k1)]));
        let k3 = f(t + C3 * h, &axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(y, &[(h * A51, k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                y,
                &[
                    (h * A61, k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            ),
        );
        let y_new = axpy(
            y,
            &[(h * B1, k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)],
        );
        let k7 = f(t + h, &y_new);
        let mut acc = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            acc += (e / self.scale(y[i], y_new[i])).powi(2);
        }
        (y_new, k7, (acc / N as f64).sqrt())
    }

    fn advance_fixed(&mut self, t_end: f64, h_nominal: f64) -> Result<()> {
        if !(h_nominal > 0.0) {
            return Err(Error::InvalidParameter {
                name: "fixed_step",
                reason: format!("must be positive, got {h_nominal}"),
            });
        }
        let span = t_end - self.t;
        if span <= 0.0 {
            return Ok(());
        }
        let n = (span / h_nominal).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let t0 = self.t;
        let f = &self.f;
        for s in 0..n {
            let t = t0 + s as f64 * h;
            let y = &self.y;
            let k1 = f(t, y);
            let k2 = f(t + 0.5 * h, &axpy(y, &[(0.5 * h, &k1)]));
            let k3 = f(t + 0.5 * h, &axpy(y, &[(0.5 * h, &k2)]));
            let k4 = f(t + h, &axpy(y, &[(h, &k3)]));
            self.y = axpy(y, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)]);
            self.steps += 1;
        }
        self.t = t_end;
        self.k1 = f(self.t, &self.y);
        Ok(())
    }
}

/// Integrate from `t0` and record the state at each requested time.
/// `times` must be non-decreasing and start at or after `t0`.
pub fn solve_at<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    times: &[f64],
    opts: IntegratorOptions,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut integ = Integrator::new(f, t0, y0, opts);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        integ.advance_to(t)?;
        out.push(*integ.y());
    }
    Ok(out)
}
