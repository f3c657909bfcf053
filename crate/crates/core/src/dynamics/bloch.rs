//! Moment (Bloch-type) equations for `<sigma_->`, `<sigma_+>`, `<sigma_z>`.
//!
//! ```text
//! d<s->/dt = -gamma (1/2 + N - i delta) <s-> - gamma M <s+> + (i/2) Omega <sz>
//! d<s+>/dt = conjugate of the line above
//! d<sz>/dt = i (Omega + beta*) <s-> - i (Omega + beta) <s+> - gamma (1 + 2N) <sz> - gamma
//! ```

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::effective::{AtomConfig, EffectiveParams};
use crate::error::{Error, Result};
use crate::ode::{Integrator, IntegratorOptions};
use crate::spectra::BathConfig;

/// Expectation values of the atomic operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub sigma_minus: Complex64,
    pub sigma_plus: Complex64,
    pub sigma_z: f64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState {
        sigma_minus: Complex64::new(0.0, 0.0),
        sigma_plus: Complex64::new(0.0, 0.0),
        sigma_z: -1.0,
    };

    /// State with `<s+> = <s->*`.
    pub fn new(sigma_minus: Complex64, sigma_z: f64) -> Self {
        BlochState {
            sigma_minus,
            sigma_plus: sigma_minus.conj(),
            sigma_z,
        }
    }

    /// `|<s+> - <s->*|`.
    pub fn conjugacy_defect(&self) -> f64 {
        (self.sigma_plus - self.sigma_minus.conj()).norm()
    }

    /// `<sigma_x> = (<s-> + <s+>)/2` in the half-normalised convention.
    pub fn sigma_x(&self) -> Complex64 {
        0.5 * (self.sigma_minus + self.sigma_plus)
    }

    pub fn sigma_y(&self) -> Complex64 {
        0.5 * Complex64::i() * (self.sigma_minus - self.sigma_plus)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.sigma_z.abs() <= 1.0 + tol && self.sigma_minus.norm() <= 0.5 + tol
    }

    pub fn norm(&self) -> f64 {
        (self.sigma_minus.norm_sqr() + self.sigma_plus.norm_sqr() + self.sigma_z * self.sigma_z).sqrt()
    }

    pub fn distance(&self, other: &BlochState) -> f64 {
        ((self.sigma_minus - other.sigma_minus).norm_sqr()
            + (self.sigma_plus - other.sigma_plus).norm_sqr()
            + (self.sigma_z - other.sigma_z).powi(2))
        .sqrt()
    }

    pub(crate) fn to_array(self) -> [f64; 5] {
        [
            self.sigma_minus.re,
            self.sigma_minus.im,
            self.sigma_plus.re,
            self.sigma_plus.im,
            self.sigma_z,
        ]
    }

    pub(crate) fn from_array(y: &[f64; 5]) -> Self {
        BlochState {
            sigma_minus: Complex64::new(y[0], y[1]),
            sigma_plus: Complex64::new(y[2], y[3]),
            sigma_z: y[4],
        }
    }
}

/// Coefficients of the moment equations for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochEquations {
    pub gamma: f64,
    pub omega: f64,
    pub n_tilde: f64,
    pub m_tilde: Complex64,
    pub delta_eff: f64,
    pub beta: Complex64,
}

impl BlochEquations {
    pub fn new(p: &EffectiveParams, atom: &AtomConfig, bath: &BathConfig) -> Self {
        BlochEquations {
            gamma: bath.gamma,
            omega: atom.omega_rabi,
            n_tilde: p.n_tilde,
            m_tilde: p.m_tilde,
            delta_eff: p.delta_eff,
            beta: p.beta,
        }
    }

    /// Time derivative of `state`. The `sigma_z` slot holds the real part of
    /// `d<sz>/dt`, which is exactly real whenever `<s+> = <s->*`.
    pub fn rhs(&self, s: &BlochState) -> BlochState {
        let i = Complex64::i();
        let g = self.gamma;
        let om = Complex64::new(self.omega, 0.0);
        let sz = Complex64::new(s.sigma_z, 0.0);
        let decay = Complex64::new(0.5 + self.n_tilde, -self.delta_eff);

        let d_minus = -g * decay * s.sigma_minus - g * self.m_tilde * s.sigma_plus + 0.5 * i * om * sz;
        let d_plus = -g * decay.conj() * s.sigma_plus - g * self.m_tilde.conj() * s.sigma_minus - 0.5 * i * om * sz;
        let d_z = i * (om + self.beta.conj()) * s.sigma_minus
            - i * (om + self.beta) * s.sigma_plus
            - g * (1.0 + 2.0 * self.n_tilde) * sz
            - g;
        BlochState {
            sigma_minus: d_minus,
            sigma_plus: d_plus,
            sigma_z: d_z.re,
        }
    }

    /// `(A, b)` with `d/dt (s-, s+, sz) = A (s-, s+, sz) + b`.
    pub fn linear_system(&self) -> (Matrix3<Complex64>, Vector3<Complex64>) {
        let i = Complex64::i();
        let g = self.gamma;
        let om = Complex64::new(self.omega, 0.0);
        let decay = Complex64::new(0.5 + self.n_tilde, -self.delta_eff);
        let a = Matrix3::new(
            -g * decay,
            -g * self.m_tilde,
            0.5 * i * om,
            -g * self.m_tilde.conj(),
            -g * decay.conj(),
            -0.5 * i * om,
            i * (om + self.beta.conj()),
            -i * (om + self.beta),
            Complex64::new(-g * (1.0 + 2.0 * self.n_tilde), 0.0),
        );
        let b = Vector3::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-g, 0.0),
        );
        (a, b)
    }

    /// Euclidean norm of the derivative.
    pub fn residual(&self, s: &BlochState) -> f64 {
        self.rhs(s).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: BlochState,
}

fn system(eqs: &BlochEquations) -> impl Fn(f64, &[f64; 5]) -> [f64; 5] + '_ {
    move |_, y| eqs.rhs(&BlochState::from_array(y)).to_array()
}

/// Integrate from `t = 0` to `t_final`, recording every accepted step
/// (including the initial point).
pub fn integrate_bloch(
    eqs: &BlochEquations,
    initial: BlochState,
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<Vec<TrajectoryPoint>> {
    check_horizon(t_final, opts)?;
    let mut integ = Integrator::new(system(eqs), 0.0, initial.to_array(), *opts);
    let mut out = vec![TrajectoryPoint { t: 0.0, state: initial }];
    while integ.t() < t_final {
        let t = integ.step_toward(t_final)?;
        out.push(TrajectoryPoint {
            t,
            state: BlochState::from_array(integ.y()),
        });
    }
    Ok(out)
}

/// Integrate and sample at the given non-decreasing times.
pub fn integrate_bloch_at(
    eqs: &BlochEquations,
    initial: BlochState,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<TrajectoryPoint>> {
    check_horizon(times.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE), opts)?;
    let mut integ = Integrator::new(system(eqs), 0.0, initial.to_array(), *opts);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < integ.t() {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "sample times must be non-decreasing and non-negative".into(),
            });
        }
        integ.advance_to(t)?;
        out.push(TrajectoryPoint {
            t,
            state: BlochState::from_array(integ.y()),
        });
    }
    Ok(out)
}

fn check_horizon(t_final: f64, opts: &IntegratorOptions) -> Result<()> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            reason: format!("must be positive and finite, got {t_final}"),
        });
    }
    if !(opts.atol > 0.0 && opts.rtol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "integrator tolerances must be positive".into(),
        });
    }
    Ok(())
}

/// Steady-state expectation values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub sigma_z_ss: f64,
    pub sigma_plus_ss: Complex64,
    pub sigma_minus_ss: Complex64,
    pub d: f64,
}

impl SteadyState {
    pub fn as_bloch(&self) -> BlochState {
        BlochState {
            sigma_minus: self.sigma_minus_ss,
            sigma_plus: self.sigma_plus_ss,
            sigma_z: self.sigma_z_ss,
        }
    }

    /// `|a - b| / max(|b|, floor)` over the three moments.
    pub fn relative_distance(&self, other: &SteadyState) -> f64 {
        let b = other.as_bloch();
        self.as_bloch().distance(&b) / b.norm().max(1e-300)
    }
}

/// Closed-form steady state.
///
/// ```text
/// <sz>_ss = -gamma^3 (1/4 + N(N+1) - |M|^2 + delta^2) / d
/// <s+>_ss = i Omega gamma^2 (1/2 + N + M* - i delta) / (2 d)
/// ```
pub fn steady_state_analytic(p: &EffectiveParams, atom: &AtomConfig, bath: &BathConfig) -> Result<SteadyState> {
    let g = bath.gamma;
    let d = p.d;
    if !(d.abs() >= 1e-14 * g.powi(3)) {
        return Err(Error::SingularDenominator { d });
    }
    let n = p.n_tilde;
    let m = p.m_tilde;
    let k = 0.25 + n * (n + 1.0) - m.norm_sqr() + p.delta_eff * p.delta_eff;
    let sigma_z_ss = -g * g * g * k / d;
    let sigma_plus_ss =
        Complex64::i() * (atom.omega_rabi / (2.0 * d)) * g * g * (Complex64::new(0.5 + n, -p.delta_eff) + m.conj());
    Ok(SteadyState {
        sigma_z_ss,
        sigma_plus_ss,
        sigma_minus_ss: sigma_plus_ss.conj(),
        d,
    })
}

/// Steady state from the 3x3 linear solve `A v = -b`.
pub fn steady_state_numeric(p: &EffectiveParams, atom: &AtomConfig, bath: &BathConfig) -> Result<SteadyState> {
    let eqs = BlochEquations::new(p, atom, bath);
    let (a, b) = eqs.linear_system();
    let lu = a.lu();
    let mut v = lu.solve(&(-b)).ok_or(Error::SingularSystem)?;
    // One round of iterative refinement.
    let r = a * v + b;
    if let Some(dv) = lu.solve(&(-r)) {
        v += dv;
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    // Average the two conjugate slots so the reported pair is exactly conjugate.
    let sm = 0.5 * (v[0] + v[1].conj());
    Ok(SteadyState {
        sigma_z_ss: v[2].re,
        sigma_plus_ss: sm.conj(),
        sigma_minus_ss: sm,
        d: p.d,
    })
}

/// Default long-time horizon `100 / (gamma (1 + 2N))`.
pub fn default_horizon(eqs: &BlochEquations) -> f64 {
    100.0 / (eqs.gamma * (1.0 + 2.0 * eqs.n_tilde))
}

/// Block budget for [`steady_state_long_time`]. Strong squeezing leaves one
/// quadrature relaxing at roughly `gamma / (8 N~)`, far slower than the
/// default horizon suggests.
pub const LONG_TIME_MAX_BLOCKS: usize = 1000;

/// Steady state by integrating from `initial` until `|rhs| < 1e-10 gamma`.
///
/// Integration proceeds in blocks of the default horizon; after `max_blocks`
/// blocks without convergence the residual is reported as an error.
///
/// Unless `opts.h_max` is set, steps are capped at the inverse row-sum norm
/// of the Bloch matrix. Left uncapped, the controller settles on the edge of
/// the stability region and its noise floor sits above the threshold.
pub fn steady_state_long_time(
    eqs: &BlochEquations,
    initial: BlochState,
    opts: &IntegratorOptions,
    max_blocks: usize,
) -> Result<SteadyState> {
    let horizon = default_horizon(eqs);
    let threshold = 1e-10 * eqs.gamma;
    let mut opts = *opts;
    if opts.h_max.is_infinite() {
        let (a, _) = eqs.linear_system();
        let norm = (0..3)
            .map(|i| (0..3).map(|j| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        if norm > 0.0 {
            opts.h_max = 1.0 / norm;
        }
    }
    let mut integ = Integrator::new(system(eqs), 0.0, initial.to_array(), opts);
    let mut state = initial;
    for block in 1..=max_blocks.max(1) {
        integ.advance_to(horizon * block as f64)?;
        state = BlochState::from_array(integ.y());
        if eqs.residual(&state) < threshold {
            break;
        }
    }
    let residual = eqs.residual(&state);
    if !(residual < threshold) {
        return Err(Error::SteadyStateNotReached { t: integ.t(), residual });
    }
    let (n, m, dl, om, b, g) = (eqs.n_tilde, eqs.m_tilde, eqs.delta_eff, eqs.omega, eqs.beta, eqs.gamma);
    Ok(SteadyState {
        sigma_z_ss: state.sigma_z,
        sigma_plus_ss: state.sigma_plus,
        sigma_minus_ss: state.sigma_minus,
        d: crate::effective::steady_state_denominator(g, om, n, m, dl, b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::effective_params;

    fn eqs_with(n: f64, m: Complex64, delta: f64, omega: f64, beta: Complex64) -> BlochEquations {
        BlochEquations {
            gamma: 1.0,
            omega,
            n_tilde: n,
            m_tilde: m,
            delta_eff: delta,
            beta,
        }
    }

    #[test]
    fn undriven_fixed_point() {
        let n = 0.37;
        let eqs = eqs_with(n, Complex64::new(0.2, 0.1), 0.3, 0.0, Complex64::new(0.1, -0.2));
        let s = BlochState::new(Complex64::new(0.0, 0.0), -1.0 / (1.0 + 2.0 * n));
        assert!(eqs.residual(&s) < 1e-15);
    }

    #[test]
    fn pure_spontaneous_decay_rhs() {
        let eqs = eqs_with(0.0, Complex64::new(0.0, 0.0), 0.0, 0.0, Complex64::new(0.0, 0.0));
        for z in [-1.0, -0.2, 0.5, 1.0] {
            let d = eqs.rhs(&BlochState::new(Complex64::new(0.0, 0.0), z));
            assert_eq!(d.sigma_z, -(z + 1.0));
        }
    }

    #[test]
    fn spontaneous_decay_trajectory() {
        let eqs = eqs_with(0.0, Complex64::new(0.0, 0.0), 0.4, 0.0, Complex64::new(0.0, 0.0));
        let tol = 1e-10;
        let opts = IntegratorOptions::with_tolerances(tol, tol);
        let z0 = 0.6;
        let traj = integrate_bloch(&eqs, BlochState::new(Complex64::new(0.1, 0.05), z0), 8.0, &opts).unwrap();
        assert!(traj.len() > 2);
        for pt in &traj {
            let exact = -1.0 + (z0 + 1.0) * (-pt.t).exp();
            assert!((pt.state.sigma_z - exact).abs() <= tol, "t = {}", pt.t);
            assert!(pt.state.conjugacy_defect() <= 1e-12);
        }
        assert_eq!(traj.last().unwrap().t, 8.0);
    }

    #[test]
    fn steady_state_is_a_fixed_point_of_the_integrator() {
        let bath = BathConfig::new(1.0, 0.2).with_shifts(0.05, 0.1);
        let atom = AtomConfig::new(1.2, 0.3);
        let p = effective_params(&atom, &bath).unwrap();
        let eqs = BlochEquations::new(&p, &atom, &bath);
        let ss = steady_state_analytic(&p, &atom, &bath).unwrap();
        let tol = 1e-10;
        let traj = integrate_bloch(&eqs, ss.as_bloch(), 30.0, &IntegratorOptions::with_tolerances(tol, tol)).unwrap();
        for pt in traj {
            assert!(pt.state.distance(&ss.as_bloch()) <= 10.0 * tol);
        }
    }

    #[test]
    fn vacuum_steady_state() {
        let p = effective_params(&AtomConfig::new(0.0, 0.7), &BathConfig::new(1.0, 0.0)).unwrap();
        let atom = AtomConfig::new(0.0, 0.7);
        let bath = BathConfig::new(1.0, 0.0);
        for ss in [
            steady_state_analytic(&p, &atom, &bath).unwrap(),
            steady_state_numeric(&p, &atom, &bath).unwrap(),
        ] {
            assert!((ss.sigma_z_ss + 1.0).abs() < 1e-15);
            assert_eq!(ss.sigma_plus_ss.norm(), 0.0);
        }
    }

    #[test]
    fn undriven_squeezed_steady_state() {
        let bath = BathConfig::new(1.0, 0.3);
        let atom = AtomConfig::new(0.0, 0.5);
        let p = effective_params(&atom, &bath).unwrap();
        let ss = steady_state_analytic(&p, &atom, &bath).unwrap();
        assert!((ss.sigma_z_ss + 1.0 / (1.0 + 2.0 * p.n_tilde)).abs() < 1e-14);
        assert_eq!(ss.sigma_plus_ss.norm(), 0.0);
    }

    #[test]
    fn singular_denominator_rejected() {
        let mut p = effective_params(&AtomConfig::new(1.0, 0.0), &BathConfig::new(1.0, 0.1)).unwrap();
        p.d = 1e-20;
        let r = steady_state_analytic(&p, &AtomConfig::new(1.0, 0.0), &BathConfig::new(1.0, 0.1));
        assert!(matches!(r, Err(Error::SingularDenominator { .. })));
    }

    #[test]
    fn rejects_bad_horizon() {
        let eqs = eqs_with(0.0, Complex64::new(0.0, 0.0), 0.0, 0.0, Complex64::new(0.0, 0.0));
        assert!(integrate_bloch(&eqs, BlochState::GROUND, 0.0, &IntegratorOptions::default()).is_err());
    }
}
