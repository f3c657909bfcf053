//! Density-matrix generator of the squeezed-bath master equation.
//!
//! Basis ordering is `|e>, |g>`, so `sigma_z = diag(1, -1)`,
//! `sigma_+ = |e><g|` and `sigma_- = |g><e|`. Expectation values are
//! `<A> = tr(rho A)`, giving `<s-> = rho[0][1]`, `<s+> = rho[1][0]`,
//! `<sz> = rho[0][0] - rho[1][1]`.
//!
//! Vectorisation stacks rows: `vec(rho) = (rho00, rho01, rho10, rho11)`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use super::bloch::{BlochEquations, BlochState};
use crate::effective::{physicality_check, Physicality};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn sigma_plus() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ZERO, ZERO)
}

fn sigma_minus() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ZERO, ONE, ZERO)
}

fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

fn commutator(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    a * b - b * a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub rho: Matrix2<Complex64>,
}

impl DensityMatrix {
    pub fn from_bloch(s: &BlochState) -> Self {
        DensityMatrix {
            rho: Matrix2::new(
                Complex64::new(0.5 * (1.0 + s.sigma_z), 0.0),
                s.sigma_minus,
                s.sigma_plus,
                Complex64::new(0.5 * (1.0 - s.sigma_z), 0.0),
            ),
        }
    }

    pub fn to_bloch(&self) -> BlochState {
        BlochState {
            sigma_minus: self.rho[(0, 1)],
            sigma_plus: self.rho[(1, 0)],
            sigma_z: (self.rho[(0, 0)] - self.rho[(1, 1)]).re,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// Frobenius norm of `rho - rho^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.rho - self.rho.adjoint()).norm()
    }

    /// Smaller eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.rho[(0, 0)].re;
        let d = self.rho[(1, 1)].re;
        let b = 0.5 * (self.rho[(0, 1)] + self.rho[(1, 0)].conj());
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt()
    }

    pub fn to_vec(&self) -> Vector4<Complex64> {
        Vector4::new(self.rho[(0, 0)], self.rho[(0, 1)], self.rho[(1, 0)], self.rho[(1, 1)])
    }

    pub fn from_vec(v: &Vector4<Complex64>) -> Self {
        DensityMatrix {
            rho: Matrix2::new(v[0], v[1], v[2], v[3]),
        }
    }
}

/// Right-hand side of the master equation applied to an arbitrary 2x2
/// matrix.
pub fn master_rhs(eqs: &BlochEquations, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let i = Complex64::i();
    let g = eqs.gamma;
    let n = eqs.n_tilde;
    let m = eqs.m_tilde;
    let sp = sigma_plus();
    let sm = sigma_minus();
    let sz = sigma_z();
    let sm_sp = sm * sp;
    let sp_sm = sp * sm;

    let c = |x: f64| Complex64::new(x, 0.0);
    let coherent = commutator(&sz, rho) * (0.5 * i * g * eqs.delta_eff);
    let absorption = (sp * rho * sm * c(2.0) - sm_sp * rho - rho * sm_sp) * c(0.5 * g * n);
    let emission = (sm * rho * sp * c(2.0) - sp_sm * rho - rho * sp_sm) * c(0.5 * g * (n + 1.0));
    let squeezing = sp * rho * sp * (-g * m) - sm * rho * sm * (g * m.conj());
    let drive = commutator(&(sp + sm), rho) * (-0.5 * i * eqs.omega);
    let zc = commutator(&sz, rho);
    let shift = (commutator(&sp, &zc) * eqs.beta - commutator(&sm, &zc) * eqs.beta.conj()) * (0.25 * i);

    coherent + absorption + emission + squeezing + drive + shift
}

/// Generator `L` with `d vec(rho)/dt = L vec(rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(pub Matrix4<Complex64>);

pub fn master_superoperator(eqs: &BlochEquations) -> Superoperator {
    let mut l = Matrix4::zeros();
    for k in 0..4 {
        let mut basis = Matrix2::zeros();
        basis[(k / 2, k % 2)] = ONE;
        let image = DensityMatrix {
            rho: master_rhs(eqs, &basis),
        }
        .to_vec();
        l.set_column(k, &image);
    }
    Superoperator(l)
}

impl Superoperator {
    /// Largest entry of `(1, 0, 0, 1) L`; zero for a trace-preserving generator.
    pub fn trace_leak(&self) -> f64 {
        (0..4)
            .map(|k| (self.0[(0, k)] + self.0[(3, k)]).norm())
            .fold(0.0, f64::max)
    }
}

/// `rho(t) = exp(L t) rho0`.
pub fn propagate_density(rho0: &DensityMatrix, generator: &Superoperator, t: f64) -> DensityMatrix {
    if t == 0.0 {
        return *rho0;
    }
    let propagator = (generator.0 * Complex64::new(t, 0.0)).exp();
    DensityMatrix::from_vec(&(propagator * rho0.to_vec()))
}

/// Reported when a propagated state acquires a negative eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityViolation {
    pub min_eigenvalue: f64,
    pub physicality: Physicality,
}

/// Positivity threshold for propagated states.
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

pub fn positivity_check(rho: &DensityMatrix, eqs: &BlochEquations) -> Option<PositivityViolation> {
    let min_eigenvalue = rho.min_eigenvalue();
    (min_eigenvalue < -POSITIVITY_TOLERANCE).then(|| PositivityViolation {
        min_eigenvalue,
        physicality: physicality_check(eqs.n_tilde, eqs.m_tilde),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_eqs() -> BlochEquations {
        BlochEquations {
            gamma: 1.1,
            omega: 0.8,
            n_tilde: 0.3,
            m_tilde: Complex64::new(0.2, -0.25),
            delta_eff: 0.4,
            beta: Complex64::new(0.05, 0.12),
        }
    }

    fn hermitian_sample() -> DensityMatrix {
        DensityMatrix::from_bloch(&BlochState::new(Complex64::new(0.2, -0.1), 0.3))
    }

    #[test]
    fn generator_is_trace_preserving() {
        let l = master_superoperator(&sample_eqs());
        assert!(l.trace_leak() < 1e-15);
        let out = DensityMatrix::from_vec(&(l.0 * hermitian_sample().to_vec()));
        assert!(out.trace().norm() < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let rho = hermitian_sample();
        assert_eq!(propagate_density(&rho, &master_superoperator(&sample_eqs()), 0.0), rho);
    }

    #[test]
    fn spontaneous_emission_limit() {
        let eqs = BlochEquations {
            gamma: 0.7,
            omega: 0.0,
            n_tilde: 0.0,
            m_tilde: ZERO,
            delta_eff: 0.0,
            beta: ZERO,
        };
        let l = master_superoperator(&eqs);
        let excited = DensityMatrix::from_bloch(&BlochState::new(ZERO, 1.0));
        for t in [0.1, 1.0, 5.0] {
            let rho = propagate_density(&excited, &l, t);
            assert!((rho.rho[(0, 0)].re - (-0.7 * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn semigroup_property() {
        let l = master_superoperator(&sample_eqs());
        let rho = hermitian_sample();
        let full = propagate_density(&rho, &l, 3.0);
        let half = propagate_density(&propagate_density(&rho, &l, 1.5), &l, 1.5);
        assert!((full.rho - half.rho).norm() < 1e-10);
    }

    #[test]
    fn moment_equations_match_generator() {
        let eqs = sample_eqs();
        let rho = hermitian_sample();
        let from_me = DensityMatrix {
            rho: master_rhs(&eqs, &rho.rho),
        }
        .to_bloch();
        let from_bloch = eqs.rhs(&rho.to_bloch());
        assert!(from_me.distance(&from_bloch) < 1e-14);
    }

    #[test]
    fn bloch_round_trip_and_eigenvalues() {
        let s = BlochState::new(Complex64::new(0.3, 0.2), -0.4);
        let rho = DensityMatrix::from_bloch(&s);
        assert!(rho.to_bloch().distance(&s) < 1e-15);
        assert_eq!(rho.hermiticity_defect(), 0.0);
        // eigenvalues (1 +- |r|)/2 with |r| = sqrt(z^2 + 4|s-|^2)
        let r = (0.16f64 + 4.0 * 0.13).sqrt();
        assert!((rho.min_eigenvalue() - 0.5 * (1.0 - r)).abs() < 1e-15);
    }

    #[test]
    fn positivity_violation_reported_with_margin() {
        let eqs = sample_eqs();
        let bad = DensityMatrix::from_bloch(&BlochState::new(Complex64::new(0.6, 0.0), 0.5));
        let v = positivity_check(&bad, &eqs).unwrap();
        assert!(v.min_eigenvalue < 0.0);
        assert_eq!(v.physicality, physicality_check(eqs.n_tilde, eqs.m_tilde));
        assert!(positivity_check(&hermitian_sample(), &eqs).is_none());
    }
}
