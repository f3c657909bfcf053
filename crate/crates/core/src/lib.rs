//! Driven two-level atom in a finite-bandwidth squeezed vacuum.
//!
//! The crate covers the reservoir spectra, the bandwidth-corrected
//! master-equation coefficients, Bloch and density-matrix dynamics, the
//! coherence and weak-value dwell timescales, and the squeezing-phase
//! condition under which the decay parameter vanishes.

// Negated comparisons reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coherence;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod ode;
pub mod quadrature;
pub mod spectra;
pub mod sustainability;
pub mod zeno;

pub use effective::{effective_params, physicality_check, AtomConfig, EffectiveParams, Physicality};
pub use error::{Error, Result};
pub use spectra::{BathConfig, PhaseModel, SpectralPair};
