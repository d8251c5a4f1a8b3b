//! Analytic treatment of short-axis-mode (SAM) rigid-body rotation.
//!
//! The torque-free Hamiltonian of a triaxial body rotating near its axis of
//! maximum inertia splits into an integrable main problem plus a small
//! perturbation.  In nonsingular Poincaré variables the main problem is a
//! harmonic oscillator and the perturbation a quartic polynomial; after
//! complexification the Lie derivative of the main problem acts diagonally
//! on monomials, which turns canonical normalization into exact polynomial
//! algebra.  This crate implements that pipeline end to end:
//!
//! * [`charts`] — body parameters, canonical variable charts and numeric
//!   Hamiltonian evaluation in each chart;
//! * [`series`] — sparse multivariate series with exact Gaussian-rational
//!   coefficients, Poisson brackets, exact division and numeric evaluation;
//! * [`lie`] — the homological equation, the Deprit-triangle driver, and
//!   extraction of the normalized Hamiltonian, generator and variable maps;
//! * [`propagator`] — analytic propagation from the normalized flow plus
//!   trajectory comparison;
//! * [`oracle`] — adaptive Runge-Kutta integration of the exact equations of
//!   motion, the ground truth for the analytic solution;
//! * [`gravgrad`] — first-order gravity-gradient perturbation for a distant
//!   body in Keplerian motion.
//!
//! Numeric code is generic over the scalar via [`scalar::Real`] (`f32` or
//! `f64`); the exact algebra is rational-valued and shared by both.  `f64`
//! aliases for the state types are exported at the crate root.

#![allow(non_snake_case)]

pub mod charts;
pub mod gravgrad;
pub mod lie;
pub mod oracle;
pub mod propagator;
pub mod scalar;
pub mod series;

pub use scalar::Real;

pub type BodyParams64 = charts::BodyParams<f64>;
pub type AndoyerState64 = charts::AndoyerState<f64>;
pub type NonsingularState64 = charts::NonsingularState<f64>;
pub type ComplexState64 = charts::ComplexState<f64>;
pub type ActionAngleState64 = charts::ActionAngleState<f64>;
pub type Trajectory64 = oracle::Trajectory<f64>;
pub type ErrorReport64 = propagator::ErrorReport<f64>;
pub type OrbitModel64 = gravgrad::OrbitModel<f64>;
