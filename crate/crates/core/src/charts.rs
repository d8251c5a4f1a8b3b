//! Canonical variable charts for rigid-body rotation.
//!
//! Four charts cover the short-axis-mode regime:
//!
//! * **Andoyer** `(lambda, mu, nu, Lambda, M, N)` — the classical set: node
//!   angles and conjugate momenta, with `M` the total angular momentum and
//!   `N` its projection on the body axis of maximum inertia.  Singular at
//!   `N = M`, where `nu` is undefined; the singularity is virtual.
//! * **Nonsingular** `(x, X, y, Y)` — Poincaré-type oscillator variables
//!   that absorb the `N = M` degeneracy:
//!   `x = -sqrt(2(M-N)) sin nu`, `X = sqrt(2(M-N)) cos nu`, `y = mu + nu`,
//!   `Y = M`.
//! * **Complex** `(u, U, v, V)` — complexified oscillator pair plus rescaled
//!   angle pair, `v = y/sqrt(gamma)`, `V = Y sqrt(gamma)`.  On physical
//!   (real) states the pair satisfies `U = i conj(u)`.
//! * **Action-angle** `(ell, L)` of the oscillator, for diagnostics.
//!
//! All transformations are canonical; the numeric Hamiltonian evaluators in
//! every chart agree on the same physical state, which the test suite checks
//! at random states together with symplecticity of the Jacobians.
//!
//! Angles are normalized to `(-pi, pi]` on output.  All functions are pure.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{r, wrap_angle, Real};
use crate::series::Bindings;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("principal moments must satisfy 0 < A <= B <= C with A < C")]
    InvalidOrdering,
    #[error("A = B = C: spherical body, shape parameters are undefined")]
    DegenerateBody,
    #[error("B = C: unit triaxiality, the oscillator frequency is unbounded")]
    NotSAM,
    #[error("momentum projection exceeds the total angular momentum")]
    InvalidMomentum,
    #[error("shape parameters must be positive and finite")]
    InvalidParams,
    #[error("state does not belong to the requested chart")]
    ChartMismatch,
}

// ---------------------------------------------------------------------------
// Body parameters
// ---------------------------------------------------------------------------

/// Principal moments of inertia `A <= B <= C` and the derived dimensionless
/// shape parameters.
///
/// `alpha` and `beta` solve `alpha (1 + beta) = C/A - 1` and
/// `alpha (1 - beta) = C/B - 1`; `omega = sqrt((1+beta)/(1-beta))` is the
/// oscillator frequency and `gamma = alpha sqrt(1 - beta^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams<R: Real> {
    pub A: R,
    pub B: R,
    pub C: R,
    pub alpha: R,
    pub beta: R,
    pub omega: R,
    pub gamma: R,
}

/// Derive the shape parameters from the principal moments.
pub fn derive_params<R: Real>(A: R, B: R, C: R) -> Result<BodyParams<R>, ChartError> {
    if !(A > R::zero() && B > R::zero() && C > R::zero()) || A > B || B > C {
        return Err(ChartError::InvalidOrdering);
    }
    if A == C {
        return Err(ChartError::DegenerateBody);
    }
    if B == C {
        return Err(ChartError::NotSAM);
    }
    let p = C / A - R::one();
    let q = C / B - R::one();
    let alpha = (p + q) / r::<R>(2.0);
    let beta = (p - q) / (p + q);
    let omega = ((R::one() + beta) / (R::one() - beta)).sqrt();
    let gamma = alpha * (R::one() - beta * beta).sqrt();
    Ok(BodyParams { A, B, C, alpha, beta, omega, gamma })
}

impl<R: Real> BodyParams<R> {
    /// Nondimensional preset: unit axial moment with the given `A/C`, `B/C`
    /// ratios.
    pub fn nondimensional(a_over_c: R, b_over_c: R) -> Result<Self, ChartError> {
        derive_params(a_over_c, b_over_c, R::one())
    }

    /// Residuals of the defining relations, for validation.
    pub fn relation_residuals(&self) -> (R, R, R, R) {
        let lhs1 = self.alpha * (R::one() + self.beta);
        let rhs1 = self.C / self.A - R::one();
        let lhs2 = self.alpha * (R::one() - self.beta);
        let rhs2 = self.C / self.B - R::one();
        let om = ((R::one() + self.beta) / (R::one() - self.beta)).sqrt();
        let ga = self.alpha * (R::one() - self.beta * self.beta).sqrt();
        (
            ((lhs1 - rhs1) / rhs1).abs(),
            ((lhs2 - rhs2) / rhs2).abs(),
            ((om - self.omega) / self.omega).abs(),
            ((ga - self.gamma) / self.gamma).abs(),
        )
    }
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Andoyer chart state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AndoyerState<R: Real> {
    pub lambda: R,
    pub mu: R,
    pub nu: R,
    pub Lambda: R,
    pub M: R,
    pub N: R,
}

impl<R: Real> AndoyerState<R> {
    /// Inclination between the invariable and equatorial planes,
    /// `cos J = N/M`.
    pub fn inclination_j(&self) -> R {
        (self.N / self.M).min(R::one()).max(-R::one()).acos()
    }
}

/// Nonsingular (Poincaré-type) chart state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonsingularState<R: Real> {
    pub x: R,
    pub X: R,
    pub y: R,
    pub Y: R,
}

/// Complexified chart state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexState<R: Real> {
    pub u: Complex<R>,
    pub U: Complex<R>,
    pub v: R,
    pub V: R,
}

/// Oscillator action-angle pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngleState<R: Real> {
    pub ell: R,
    pub L: R,
}

/// Smallness parameter of the SAM expansion, `delta = (M - N)/M`
/// (equivalently `2 sin^2(J/2)`).
pub fn sam_delta<R: Real>(M: R, N: R) -> R {
    (M - N) / M
}

/// The expansion is ordered by `delta`; beyond 1/2 the split into main
/// problem and perturbation stops being small.  Computation still proceeds.
pub fn sam_regime_ok<R: Real>(M: R, N: R) -> bool {
    sam_delta(M, N) <= r::<R>(0.5)
}

/// Deviation of a complex state from the physical slice `U = i conj(u)`.
pub fn reality_defect<R: Real>(s: &ComplexState<R>) -> R {
    (s.U - Complex::<R>::i() * s.u.conj()).norm()
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

/// Forward map to the nonsingular chart.  `lambda` and `Lambda` are
/// untouched by the transformation and simply travel alongside.
pub fn andoyer_to_nonsingular<R: Real>(
    s: &AndoyerState<R>,
) -> Result<NonsingularState<R>, ChartError> {
    if s.N > s.M || s.N.is_nan() || s.M.is_nan() {
        return Err(ChartError::InvalidMomentum);
    }
    let amp = (r::<R>(2.0) * (s.M - s.N)).sqrt();
    Ok(NonsingularState {
        x: -amp * s.nu.sin(),
        X: amp * s.nu.cos(),
        y: wrap_angle(s.mu + s.nu),
        Y: s.M,
    })
}

/// Inverse map back to Andoyer variables.
///
/// At `x = X = 0` the angle `nu` is undefined (the virtual `N = M`
/// singularity); the convention `nu = 0` is used and flagged through the
/// returned boolean.
pub fn nonsingular_to_andoyer<R: Real>(
    s: &NonsingularState<R>,
    lambda: R,
    Lambda: R,
) -> Result<(AndoyerState<R>, bool), ChartError> {
    let m_minus_n = (s.x * s.x + s.X * s.X) / r::<R>(2.0);
    let valid_y = s.Y > R::zero();
    if !valid_y || m_minus_n > s.Y * (R::one() + r::<R>(1e-12)) {
        return Err(ChartError::InvalidMomentum);
    }
    let degenerate = s.x == R::zero() && s.X == R::zero();
    let nu = if degenerate { R::zero() } else { (-s.x).atan2(s.X) };
    Ok((
        AndoyerState {
            lambda,
            mu: wrap_angle(s.y - nu),
            nu,
            Lambda,
            M: s.Y,
            N: s.Y - m_minus_n,
        },
        degenerate,
    ))
}

/// Complexification of the nonsingular chart.
///
/// The inverse direction is `x = (u - iU)/sqrt(2 omega)`,
/// `X = sqrt(omega/2) (U - iu)`, `y = sqrt(gamma) v`, `Y = V/sqrt(gamma)`;
/// the forward map here is its algebraic inverse, and sends real states onto
/// the slice `U = i conj(u)`.
pub fn nonsingular_to_complex<R: Real>(
    s: &NonsingularState<R>,
    p: &BodyParams<R>,
) -> Result<ComplexState<R>, ChartError> {
    check_params(p)?;
    let half_om = (p.omega / r::<R>(2.0)).sqrt();
    let inv_two_om = (r::<R>(2.0) * p.omega).sqrt().recip();
    let sg = p.gamma.sqrt();
    Ok(ComplexState {
        u: Complex::new(half_om * s.x, inv_two_om * s.X),
        U: Complex::new(inv_two_om * s.X, half_om * s.x),
        v: s.y / sg,
        V: s.Y * sg,
    })
}

/// Inverse complexification.  Real parts are taken component-wise; for
/// states on the physical slice the imaginary parts vanish identically, and
/// [`reality_defect`] measures how far off-slice a transported state is.
pub fn complex_to_nonsingular<R: Real>(
    s: &ComplexState<R>,
    p: &BodyParams<R>,
) -> Result<NonsingularState<R>, ChartError> {
    check_params(p)?;
    let sg = p.gamma.sqrt();
    let x = (s.u - Complex::<R>::i() * s.U) / (r::<R>(2.0) * p.omega).sqrt();
    let X = (s.U - Complex::<R>::i() * s.u).scale((p.omega / r::<R>(2.0)).sqrt());
    Ok(NonsingularState { x: x.re, X: X.re, y: sg * s.v, Y: s.V / sg })
}

fn check_params<R: Real>(p: &BodyParams<R>) -> Result<(), ChartError> {
    if p.omega > R::zero() && p.gamma > R::zero() && p.omega.is_finite() && p.gamma.is_finite() {
        Ok(())
    } else {
        Err(ChartError::InvalidParams)
    }
}

/// Oscillator action-angle variables from the `(x, X)` pair.
///
/// At the origin the angle is undefined; `ell = 0` is used and flagged.
pub fn nonsingular_to_actionangle<R: Real>(x: R, X: R, omega: R) -> (ActionAngleState<R>, bool) {
    let L = (X * X + omega * omega * x * x) / (r::<R>(2.0) * omega);
    let degenerate = x == R::zero() && X == R::zero();
    let ell = if degenerate { R::zero() } else { (omega * x).atan2(X) };
    (ActionAngleState { ell, L }, degenerate)
}

/// Inverse of [`nonsingular_to_actionangle`].
pub fn actionangle_to_nonsingular<R: Real>(s: &ActionAngleState<R>, omega: R) -> (R, R) {
    let x = (r::<R>(2.0) * s.L / omega).sqrt() * s.ell.sin();
    let X = (r::<R>(2.0) * omega * s.L).sqrt() * s.ell.cos();
    (x, X)
}

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// Which part of the Hamiltonian to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianPart {
    Main,
    Perturbation,
    Full,
}

/// Chart selector for [`evaluate_hamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Andoyer,
    Nonsingular,
    Complex,
}

/// A state tagged with its chart.
#[derive(Debug, Clone, Copy)]
pub enum ChartState<R: Real> {
    Andoyer(AndoyerState<R>),
    Nonsingular(NonsingularState<R>),
    Complex(ComplexState<R>),
}

/// Free rigid-body Hamiltonian in Andoyer variables, split into the SAM main
/// problem and its perturbation.
pub fn andoyer_hamiltonian<R: Real>(
    s: &AndoyerState<R>,
    p: &BodyParams<R>,
    part: HamiltonianPart,
) -> R {
    let two = r::<R>(2.0);
    let lead = s.M * s.M / (two * p.C);
    let shape = R::one() - p.beta * (two * s.nu).cos();
    let e = R::one() - s.N / s.M;
    match part {
        HamiltonianPart::Main => lead * (R::one() + two * p.alpha * e * shape),
        HamiltonianPart::Perturbation => -lead * p.alpha * e * e * shape,
        HamiltonianPart::Full => {
            let e2 = R::one() - (s.N / s.M) * (s.N / s.M);
            lead * (R::one() + p.alpha * e2 * shape)
        }
    }
}

/// Hamiltonian in the nonsingular chart: harmonic oscillator of frequency
/// `omega` plus a quartic perturbation.
pub fn nonsingular_hamiltonian<R: Real>(
    s: &NonsingularState<R>,
    p: &BodyParams<R>,
    part: HamiltonianPart,
) -> R {
    let two = r::<R>(2.0);
    let main = || {
        s.Y * s.Y / (two * p.C)
            + s.Y / p.C
                * p.alpha
                * (R::one() - p.beta)
                * (s.X * s.X + p.omega * p.omega * s.x * s.x)
                / two
    };
    let pert = || {
        -(p.alpha / (r::<R>(8.0) * p.C))
            * ((R::one() + p.beta) * s.x.powi(4)
                + two * s.x * s.x * s.X * s.X
                + (R::one() - p.beta) * s.X.powi(4))
    };
    match part {
        HamiltonianPart::Main => main(),
        HamiltonianPart::Perturbation => pert(),
        HamiltonianPart::Full => main() + pert(),
    }
}

/// Hamiltonian in the complex chart.  Real-valued on the physical slice;
/// the complex return covers off-slice diagnostics.
pub fn complex_hamiltonian<R: Real>(
    s: &ComplexState<R>,
    p: &BodyParams<R>,
    part: HamiltonianPart,
) -> Complex<R> {
    let two = r::<R>(2.0);
    let sg = p.gamma.sqrt();
    let main = || {
        let free = s.V * s.V / (two * p.C * p.gamma);
        Complex::new(free, R::zero())
            - Complex::<R>::i() * (s.u * s.U).scale(s.V * sg / p.C)
    };
    let pert = || {
        let uU = s.u * s.U;
        let cubic = s.u * s.u * s.u * s.U - s.u * s.U * s.U * s.U;
        ((uU * uU).scale(two) - Complex::<R>::i() * cubic.scale(p.beta))
            .scale(p.alpha / (r::<R>(4.0) * p.C))
    };
    match part {
        HamiltonianPart::Main => main(),
        HamiltonianPart::Perturbation => pert(),
        HamiltonianPart::Full => main() + pert(),
    }
}

/// Chart-dispatching evaluator.  The complex chart reports the real part;
/// see [`complex_hamiltonian`] for the full value.
pub fn evaluate_hamiltonian<R: Real>(
    chart: Chart,
    state: &ChartState<R>,
    p: &BodyParams<R>,
    part: HamiltonianPart,
) -> Result<R, ChartError> {
    match (chart, state) {
        (Chart::Andoyer, ChartState::Andoyer(s)) => Ok(andoyer_hamiltonian(s, p, part)),
        (Chart::Nonsingular, ChartState::Nonsingular(s)) => Ok(nonsingular_hamiltonian(s, p, part)),
        (Chart::Complex, ChartState::Complex(s)) => Ok(complex_hamiltonian(s, p, part).re),
        _ => Err(ChartError::ChartMismatch),
    }
}

/// Numeric bindings of the series symbols at a complex-chart state.
pub fn bindings_for<R: Real>(p: &BodyParams<R>, s: &ComplexState<R>) -> Bindings<R> {
    Bindings::new(p.alpha, p.beta, p.C, s.u, s.U, s.V)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn body123() -> BodyParams<f64> {
        derive_params(1.0, 2.0, 3.0).unwrap()
    }

    #[test]
    fn derive_params_symmetric() {
        let p = derive_params(2.0, 2.0, 3.0).unwrap();
        assert_relative_eq!(p.alpha, 0.5, max_relative = 1e-15);
        assert_eq!(p.beta, 0.0);
        assert_relative_eq!(p.omega, 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.gamma, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn derive_params_triaxial() {
        let p = body123();
        assert_relative_eq!(p.alpha, 1.25, max_relative = 1e-15);
        assert_relative_eq!(p.beta, 0.6, max_relative = 1e-15);
        assert_relative_eq!(p.omega, 2.0, max_relative = 1e-15);
        assert_relative_eq!(p.gamma, 1.0, max_relative = 1e-15);
        let (r1, r2, r3, r4) = p.relation_residuals();
        assert!(r1 < 1e-14 && r2 < 1e-14 && r3 < 1e-14 && r4 < 1e-14);
    }

    #[test]
    fn derive_params_errors() {
        assert_eq!(derive_params(3.0, 3.0, 3.0).unwrap_err(), ChartError::DegenerateBody);
        assert_eq!(derive_params(1.0, 3.0, 3.0).unwrap_err(), ChartError::NotSAM);
        assert_eq!(derive_params(3.0, 2.0, 1.0).unwrap_err(), ChartError::InvalidOrdering);
        assert_eq!(derive_params(-1.0, 2.0, 3.0).unwrap_err(), ChartError::InvalidOrdering);
    }

    #[test]
    fn andoyer_nonsingular_degenerate() {
        let s = AndoyerState { lambda: 0.0, mu: 0.3, nu: 1.1, Lambda: 0.2, M: 1.0, N: 1.0 };
        let ns = andoyer_to_nonsingular(&s).unwrap();
        assert_eq!(ns.x, 0.0);
        assert_eq!(ns.X, 0.0);
        assert_eq!(ns.Y, 1.0);
        let (back, flagged) = nonsingular_to_andoyer(&ns, s.lambda, s.Lambda).unwrap();
        assert!(flagged);
        assert_eq!(back.nu, 0.0);
        assert_eq!(back.N, 1.0);
    }

    #[test]
    fn andoyer_nonsingular_anchor() {
        let s = AndoyerState {
            lambda: 0.0,
            mu: 0.0,
            nu: std::f64::consts::FRAC_PI_2,
            Lambda: 0.0,
            M: 1.0,
            N: 0.98,
        };
        let ns = andoyer_to_nonsingular(&s).unwrap();
        assert_relative_eq!(ns.x, -0.2, max_relative = 1e-14);
        assert!(ns.X.abs() < 1e-15);
        assert_relative_eq!(ns.y, std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
        assert_eq!(ns.Y, 1.0);
    }

    #[test]
    fn andoyer_nonsingular_rejects_n_above_m() {
        let s = AndoyerState { lambda: 0.0, mu: 0.0, nu: 0.0, Lambda: 0.0, M: 1.0, N: 1.0 + 1e-9 };
        assert_eq!(andoyer_to_nonsingular(&s).unwrap_err(), ChartError::InvalidMomentum);
    }

    #[test]
    fn roundtrip_andoyer_nonsingular() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let m: f64 = rng.gen_range(0.2..4.0);
            let n = m * rng.gen_range(0.55..1.0f64);
            let s = AndoyerState {
                lambda: rng.gen_range(-3.0..3.0),
                mu: rng.gen_range(-3.0..3.0),
                nu: rng.gen_range(-3.0..3.0),
                Lambda: m * rng.gen_range(-1.0..1.0),
                M: m,
                N: n,
            };
            let ns = andoyer_to_nonsingular(&s).unwrap();
            let (back, flagged) = nonsingular_to_andoyer(&ns, s.lambda, s.Lambda).unwrap();
            assert!(!flagged);
            assert_relative_eq!(back.M, s.M, max_relative = 1e-13);
            assert_relative_eq!(back.N, s.N, max_relative = 1e-13);
            assert!((wrap_angle(back.nu - s.nu)).abs() < 1e-13);
            assert!((wrap_angle(back.mu - s.mu)).abs() < 1e-12);
            // oscillator identity
            assert_relative_eq!(ns.x * ns.x + ns.X * ns.X, 2.0 * (s.M - s.N), max_relative = 1e-12);
        }
    }

    #[test]
    fn complexification_anchor() {
        let p = body123();
        let ns = NonsingularState { x: 1.0, X: 0.0, y: 0.0, Y: 1.0 };
        let cs = nonsingular_to_complex(&ns, &p).unwrap();
        assert_relative_eq!(cs.u.re, 1.0, max_relative = 1e-14);
        assert!(cs.u.im.abs() < 1e-15);
        assert!(cs.U.re.abs() < 1e-15);
        assert_relative_eq!(cs.U.im, 1.0, max_relative = 1e-14);
        assert_eq!(cs.v, 0.0);
        assert_relative_eq!(cs.V, 1.0, max_relative = 1e-14);
        let back = complex_to_nonsingular(&cs, &p).unwrap();
        assert_relative_eq!(back.x, ns.x, max_relative = 1e-14);
        assert!(back.X.abs() < 1e-15);
    }

    #[test]
    fn reality_slice() {
        let p = body123();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let ns = NonsingularState {
                x: rng.gen_range(-1.0..1.0),
                X: rng.gen_range(-1.0..1.0),
                y: rng.gen_range(-3.0..3.0),
                Y: rng.gen_range(0.2..3.0),
            };
            let cs = nonsingular_to_complex(&ns, &p).unwrap();
            assert!(reality_defect(&cs) < 1e-13);
            // oscillator energy identity: (X^2 + omega^2 x^2)/2 = -i omega u U
            let lhs = 0.5 * (ns.X * ns.X + p.omega * p.omega * ns.x * ns.x);
            let rhs = -Complex::<f64>::i() * (cs.u * cs.U) * p.omega;
            assert!((rhs.im).abs() < 1e-13);
            assert_relative_eq!(lhs, rhs.re, epsilon = 1e-13, max_relative = 1e-12);
        }
    }

    #[test]
    fn action_angle_examples() {
        let (aa, flagged) = nonsingular_to_actionangle(0.0, 2.0, 2.0);
        assert!(!flagged);
        assert_relative_eq!(aa.L, 1.0, max_relative = 1e-14);
        assert_eq!(aa.ell, 0.0);

        let s = ActionAngleState { ell: std::f64::consts::FRAC_PI_2, L: 1.0 };
        let (x, X) = actionangle_to_nonsingular(&s, 2.0);
        assert_relative_eq!(x, 1.0, max_relative = 1e-14);
        assert!(X.abs() < 1e-15);

        let (aa0, flagged0) = nonsingular_to_actionangle(0.0f64, 0.0, 2.0);
        assert!(flagged0);
        assert_eq!(aa0.L, 0.0);
    }

    #[test]
    fn action_angle_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let omega: f64 = rng.gen_range(0.3..4.0);
            let x: f64 = rng.gen_range(-1.0..1.0);
            let X: f64 = rng.gen_range(-1.0..1.0);
            if x.abs() + X.abs() < 1e-3 {
                continue;
            }
            let (aa, _) = nonsingular_to_actionangle(x, X, omega);
            let (x2, X2) = actionangle_to_nonsingular(&aa, omega);
            assert_relative_eq!(x, x2, epsilon = 1e-13, max_relative = 1e-13);
            assert_relative_eq!(X, X2, epsilon = 1e-13, max_relative = 1e-13);
            assert_relative_eq!(
                2.0 * omega * aa.L,
                X * X + omega * omega * x * x,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn hamiltonian_degenerate_anchor() {
        // N = M makes the full Hamiltonian M^2/(2C) in any triaxial body.
        let p = body123();
        let s = AndoyerState { lambda: 0.0, mu: 0.4, nu: 2.2, Lambda: 0.1, M: 1.0, N: 1.0 };
        let h = andoyer_hamiltonian(&s, &p, HamiltonianPart::Full);
        assert_relative_eq!(h, 1.0 / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn hamiltonian_cross_chart_anchor() {
        let p = body123();
        let s = AndoyerState {
            lambda: 0.0,
            mu: 0.0,
            nu: std::f64::consts::FRAC_PI_2,
            Lambda: 0.0,
            M: 1.0,
            N: 0.98,
        };
        let main = andoyer_hamiltonian(&s, &p, HamiltonianPart::Main);
        let pert = andoyer_hamiltonian(&s, &p, HamiltonianPart::Perturbation);
        let full = andoyer_hamiltonian(&s, &p, HamiltonianPart::Full);
        assert_relative_eq!(main, 0.18, max_relative = 1e-13);
        assert_relative_eq!(pert, -0.000133333333333333, max_relative = 1e-12);
        assert_relative_eq!(full, 0.179866666666667, max_relative = 1e-13);
        assert_relative_eq!(main + pert, full, max_relative = 1e-14);

        let ns = andoyer_to_nonsingular(&s).unwrap();
        assert_relative_eq!(
            nonsingular_hamiltonian(&ns, &p, HamiltonianPart::Main),
            main,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            nonsingular_hamiltonian(&ns, &p, HamiltonianPart::Perturbation),
            pert,
            max_relative = 1e-13
        );

        let cs = nonsingular_to_complex(&ns, &p).unwrap();
        let cm = complex_hamiltonian(&cs, &p, HamiltonianPart::Main);
        let cp = complex_hamiltonian(&cs, &p, HamiltonianPart::Perturbation);
        assert!(cm.im.abs() < 1e-15 && cp.im.abs() < 1e-15);
        assert_relative_eq!(cm.re, main, max_relative = 1e-13);
        assert_relative_eq!(cp.re, pert, max_relative = 1e-13);
    }

    #[test]
    fn chart_mismatch_is_rejected() {
        let p = body123();
        let ns = NonsingularState { x: 0.1, X: 0.0, y: 0.0, Y: 1.0 };
        let err = evaluate_hamiltonian(
            Chart::Andoyer,
            &ChartState::Nonsingular(ns),
            &p,
            HamiltonianPart::Full,
        )
        .unwrap_err();
        assert_eq!(err, ChartError::ChartMismatch);
    }

    #[test]
    fn sam_guard() {
        assert!(sam_regime_ok(1.0, 0.9));
        assert!(!sam_regime_ok(1.0, 0.3));
    }

    #[test]
    fn single_precision_charts() {
        // the numeric layer is generic; f32 works at its own accuracy
        let p = derive_params(1.0f32, 2.0, 3.0).unwrap();
        assert!((p.beta - 0.6).abs() < 1e-6);
        let a = AndoyerState { lambda: 0.0f32, mu: 0.4, nu: 0.9, Lambda: 0.2, M: 1.0, N: 0.98 };
        let ns = andoyer_to_nonsingular(&a).unwrap();
        let (back, _) = nonsingular_to_andoyer(&ns, a.lambda, a.Lambda).unwrap();
        assert!((back.N - a.N).abs() < 1e-6);
        let h_a = andoyer_hamiltonian(&a, &p, HamiltonianPart::Full);
        let h_n = nonsingular_hamiltonian(&ns, &p, HamiltonianPart::Full);
        assert!((h_a - h_n).abs() < 1e-6);
    }
}
