//! Analytic propagation of SAM rotation from the normalized Hamiltonian.
//!
//! The normalized Hamiltonian `K` depends on the prime oscillator pair only
//! through `w = u'U'`, so the prime flow is exactly solvable:
//!
//! ```text
//! u'(t) = u'(0) exp(Omega_u t),   U'(t) = U'(0) exp(-Omega_u t),
//! v'(t) = v'(0) + Omega_v t,      V    = const,
//! ```
//!
//! with `Omega_u = dK/dw` and `Omega_v = dK/dV` frozen at the (conserved)
//! epoch value of `w`.  Propagation therefore costs one inverse variable map
//! at the epoch, one complex exponential per sample, and one direct map
//! back.  On the physical slice `Omega_u` is purely imaginary, so `|u'|` is
//! conserved; the small real part that truncation leaves behind is one of
//! the reported diagnostics.
//!
//! The angle correction series for `v` is included alongside `u` and `U`:
//! without it the recovered `y` (hence `mu`) would be stuck at the accuracy
//! of the identity map.

use num_complex::Complex;
use thiserror::Error;

use crate::charts::{
    andoyer_to_nonsingular, bindings_for, complex_to_nonsingular, nonsingular_hamiltonian,
    nonsingular_to_andoyer, nonsingular_to_complex, sam_delta, AndoyerState, BodyParams,
    ChartError, ComplexState, HamiltonianPart, NonsingularState,
};
use crate::lie::NormalizationResult;
use crate::oracle::Trajectory;
use crate::scalar::{r, wrap_angle, Real};
use crate::series::Series;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("requested order {requested} exceeds the normalization order {available}")]
    OrderUnavailable { requested: usize, available: usize },
    #[error("trajectories are sampled on different grids")]
    GridMismatch,
    #[error(transparent)]
    Chart(#[from] ChartError),
}

// ---------------------------------------------------------------------------
// Variable-map evaluation
// ---------------------------------------------------------------------------

fn inv_factorial<R: Real>(n: usize) -> R {
    let mut f = 1.0f64;
    for i in 1..=n {
        f *= i as f64;
    }
    r::<R>(1.0 / f)
}

/// Evaluate a truncated correction stack `sum_{n=1..order} z_n/n!` at the
/// given complex-chart point.
fn eval_stack<R: Real>(
    terms: &[Series],
    order: usize,
    p: &BodyParams<R>,
    at: &ComplexState<R>,
) -> Complex<R> {
    let b = bindings_for(p, at);
    let mut acc = Complex::new(R::zero(), R::zero());
    for n in 1..=order {
        acc = acc + terms[n - 1].evaluate(&b).scale(inv_factorial::<R>(n));
    }
    acc
}

/// Map an osculating complex state to prime variables with the inverse
/// series truncated at `order` (`order = 0` is the identity).
pub fn init_prime<R: Real>(
    state: &ComplexState<R>,
    p: &BodyParams<R>,
    result: &NormalizationResult,
    order: usize,
) -> Result<ComplexState<R>, PropagatorError> {
    if order > result.order {
        return Err(PropagatorError::OrderUnavailable { requested: order, available: result.order });
    }
    Ok(ComplexState {
        u: state.u + eval_stack(&result.inverse.u, order, p, state),
        U: state.U + eval_stack(&result.inverse.U, order, p, state),
        v: state.v + eval_stack(&result.inverse.v, order, p, state).re,
        V: state.V,
    })
}

/// Map a prime complex state back to osculating variables with the direct
/// series truncated at `order`.
pub fn prime_to_osculating<R: Real>(
    state: &ComplexState<R>,
    p: &BodyParams<R>,
    result: &NormalizationResult,
    order: usize,
) -> Result<ComplexState<R>, PropagatorError> {
    if order > result.order {
        return Err(PropagatorError::OrderUnavailable { requested: order, available: result.order });
    }
    Ok(ComplexState {
        u: state.u + eval_stack(&result.direct.u, order, p, state),
        U: state.U + eval_stack(&result.direct.U, order, p, state),
        v: state.v + eval_stack(&result.direct.v, order, p, state).re,
        V: state.V,
    })
}

/// Frequencies of the normalized flow at `w = u'U'`:
/// `Omega_u = dK/dw` and `Omega_v = dK/dV`, truncated at `order`.
///
/// The kernel terms are monomials `w^j V^p` times shape factors, so both
/// derivatives are evaluated directly from the exponents.
pub fn flow_rates<R: Real>(
    w: Complex<R>,
    V: R,
    p: &BodyParams<R>,
    result: &NormalizationResult,
    order: usize,
) -> Result<(Complex<R>, Complex<R>), PropagatorError> {
    if order > result.order {
        return Err(PropagatorError::OrderUnavailable { requested: order, available: result.order });
    }
    let sg = p.gamma.sqrt();
    let mut om_u = Complex::new(R::zero(), R::zero());
    let mut om_v = Complex::new(R::zero(), R::zero());
    for (n, k_n) in result.k_terms.iter().take(order + 1).enumerate() {
        let weight = inv_factorial::<R>(n);
        for (m, c) in k_n.iter() {
            let (cre, cim) = c.to_f64_parts();
            let coeff = Complex::new(r::<R>(cre), r::<R>(cim)).scale(
                weight
                    * p.C.powi(m.C as i32)
                    * p.alpha.powi(m.alpha as i32)
                    * p.beta.powi(m.beta as i32)
                    * sg.powi(m.sqrtgamma as i32),
            );
            let j = m.u as i32;
            debug_assert_eq!(m.u, m.U, "normal form depends on u, U only through uU");
            if j >= 1 {
                om_u = om_u
                    + coeff.scale(r::<R>(j as f64) * V.powi(m.V as i32)) * w.powi(j - 1);
            }
            if m.V != 0 {
                om_v = om_v
                    + coeff.scale(r::<R>(m.V as f64) * V.powi(m.V as i32 - 1)) * w.powi(j);
            }
        }
    }
    Ok((om_u, om_v))
}

// ---------------------------------------------------------------------------
// Analytic solution
// ---------------------------------------------------------------------------

/// Frozen analytic solution: prime epoch state plus constant flow rates.
#[derive(Debug, Clone)]
pub struct AnalyticSolution<'a, R: Real> {
    pub order: usize,
    pub prime0: ComplexState<R>,
    /// `dK/dw` at the epoch; purely imaginary on the physical slice.
    pub rate_u: Complex<R>,
    /// `dK/dV` at the epoch (real on the physical slice).
    pub rate_v: R,
    pub lambda: R,
    pub Lambda: R,
    pub params: BodyParams<R>,
    pub provenance: &'a NormalizationResult,
}

/// Build the analytic solution for an Andoyer epoch state.
pub fn analytic_solution<'a, R: Real>(
    state0: &AndoyerState<R>,
    p: &BodyParams<R>,
    result: &'a NormalizationResult,
    order: usize,
) -> Result<AnalyticSolution<'a, R>, PropagatorError> {
    let ns = andoyer_to_nonsingular(state0)?;
    let cs = nonsingular_to_complex(&ns, p)?;
    let prime0 = init_prime(&cs, p, result, order)?;
    let (rate_u, rate_v) = flow_rates(prime0.u * prime0.U, prime0.V, p, result, order)?;
    Ok(AnalyticSolution {
        order,
        prime0,
        rate_u,
        rate_v: rate_v.re,
        lambda: state0.lambda,
        Lambda: state0.Lambda,
        params: *p,
        provenance: result,
    })
}

impl<'a, R: Real> AnalyticSolution<'a, R> {
    /// Prime state at time `t` (exact exponential flow).
    pub fn prime_at(&self, t: R) -> ComplexState<R> {
        let phase = (self.rate_u.scale(t)).exp();
        ComplexState {
            u: self.prime0.u * phase,
            U: self.prime0.U / phase,
            v: self.prime0.v + self.rate_v * t,
            V: self.prime0.V,
        }
    }

    /// Osculating complex state at time `t`.
    pub fn complex_at(&self, t: R) -> Result<ComplexState<R>, PropagatorError> {
        prime_to_osculating(&self.prime_at(t), &self.params, self.provenance, self.order)
    }

    /// Osculating nonsingular state at time `t` (angle wrapped).
    pub fn nonsingular_at(&self, t: R) -> Result<NonsingularState<R>, PropagatorError> {
        let cs = self.complex_at(t)?;
        let mut ns = complex_to_nonsingular(&cs, &self.params)?;
        ns.y = wrap_angle(ns.y);
        Ok(ns)
    }

    /// Osculating Andoyer state at time `t`; `lambda` and `Lambda` are
    /// constants of the torque-free motion.
    pub fn andoyer_at(&self, t: R) -> Result<AndoyerState<R>, PropagatorError> {
        let ns = self.nonsingular_at(t)?;
        let (a, _) = nonsingular_to_andoyer(&ns, self.lambda, self.Lambda)?;
        Ok(a)
    }
}

/// One-call analytic propagation of an Andoyer state to time `t`.
pub fn propagate_analytic<R: Real>(
    state0: &AndoyerState<R>,
    p: &BodyParams<R>,
    result: &NormalizationResult,
    order: usize,
    t: R,
) -> Result<AndoyerState<R>, PropagatorError> {
    analytic_solution(state0, p, result, order)?.andoyer_at(t)
}

/// Sample the analytic solution on a time grid, in the same trajectory
/// format the oracle produces.
pub fn analytic_trajectory<R: Real>(
    state0: &AndoyerState<R>,
    p: &BodyParams<R>,
    result: &NormalizationResult,
    order: usize,
    times: &[R],
) -> Result<Trajectory<R>, PropagatorError> {
    let sol = analytic_solution(state0, p, result, order)?;
    let mut states = Vec::with_capacity(times.len());
    let mut energies = Vec::with_capacity(times.len());
    for &t in times {
        let ns = sol.nonsingular_at(t)?;
        energies.push(nonsingular_hamiltonian(&ns, p, HamiltonianPart::Full));
        states.push(ns);
    }
    Ok(Trajectory { times: times.to_vec(), states, energies })
}

// ---------------------------------------------------------------------------
// Trajectory comparison
// ---------------------------------------------------------------------------

/// Component-wise maximum absolute errors between two trajectories.
#[derive(Debug, Clone)]
pub struct ErrorReport<R: Real> {
    pub order: usize,
    /// Smallness parameter `(M - N)/M` at the epoch.
    pub delta: R,
    pub max_err_x: R,
    pub max_err_X: R,
    /// `y` compared modulo 2 pi.
    pub max_err_y: R,
    pub max_err_H: R,
    pub times: Vec<R>,
}

impl<R: Real> ErrorReport<R> {
    /// Largest of the oscillator-pair errors.
    pub fn max_err_xX(&self) -> R {
        self.max_err_x.max(self.max_err_X)
    }
}

/// Compare two trajectories on a common grid.
pub fn compare_trajectories<R: Real>(
    a: &Trajectory<R>,
    b: &Trajectory<R>,
    order: usize,
) -> Result<ErrorReport<R>, PropagatorError> {
    if a.times.len() != b.times.len()
        || a.times
            .iter()
            .zip(&b.times)
            .any(|(s, t)| (*s - *t).abs() > r::<R>(1e-12) * s.abs().max(R::one()))
    {
        return Err(PropagatorError::GridMismatch);
    }
    let mut report = ErrorReport {
        order,
        delta: sam_delta(b.states[0].Y, b.states[0].Y - (b.states[0].x.powi(2) + b.states[0].X.powi(2)) / r::<R>(2.0)),
        max_err_x: R::zero(),
        max_err_X: R::zero(),
        max_err_y: R::zero(),
        max_err_H: R::zero(),
        times: a.times.clone(),
    };
    for i in 0..a.times.len() {
        let (sa, sb) = (&a.states[i], &b.states[i]);
        report.max_err_x = report.max_err_x.max((sa.x - sb.x).abs());
        report.max_err_X = report.max_err_X.max((sa.X - sb.X).abs());
        report.max_err_y = report.max_err_y.max(wrap_angle(sa.y - sb.y).abs());
        report.max_err_H = report.max_err_H.max((a.energies[i] - b.energies[i]).abs());
    }
    Ok(report)
}
