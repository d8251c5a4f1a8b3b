//! High-accuracy numerical integration of the exact equations of motion.
//!
//! The nonsingular chart is the natural place to integrate: the right-hand
//! side is polynomial (no trigonometric functions of `nu`, no `N = M`
//! singularity) and `Y` is a strict invariant, so it is carried as a
//! parameter rather than integrated.  The stepper is the Dormand-Prince
//! embedded 5(4) pair with standard proportional step control; trajectories
//! are sampled exactly on the caller's grid by clamping the final step of
//! each segment.

use thiserror::Error;

use crate::charts::{nonsingular_hamiltonian, BodyParams, HamiltonianPart, NonsingularState};
use crate::scalar::{r, Real};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("tolerance outside the supported range [1e-14, 1e-6]")]
    InvalidTolerance,
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("sample grid must contain at least two strictly monotonic times")]
    BadGrid,
}

/// Sampled trajectory in the nonsingular chart with per-sample energy.
#[derive(Debug, Clone)]
pub struct Trajectory<R: Real> {
    pub times: Vec<R>,
    pub states: Vec<NonsingularState<R>>,
    /// Full Hamiltonian at each sample.
    pub energies: Vec<R>,
}

impl<R: Real> Trajectory<R> {
    /// Largest relative energy drift against the initial sample.
    pub fn relative_energy_drift(&self) -> R {
        let h0 = self.energies[0];
        self.energies
            .iter()
            .map(|h| ((*h - h0) / h0).abs())
            .fold(R::zero(), |a, b| a.max(b))
    }
}

/// Canonical equations of the full Hamiltonian in the nonsingular chart:
/// `xdot = dH/dX`, `Xdot = -dH/dx`, `ydot = dH/dY`, `Ydot = -dH/dy = 0`.
pub fn hamiltonian_rhs<R: Real>(s: &NonsingularState<R>, p: &BodyParams<R>) -> (R, R, R, R) {
    let two = r::<R>(2.0);
    let a = p.alpha;
    let b = p.beta;
    let xdot = s.Y / p.C * a * (R::one() - b) * s.X
        - a / (two * p.C) * (s.x * s.x * s.X + (R::one() - b) * s.X.powi(3));
    let xdot_cap = -s.Y / p.C * a * (R::one() + b) * s.x
        + a / (two * p.C) * ((R::one() + b) * s.x.powi(3) + s.x * s.X * s.X);
    let ydot = s.Y / p.C
        + a * (R::one() - b) / (two * p.C) * (s.X * s.X + p.omega * p.omega * s.x * s.x);
    (xdot, xdot_cap, ydot, R::zero())
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Copy)]
struct Osc<R> {
    x: R,
    X: R,
    y: R,
}

fn osc_rhs<R: Real>(s: Osc<R>, big_y: R, p: &BodyParams<R>) -> Osc<R> {
    let st = NonsingularState { x: s.x, X: s.X, y: s.y, Y: big_y };
    let (dx, dX, dy, _) = hamiltonian_rhs(&st, p);
    Osc { x: dx, X: dX, y: dy }
}

fn axpy<R: Real>(s: Osc<R>, h: R, ks: &[Osc<R>], ws: &[f64]) -> Osc<R> {
    let mut out = s;
    for (k, w) in ks.iter().zip(ws) {
        let w = r::<R>(*w) * h;
        out.x = out.x + w * k.x;
        out.X = out.X + w * k.X;
        out.y = out.y + w * k.y;
    }
    out
}

/// One embedded step: returns the 5th-order advance and the error estimate.
fn dopri_step<R: Real>(s: Osc<R>, big_y: R, p: &BodyParams<R>, h: R) -> (Osc<R>, Osc<R>) {
    let mut k = [s; 7];
    k[0] = osc_rhs(s, big_y, p);
    for i in 0..6 {
        let stage = axpy(s, h, &k[..=i], &A[i][..=i]);
        k[i + 1] = osc_rhs(stage, big_y, p);
    }
    let y5 = axpy(s, h, &k, &B5);
    let mut err = Osc { x: R::zero(), X: R::zero(), y: R::zero() };
    for i in 0..7 {
        let w = r::<R>(B5[i] - B4[i]) * h;
        err.x = err.x + w * k[i].x;
        err.X = err.X + w * k[i].X;
        err.y = err.y + w * k[i].y;
    }
    (y5, err)
}

fn error_norm<R: Real>(from: Osc<R>, to: Osc<R>, err: Osc<R>, tol: R) -> R {
    let sc = |a: R, b: R| tol + tol * a.abs().max(b.abs());
    let ex = err.x / sc(from.x, to.x);
    let eX = err.X / sc(from.X, to.X);
    let ey = err.y / sc(from.y, to.y);
    ((ex * ex + eX * eX + ey * ey) / r::<R>(3.0)).sqrt()
}

/// Integrate from `state0` (taken at `times[0]`) and sample at every grid
/// time.  The grid must be strictly monotonic; decreasing grids integrate
/// backwards.  Local error is controlled at `tol` per step (both absolute
/// and relative).
pub fn integrate<R: Real>(
    state0: &NonsingularState<R>,
    p: &BodyParams<R>,
    times: &[R],
    tol: R,
) -> Result<Trajectory<R>, OracleError> {
    let tol_f = tol.to_f64().unwrap_or(0.0);
    if !(1e-14..=1e-6).contains(&tol_f) {
        return Err(OracleError::InvalidTolerance);
    }
    if times.len() < 2 {
        return Err(OracleError::BadGrid);
    }
    let dir = (times[1] - times[0]).signum();
    if dir == R::zero()
        || times.windows(2).any(|w| (w[1] - w[0]) * dir <= R::zero())
    {
        return Err(OracleError::BadGrid);
    }

    let big_y = state0.Y;
    let mut s = Osc { x: state0.x, X: state0.X, y: state0.y };
    let mut t = times[0];
    let span = (*times.last().unwrap() - times[0]).abs();
    let mut h = dir * (span * r::<R>(1e-3)).min(r::<R>(0.1));

    let record = |s: &Osc<R>| NonsingularState { x: s.x, X: s.X, y: s.y, Y: big_y };
    let mut states = vec![record(&s)];
    let mut energies =
        vec![nonsingular_hamiltonian(&states[0], p, HamiltonianPart::Full)];

    for &target in &times[1..] {
        while (target - t) * dir > R::zero() {
            let remaining = target - t;
            let clamped = h.abs() >= remaining.abs();
            let h_step = if clamped { remaining } else { h };
            let (s_new, err) = dopri_step(s, big_y, p, h_step);
            let en = error_norm(s, s_new, err, tol);
            let accepted = en.is_finite() && en <= R::one();
            if accepted {
                t = t + h_step;
                s = s_new;
            }
            // proportional controller, order-5 local truncation
            let factor = if !en.is_finite() {
                r::<R>(0.2)
            } else if en > R::zero() {
                (r::<R>(0.9) * en.powf(r::<R>(-0.2))).min(r::<R>(5.0)).max(r::<R>(0.2))
            } else {
                r::<R>(5.0)
            };
            if !(clamped && accepted) {
                // a grid-clamped accepted step says nothing about accuracy;
                // keep the previous proposal in that case
                h = h_step * factor;
            }
            let floor = r::<R>(16.0) * R::epsilon() * t.abs().max(R::one());
            if h.abs() < floor {
                return Err(OracleError::StepFailure { t: t.to_f64().unwrap_or(f64::NAN) });
            }
        }
        t = target;
        states.push(record(&s));
        energies.push(nonsingular_hamiltonian(states.last().unwrap(), p, HamiltonianPart::Full));
    }

    Ok(Trajectory { times: times.to_vec(), states, energies })
}

/// Fixed-step advance to `t_end` with step magnitude `h` (no error control);
/// used by the step-halving order verification.
pub fn integrate_fixed_step<R: Real>(
    state0: &NonsingularState<R>,
    p: &BodyParams<R>,
    t_span: (R, R),
    h: R,
) -> NonsingularState<R> {
    let big_y = state0.Y;
    let mut s = Osc { x: state0.x, X: state0.X, y: state0.y };
    let dir = (t_span.1 - t_span.0).signum();
    let mut t = t_span.0;
    loop {
        let remaining = t_span.1 - t;
        if remaining * dir <= R::zero() {
            break;
        }
        let step = if h > remaining.abs() { remaining } else { h * dir };
        let (s_new, _) = dopri_step(s, big_y, p, step);
        s = s_new;
        t = t + step;
    }
    NonsingularState { x: s.x, X: s.X, y: s.y, Y: big_y }
}
