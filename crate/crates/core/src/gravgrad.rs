//! First-order gravity-gradient perturbation for near-SAM rotation.
//!
//! The disturbing body moves on a Kepler orbit whose plane is taken as the
//! inertial plane.  With terms of order `sin(J/2)` dropped, the disturbing
//! function depends on the rotation state only through the angle `y` and the
//! product `uU`, so the homological equation involves just the angle branch
//! of the Lie derivative,
//!
//! ```text
//! L_M F(y) = (V - i gamma^{3/2} uU) / (C sqrt(gamma)) * dF/dy ,
//! ```
//!
//! and is solved per Fourier mode of `y`.  The module keeps everything in
//! closed trigonometric/rational form: the resolvent denominator
//! `V - i gamma^{3/2} uU` is not polynomial, so these objects deliberately
//! live outside the polynomial series engine.
//!
//! Orbit geometry (`r`, `vartheta`) is frozen while the homological residual
//! is evaluated; its slow time dependence is not removed here.  Reference
//! magnitudes for solar-system bodies put this perturbation below `1e-6` of
//! the torque-free terms, so only the first-order objects are computed — no
//! secular propagation.

use num_complex::Complex;
use thiserror::Error;

use crate::charts::BodyParams;
use crate::scalar::{r, wrap_angle, Real};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GravGradError {
    #[error("invalid orbit: require a > 0, n > 0, 0 <= e < 1")]
    InvalidOrbit,
    #[error("Kepler solver failed to converge within 50 iterations")]
    NoConvergence,
    #[error("|Lambda| exceeds M: inclination undefined")]
    InvalidInclination,
    #[error("resolvent denominator vanishes at this point")]
    SingularDenominator,
}

// ---------------------------------------------------------------------------
// Orbit of the disturbing body
// ---------------------------------------------------------------------------

/// Keplerian elements of the disturbing body, in the plane taken as the
/// inertial plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitModel<R: Real> {
    /// Semimajor axis.
    pub a: R,
    /// Eccentricity in `[0, 1)`.
    pub e: R,
    /// Mean motion.
    pub n_mean: R,
    /// Mean anomaly at epoch.
    pub phase0: R,
    /// Offset added to the polar angle `theta`.
    pub theta0: R,
}

impl<R: Real> OrbitModel<R> {
    pub fn validate(&self) -> Result<(), GravGradError> {
        if self.a > R::zero() && self.n_mean > R::zero() && self.e >= R::zero() && self.e < R::one()
        {
            Ok(())
        } else {
            Err(GravGradError::InvalidOrbit)
        }
    }
}

/// Solve Kepler's equation `E - e sin E = M` by Newton iteration from
/// Danby's starter `E0 = M + 0.85 e sign(sin M)`.
pub fn solve_kepler<R: Real>(mean_anomaly: R, e: R) -> Result<R, GravGradError> {
    let tol = r::<R>(1e-13).max(R::epsilon() * r::<R>(8.0));
    let kick = if mean_anomaly.sin() >= R::zero() { r::<R>(0.85) } else { r::<R>(-0.85) };
    let mut big_e = mean_anomaly + kick * e;
    for _ in 0..50 {
        let f = big_e - e * big_e.sin() - mean_anomaly;
        let fp = R::one() - e * big_e.cos();
        let delta = f / fp;
        big_e = big_e - delta;
        if delta.abs() < tol {
            return Ok(big_e);
        }
    }
    Err(GravGradError::NoConvergence)
}

/// Polar coordinates `(r, theta)` of the disturbing body at time `t`.
///
/// `theta` is continuous across revolutions: the true anomaly advances by
/// exactly one turn per turn of the eccentric anomaly, so whole turns of
/// `E` are added back after the principal-branch half-angle conversion.
/// Circular orbits reduce to `theta = theta0 + phase0 + n t` identically.
pub fn kepler_position<R: Real>(orbit: &OrbitModel<R>, t: R) -> Result<(R, R), GravGradError> {
    orbit.validate()?;
    let m_anom = orbit.phase0 + orbit.n_mean * t;
    let big_e = solve_kepler(m_anom, orbit.e)?;
    let radius = orbit.a * (R::one() - orbit.e * big_e.cos());
    let principal = wrap_angle(big_e);
    let half = principal / r::<R>(2.0);
    let true_anom = r::<R>(2.0)
        * ((R::one() + orbit.e).sqrt() * half.sin()).atan2((R::one() - orbit.e).sqrt() * half.cos());
    let turns = big_e - principal;
    Ok((radius, orbit.theta0 + true_anom + turns))
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Frozen geometric configuration entering the disturbing function.
#[derive(Debug, Clone, Copy)]
pub struct GravGradGeometry<R: Real> {
    /// Distance to the disturbing body.
    pub r: R,
    /// Its polar angle.
    pub theta: R,
    /// `vartheta = lambda - theta`.
    pub vartheta: R,
    /// Inclination between orbital and invariable planes, `cos i = Lambda/M`.
    pub inc: R,
    pub c: R,
    pub s: R,
}

/// Build the geometry from the orbit at time `t` and the momentum node data
/// `(lambda, Lambda, M)`.
pub fn geometry<R: Real>(
    orbit: &OrbitModel<R>,
    lambda: R,
    Lambda: R,
    M: R,
    t: R,
) -> Result<GravGradGeometry<R>, GravGradError> {
    if Lambda.abs() > M {
        return Err(GravGradError::InvalidInclination);
    }
    let (radius, theta) = kepler_position(orbit, t)?;
    let c = Lambda / M;
    let s = (R::one() - c * c).sqrt();
    Ok(GravGradGeometry { r: radius, theta, vartheta: wrap_angle(lambda - theta), inc: c.acos(), c, s })
}

// ---------------------------------------------------------------------------
// Disturbing function and its average
// ---------------------------------------------------------------------------

fn front_factor<R: Real>(orbit: &OrbitModel<R>, geom: &GravGradGeometry<R>) -> R {
    -(orbit.n_mean * orbit.n_mean) / r::<R>(4.0) * (orbit.a / geom.r).powi(3)
}

/// Gravity-gradient disturbing function at rotation angle `y`.
pub fn potential<R: Real>(
    orbit: &OrbitModel<R>,
    geom: &GravGradGeometry<R>,
    p: &BodyParams<R>,
    y: R,
) -> R {
    let two = r::<R>(2.0);
    let three = r::<R>(3.0);
    let s2 = geom.s * geom.s;
    let axial = (p.C - (p.A + p.B) / two) * (two - three * s2 + three * s2 * (two * geom.vartheta).cos());
    let tri = r::<R>(0.75)
        * (p.B - p.A)
        * ((R::one() - geom.c).powi(2) * (two * y - two * geom.vartheta).cos()
            + two * s2 * (two * y).cos()
            + (R::one() + geom.c).powi(2) * (two * y + two * geom.vartheta).cos());
    front_factor(orbit, geom) * (axial + tri)
}

/// Average of [`potential`] over one revolution of `y` (closed form: the
/// triaxial bracket is purely periodic in `y` and drops out).
pub fn average_y<R: Real>(
    orbit: &OrbitModel<R>,
    geom: &GravGradGeometry<R>,
    p: &BodyParams<R>,
) -> R {
    let two = r::<R>(2.0);
    let three = r::<R>(3.0);
    let s2 = geom.s * geom.s;
    let axial = (p.C - (p.A + p.B) / two) * (two - three * s2 + three * s2 * (two * geom.vartheta).cos());
    front_factor(orbit, geom) * axial
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

/// Rotation-state point at which the generator is evaluated.
#[derive(Debug, Clone, Copy)]
pub struct GravGradPoint<R: Real> {
    /// Nonsingular angle `y`.
    pub y: R,
    /// Product `u U` (equal to `i |u|^2` on the physical slice).
    pub w: Complex<R>,
    /// Momentum `V = Y sqrt(gamma)`.
    pub V: R,
}

/// The two closed-form particular generators: the engine-derived solution of
/// the homological equation and the reference closed form it is compared
/// against.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorPair<R: Real> {
    pub engine: Complex<R>,
    pub reference: Complex<R>,
}

fn trig_sum<R: Real>(geom: &GravGradGeometry<R>, y: R) -> (R, R) {
    let two = r::<R>(2.0);
    let s2 = geom.s * geom.s;
    let w1 = (R::one() - geom.c).powi(2);
    let w2 = two * s2;
    let w3 = (R::one() + geom.c).powi(2);
    let sum_sin = w1 * (two * y - two * geom.vartheta).sin()
        + w2 * (two * y).sin()
        + w3 * (two * y + two * geom.vartheta).sin();
    let dsum = two
        * (w1 * (two * y - two * geom.vartheta).cos()
            + w2 * (two * y).cos()
            + w3 * (two * y + two * geom.vartheta).cos());
    (sum_sin, dsum)
}

fn resolvent_denominator<R: Real>(
    p: &BodyParams<R>,
    pt: &GravGradPoint<R>,
) -> Result<Complex<R>, GravGradError> {
    let g32 = p.gamma.powf(r::<R>(1.5));
    let denom = Complex::new(pt.V, R::zero()) - Complex::<R>::i() * pt.w.scale(g32);
    if denom.norm() < r::<R>(1e-12) * pt.V.abs() {
        return Err(GravGradError::SingularDenominator);
    }
    Ok(denom)
}

/// Particular solutions of the homological equation for the periodic part of
/// the disturbing function.
///
/// The engine form divides each `e^{+-2iy}` Fourier mode of `D - <D>` by its
/// eigenvalue `+-2i (V - i gamma^{3/2} uU)/(C sqrt(gamma))`, which collapses
/// to `kappa C sqrt(gamma) / (2 (V - i gamma^{3/2} uU)) * sum_k w_k sin(...)`.
/// The reference form carries `(3/16) C sqrt(gamma)/(i gamma^{3/2} uU - V)`
/// instead; the measured ratio between the two is reported, not assumed.
pub fn gravgrad_generator<R: Real>(
    orbit: &OrbitModel<R>,
    geom: &GravGradGeometry<R>,
    p: &BodyParams<R>,
    pt: &GravGradPoint<R>,
) -> Result<GeneratorPair<R>, GravGradError> {
    let kappa = front_factor(orbit, geom) * r::<R>(0.75) * (p.B - p.A);
    let (sum_sin, _) = trig_sum(geom, pt.y);
    let c_sg = p.C * p.gamma.sqrt();
    let denom = resolvent_denominator(p, pt)?;
    let engine = (Complex::new(kappa * c_sg * sum_sin, R::zero()) / denom).scale(r::<R>(0.5));
    let reference = (Complex::new(kappa * r::<R>(3.0 / 16.0) * c_sg * sum_sin, R::zero())) / -denom;
    Ok(GeneratorPair { engine, reference })
}

/// Absolute residual `|L_M(S) - (D - <D>)|` of a closed-form generator at a
/// frozen-orbit point.  `dS/dy` is evaluated analytically from the shared
/// trigonometric structure (the `u dU - U du` branch of the Lie derivative
/// annihilates functions of `uU`).
pub fn homological_residual<R: Real>(
    orbit: &OrbitModel<R>,
    geom: &GravGradGeometry<R>,
    p: &BodyParams<R>,
    pt: &GravGradPoint<R>,
    use_reference_form: bool,
) -> Result<R, GravGradError> {
    let kappa = front_factor(orbit, geom) * r::<R>(0.75) * (p.B - p.A);
    let (_, dsum) = trig_sum(geom, pt.y);
    let c_sg = p.C * p.gamma.sqrt();
    let denom = resolvent_denominator(p, pt)?;
    // dS/dy for S = G(uU, V) * sum_k w_k sin(...), G constant in y
    let g = if use_reference_form {
        Complex::new(kappa * r::<R>(3.0 / 16.0) * c_sg, R::zero()) / -denom
    } else {
        (Complex::new(kappa * c_sg, R::zero()) / denom).scale(r::<R>(0.5))
    };
    let ds_dy = g.scale(dsum);
    let lie_applied = denom * ds_dy / Complex::new(c_sg, R::zero());
    let periodic = kappa * dsum / r::<R>(2.0); // D - <D> at this point
    Ok((lie_applied - Complex::new(periodic, R::zero())).norm())
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

/// Everything the gravity-gradient check produces at one frozen point.
#[derive(Debug, Clone)]
pub struct GravGradReport<R: Real> {
    pub d: R,
    pub d_avg: R,
    pub s_engine: Complex<R>,
    pub s_reference: Complex<R>,
    pub residual_engine: R,
    pub residual_reference: R,
    /// `s_reference / s_engine` when the engine value is nonzero.
    pub ratio: Option<Complex<R>>,
}

pub fn report<R: Real>(
    orbit: &OrbitModel<R>,
    geom: &GravGradGeometry<R>,
    p: &BodyParams<R>,
    pt: &GravGradPoint<R>,
) -> Result<GravGradReport<R>, GravGradError> {
    let d = potential(orbit, geom, p, pt.y);
    let d_avg = average_y(orbit, geom, p);
    let gens = gravgrad_generator(orbit, geom, p, pt)?;
    let residual_engine = homological_residual(orbit, geom, p, pt, false)?;
    let residual_reference = homological_residual(orbit, geom, p, pt, true)?;
    let ratio = (gens.engine.norm() > R::zero()).then(|| gens.reference / gens.engine);
    Ok(GravGradReport {
        d,
        d_avg,
        s_engine: gens.engine,
        s_reference: gens.reference,
        residual_engine,
        residual_reference,
        ratio,
    })
}
