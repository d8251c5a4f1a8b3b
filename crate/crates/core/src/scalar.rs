//! Scalar abstraction for the floating-point side of the engine.
//!
//! All numeric charts, integrators and evaluators are generic over [`Real`];
//! the exact series algebra in [`crate::series`] is rational-valued and does
//! not depend on it.  `f64` is the reference precision: every tolerance
//! quoted in the crate (and the whole validation suite) assumes it.

use std::fmt;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + fmt::Debug
    + fmt::Display
    + Copy
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for converting literal constants into the working scalar.
#[inline]
pub(crate) fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("finite literal converts to any Real")
}

/// Normalize an angle to the interval (-pi, pi].
pub fn wrap_angle<R: Real>(a: R) -> R {
    let two_pi = R::PI() + R::PI();
    let mut x = a % two_pi;
    if x <= -R::PI() {
        x = x + two_pi;
    } else if x > R::PI() {
        x = x - two_pi;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        for k in -20..20 {
            let a = 0.37 + 1.9 * k as f64;
            let w = wrap_angle(a);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
            // same angle modulo 2*pi
            let turns = (a - w) / (2.0 * std::f64::consts::PI);
            assert!((turns - turns.round()).abs() < 1e-12);
        }
        assert_eq!(wrap_angle(std::f64::consts::PI), std::f64::consts::PI);
    }
}
