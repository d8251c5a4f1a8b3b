//! Deterministic machine-readable output.
//!
//! Every float is printed with 17 significant digits (`{:.16e}`), enough to
//! round-trip an `f64` exactly, so identical inputs produce byte-identical
//! files.  Exact rationals are serialized as `"p/q"` strings by the series
//! layer itself.

use std::fmt::Write as _;

use num_complex::Complex;

use samrot_core::charts::BodyParams;
use samrot_core::gravgrad::GravGradReport;
use samrot_core::oracle::Trajectory;
use samrot_core::propagator::ErrorReport;

pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex17(z: Complex<f64>) -> String {
    format!("{{\"re\":{},\"im\":{}}}", f17(z.re), f17(z.im))
}

pub fn params_json(p: &BodyParams<f64>) -> String {
    format!(
        "{{\"A\":{},\"B\":{},\"C\":{},\"alpha\":{},\"beta\":{},\"omega\":{},\"gamma\":{}}}",
        f17(p.A),
        f17(p.B),
        f17(p.C),
        f17(p.alpha),
        f17(p.beta),
        f17(p.omega),
        f17(p.gamma)
    )
}

pub fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut out = String::from("t,x,X,y,Y,H\n");
    for i in 0..traj.times.len() {
        let s = &traj.states[i];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            f17(traj.times[i]),
            f17(s.x),
            f17(s.X),
            f17(s.y),
            f17(s.Y),
            f17(traj.energies[i])
        );
    }
    out
}

pub fn error_report_json(r: &ErrorReport<f64>) -> String {
    let times: Vec<String> = r.times.iter().map(|t| f17(*t)).collect();
    format!(
        "{{\"order\":{},\"delta\":{},\"max_abs_err\":{{\"x\":{},\"X\":{},\"y\":{},\"H\":{}}},\"times\":[{}]}}",
        r.order,
        f17(r.delta),
        f17(r.max_err_x),
        f17(r.max_err_X),
        f17(r.max_err_y),
        f17(r.max_err_H),
        times.join(",")
    )
}

pub fn gravgrad_json(rep: &GravGradReport<f64>) -> String {
    let ratio = match rep.ratio {
        Some(q) => complex17(q),
        None => "null".into(),
    };
    format!(
        "{{\"D\":{},\"D_avg\":{},\"S_paper\":{},\"S_engine\":{},\"residual_paper\":{},\"residual_engine\":{},\"ratio\":{}}}",
        f17(rep.d),
        f17(rep.d_avg),
        complex17(rep.s_reference),
        complex17(rep.s_engine),
        f17(rep.residual_reference),
        f17(rep.residual_engine),
        ratio
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        assert_eq!(f17(0.18), "1.7999999999999999e-1");
        assert_eq!(f17(-1.0 / 3.0), "-3.3333333333333331e-1");
        for x in [0.1 + 0.2, 1.0 / 7.0, 6.0_f64.sqrt(), -1e-13, 3.0e8] {
            let parsed: f64 = f17(x).parse().unwrap();
            assert_eq!(parsed, x, "17 significant digits must round-trip {x}");
        }
    }
}
