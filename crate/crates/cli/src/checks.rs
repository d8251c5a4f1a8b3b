//! The `check` subcommand: run every module's invariant suite and report
//! one PASS/FAIL line per section.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use samrot_core::charts::*;
use samrot_core::gravgrad::{
    average_y, homological_residual, potential, solve_kepler, GravGradGeometry, GravGradPoint,
    OrbitModel,
};
use samrot_core::lie::{lie_derivative_main, normalize};
use samrot_core::oracle::integrate;
use samrot_core::propagator::{
    analytic_solution, analytic_trajectory, compare_trajectories, propagate_analytic,
};
use samrot_core::series::{GaussianRational, Monomial, Series};

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, name: &str, body: impl FnOnce() -> Result<String, String>) {
        match body() {
            Ok(detail) if detail.is_empty() => println!("check {name}: PASS"),
            Ok(detail) => println!("check {name}: PASS ({detail})"),
            Err(why) => {
                self.failures += 1;
                println!("check {name}: FAIL ({why})");
            }
        }
    }
}

fn random_body(rng: &mut ChaCha8Rng) -> BodyParams<f64> {
    loop {
        let a: f64 = rng.gen_range(0.4..0.95);
        let b: f64 = rng.gen_range(a..0.98);
        if let Ok(p) = derive_params(a, b, 1.0) {
            return p;
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> AndoyerState<f64> {
    let m: f64 = rng.gen_range(0.3..3.0);
    AndoyerState {
        lambda: rng.gen_range(-3.0..3.0),
        mu: rng.gen_range(-3.0..3.0),
        nu: rng.gen_range(-3.0..3.0),
        Lambda: m * rng.gen_range(-1.0..1.0),
        M: m,
        N: m * (1.0 - rng.gen_range(0.0..0.45)),
    }
}

fn random_coeff(rng: &mut ChaCha8Rng) -> GaussianRational {
    let re = GaussianRational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9));
    let im = GaussianRational::ratio_i(rng.gen_range(-9..=9), rng.gen_range(1..=9));
    &re + &im
}

fn random_series(rng: &mut ChaCha8Rng) -> Series {
    Series::from_terms((0..rng.gen_range(1..=4)).map(|_| {
        (
            random_coeff(rng),
            Monomial {
                u: rng.gen_range(0..=2),
                U: rng.gen_range(0..=2),
                V: rng.gen_range(-1..=1),
                C: rng.gen_range(-1..=1),
                alpha: rng.gen_range(0..=1),
                beta: rng.gen_range(0..=2),
                sqrtgamma: rng.gen_range(-1..=1),
            },
        )
    }))
}

pub fn run_all(quick: bool) -> bool {
    let mut suite = Suite { failures: 0 };
    let states = if quick { 100 } else { 1000 };
    let cases = if quick { 25 } else { 100 };
    let norm_order = if quick { 3 } else { 6 };

    suite.run("charts.roundtrip+consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..states {
            let p = random_body(&mut rng);
            let a = random_state(&mut rng);
            let ns = andoyer_to_nonsingular(&a).map_err(|e| e.to_string())?;
            let (back, _) = nonsingular_to_andoyer(&ns, a.lambda, a.Lambda)
                .map_err(|e| e.to_string())?;
            if (back.N - a.N).abs() > 1e-13 * a.M || (back.M - a.M).abs() > 1e-13 * a.M {
                return Err("andoyer round trip off".into());
            }
            let cs = nonsingular_to_complex(&ns, &p).map_err(|e| e.to_string())?;
            if reality_defect(&cs) > 1e-13 {
                return Err("reality slice violated".into());
            }
            let h_a = andoyer_hamiltonian(&a, &p, HamiltonianPart::Full);
            let h_n = nonsingular_hamiltonian(&ns, &p, HamiltonianPart::Full);
            let h_c = complex_hamiltonian(&cs, &p, HamiltonianPart::Full);
            worst = worst
                .max((h_n - h_a).abs() / h_a.abs())
                .max((h_c.re - h_a).abs() / h_a.abs());
        }
        if worst < 1e-12 {
            Ok(format!("{states} states, worst relative spread {worst:.2e}"))
        } else {
            Err(format!("cross-chart spread {worst:.2e}"))
        }
    });

    suite.run("series.algebra-laws", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..cases {
            let f = random_series(&mut rng);
            let g = random_series(&mut rng);
            let h = random_series(&mut rng);
            if !f.poisson(&g).add(&g.poisson(&f)).is_zero() {
                return Err("antisymmetry".into());
            }
            if f.mul(&g).poisson(&h) != f.mul(&g.poisson(&h)).add(&f.poisson(&h).mul(&g)) {
                return Err("Leibniz".into());
            }
            let jac = f
                .poisson(&g.poisson(&h))
                .add(&g.poisson(&h.poisson(&f)))
                .add(&h.poisson(&f.poisson(&g)));
            if !jac.is_zero() {
                return Err("Jacobi".into());
            }
            if f.mul(&g.add(&h)) != f.mul(&g).add(&f.mul(&h)) {
                return Err("distributivity".into());
            }
        }
        Ok(format!("{cases} randomized cases"))
    });

    let norm = match normalize(norm_order) {
        Ok(n) => n,
        Err(e) => {
            println!("check lie.normalize: FAIL ({e})");
            return false;
        }
    };

    suite.run("lie.homological+kernel", || {
        for n in 1..=norm_order {
            let resid = lie_derivative_main(&norm.s_terms[n - 1])
                .sub(&norm.htilde_terms[n - 1].sub(&norm.k_terms[n]));
            if !resid.is_zero() {
                return Err(format!("residual at order {n}"));
            }
            for (m, _) in norm.k_terms[n].iter() {
                if m.u != m.U {
                    return Err(format!("non-kernel monomial in K_{n}"));
                }
            }
            for (m, _) in norm.s_terms[n - 1].iter() {
                if m.u == m.U || m.beta < 1 {
                    return Err(format!("bad generator monomial at order {n}"));
                }
            }
        }
        // anchors of the printed convention
        if norm.p_polys[0] != Series::constant(GaussianRational::ratio_i(-2, 1)) {
            return Err("p_0 != -2i".into());
        }
        if norm.p_polys[1] != Series::constant(GaussianRational::one()) {
            return Err("p_1 != 1".into());
        }
        if norm.p_polys[2]
            != Series::term(GaussianRational::ratio(1, 2), Monomial { beta: 2, ..Monomial::ONE })
        {
            return Err("p_2 != beta^2/2".into());
        }
        Ok(format!("orders 1..={norm_order} exact"))
    });

    suite.run("oracle.conservation+reversibility", || {
        let p = derive_params(1.0, 2.0, 3.0).map_err(|e| e.to_string())?;
        let j = 10.0f64.to_radians();
        let a0 = AndoyerState { lambda: 0.1, mu: 0.7, nu: 0.3, Lambda: 0.4, M: 1.0, N: j.cos() };
        let ns0 = andoyer_to_nonsingular(&a0).map_err(|e| e.to_string())?;
        let periods = if quick { 2.0 } else { 10.0 };
        let t_end = periods * 2.0 * std::f64::consts::PI * p.C;
        let tol = 1e-12;
        let times: Vec<f64> = (0..=400).map(|i| t_end * i as f64 / 400.0).collect();
        let traj = integrate(&ns0, &p, &times, tol).map_err(|e| e.to_string())?;
        let drift = traj.relative_energy_drift();
        if drift >= 10.0 * tol {
            return Err(format!("energy drift {drift:.2e}"));
        }
        if traj.states.iter().any(|s| s.Y != ns0.Y) {
            return Err("Y not exactly constant".into());
        }
        let t_rev = t_end / 5.0;
        let fwd = integrate(&ns0, &p, &[0.0, t_rev], tol).map_err(|e| e.to_string())?;
        let back = integrate(&fwd.states[1], &p, &[t_rev, 0.0], tol).map_err(|e| e.to_string())?;
        let fin = back.states[1];
        let rev = (fin.x - ns0.x).abs().max((fin.X - ns0.X).abs()).max((fin.y - ns0.y).abs());
        if rev >= 100.0 * tol {
            return Err(format!("reversibility {rev:.2e}"));
        }
        Ok(format!("drift {drift:.2e}, reversibility {rev:.2e}"))
    });

    suite.run("propagator.identity+convergence", || {
        let p = derive_params(1.0, 2.0, 3.0).map_err(|e| e.to_string())?;
        let j = 10.0f64.to_radians();
        let a0 = AndoyerState { lambda: 0.1, mu: 0.7, nu: 0.3, Lambda: 0.4, M: 1.0, N: j.cos() };
        let back = propagate_analytic(&a0, &p, &norm, norm_order, 0.0).map_err(|e| e.to_string())?;
        let t0_defect = (back.mu - a0.mu).abs().max((back.N - a0.N).abs());
        if t0_defect > 1e-8 {
            return Err(format!("t = 0 identity defect {t0_defect:.2e}"));
        }
        let sol = analytic_solution(&a0, &p, &norm, norm_order).map_err(|e| e.to_string())?;
        if sol.rate_u.re.abs() > 1e-12 {
            return Err("Re(Omega_u) above 1e-12 on the reality slice".into());
        }
        let n0 = sol.prime0.u.norm();
        for k in 1..=10 {
            let pr = sol.prime_at(k as f64);
            if ((pr.u.norm() - n0) / n0).abs() > 1e-12 {
                return Err("|u'| drifts along the flow".into());
            }
        }
        let t_mu = 2.0 * std::f64::consts::PI * p.C / (1.0 + p.gamma);
        let times: Vec<f64> = (0..=100).map(|i| t_mu * i as f64 / 100.0).collect();
        let ns0 = andoyer_to_nonsingular(&a0).map_err(|e| e.to_string())?;
        let oracle_traj = integrate(&ns0, &p, &times, 1e-13).map_err(|e| e.to_string())?;
        let mut prev = f64::INFINITY;
        for order in 1..=3 {
            let traj =
                analytic_trajectory(&a0, &p, &norm, order, &times).map_err(|e| e.to_string())?;
            let rep = compare_trajectories(&traj, &oracle_traj, order).map_err(|e| e.to_string())?;
            if rep.max_err_xX() >= prev {
                return Err(format!("no improvement at order {order}"));
            }
            prev = rep.max_err_xX();
        }
        Ok(format!("order-3 error vs oracle {prev:.2e}"))
    });

    suite.run("gravgrad.average+generator", || {
        let p = derive_params(1.0, 2.0, 3.0).map_err(|e| e.to_string())?;
        let orbit = OrbitModel { a: 1.0, e: 0.05, n_mean: 1e-3, phase0: 0.0, theta0: 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..cases.min(20) {
            let c: f64 = rng.gen_range(-0.99..0.99);
            let geom = GravGradGeometry {
                r: rng.gen_range(0.8..1.3),
                theta: 0.0,
                vartheta: rng.gen_range(-3.0..3.0),
                inc: c.acos(),
                c,
                s: (1.0 - c * c).sqrt(),
            };
            let closed = average_y(&orbit, &geom, &p);
            let n = 4096;
            let mut acc = 0.0;
            for k in 0..n {
                let y = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                acc += potential(&orbit, &geom, &p, y);
            }
            if (closed - acc / n as f64).abs() > 1e-12 * closed.abs().max(1.0) {
                return Err("average vs quadrature".into());
            }
            let pt = GravGradPoint {
                y: rng.gen_range(-3.0..3.0),
                w: Complex::new(0.0, rng.gen_range(0.0..0.1)),
                V: rng.gen_range(0.5..2.0),
            };
            let d = potential(&orbit, &geom, &p, pt.y).abs().max(1e-12);
            let res = homological_residual(&orbit, &geom, &p, &pt, false)
                .map_err(|e| e.to_string())?;
            if res > 1e-10 * d {
                return Err(format!("generator residual {res:.2e}"));
            }
        }
        let m: f64 = 1.9;
        let e_anom = solve_kepler(m, 0.7).map_err(|e| e.to_string())?;
        if (e_anom - 0.7 * e_anom.sin() - m).abs() > 1e-13 {
            return Err("Kepler residual".into());
        }
        Ok(String::new())
    });

    if suite.failures == 0 {
        println!("check: all sections passed");
        true
    } else {
        println!("check: {} section(s) failed", suite.failures);
        false
    }
}
