//! Lie-series normalization of the SAM rotation Hamiltonian.
//!
//! In the complex chart the main problem reads
//! `M = V^2/(2 C gamma) - i (V sqrt(gamma)/C) u U` and its Lie derivative
//! acts diagonally on monomials:
//!
//! ```text
//! L_M(u^j U^k) = (sqrt(gamma)/C) V i (k - j) u^j U^k
//! ```
//!
//! so the kernel is spanned by powers of `uU` and the homological equation
//! `L_M(S_n) = Htilde_n - K_n` is solved monomial by monomial.  The driver
//! walks Deprit's triangle
//!
//! ```text
//! f[n][q] = f[n+1][q-1] + sum_{0<=m<=n} binom(n,m) {f[n-m][q-1]; S[m+1]}
//! ```
//!
//! with the factorial bookkeeping `H = sum eps^n/n! H_{n,0}` and
//! `S = sum eps^m/m! S_{m+1}`.  All arithmetic is exact; the homological
//! identity holds as a symbolic zero at every order, which the tests assert.
//!
//! The normalized Hamiltonian depends on `(u', U')` only through the product
//! `w = u'U'`, so each order contributes one polynomial in the triaxiality
//! `beta` once the known prefactor is stripped; [`extract_p_raw`] performs
//! that reduction and [`canonical_unit_phase`] removes the leftover unit
//! phase `1, -1, i, -i` fixed by the reality structure of the chart (kernel
//! coefficients alternate real/imaginary with the order parity, while the
//! reference tables list the polynomials real and positive).  The measured
//! phase is retained, never discarded.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::series::{GaussianRational, Monomial, Series, SeriesError};

/// Hard cap on the normalization order; the triangle is exact arithmetic and
/// memory grows quickly past this.
pub const MAX_ORDER: usize = 24;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("normalization order {0} exceeds the implementation cap {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("order-{order} normalized term is not in kernel form: offending monomial {monomial}")]
    NotKernelForm { order: usize, monomial: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

// ---------------------------------------------------------------------------
// Input Hamiltonian
// ---------------------------------------------------------------------------

/// Main problem in the complex chart:
/// `V^2/(2 C gamma) - i (V sqrt(gamma)/C) u U`.
pub fn hamiltonian_main() -> Series {
    Series::from_terms([
        (
            GaussianRational::ratio(1, 2),
            Monomial { V: 2, C: -1, sqrtgamma: -2, ..Monomial::ONE },
        ),
        (
            GaussianRational::ratio_i(-1, 1),
            Monomial { u: 1, U: 1, V: 1, C: -1, sqrtgamma: 1, ..Monomial::ONE },
        ),
    ])
}

/// Quartic perturbation in the complex chart:
/// `(alpha/4C) [2 u^2 U^2 - i beta (u^3 U - u U^3)]`.
pub fn hamiltonian_perturbation() -> Series {
    Series::from_terms([
        (
            GaussianRational::ratio(1, 2),
            Monomial { u: 2, U: 2, C: -1, alpha: 1, ..Monomial::ONE },
        ),
        (
            GaussianRational::ratio_i(-1, 4),
            Monomial { u: 3, U: 1, C: -1, alpha: 1, beta: 1, ..Monomial::ONE },
        ),
        (
            GaussianRational::ratio_i(1, 4),
            Monomial { u: 1, U: 3, C: -1, alpha: 1, beta: 1, ..Monomial::ONE },
        ),
    ])
}

// ---------------------------------------------------------------------------
// Lie derivative and the homological equation
// ---------------------------------------------------------------------------

/// Lie derivative of the main problem restricted to angle-free series:
/// each monomial `u^j U^k` is multiplied by `(sqrt(gamma)/C) V i (k - j)`.
pub fn lie_derivative_main(f: &Series) -> Series {
    Series::from_terms(f.iter().map(|(m, c)| {
        let k_minus_j = (m.U - m.u) as i64;
        let shifted = Monomial { V: m.V + 1, C: m.C - 1, sqrtgamma: m.sqrtgamma + 1, ..*m };
        (&c.times_i() * &GaussianRational::from_int(k_minus_j), shifted)
    }))
}

/// Split `T` into its kernel part (`j = k` monomials) and the generator `W`
/// solving `L_M(W) = T - kernel(T)` exactly: a monomial `q u^j U^k` with
/// `j != k` contributes `i (C/sqrt(gamma)) q / ((j-k) V) u^j U^k`.
pub fn solve_homological(t: &Series) -> (Series, Series) {
    let mut kernel = Vec::new();
    let mut gen = Vec::new();
    for (m, c) in t.iter() {
        if m.u == m.U {
            kernel.push((c.clone(), *m));
        } else {
            let j_minus_k = (m.u - m.U) as i64;
            let coeff = &c.times_i() * &GaussianRational::ratio(1, j_minus_k);
            let shifted = Monomial { V: m.V - 1, C: m.C + 1, sqrtgamma: m.sqrtgamma - 1, ..*m };
            gen.push((coeff, shifted));
        }
    }
    (Series::from_terms(kernel), Series::from_terms(gen))
}

// ---------------------------------------------------------------------------
// Normalization result
// ---------------------------------------------------------------------------

/// Per-variable correction series of a near-identity canonical map.
///
/// Index `i` holds the order-`(i+1)` term; the map itself is
/// `z = z' + sum_n (1/n!) z_n(u', U', V)` (and likewise for the inverse with
/// the roles of old and new variables exchanged).  The `v` component is the
/// additive correction to the rescaled angle.
#[derive(Debug, Clone, Serialize)]
pub struct VariableSeries {
    pub u: Vec<Series>,
    pub U: Vec<Series>,
    pub v: Vec<Series>,
}

/// Everything the normalization produces.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizationResult {
    pub order: usize,
    /// `K_n = H_{0,n}` for `n = 0..=order`: raw Deprit terms of the
    /// normalized Hamiltonian (kernel monomials only for `n >= 1`).
    pub k_terms: Vec<Series>,
    /// `Htilde_n` for `n = 1..=order` (index `n-1`): the known right-hand
    /// side at each order before the kernel/image split.
    pub htilde_terms: Vec<Series>,
    /// Generator terms `S_1..=S_order` (index `m-1`), pure image monomials.
    pub s_terms: Vec<Series>,
    /// Triaxiality polynomials `p_0..=p_order`: beta-only series after
    /// stripping the kernel prefactor, unit-phase normalized for `n >= 1`.
    pub p_polys: Vec<Series>,
    /// Unit phase `c_n` with `p_polys[n] = c_n * raw extraction`.
    pub p_phases: Vec<GaussianRational>,
    /// Generator cores `s_m`: `S_m` divided by
    /// `alpha^m gamma^{-m/2} V^{-m} beta (u^2 + U^2)`; `None` when the
    /// polynomial factor does not divide exactly.
    pub s_polys: Vec<Option<Series>>,
    /// Prime-to-original variable map terms.
    pub direct: VariableSeries,
    /// Original-to-prime variable map terms.
    pub inverse: VariableSeries,
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn binomial_gr(n: usize, k: usize) -> GaussianRational {
    GaussianRational::from_bigint(binomial_big(n, k))
}

/// Normalize the SAM Hamiltonian to the given order.
///
/// Inputs are fixed: `H_{0,0}` is the main problem, `H_{1,0}` the quartic
/// perturbation, `H_{n,0} = 0` beyond.  Returns the full
/// [`NormalizationResult`], including the direct and inverse variable maps.
pub fn normalize(order: usize) -> Result<NormalizationResult, LieError> {
    if order == 0 || order > MAX_ORDER {
        return Err(LieError::OrderTooLarge(order));
    }

    let mut tri: BTreeMap<(usize, usize), Series> = BTreeMap::new();
    tri.insert((0, 0), hamiltonian_main());
    tri.insert((1, 0), hamiltonian_perturbation());
    for n in 2..=order {
        tri.insert((n, 0), Series::zero());
    }

    let mut s_terms: Vec<Series> = Vec::with_capacity(order);
    let mut htilde_terms: Vec<Series> = Vec::with_capacity(order);
    let mut k_terms: Vec<Series> = vec![hamiltonian_main()];

    for n in 1..=order {
        // Diagonal a + b = n, rows descending; S_n is not known yet and the
        // single term it feeds, {f[0][0]; S_n} at (n-1, 1), is deferred.
        for a in (0..n).rev() {
            let b = n - a;
            let mut node = tri[&(a + 1, b - 1)].clone();
            for m in 0..=a {
                if m < s_terms.len() {
                    let br = tri[&(a - m, b - 1)].poisson(&s_terms[m]);
                    node = node.add(&br.scale(&binomial_gr(a, m)));
                }
            }
            tri.insert((a, b), node);
        }
        let htilde = tri[&(0, n)].clone();
        let (kernel, s_n) = solve_homological(&htilde);
        // Propagate the deferred term {M; S_n} = -(Htilde_n - K_n) down the
        // diagonal: every b >= 1 node inherits it unchanged.
        let image = htilde.sub(&kernel);
        for a in 0..n {
            let b = n - a;
            let node = tri[&(a, b)].sub(&image);
            tri.insert((a, b), node);
        }
        debug_assert_eq!(tri[&(0, n)], kernel);
        htilde_terms.push(htilde);
        s_terms.push(s_n);
        k_terms.push(kernel);
    }

    let mut p_polys = Vec::with_capacity(order + 1);
    let mut p_phases = Vec::with_capacity(order + 1);
    for (n, k) in k_terms.iter().enumerate() {
        let raw = extract_p_raw(k, n)?;
        if n == 0 {
            p_phases.push(GaussianRational::one());
            p_polys.push(raw);
        } else {
            let (resolved, phase) = canonical_unit_phase(&raw).ok_or_else(|| {
                LieError::NotKernelForm { order: n, monomial: format!("{raw}") }
            })?;
            p_phases.push(phase);
            p_polys.push(resolved);
        }
    }

    let s_polys = s_terms
        .iter()
        .enumerate()
        .map(|(i, s)| extract_s_core(s, i + 1))
        .collect();

    let direct = VariableSeries {
        u: coordinate_direct(&s_terms, Seed::SmallU, order),
        U: coordinate_direct(&s_terms, Seed::CapitalU, order),
        v: coordinate_direct(&s_terms, Seed::AngleV, order),
    };
    let inverse = VariableSeries {
        u: coordinate_inverse(&s_terms, Seed::SmallU, order),
        U: coordinate_inverse(&s_terms, Seed::CapitalU, order),
        v: coordinate_inverse(&s_terms, Seed::AngleV, order),
    };

    Ok(NormalizationResult {
        order,
        k_terms,
        htilde_terms,
        s_terms,
        p_polys,
        p_phases,
        s_polys,
        direct,
        inverse,
    })
}

// ---------------------------------------------------------------------------
// Extraction of the printed forms
// ---------------------------------------------------------------------------

/// Strip the order-`n` kernel prefactor
/// `(n!/2) (sqrt(gamma)/C) (alpha/sqrt(gamma))^n (uU)^{n+1} V^{1-n}` from
/// `K_n`, leaving a polynomial in `beta` alone.
///
/// For `n = 0` only the `uU` monomial of the main problem participates; the
/// free `V^2` term is not part of the kernel family.
pub fn extract_p_raw(k_n: &Series, n: usize) -> Result<Series, LieError> {
    let n_i16 = n as i16;
    let mut out = Vec::new();
    let inv_fact = {
        let mut f = BigInt::one();
        for i in 1..=n {
            f *= BigInt::from(i);
        }
        GaussianRational { re: num_rational::BigRational::new(2.into(), f), im: num_rational::BigRational::from_integer(0.into()) }
    };
    for (m, c) in k_n.iter() {
        if n == 0 && m.u == 0 && m.U == 0 {
            continue; // free V^2/(2 C gamma) term
        }
        let expected = Monomial {
            u: n_i16 + 1,
            U: n_i16 + 1,
            V: 1 - n_i16,
            C: -1,
            alpha: n_i16,
            beta: m.beta,
            sqrtgamma: 1 - n_i16,
        };
        if *m != expected || m.beta < 0 {
            return Err(LieError::NotKernelForm { order: n, monomial: format!("{m}") });
        }
        out.push((c * &inv_fact, Monomial { beta: m.beta, ..Monomial::ONE }));
    }
    Ok(Series::from_terms(out))
}

/// Multiply a beta-polynomial by the unit in `{1, -1, i, -i}` that renders
/// every coefficient real with the lowest-degree one positive.  Returns the
/// normalized polynomial and the applied unit, or `None` when the
/// coefficients are not all real or all imaginary.
pub fn canonical_unit_phase(p: &Series) -> Option<(Series, GaussianRational)> {
    if p.is_zero() {
        return Some((p.clone(), GaussianRational::one()));
    }
    use num_traits::Zero;
    let all_real = p.iter().all(|(_, c)| c.im.is_zero());
    let all_imag = p.iter().all(|(_, c)| c.re.is_zero());
    let mut phase = if all_real {
        GaussianRational::one()
    } else if all_imag {
        GaussianRational::i()
    } else {
        return None;
    };
    let lead = p.iter().next().map(|(_, c)| c * &phase).expect("non-zero polynomial");
    if num_traits::Signed::is_negative(&lead.re) {
        phase = -&phase;
    }
    Some((p.scale(&phase), phase))
}

/// Divide `S_m` by `alpha^m gamma^{-m/2} V^{-m} beta (u^2 + U^2)`, the
/// shared structure of the generator terms.  Returns `None` when the
/// polynomial factor does not divide exactly (the raw `S_m` stays available
/// in [`NormalizationResult::s_terms`]).
pub fn extract_s_core(s_m: &Series, m: usize) -> Option<Series> {
    let m_i16 = m as i16;
    let prefactor = Series::term(
        GaussianRational::one(),
        Monomial { alpha: m_i16, sqrtgamma: -m_i16, V: -m_i16, beta: 1, ..Monomial::ONE },
    );
    let quad = Series::from_terms([
        (GaussianRational::one(), Monomial { u: 2, ..Monomial::ONE }),
        (GaussianRational::one(), Monomial { U: 2, ..Monomial::ONE }),
    ]);
    s_m.exact_div(&prefactor.mul(&quad)).ok()
}

// ---------------------------------------------------------------------------
// Coordinate maps from the triangle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Seed {
    SmallU,
    CapitalU,
    AngleV,
}

/// `{seed; S}` for a coordinate seed: `{u; S} = dS/dU`, `{U; S} = -dS/du`,
/// `{v; S} = dS/dV`.
fn seed_bracket(seed: Seed, s: &Series) -> Series {
    match seed {
        Seed::SmallU => s.dU(),
        Seed::CapitalU => s.du().neg(),
        Seed::AngleV => s.dV(),
    }
}

/// Order-`1..=order` terms of the prime-to-original map for one coordinate:
/// the triangle applied to the coordinate function with `f[n][0] = 0` for
/// `n >= 1`, collecting `f[0][q]`.
fn coordinate_direct(s_terms: &[Series], seed: Seed, order: usize) -> Vec<Series> {
    // Column 1 comes straight from the seed; later columns are ordinary.
    let mut prev: Vec<Series> =
        (0..order).map(|n| seed_bracket(seed, &s_terms[n])).collect();
    let mut out: Vec<Series> = Vec::with_capacity(order);
    out.push(prev[0].clone());
    for q in 2..=order {
        let rows = order - q + 1;
        let mut col: Vec<Series> = Vec::with_capacity(rows);
        for n in 0..rows {
            let mut node = prev[n + 1].clone();
            for m in 0..=n {
                let br = prev[n - m].poisson(&s_terms[m]);
                node = node.add(&br.scale(&binomial_gr(n, m)));
            }
            col.push(node);
        }
        out.push(col[0].clone());
        prev = col;
    }
    out
}

/// Order-`1..=order` terms of the original-to-prime map for one coordinate.
///
/// Running the triangle backwards from the seeds `f[0][q] = 0` (`q >= 1`)
/// collapses every off-column node to zero and leaves the recursion
///
/// ```text
/// f[r][0] = - sum_{0<=m<=r-1} binom(r-1, m) {f[r-1-m][0]; S[m+1]}
/// ```
///
/// whose truncated composition with the direct map is the identity (checked
/// exactly in the tests).
fn coordinate_inverse(s_terms: &[Series], seed: Seed, order: usize) -> Vec<Series> {
    let mut rows: Vec<Series> = Vec::with_capacity(order);
    for rm1 in 0..order {
        let mut node = Series::zero();
        for m in 0..=rm1 {
            let br = if rm1 - m == 0 {
                seed_bracket(seed, &s_terms[m])
            } else {
                rows[rm1 - m - 1].poisson(&s_terms[m])
            };
            node = node.sub(&br.scale(&binomial_gr(rm1, m)));
        }
        rows.push(node);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Bindings;
    use num_complex::Complex;

    fn gr(p: i64, q: i64) -> GaussianRational {
        GaussianRational::ratio(p, q)
    }

    fn gri(p: i64, q: i64) -> GaussianRational {
        GaussianRational::ratio_i(p, q)
    }

    fn mono_uU(u: i16, U: i16) -> Monomial {
        Monomial { u, U, ..Monomial::ONE }
    }

    #[test]
    fn lie_derivative_eigenvalues() {
        // kernel monomial
        let f = Series::term(GaussianRational::one(), mono_uU(2, 2));
        assert!(lie_derivative_main(&f).is_zero());
        // u -> -i (sqrt(gamma)/C) V u
        let u = Series::term(GaussianRational::one(), mono_uU(1, 0));
        let expect = Series::term(
            gri(-1, 1),
            Monomial { u: 1, V: 1, C: -1, sqrtgamma: 1, ..Monomial::ONE },
        );
        assert_eq!(lie_derivative_main(&u), expect);
        // u^3 U -> -2i (sqrt(gamma)/C) V u^3 U
        let f31 = Series::term(GaussianRational::one(), mono_uU(3, 1));
        let expect31 = Series::term(
            gri(-2, 1),
            Monomial { u: 3, U: 1, V: 1, C: -1, sqrtgamma: 1, ..Monomial::ONE },
        );
        assert_eq!(lie_derivative_main(&f31), expect31);
    }

    #[test]
    fn perturbation_times_4c_over_alpha() {
        // Scaling away the alpha/(4C) prefactor leaves the bare bracket
        // 2 u^2 U^2 - i beta (u^3 U - u U^3).
        let scaled = hamiltonian_perturbation().mul_term(
            &Monomial { C: 1, alpha: -1, ..Monomial::ONE },
            &GaussianRational::from_int(4),
        );
        let expect = Series::from_terms([
            (gr(2, 1), mono_uU(2, 2)),
            (gri(-1, 1), Monomial { u: 3, U: 1, beta: 1, ..Monomial::ONE }),
            (gri(1, 1), Monomial { u: 1, U: 3, beta: 1, ..Monomial::ONE }),
        ]);
        assert_eq!(scaled, expect);
    }

    #[test]
    fn bracket_against_main_matches_eigenvalue_rule() {
        // {u^3 U; M} computed with the generic bracket equals the monomial rule.
        let f = Series::term(GaussianRational::one(), mono_uU(3, 1));
        assert_eq!(f.poisson(&hamiltonian_main()), lie_derivative_main(&f));
    }

    #[test]
    fn solve_homological_on_single_monomial() {
        // q u^3 U -> W = i C q/(2 sqrt(gamma) V) u^3 U
        let q = gr(5, 7);
        let t = Series::term(q.clone(), mono_uU(3, 1));
        let (kernel, w) = solve_homological(&t);
        assert!(kernel.is_zero());
        let expect = Series::term(
            &q.times_i() * &gr(1, 2),
            Monomial { u: 3, U: 1, V: -1, C: 1, sqrtgamma: -1, ..Monomial::ONE },
        );
        assert_eq!(w, expect);
        assert_eq!(lie_derivative_main(&w), t);

        let k = Series::term(GaussianRational::one(), mono_uU(2, 2));
        let (kernel2, w2) = solve_homological(&k);
        assert_eq!(kernel2, k);
        assert!(w2.is_zero());
    }

    #[test]
    fn first_order_generator() {
        // Splitting the quartic perturbation: kernel (alpha/2C) u^2 U^2 and
        // generator (alpha beta / (8 sqrt(gamma) V)) (u^3 U + u U^3).
        let (kernel, w1) = solve_homological(&hamiltonian_perturbation());
        let expect_kernel = Series::term(
            gr(1, 2),
            Monomial { u: 2, U: 2, C: -1, alpha: 1, ..Monomial::ONE },
        );
        assert_eq!(kernel, expect_kernel);
        let expect_w1 = Series::from_terms([
            (gr(1, 8), Monomial { u: 3, U: 1, V: -1, alpha: 1, beta: 1, sqrtgamma: -1, ..Monomial::ONE }),
            (gr(1, 8), Monomial { u: 1, U: 3, V: -1, alpha: 1, beta: 1, sqrtgamma: -1, ..Monomial::ONE }),
        ]);
        assert_eq!(w1, expect_w1);
        assert_eq!(lie_derivative_main(&w1), hamiltonian_perturbation().sub(&kernel));
    }

    #[test]
    fn homological_identity_exact_through_order_six() {
        let res = normalize(6).unwrap();
        for n in 1..=6 {
            let lhs = lie_derivative_main(&res.s_terms[n - 1]);
            let rhs = res.htilde_terms[n - 1].sub(&res.k_terms[n]);
            assert!(lhs.sub(&rhs).is_zero(), "residual at order {n}");
        }
    }

    #[test]
    fn kernel_purity_and_homogeneity() {
        let res = normalize(6).unwrap();
        for (n, k) in res.k_terms.iter().enumerate().skip(1) {
            for (m, _) in k.iter() {
                assert_eq!(m.u, m.U);
                assert_eq!(m.u as usize, n + 1);
                assert_eq!(m.V as i64, 1 - n as i64);
            }
        }
        for s in &res.s_terms {
            for (m, _) in s.iter() {
                assert_ne!(m.u, m.U);
            }
        }
    }

    #[test]
    fn triaxiality_polynomials_low_orders() {
        let res = normalize(2).unwrap();
        // p0 = -2i, kept in its raw phase.
        assert_eq!(res.p_polys[0], Series::constant(gri(-2, 1)));
        // p1 = 1 with unit phase.
        assert_eq!(res.p_polys[1], Series::constant(gr(1, 1)));
        assert_eq!(res.p_phases[1], GaussianRational::one());
        // Raw p2 is -i beta^2/2 (reality forces the imaginary coefficient at
        // even orders); the canonical phase i recovers beta^2/2.
        let raw2 = extract_p_raw(&res.k_terms[2], 2).unwrap();
        assert_eq!(raw2, Series::term(gri(-1, 2), Monomial { beta: 2, ..Monomial::ONE }));
        assert_eq!(res.p_phases[2], GaussianRational::i());
        assert_eq!(res.p_polys[2], Series::term(gr(1, 2), Monomial { beta: 2, ..Monomial::ONE }));
    }

    #[test]
    fn generator_core_s2() {
        let res = normalize(2).unwrap();
        // s_2 = -i/4 u^2 U^2 in the engine phase convention.
        let s2 = res.s_polys[1].as_ref().unwrap();
        assert_eq!(*s2, Series::term(gri(-1, 4), mono_uU(2, 2)));
    }

    #[test]
    fn beta_zero_collapse() {
        let res = normalize(5).unwrap();
        // Every generator term carries beta.
        for s in &res.s_terms {
            for (m, _) in s.iter() {
                assert!(m.beta >= 1);
            }
        }
        // At beta = 0 the normal form keeps only the main problem plus the
        // first-order kernel term.
        for (n, k) in res.k_terms.iter().enumerate().skip(2) {
            for (m, _) in k.iter() {
                assert!(m.beta >= 2, "order {n} term without beta^2 factor");
            }
        }
    }

    #[test]
    fn first_order_variable_corrections() {
        let res = normalize(2).unwrap();
        // u_{0,1} = {u; S1} = (alpha beta/(8 sqrt(gamma) V)) (u^3 + 3 u U^2)
        let expect_u = Series::from_terms([
            (gr(1, 8), Monomial { u: 3, V: -1, alpha: 1, beta: 1, sqrtgamma: -1, ..Monomial::ONE }),
            (gr(3, 8), Monomial { u: 1, U: 2, V: -1, alpha: 1, beta: 1, sqrtgamma: -1, ..Monomial::ONE }),
        ]);
        assert_eq!(res.direct.u[0], expect_u);
        // U_{0,1} = {U; S1} = -(alpha beta/(8 sqrt(gamma) V)) (U^3 + 3 u^2 U)
        let expect_U = Series::from_terms([
            (gr(-1, 8), Monomial { U: 3, V: -1, alpha: 1, beta: 1, sqrtgamma: -1, ..Monomial::ONE }),
            (gr(-3, 8), Monomial { u: 2, U: 1, V: -1, alpha: 1, beta: 1, sqrtgamma: -1, ..Monomial::ONE }),
        ]);
        assert_eq!(res.direct.U[0], expect_U);
        // Inverse first-order terms are the negatives.
        assert_eq!(res.inverse.u[0], expect_u.neg());
        assert_eq!(res.inverse.U[0], expect_U.neg());
    }

    /// Truncated composition inverse(direct) = identity, exact.
    #[test]
    fn composition_identity() {
        let order = 4usize;
        let res = normalize(order).unwrap();
        let n_i16 = order as i16;
        let fold = |terms: &[Series], seed: Series| {
            let mut acc = seed;
            let mut fact = BigInt::one();
            for (i, t) in terms.iter().enumerate() {
                fact *= BigInt::from(i + 1);
                let w = GaussianRational {
                    re: num_rational::BigRational::new(1.into(), fact.clone()),
                    im: num_rational::BigRational::from_integer(0.into()),
                };
                acc = acc.add(&t.scale(&w));
            }
            acc
        };
        let u_sym = Series::term(GaussianRational::one(), mono_uU(1, 0));
        let U_sym = Series::term(GaussianRational::one(), mono_uU(0, 1));
        let direct_u = fold(&res.direct.u, u_sym.clone());
        let direct_U = fold(&res.direct.U, U_sym.clone());
        let inverse_u = fold(&res.inverse.u, u_sym.clone());
        let inverse_U = fold(&res.inverse.U, U_sym.clone());

        let comp_u = inverse_u.substitute_uU(&direct_u, &direct_U, Some(n_i16));
        assert_eq!(comp_u, u_sym, "u composition");
        let comp_U = inverse_U.substitute_uU(&direct_u, &direct_U, Some(n_i16));
        assert_eq!(comp_U, U_sym, "U composition");

        // v correction: additive, so the composed correction must vanish.
        let direct_v = fold(&res.direct.v, Series::zero());
        let inverse_v = fold(&res.inverse.v, Series::zero());
        let comp_v = direct_v
            .add(&inverse_v.substitute_uU(&direct_u, &direct_U, Some(n_i16)))
            .truncate_alpha(n_i16);
        assert!(comp_v.is_zero(), "v composition: {comp_v}");
    }

    #[test]
    fn order_cap() {
        assert!(matches!(normalize(0), Err(LieError::OrderTooLarge(0))));
        assert!(matches!(normalize(MAX_ORDER + 1), Err(LieError::OrderTooLarge(_))));
    }

    #[test]
    fn numeric_evaluation_of_perturbation_matches_anchor() {
        // The complex-chart anchor state gives -0.0001333...
        let b = Bindings::new(
            1.25f64,
            0.6,
            3.0,
            Complex::new(-0.2, 0.0),
            Complex::new(0.0, -0.2),
            1.0,
        );
        let v = hamiltonian_perturbation().evaluate(&b);
        assert!((v.re - (-0.00013333333333333334)).abs() < 1e-18);
        assert!(v.im.abs() < 1e-18);
        let m = hamiltonian_main().evaluate(&b);
        assert!((m.re - 0.18).abs() < 1e-15);
        assert!(m.im.abs() < 1e-16);
    }
}
