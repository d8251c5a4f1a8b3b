//! Sparse multivariate series with exact Gaussian-rational coefficients.
//!
//! The coefficient ring is Q(i).  Monomials range over seven symbols: the
//! complexified oscillator pair `(u, U)`, the momentum `V`, the axial moment
//! of inertia `C`, and the body-shape parameters `alpha`, `beta`,
//! `sqrtgamma`, where `sqrtgamma^2 = gamma = alpha * sqrt(1 - beta^2)`.
//! Exponents of `V`, `C` and `sqrtgamma` may be negative (they enter the
//! homological solution inverted); `u`, `U`, `alpha` and `beta` are plain
//! polynomial symbols with non-negative exponents.
//!
//! Everything here is exact: no floating arithmetic is performed until a
//! series is evaluated against numeric [`Bindings`].  Series are immutable
//! value types; all operations return fresh series with zero coefficients
//! pruned, so equality is plain term-by-term comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Error type for the series algebra.
#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("division by the zero series")]
    DivisionByZero,
    #[error("inexact division; remainder has {} terms", remainder.len())]
    InexactDivision { remainder: Series },
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self { re: BigRational::one(), im: BigRational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self { re: BigRational::from_integer(n.into()), im: BigRational::zero() }
    }

    /// Exact rational `p/q`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self { re: BigRational::new(p.into(), q.into()), im: BigRational::zero() }
    }

    /// Exact imaginary rational `(p/q) i`.
    pub fn ratio_i(p: i64, q: i64) -> Self {
        Self { re: BigRational::zero(), im: BigRational::new(p.into(), q.into()) }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self { re: BigRational::from_integer(n), im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Multiplication by the imaginary unit.
    pub fn times_i(&self) -> Self {
        Self { re: -self.im.clone(), im: self.re.clone() }
    }

    /// True when `|self| = 1` exactly (`re^2 + im^2 = 1`).
    pub fn is_unit_modulus(&self) -> bool {
        &self.re * &self.re + &self.im * &self.im == BigRational::one()
    }

    pub fn div(&self, other: &Self) -> Self {
        let den = &other.re * &other.re + &other.im * &other.im;
        assert!(!den.is_zero(), "division by zero Gaussian rational");
        Self {
            re: (&self.re * &other.re + &self.im * &other.im) / &den,
            im: (&self.im * &other.re - &self.re * &other.im) / &den,
        }
    }

    /// Lossy conversion of both parts to `f64`.
    pub fn to_f64_parts(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        CoeffJson { re: rational_string(&self.re), im: rational_string(&self.im) }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = CoeffJson::deserialize(de)?;
        Ok(GaussianRational {
            re: parse_rational(&j.re).map_err(serde::de::Error::custom)?,
            im: parse_rational(&j.im).map_err(serde::de::Error::custom)?,
        })
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({}{}i)", self.re, self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

/// Dense exponent vector over the seven canonical symbols.
///
/// The derived lexicographic order (field order below) is the canonical term
/// order used everywhere: it keys the term map, fixes serialization order and
/// drives exact division.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Monomial {
    pub u: i16,
    pub U: i16,
    pub V: i16,
    pub C: i16,
    pub alpha: i16,
    pub beta: i16,
    pub sqrtgamma: i16,
}

impl Monomial {
    pub const ONE: Monomial =
        Monomial { u: 0, U: 0, V: 0, C: 0, alpha: 0, beta: 0, sqrtgamma: 0 };

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// True when the polynomial symbols carry non-negative exponents.
    pub fn is_valid(&self) -> bool {
        self.u >= 0 && self.U >= 0 && self.alpha >= 0 && self.beta >= 0
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            u: self.u + o.u,
            U: self.U + o.U,
            V: self.V + o.V,
            C: self.C + o.C,
            alpha: self.alpha + o.alpha,
            beta: self.beta + o.beta,
            sqrtgamma: self.sqrtgamma + o.sqrtgamma,
        }
    }

    /// Exponent-wise quotient; `None` when a polynomial symbol would go
    /// negative (the Laurent symbols `V`, `C`, `sqrtgamma` always divide).
    pub fn try_div(&self, o: &Monomial) -> Option<Monomial> {
        let q = Monomial {
            u: self.u - o.u,
            U: self.U - o.U,
            V: self.V - o.V,
            C: self.C - o.C,
            alpha: self.alpha - o.alpha,
            beta: self.beta - o.beta,
            sqrtgamma: self.sqrtgamma - o.sqrtgamma,
        };
        q.is_valid().then_some(q)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = [
            ("u", self.u),
            ("U", self.U),
            ("V", self.V),
            ("C", self.C),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("sqrtgamma", self.sqrtgamma),
        ];
        let mut any = false;
        for (name, e) in pairs {
            if e != 0 {
                if any {
                    write!(f, "*")?;
                }
                any = true;
                if e == 1 {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{name}^{e}")?;
                }
            }
        }
        if !any {
            write!(f, "1")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

/// Sparse exact series: a term map from [`Monomial`] to [`GaussianRational`].
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Series {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Series {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// Single-term series.
    pub fn term(coeff: GaussianRational, mono: Monomial) -> Self {
        debug_assert!(mono.is_valid(), "monomial {mono} has negative polynomial exponents");
        let mut s = Self::zero();
        if !coeff.is_zero() {
            s.terms.insert(mono, coeff);
        }
        s
    }

    pub fn constant(coeff: GaussianRational) -> Self {
        Self::term(coeff, Monomial::ONE)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (GaussianRational, Monomial)>) -> Self {
        let mut s = Self::zero();
        for (c, m) in terms {
            s.accumulate(m, c);
        }
        s
    }

    pub fn coeff(&self, mono: &Monomial) -> GaussianRational {
        self.terms.get(mono).cloned().unwrap_or_else(GaussianRational::zero)
    }

    fn accumulate(&mut self, mono: Monomial, coeff: GaussianRational) {
        debug_assert!(mono.is_valid(), "monomial {mono} has negative polynomial exponents");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, -c);
        }
        out
    }

    pub fn neg(&self) -> Series {
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            out.terms.insert(*m, -c);
        }
        out
    }

    pub fn scale(&self, k: &GaussianRational) -> Series {
        if k.is_zero() {
            return Series::zero();
        }
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            out.terms.insert(*m, c * k);
        }
        out
    }

    /// Multiply by a single term `k * mono`.
    pub fn mul_term(&self, mono: &Monomial, k: &GaussianRational) -> Series {
        if k.is_zero() {
            return Series::zero();
        }
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.mul(mono), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Series) -> Series {
        let mut out = Series::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to `u`.
    pub fn du(&self) -> Series {
        self.derive(|m| (m.u, Monomial { u: m.u - 1, ..*m }))
    }

    /// Partial derivative with respect to `U`.
    pub fn dU(&self) -> Series {
        self.derive(|m| (m.U, Monomial { U: m.U - 1, ..*m }))
    }

    /// Partial derivative with respect to `V` (negative powers included).
    pub fn dV(&self) -> Series {
        self.derive(|m| (m.V, Monomial { V: m.V - 1, ..*m }))
    }

    fn derive(&self, rule: impl Fn(&Monomial) -> (i16, Monomial)) -> Series {
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            let (e, shifted) = rule(m);
            if e != 0 {
                out.accumulate(shifted, c * &GaussianRational::from_int(e as i64));
            }
        }
        out
    }

    /// Canonical Poisson bracket `{self; other}` for the pair `(u, U)`.
    ///
    /// The `(v, V)` half of the bracket vanishes identically on this ring:
    /// series never depend on the angle `v`, so `V` acts as a parameter.
    pub fn poisson(&self, other: &Series) -> Series {
        self.du().mul(&other.dU()).sub(&self.dU().mul(&other.du()))
    }

    /// Exact division: returns `q` with `self = divisor * q`, or the
    /// remainder at the first non-divisible leading term.
    pub fn exact_div(&self, divisor: &Series) -> Result<Series, SeriesError> {
        if divisor.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        let (ld_m, ld_c) = divisor
            .terms
            .last_key_value()
            .map(|(m, c)| (*m, c.clone()))
            .expect("non-zero divisor has a leading term");
        let mut rem = self.clone();
        let mut quot = Series::zero();
        let mut guard = 0usize;
        while let Some((lr_m, lr_c)) = rem.terms.last_key_value().map(|(m, c)| (*m, c.clone())) {
            guard += 1;
            if guard > 1_000_000 {
                return Err(SeriesError::InexactDivision { remainder: rem });
            }
            let Some(qm) = lr_m.try_div(&ld_m) else {
                return Err(SeriesError::InexactDivision { remainder: rem });
            };
            let qc = lr_c.div(&ld_c);
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.accumulate(qm, qc);
        }
        Ok(quot)
    }

    /// Largest `alpha` exponent present, or `None` for the zero series.
    pub fn max_alpha(&self) -> Option<i16> {
        self.terms.keys().map(|m| m.alpha).max()
    }

    /// Drop every term whose `alpha` exponent exceeds `max`.
    ///
    /// The `alpha` exponent doubles as the perturbation-order grading: the
    /// order-n input carries `alpha^n` and brackets add exponents, so
    /// truncating a composed series by `alpha` truncates by order.
    pub fn truncate_alpha(&self, max: i16) -> Series {
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            if m.alpha <= max {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    /// Substitute series for the symbols `u` and `U`, truncating by the
    /// `alpha` grading when `trunc` is given.
    pub fn substitute_uU(&self, u_s: &Series, U_s: &Series, trunc: Option<i16>) -> Series {
        let clip = |s: Series| match trunc {
            Some(t) => s.truncate_alpha(t),
            None => s,
        };
        let max_u = self.terms.keys().map(|m| m.u).max().unwrap_or(0);
        let max_U = self.terms.keys().map(|m| m.U).max().unwrap_or(0);
        let mut u_pow: Vec<Series> = vec![Series::constant(GaussianRational::one())];
        for j in 1..=max_u {
            u_pow.push(clip(u_pow[(j - 1) as usize].mul(u_s)));
        }
        let mut U_pow: Vec<Series> = vec![Series::constant(GaussianRational::one())];
        for k in 1..=max_U {
            U_pow.push(clip(U_pow[(k - 1) as usize].mul(U_s)));
        }
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            let rest = Monomial { u: 0, U: 0, ..*m };
            let prod = u_pow[m.u as usize].mul(&U_pow[m.U as usize]).mul_term(&rest, c);
            out = out.add(&clip(prod));
        }
        clip(out)
    }

    /// Numerically evaluate against `bindings`; exact coefficients are
    /// converted to the working precision term by term.
    pub fn evaluate<R: Real>(&self, b: &Bindings<R>) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for (m, c) in &self.terms {
            let (re, im) = c.to_f64_parts();
            let coeff = Complex::new(
                R::from_f64(re).unwrap_or_else(R::nan),
                R::from_f64(im).unwrap_or_else(R::nan),
            );
            let real_factor = b.V.powi(m.V as i32)
                * b.C.powi(m.C as i32)
                * b.alpha.powi(m.alpha as i32)
                * b.beta.powi(m.beta as i32)
                * b.sqrtgamma.powi(m.sqrtgamma as i32);
            let term = coeff * b.u.powi(m.u as i32) * b.U.powi(m.U as i32);
            acc = acc + term.scale(real_factor);
        }
        acc
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Numeric bindings
// ---------------------------------------------------------------------------

/// Numeric values for every symbol of the ring.
///
/// Constructed through [`Bindings::new`], which derives `sqrtgamma` from
/// `alpha` and `beta`, so the constraint `gamma = alpha*sqrt(1-beta^2)` holds
/// by construction and no symbol can be left unbound.
#[derive(Clone, Copy, Debug)]
pub struct Bindings<R: Real> {
    pub u: Complex<R>,
    pub U: Complex<R>,
    pub V: R,
    pub C: R,
    pub alpha: R,
    pub beta: R,
    pub sqrtgamma: R,
}

impl<R: Real> Bindings<R> {
    pub fn new(alpha: R, beta: R, C: R, u: Complex<R>, U: Complex<R>, V: R) -> Self {
        let gamma = alpha * (R::one() - beta * beta).sqrt();
        Self { u, U, V, C, alpha, beta, sqrtgamma: gamma.sqrt() }
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

/// Wire form of a coefficient: exact rationals as `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffJson {
    pub re: String,
    pub im: String,
}

/// Wire form of a single term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: CoeffJson,
    pub exp: Monomial,
}

/// Wire form of a [`Series`]: `{"terms":[{"coeff":{...},"exp":{...}}]}` with
/// terms listed in the canonical monomial order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<TermJson>,
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<BigRational, SeriesError> {
    s.parse::<BigRational>().map_err(|_| SeriesError::BadRational(s.to_owned()))
}

impl From<&Series> for SeriesJson {
    fn from(s: &Series) -> Self {
        SeriesJson {
            terms: s
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    coeff: CoeffJson { re: rational_string(&c.re), im: rational_string(&c.im) },
                    exp: *m,
                })
                .collect(),
        }
    }
}

impl TryFrom<&SeriesJson> for Series {
    type Error = SeriesError;
    fn try_from(j: &SeriesJson) -> Result<Self, SeriesError> {
        let mut s = Series::zero();
        for t in &j.terms {
            let c = GaussianRational {
                re: parse_rational(&t.coeff.re)?,
                im: parse_rational(&t.coeff.im)?,
            };
            s.accumulate(t.exp, c);
        }
        Ok(s)
    }
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = SeriesJson::deserialize(de)?;
        Series::try_from(&j).map_err(serde::de::Error::custom)
    }
}
