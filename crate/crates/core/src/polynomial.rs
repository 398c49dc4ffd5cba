//! Truncated polynomials in the three Pauli error probabilities.
//!
//! An [`ErrorPolynomial`] is a sparse map from exponent triples `(e_x, e_y, e_z)`
//! to exact rational coefficients. Every product drops monomials whose total
//! degree exceeds the polynomial's degree bound, so all arithmetic happens in
//! the quotient ring `Q[p_x, p_y, p_z] / (monomials of degree > D)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_DEGREE: u32 = 2;

/// One of the three error probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }
}

/// Exponent triple `(e_x, e_y, e_z)`.
///
/// Ordered graded-lexicographically: lower total degree first, then larger
/// `e_x`, then larger `e_y`. This gives the familiar reading order
/// `1, x, y, z, x², xy, xz, y², yz, z², ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn new(ex: u32, ey: u32, ez: u32) -> Self {
        Monomial([ex, ey, ez])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0[0].cmp(&self.0[0]))
            .then_with(|| other.0[1].cmp(&self.0[1]))
            .then_with(|| other.0[2].cmp(&self.0[2]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in ["px", "py", "pz"].iter().zip(self.0) {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial in `(p_x, p_y, p_z)` with exact rational coefficients,
/// truncated at total degree [`ErrorPolynomial::bound`].
///
/// The representation is canonical: no stored coefficient is zero and no stored
/// monomial exceeds the bound, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorPolynomial {
    terms: BTreeMap<Monomial, BigRational>,
    bound: u32,
}

impl ErrorPolynomial {
    pub fn zero(bound: u32) -> Self {
        ErrorPolynomial {
            terms: BTreeMap::new(),
            bound,
        }
    }

    pub fn one(bound: u32) -> Self {
        Self::constant(BigRational::one(), bound)
    }

    pub fn constant(c: BigRational, bound: u32) -> Self {
        Self::monomial(Monomial::ONE, c, bound)
    }

    /// `c · m`, or zero if `m` is above the bound.
    pub fn monomial(m: Monomial, c: BigRational, bound: u32) -> Self {
        let mut p = Self::zero(bound);
        p.add_term(m, c);
        p
    }

    /// The single variable `p_v`.
    pub fn var(v: Var, bound: u32) -> Self {
        Self::monomial(Monomial::var(v), BigRational::one(), bound)
    }

    /// `p_0 = 1 - p_x - p_y - p_z`, the probability of no error on one slot.
    pub fn p_identity(bound: u32) -> Self {
        let mut p = Self::one(bound);
        for v in Var::ALL {
            p.add_term(Monomial::var(v), -BigRational::one());
        }
        p
    }

    /// Builds a polynomial from integer coefficients, dropping terms above the bound.
    pub fn from_int_terms<I>(terms: I, bound: u32) -> Self
    where
        I: IntoIterator<Item = ([u32; 3], i64)>,
    {
        let mut p = Self::zero(bound);
        for (e, c) in terms {
            p.add_term(Monomial(e), BigRational::from_integer(BigInt::from(c)));
        }
        p
    }

    pub fn from_terms<I>(terms: I, bound: u32) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(bound);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn bound(&self) -> u32 {
        self.bound
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

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> BigRational {
        self.terms.get(&m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(Monomial::ONE)
    }

    /// Smallest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Adds `c · m` in place, keeping the term map canonical.
    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if m.degree() > self.bound || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_bound(&self, other: &Self) -> Result<()> {
        if self.bound == other.bound {
            Ok(())
        } else {
            Err(Error::DegreeMismatch(self.bound, other.bound))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let mut out = Self::zero(self.bound);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if m.degree() <= self.bound {
                    out.add_term(m, ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.bound);
        }
        ErrorPolynomial {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
            bound: self.bound,
        }
    }

    /// `self · c · m`, truncated.
    pub fn mul_monomial(&self, m: Monomial, c: &BigRational) -> Self {
        let mut out = Self::zero(self.bound);
        if c.is_zero() {
            return out;
        }
        for (mm, v) in &self.terms {
            let prod = mm.mul(&m);
            if prod.degree() <= self.bound {
                out.terms.insert(prod, v * c);
            }
        }
        out
    }

    /// `self^k`, truncated.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.bound);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse modulo the truncation.
    ///
    /// With `a = c (1 - u)` and `u` free of constant term, `1/a = c⁻¹ Σ_{k≤D} u^k`.
    pub fn reciprocal(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::SingularNormalization);
        }
        let inv_c = c.recip();
        let u = &Self::one(self.bound) - &self.scale(&inv_c);
        let mut sum = Self::one(self.bound);
        let mut power = Self::one(self.bound);
        for _ in 0..self.bound {
            power = &power * &u;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&inv_c))
    }

    /// Restriction to monomials of degree `≤ k`, re-bounded at `k`.
    pub fn truncate(&self, k: u32) -> Self {
        ErrorPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            bound: k,
        }
    }

    /// Same terms under a larger (or equal) bound.
    pub fn with_bound(&self, bound: u32) -> Self {
        self.truncate(bound)
    }

    /// The part of exactly total degree `k`.
    pub fn homogeneous(&self, k: u32) -> Self {
        ErrorPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            bound: self.bound,
        }
    }

    /// Exact evaluation at rational arguments.
    pub fn eval_exact(&self, px: &BigRational, py: &BigRational, pz: &BigRational) -> BigRational {
        let args = [px, py, pz];
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (a, e) in args.iter().zip(m.0) {
                for _ in 0..e {
                    term *= *a;
                }
            }
            total += term;
        }
        total
    }

    /// Evaluates exactly at the rationals equal to the given floats, then rounds.
    pub fn eval(&self, px: f64, py: f64, pz: f64) -> f64 {
        let conv = |v: f64| BigRational::from_float(v).unwrap_or_else(BigRational::zero);
        let v = self.eval_exact(&conv(px), &conv(py), &conv(pz));
        rational_to_f64(&v)
    }

    /// Exchanges the roles of two variables.
    pub fn swap_vars(&self, a: Var, b: Var) -> Self {
        let mut out = Self::zero(self.bound);
        for (m, c) in &self.terms {
            let mut e = m.0;
            e.swap(a.index(), b.index());
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Serializable term list in graded-lex order.
    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(m, c)| PolyTerm {
                exp: m.0,
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[PolyTerm], bound: u32) -> Result<Self> {
        let mut p = Self::zero(bound);
        for t in terms {
            let num: BigInt = t
                .num
                .parse()
                .map_err(|_| Error::Invalid(format!("bad numerator {:?}", t.num)))?;
            let den: BigInt = t
                .den
                .parse()
                .map_err(|_| Error::Invalid(format!("bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(Error::Invalid("zero denominator".into()));
            }
            let m = Monomial(t.exp);
            if m.degree() > bound {
                return Err(Error::Invalid(format!(
                    "term {m} exceeds degree bound {bound}"
                )));
            }
            p.add_term(m, BigRational::new(num, den));
        }
        Ok(p)
    }
}

pub(crate) fn rational_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // Fall back for values whose parts overflow f64 individually.
        let shift = v.numer().bits().max(v.denom().bits()).saturating_sub(1000);
        let n = (v.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (v.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// One serialized term: `{"exp": [e_x, e_y, e_z], "num": "...", "den": "..."}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exp: [u32; 3],
    pub num: String,
    pub den: String,
}

impl Serialize for ErrorPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

impl fmt::Display for ErrorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_one = abs.is_one();
            if *m == Monomial::ONE {
                write!(f, "{abs}")?;
            } else if is_one {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl ErrorPolynomial {
    /// Parses the [`Display`](fmt::Display) form, e.g. `1 - 6*px + 3/2*px*py^2`.
    /// Variables may be written `px`/`py`/`pz` or `x`/`y`/`z`. Terms above
    /// `bound` are dropped.
    pub fn parse(s: &str, bound: u32) -> Result<Self> {
        let bad = |why: &str| Error::Invalid(format!("cannot parse polynomial {s:?}: {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') {
                pieces.push(&compact[start..i]);
                start = i;
            }
        }
        pieces.push(&compact[start..]);
        let mut out = ErrorPolynomial::zero(bound);
        for piece in pieces {
            let (neg, body) = match piece.as_bytes().first() {
                Some(b'-') => (true, &piece[1..]),
                Some(b'+') => (false, &piece[1..]),
                _ => (false, piece),
            };
            if body.is_empty() {
                return Err(bad("dangling sign"));
            }
            let mut coeff = BigRational::one();
            let mut exp = [0u32; 3];
            for factor in body.split('*') {
                let (base, power) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad("exponent"))?),
                    None => (factor, 1),
                };
                let var = match base {
                    "px" | "x" => Some(0),
                    "py" | "y" => Some(1),
                    "pz" | "z" => Some(2),
                    _ => None,
                };
                match var {
                    Some(v) => exp[v] += power,
                    None => {
                        let value = match base.split_once('/') {
                            Some((n, d)) => {
                                let n: BigInt = n.parse().map_err(|_| bad("numerator"))?;
                                let d: BigInt = d.parse().map_err(|_| bad("denominator"))?;
                                if d.is_zero() {
                                    return Err(bad("zero denominator"));
                                }
                                BigRational::new(n, d)
                            }
                            None => BigRational::from_integer(base.parse().map_err(|_| bad("coefficient"))?),
                        };
                        if power != 1 {
                            return Err(bad("exponent on a constant"));
                        }
                        coeff *= value;
                    }
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(Monomial(exp), coeff);
        }
        Ok(out)
    }
}

impl std::str::FromStr for ErrorPolynomial {
    type Err = Error;

    /// Parses at [`DEFAULT_DEGREE`].
    fn from_str(s: &str) -> Result<Self> {
        ErrorPolynomial::parse(s, DEFAULT_DEGREE)
    }
}

impl Add for &ErrorPolynomial {
    type Output = ErrorPolynomial;

    /// Panics on mismatched degree bounds; use [`ErrorPolynomial::checked_add`] to recover.
    fn add(self, rhs: &ErrorPolynomial) -> ErrorPolynomial {
        self.checked_add(rhs).expect("polynomial degree bounds differ")
    }
}

impl Sub for &ErrorPolynomial {
    type Output = ErrorPolynomial;

    fn sub(self, rhs: &ErrorPolynomial) -> ErrorPolynomial {
        self.checked_sub(rhs).expect("polynomial degree bounds differ")
    }
}

impl Mul for &ErrorPolynomial {
    type Output = ErrorPolynomial;

    fn mul(self, rhs: &ErrorPolynomial) -> ErrorPolynomial {
        self.checked_mul(rhs).expect("polynomial degree bounds differ")
    }
}

impl Neg for &ErrorPolynomial {
    type Output = ErrorPolynomial;

    fn neg(self) -> ErrorPolynomial {
        ErrorPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
            bound: self.bound,
        }
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn parse_round_trips_display() {
        let p = ErrorPolynomial::parse("1 - 6*px - 6*py + 30*px^2 + 60*px*py + 30*py^2", 2).unwrap();
        assert_eq!(p.to_string(), "1 - 6*px - 6*py + 30*px^2 + 60*px*py + 30*py^2");
        let q = ErrorPolynomial::parse("-x + 3/2*x*y^2 - 1/4", 3).unwrap();
        assert_eq!(ErrorPolynomial::parse(&q.to_string(), 3).unwrap(), q);
        assert_eq!(ErrorPolynomial::parse("x^3", 2).unwrap(), ErrorPolynomial::zero(2));
        assert!(ErrorPolynomial::parse("1 + ", 2).is_err());
        assert!(ErrorPolynomial::parse("1 + 2*w", 2).is_err());
        assert!(ErrorPolynomial::parse("", 2).is_err());
    }

    use super::*;

    fn p(terms: &[([u32; 3], i64)], d: u32) -> ErrorPolynomial {
        ErrorPolynomial::from_int_terms(terms.iter().copied(), d)
    }

    fn x(d: u32) -> ErrorPolynomial {
        ErrorPolynomial::var(Var::X, d)
    }

    #[test]
    fn add_cancels() {
        let one = ErrorPolynomial::one(2);
        let a = &one - &x(2);
        assert_eq!(&a + &x(2), one);
    }

    #[test]
    fn add_disjoint_terms() {
        let a = p(&[([0, 0, 0], 1), ([1, 0, 0], -6)], 2);
        let b = p(&[([0, 1, 0], -6), ([0, 0, 1], -6)], 2);
        let want = p(
            &[([0, 0, 0], 1), ([1, 0, 0], -6), ([0, 1, 0], -6), ([0, 0, 1], -6)],
            2,
        );
        assert_eq!(&a + &b, want);
    }

    #[test]
    fn mismatched_bounds_rejected() {
        let a = ErrorPolynomial::one(2);
        let b = ErrorPolynomial::one(3);
        assert_eq!(a.checked_add(&b), Err(Error::DegreeMismatch(2, 3)));
        assert_eq!(a.checked_mul(&b), Err(Error::DegreeMismatch(2, 3)));
    }

    #[test]
    fn square_of_one_minus_x() {
        let a = &ErrorPolynomial::one(2) - &x(2);
        assert_eq!(&a * &a, p(&[([0, 0, 0], 1), ([1, 0, 0], -2), ([2, 0, 0], 1)], 2));
    }

    #[test]
    fn square_of_p_identity() {
        let p0 = ErrorPolynomial::p_identity(2);
        let want = p(
            &[
                ([0, 0, 0], 1),
                ([1, 0, 0], -2),
                ([0, 1, 0], -2),
                ([0, 0, 1], -2),
                ([2, 0, 0], 1),
                ([0, 2, 0], 1),
                ([0, 0, 2], 1),
                ([1, 1, 0], 2),
                ([1, 0, 1], 2),
                ([0, 1, 1], 2),
            ],
            2,
        );
        assert_eq!(&p0 * &p0, want);
        assert_eq!(p0.pow(2), want);
    }

    #[test]
    fn degree_three_product_truncated() {
        let xyz = &(&x(2) * &ErrorPolynomial::var(Var::Y, 2)) * &ErrorPolynomial::var(Var::Z, 2);
        assert!(xyz.is_zero());
    }

    #[test]
    fn reciprocal_geometric_series() {
        let a = p(&[([0, 0, 0], 1), ([1, 0, 0], -1), ([0, 1, 0], -1)], 2);
        let want = p(
            &[
                ([0, 0, 0], 1),
                ([1, 0, 0], 1),
                ([0, 1, 0], 1),
                ([2, 0, 0], 1),
                ([1, 1, 0], 2),
                ([0, 2, 0], 1),
            ],
            2,
        );
        assert_eq!(a.reciprocal().unwrap(), want);
        assert_eq!(ErrorPolynomial::one(2).reciprocal().unwrap(), ErrorPolynomial::one(2));
    }

    #[test]
    fn reciprocal_of_first_verification_acceptance() {
        let a = p(
            &[
                ([0, 0, 0], 1),
                ([1, 0, 0], -6),
                ([0, 1, 0], -6),
                ([2, 0, 0], 30),
                ([0, 2, 0], 30),
                ([1, 1, 0], 60),
            ],
            2,
        );
        // Expected value solved by hand and confirmed by multiplying back.
        let want = p(
            &[
                ([0, 0, 0], 1),
                ([1, 0, 0], 6),
                ([0, 1, 0], 6),
                ([2, 0, 0], 6),
                ([1, 1, 0], 12),
                ([0, 2, 0], 6),
            ],
            2,
        );
        assert_eq!(&a * &want, ErrorPolynomial::one(2));
        assert_eq!(a.reciprocal().unwrap(), want);
    }

    #[test]
    fn reciprocal_needs_constant_term() {
        assert_eq!(x(2).reciprocal(), Err(Error::SingularNormalization));
    }

    #[test]
    fn reciprocal_with_non_unit_constant() {
        let a = p(&[([0, 0, 0], 3), ([0, 0, 1], 5), ([1, 1, 0], -2)], 3);
        assert_eq!(&a * &a.reciprocal().unwrap(), ErrorPolynomial::one(3));
    }

    #[test]
    fn evaluation() {
        let f3 = p(
            &[
                ([0, 0, 0], 1),
                ([1, 0, 0], -6),
                ([0, 1, 0], -6),
                ([0, 0, 1], -6),
                ([2, 0, 0], 16),
                ([1, 1, 0], 30),
                ([1, 0, 1], 30),
                ([0, 2, 0], 16),
                ([0, 1, 1], 30),
                ([0, 0, 2], 30),
            ],
            2,
        );
        assert_eq!(f3.eval(0.0, 0.0, 0.0), 1.0);
        assert!((f3.eval(1e-3, 1e-3, 1e-3) - 0.982152).abs() < 1e-15);
        let x2 = p(&[([2, 0, 0], 1)], 2);
        assert!((x2.eval(0.01, 0.0, 0.0) - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn display_reads_naturally() {
        let a = p(&[([0, 0, 0], 1), ([2, 0, 0], -9), ([1, 1, 0], 3)], 2);
        assert_eq!(a.to_string(), "1 - 9*px^2 + 3*px*py");
    }

    #[test]
    fn json_terms_sorted_graded_lex() {
        let a = p(&[([0, 0, 2], 2), ([1, 0, 0], -1), ([0, 0, 0], 1), ([0, 2, 0], 5)], 2);
        let exps: Vec<_> = a.to_json_terms().iter().map(|t| t.exp).collect();
        assert_eq!(exps, vec![[0, 0, 0], [1, 0, 0], [0, 2, 0], [0, 0, 2]]);
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.starts_with(r#"[{"exp":[0,0,0],"num":"1","den":"1"}"#));
        let back = ErrorPolynomial::from_json_terms(&a.to_json_terms(), 2).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn json_rejects_terms_above_bound() {
        let t = vec![PolyTerm {
            exp: [3, 0, 0],
            num: "1".into(),
            den: "1".into(),
        }];
        assert!(ErrorPolynomial::from_json_terms(&t, 2).is_err());
    }
}
