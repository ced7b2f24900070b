//! Defining polynomials of curve families and the rational curves built
//! through a given point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{gcd_u64, Natural, Rational};

/// Largest accepted degree for a family.
pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("empty family spec")]
    Empty,
    #[error("coefficients have content {0}, expected 1")]
    ContentNotOne(u64),
    #[error("negative coefficient {0}")]
    NegativeCoefficient(String),
    #[error("leading coefficient is zero")]
    ZeroLeading,
    #[error("degree {0} exceeds the maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("malformed coefficient {0:?}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("lattice point coordinates must be positive, got ({0}, {1})")]
    NotPositive(u64, u64),
    #[error("malformed point {0:?}, expected \"a,b\"")]
    Malformed(String),
}

/// `P(x) = a_n x^n + ... + a_1 x` with nonnegative coefficients, positive
/// leading coefficient and content 1. Index `i` of `coeffs` holds `a_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyFamily {
    coeffs: Vec<u64>,
}

impl PolyFamily {
    /// Builds a family from little-endian coefficients (`a_1` first).
    pub fn new(coeffs: Vec<u64>) -> Result<Self, FamilyError> {
        let lead = *coeffs.last().ok_or(FamilyError::Empty)?;
        if lead == 0 {
            return Err(FamilyError::ZeroLeading);
        }
        if coeffs.len() > MAX_DEGREE {
            return Err(FamilyError::DegreeTooLarge(coeffs.len()));
        }
        let content = coeffs.iter().fold(0, |g, &c| gcd_u64(g, c));
        if content != 1 {
            return Err(FamilyError::ContentNotOne(content));
        }
        Ok(Self { coeffs })
    }

    /// Like [`PolyFamily::new`] but divides out the content first. The
    /// curves `q * c * P(x)` and `q * P(x)` sweep the same family.
    pub fn normalized(mut coeffs: Vec<u64>) -> Result<Self, FamilyError> {
        let content = coeffs.iter().fold(0, |g, &c| gcd_u64(g, c));
        if content > 1 {
            coeffs.iter_mut().for_each(|c| *c /= content);
        }
        Self::new(coeffs)
    }

    /// `P(x) = x`.
    pub fn identity() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Little-endian coefficients, `a_1` first.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn nonzero_terms(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn is_monomial(&self) -> bool {
        self.nonzero_terms() == 1
    }

    /// Exact `P(x)` by Horner's rule.
    pub fn eval(&self, x: u64) -> Natural {
        let x = Natural::from(x);
        let inner = self
            .coeffs
            .iter()
            .rev()
            .fold(Natural::zero(), |acc, &c| acc * &x + c);
        inner * x
    }

    /// `P(x)` when it fits in a `u128`.
    pub fn eval_u128(&self, x: u64) -> Option<u128> {
        let x = u128::from(x);
        let mut acc: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(x)?.checked_add(u128::from(c))?;
        }
        acc.checked_mul(x)
    }

    /// `P(x) mod m` for `m >= 1`.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let m = u128::from(m);
        let x = u128::from(x) % m;
        let inner = self
            .coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| (acc * x + u128::from(c) % m) % m);
        ((inner * x) % m) as u64
    }

    /// Canonical descending spec `a_n,...,a_1`.
    pub fn to_spec(&self) -> String {
        self.coeffs
            .iter()
            .rev()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn parse_coefficients(spec: &str) -> Result<Vec<u64>, FamilyError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(FamilyError::Empty);
    }
    let mut descending = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        let value: i128 = token
            .parse()
            .map_err(|_| FamilyError::Malformed(token.to_string()))?;
        if value < 0 {
            return Err(FamilyError::NegativeCoefficient(token.to_string()));
        }
        let value = u64::try_from(value).map_err(|_| FamilyError::Malformed(token.to_string()))?;
        descending.push(value);
    }
    if descending[0] == 0 {
        return Err(FamilyError::ZeroLeading);
    }
    descending.reverse();
    Ok(descending)
}

/// Parses a descending coefficient list `a_n,...,a_1` (the constant term is
/// implicit and zero). Content must already be 1.
pub fn parse_family(spec: &str) -> Result<PolyFamily, FamilyError> {
    PolyFamily::new(parse_coefficients(spec)?)
}

/// Parses like [`parse_family`] but divides out a nontrivial content.
pub fn parse_family_normalized(spec: &str) -> Result<PolyFamily, FamilyError> {
    PolyFamily::normalized(parse_coefficients(spec)?)
}

impl FromStr for PolyFamily {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_family(s)
    }
}

impl fmt::Display for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c != 1 {
                write!(f, "{c}")?;
            }
            match i + 1 {
                1 => f.write_str("x")?,
                e => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with rational coefficients, little-endian, constant term
/// included. Highest coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_at(&self, x: u64) -> Rational {
        self.eval(&Rational::from_integer(BigInt::from(x)))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let x = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                let y = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                x + y
            })
            .collect();
        Self::new(coeffs)
    }

    /// Coefficients as exact `"num/den"` strings, little-endian.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(fraction_string).collect()
    }
}

/// `"num/den"` with the denominator always written out.
pub fn fraction_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => f.write_str("x")?,
                1 => write!(f, "{c}*x")?,
                _ if c.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeff_strings())
    }
}

/// A point `(a, b)` of the positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticePoint {
    pub a: u64,
    pub b: u64,
}

impl LatticePoint {
    pub fn new(a: u64, b: u64) -> Result<Self, PointError> {
        if a == 0 || b == 0 {
            return Err(PointError::NotPositive(a, b));
        }
        Ok(Self { a, b })
    }
}

impl FromStr for LatticePoint {
    type Err = PointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || PointError::Malformed(s.to_string());
        let (a, b) = s.split_once(',').ok_or_else(malformed)?;
        let a = a.trim().parse().map_err(|_| malformed())?;
        let b = b.trim().parse().map_err(|_| malformed())?;
        Self::new(a, b)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(spec: &str) -> PolyFamily {
        parse_family(spec).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(fam("1,1").eval(13), Natural::from(182u32));
        assert_eq!(fam("1,1").eval(0), Natural::zero());
        assert_eq!(fam("2,5").eval(14), Natural::from(462u32));
        assert_eq!(fam("2,5").eval_u128(14), Some(462));
        assert_eq!(fam("2,5").eval_mod(14, 100), 62);
    }

    #[test]
    fn eval_u128_overflow_is_none() {
        let p = fam("1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0");
        assert_eq!(p.eval_u128(1 << 8), None);
        assert_eq!(p.eval(1 << 8), Natural::one() << 128u32);
    }

    #[test]
    fn parse_examples() {
        assert_eq!(fam("1,1").coeffs(), &[1, 1]);
        assert_eq!(parse_family("2,4"), Err(FamilyError::ContentNotOne(2)));
        let p = fam("3,0,2");
        assert_eq!(p.coeffs(), &[2, 0, 3]);
        assert_eq!(p.to_string(), "3x^3 + 2x");
        assert_eq!(fam(" 1 ").to_string(), "x");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_family(""), Err(FamilyError::Empty));
        assert_eq!(parse_family("0,1"), Err(FamilyError::ZeroLeading));
        assert_eq!(
            parse_family("1,-2"),
            Err(FamilyError::NegativeCoefficient("-2".into()))
        );
        assert_eq!(parse_family("1,x"), Err(FamilyError::Malformed("x".into())));
        let too_long = vec!["1"; MAX_DEGREE + 1].join(",");
        assert_eq!(
            parse_family(&too_long),
            Err(FamilyError::DegreeTooLarge(MAX_DEGREE + 1))
        );
    }

    #[test]
    fn normalization_divides_content() {
        let p = parse_family_normalized("12,12").unwrap();
        assert_eq!(p, fam("1,1"));
        assert_eq!(p.to_spec(), "1,1");
        assert_eq!(parse_family_normalized("0,0"), Err(FamilyError::ZeroLeading));
    }

    #[test]
    fn rational_poly_illustration() {
        // 5x(2x + 1)/21
        let curve = RationalPoly::new(vec![q(0, 1), q(5, 21), q(10, 21)]);
        assert_eq!(curve.eval_at(1), q(5, 7));
        assert_eq!(curve.eval_at(2), q(50, 21));
        assert_eq!(curve.eval_at(3), q(5, 1));
        assert_eq!(curve.coeff_strings(), vec!["0/1", "5/21", "10/21"]);
        assert_eq!(curve.to_string(), "5/21*x + 10/21*x^2");
    }

    #[test]
    fn rational_poly_trims() {
        let p = RationalPoly::new(vec![q(1, 2), q(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        let z = p.add(&p.scale(&q(-1, 1)));
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn lattice_point_parsing() {
        assert_eq!("13,195".parse(), Ok(LatticePoint { a: 13, b: 195 }));
        assert_eq!("0,5".parse::<LatticePoint>(), Err(PointError::NotPositive(0, 5)));
        assert!("13".parse::<LatticePoint>().is_err());
    }

    fn family_strategy() -> impl Strategy<Value = PolyFamily> {
        prop::collection::vec(0u64..50, 1..6)
            .prop_filter_map("invalid family", |mut c| {
                *c.last_mut().unwrap() += 1;
                PolyFamily::normalized(c).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn eval_matches_term_sum(p in family_strategy(), x in 0u64..100_000) {
            let terms = p.coeffs().iter().enumerate().fold(Natural::zero(), |acc, (i, &c)| {
                acc + Natural::from(c) * Natural::from(x).pow(i as u32 + 1)
            });
            prop_assert_eq!(p.eval(x), terms.clone());
            if let Some(small) = p.eval_u128(x) {
                prop_assert_eq!(Natural::from(small), terms);
            }
        }

        #[test]
        fn eval_strictly_increasing(p in family_strategy(), x in 1u64..1_000_000) {
            prop_assert!(p.eval(x) < p.eval(x + 1));
        }

        #[test]
        fn spec_round_trips(p in family_strategy()) {
            prop_assert_eq!(parse_family(&p.to_spec()), Ok(p));
        }
    }
}
