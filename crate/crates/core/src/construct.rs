//! Curves through a prescribed lattice point that avoid every other lattice
//! point between the origin and it.
//!
//! For `(a, b)` with `a >= 2` pick a prime `ell > max(a, b)` and write
//! `ell = sum_i a_i a^(i-1)` in base `a`. The curve
//!
//! ```text
//!     C(x) = (b x / (ell a)) (a_1 + a_2 x + ... + a_d x^(d-1))
//! ```
//!
//! has `C(0) = 0` and `C(a) = b`, while every interior value `C(t)`,
//! `0 < t < a`, keeps `ell` in its denominator. Every coefficient has
//! `ell`-adic valuation exactly `-1`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{base_digits, is_prime, next_prime_above, valuation, Natural, Rational};
use crate::polyfam::{LatticePoint, RationalPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("abscissa {0} is too small: a base-a expansion needs a >= 2 ((1, b) is already visible on y = bx)")]
    BaseTooSmall(u64),
    #[error("invalid prime {ell}: {reason}")]
    InvalidEll { ell: Natural, reason: &'static str },
    #[error("prime {0} listed more than once")]
    DuplicatePrime(Natural),
    #[error("no primes given")]
    NoPrimes,
    #[error("need at least two coordinates, all positive")]
    BadCoordinates,
}

/// A curve through `point` built from the base-`a` digits of `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub point: LatticePoint,
    pub ell: Natural,
    /// Little-endian base-`a` digits of `ell`.
    pub digits: Vec<Natural>,
    pub curve: RationalPoly,
    /// `curve(t)` is not an integer for any `0 < t < a`.
    pub verified: bool,
}

/// Average of several single-prime constructions through the same point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPrimeConstruction {
    pub point: LatticePoint,
    pub components: Vec<Construction>,
    pub curve: RationalPoly,
    pub verified: bool,
    /// `(t, ell)` pairs where the reduced denominator of `curve(t)` misses
    /// `ell`. Empty when every interior value carries every prime.
    pub denominator_gaps: Vec<(u64, Natural)>,
}

/// Curves `C_2, ..., C_n` through `(a_1, ..., a_n)` sharing one digit
/// polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveBundle {
    pub point: Vec<u64>,
    pub ell: Natural,
    pub digits: Vec<Natural>,
    pub curves: Vec<RationalPoly>,
    pub verified: bool,
}

/// `(exponent, ell-adic valuation)` for each nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationProfile {
    #[serde(serialize_with = "as_string")]
    pub ell: Natural,
    pub points: Vec<(usize, i64)>,
}

impl ValuationProfile {
    /// The common valuation when the Newton polygon is a single horizontal
    /// segment.
    pub fn horizontal_level(&self) -> Option<i64> {
        let first = self.points.first()?.1;
        self.points.iter().all(|&(_, v)| v == first).then_some(first)
    }
}

fn as_string<S: serde::Serializer>(n: &Natural, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

fn rational(n: &Natural) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

fn check_ell(ell: &Natural, max_coord: u64) -> Result<(), ConstructError> {
    if !is_prime(ell) {
        return Err(ConstructError::InvalidEll {
            ell: ell.clone(),
            reason: "not prime",
        });
    }
    if ell <= &Natural::from(max_coord) {
        return Err(ConstructError::InvalidEll {
            ell: ell.clone(),
            reason: "must exceed every coordinate",
        });
    }
    Ok(())
}

/// `scale * x * (d_1 + d_2 x + ...)`.
fn digit_curve(digits: &[Natural], scale: &Rational) -> RationalPoly {
    let mut coeffs = vec![Rational::zero()];
    coeffs.extend(digits.iter().map(|d| scale * rational(d)));
    RationalPoly::new(coeffs)
}

fn interior_non_integral(curve: &RationalPoly, a: u64) -> bool {
    (1..a).all(|t| !curve.eval_at(t).is_integer())
}

/// Builds the curve for `pt` with the given prime, or with the smallest
/// prime above `max(a, b)` when `ell` is `None`.
pub fn construct_visible(pt: LatticePoint, ell: Option<Natural>) -> Result<Construction, ConstructError> {
    let LatticePoint { a, b } = pt;
    if a < 2 {
        return Err(ConstructError::BaseTooSmall(a));
    }
    let ell = match ell {
        Some(ell) => {
            check_ell(&ell, a.max(b))?;
            ell
        }
        None => next_prime_above(&Natural::from(a.max(b))),
    };
    let digits = base_digits(&ell, &Natural::from(a)).expect("a >= 2 and ell >= 2");
    let scale = Rational::new(
        BigInt::from(b),
        BigInt::from(ell.clone()) * BigInt::from(a),
    );
    let curve = digit_curve(&digits, &scale);
    let verified = interior_non_integral(&curve, a);
    Ok(Construction {
        point: pt,
        ell,
        digits,
        curve,
        verified,
    })
}

/// Averages the single-prime curves for each prime in `ells`.
pub fn construct_multi_prime(
    pt: LatticePoint,
    ells: &[Natural],
) -> Result<MultiPrimeConstruction, ConstructError> {
    if pt.a < 2 {
        return Err(ConstructError::BaseTooSmall(pt.a));
    }
    if ells.is_empty() {
        return Err(ConstructError::NoPrimes);
    }
    for (i, ell) in ells.iter().enumerate() {
        if ells[..i].contains(ell) {
            return Err(ConstructError::DuplicatePrime(ell.clone()));
        }
    }
    let components = ells
        .iter()
        .map(|ell| construct_visible(pt, Some(ell.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let weight = Rational::new(BigInt::from(1), BigInt::from(components.len()));
    let curve = components
        .iter()
        .fold(RationalPoly::zero(), |acc, c| acc.add(&c.curve))
        .scale(&weight);
    let verified = interior_non_integral(&curve, pt.a);
    let mut denominator_gaps = Vec::new();
    for t in 1..pt.a {
        let value = curve.eval_at(t);
        let den = value.denom().magnitude();
        for ell in ells {
            if !(den % ell).is_zero() {
                denominator_gaps.push((t, ell.clone()));
            }
        }
    }
    Ok(MultiPrimeConstruction {
        point: pt,
        components,
        curve,
        verified,
        denominator_gaps,
    })
}

/// One curve per coordinate `k >= 2` through `(a_1, ..., a_n)`, all built
/// from the base-`a_1` digits of a single prime.
pub fn construct_curve_bundle(coords: &[u64], ell: Option<Natural>) -> Result<CurveBundle, ConstructError> {
    if coords.len() < 2 || coords.contains(&0) {
        return Err(ConstructError::BadCoordinates);
    }
    let base = coords[0];
    if base < 2 {
        return Err(ConstructError::BaseTooSmall(base));
    }
    let max_coord = *coords.iter().max().expect("nonempty");
    let ell = match ell {
        Some(ell) => {
            check_ell(&ell, max_coord)?;
            ell
        }
        None => next_prime_above(&Natural::from(max_coord)),
    };
    let digits = base_digits(&ell, &Natural::from(base)).expect("base >= 2");
    let denom = BigInt::from(ell.clone()) * BigInt::from(base);
    let curves: Vec<RationalPoly> = coords[1..]
        .iter()
        .map(|&ak| digit_curve(&digits, &Rational::new(BigInt::from(ak), denom.clone())))
        .collect();
    let verified = curves.iter().all(|c| interior_non_integral(c, base));
    Ok(CurveBundle {
        point: coords.to_vec(),
        ell,
        digits,
        curves,
        verified,
    })
}

/// `ell`-adic valuations of the nonzero coefficients of a construction.
pub fn valuation_profile(c: &Construction) -> ValuationProfile {
    let points = c
        .curve
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, coeff)| !coeff.is_zero())
        .map(|(i, coeff)| (i, valuation(&c.ell, coeff).expect("nonzero")))
        .collect();
    ValuationProfile {
        ell: c.ell.clone(),
        points,
    }
}

#[derive(Serialize)]
struct ConstructionRecord {
    point: LatticePoint,
    ell: String,
    digits: Vec<u64>,
    curve: RationalPoly,
    verified: bool,
}

fn digits_u64(digits: &[Natural]) -> Vec<u64> {
    // every digit is below the base, itself a u64
    digits.iter().map(|d| d.to_u64().expect("digit < base")).collect()
}

impl Serialize for Construction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ConstructionRecord {
            point: self.point,
            ell: self.ell.to_string(),
            digits: digits_u64(&self.digits),
            curve: self.curve.clone(),
            verified: self.verified,
        }
        .serialize(serializer)
    }
}

impl Serialize for MultiPrimeConstruction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record<'a> {
            point: LatticePoint,
            ells: Vec<String>,
            components: &'a [Construction],
            curve: &'a RationalPoly,
            verified: bool,
            denominator_gaps: Vec<(u64, String)>,
        }
        Record {
            point: self.point,
            ells: self.components.iter().map(|c| c.ell.to_string()).collect(),
            components: &self.components,
            curve: &self.curve,
            verified: self.verified,
            denominator_gaps: self
                .denominator_gaps
                .iter()
                .map(|(t, ell)| (*t, ell.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl Serialize for CurveBundle {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record<'a> {
            point: &'a [u64],
            ell: String,
            digits: Vec<u64>,
            curves: &'a [RationalPoly],
            verified: bool,
        }
        Record {
            point: &self.point,
            ell: self.ell.to_string(),
            digits: digits_u64(&self.digits),
            curves: &self.curves,
            verified: self.verified,
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: u64, b: u64) -> LatticePoint {
        LatticePoint::new(a, b).unwrap()
    }

    fn n(x: u64) -> Natural {
        Natural::from(x)
    }

    fn q(num: i64, den: i64) -> Rational {
        Rational::new(num.into(), den.into())
    }

    fn poly(coeffs: &[(i64, i64)]) -> RationalPoly {
        RationalPoly::new(coeffs.iter().map(|&(a, b)| q(a, b)).collect())
    }

    #[test]
    fn illustration_point() {
        let c = construct_visible(pt(3, 5), None).unwrap();
        assert_eq!(c.ell, n(7));
        assert_eq!(c.digits, vec![n(1), n(2)]);
        // 5x(2x + 1)/21
        assert_eq!(c.curve, poly(&[(0, 1), (5, 21), (10, 21)]));
        assert!(c.verified);
        assert_eq!(c.curve.eval_at(1), q(5, 7));
        assert_eq!(c.curve.eval_at(2), q(50, 21));
        assert_eq!(c.curve.eval_at(3), q(5, 1));
        let prof = valuation_profile(&c);
        assert_eq!(prof.points, vec![(1, -1), (2, -1)]);
        assert_eq!(prof.horizontal_level(), Some(-1));
    }

    #[test]
    fn zero_interior_digit_keeps_gap() {
        let c = construct_visible(pt(2, 3), None).unwrap();
        assert_eq!(c.ell, n(5));
        assert_eq!(c.digits, vec![n(1), n(0), n(1)]);
        // 3x(x^2 + 1)/10
        assert_eq!(c.curve, poly(&[(0, 1), (3, 10), (0, 1), (3, 10)]));
        assert_eq!(c.curve.eval_at(1), q(3, 5));
        assert_eq!(c.curve.eval_at(2), q(3, 1));
        assert!(c.verified);
        assert_eq!(valuation_profile(&c).points, vec![(1, -1), (3, -1)]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            construct_visible(pt(1, 7), None),
            Err(ConstructError::BaseTooSmall(1))
        );
        assert!(matches!(
            construct_visible(pt(3, 5), Some(n(9))),
            Err(ConstructError::InvalidEll { .. })
        ));
        assert!(matches!(
            construct_visible(pt(3, 5), Some(n(5))),
            Err(ConstructError::InvalidEll { .. })
        ));
    }

    #[test]
    fn every_prime_above_works() {
        let mut ell = n(5);
        for _ in 0..10 {
            ell = next_prime_above(&ell);
            let c = construct_visible(pt(3, 5), Some(ell.clone())).unwrap();
            assert!(c.verified, "ell = {ell}");
            assert_eq!(c.curve.eval_at(3), q(5, 1));
        }
    }

    #[test]
    fn multi_prime_single_is_plain() {
        let single = construct_visible(pt(3, 5), Some(n(7))).unwrap();
        let multi = construct_multi_prime(pt(3, 5), &[n(7)]).unwrap();
        assert_eq!(multi.curve, single.curve);
        assert!(multi.verified);
    }

    #[test]
    fn multi_prime_average() {
        let multi = construct_multi_prime(pt(3, 5), &[n(7), n(11)]).unwrap();
        assert_eq!(multi.components[1].curve, poly(&[(0, 1), (10, 33), (0, 1), (5, 33)]));
        assert_eq!(multi.curve.eval_at(3), q(5, 1));
        assert_eq!(multi.curve.eval_at(1), q(45, 77));
        assert!(!multi.curve.eval_at(2).is_integer());
        assert!(multi.verified);
        assert!(multi.denominator_gaps.is_empty());

        let multi = construct_multi_prime(pt(2, 3), &[n(5), n(7)]).unwrap();
        assert!(multi.verified);
        assert_eq!(multi.curve.eval_at(2), q(3, 1));
    }

    #[test]
    fn multi_prime_errors() {
        assert_eq!(
            construct_multi_prime(pt(3, 5), &[n(7), n(7)]),
            Err(ConstructError::DuplicatePrime(n(7)))
        );
        assert_eq!(construct_multi_prime(pt(3, 5), &[]), Err(ConstructError::NoPrimes));
        assert!(construct_multi_prime(pt(3, 5), &[n(7), n(4)]).is_err());
    }

    #[test]
    fn bundle_examples() {
        let bundle = construct_curve_bundle(&[2, 3, 5], None).unwrap();
        assert_eq!(bundle.ell, n(7));
        assert_eq!(bundle.digits, vec![n(1), n(1), n(1)]);
        assert_eq!(bundle.curves[0], poly(&[(0, 1), (3, 14), (3, 14), (3, 14)]));
        assert_eq!(bundle.curves[1], poly(&[(0, 1), (5, 14), (5, 14), (5, 14)]));
        assert_eq!(bundle.curves[0].eval_at(2), q(3, 1));
        assert_eq!(bundle.curves[1].eval_at(2), q(5, 1));
        assert_eq!(bundle.curves[0].eval_at(1), q(9, 14));
        assert!(bundle.verified);

        let bundle = construct_curve_bundle(&[3, 5], Some(n(7))).unwrap();
        let single = construct_visible(pt(3, 5), Some(n(7))).unwrap();
        assert_eq!(bundle.curves, vec![single.curve]);

        assert_eq!(
            construct_curve_bundle(&[1, 9], None),
            Err(ConstructError::BaseTooSmall(1))
        );
        assert_eq!(construct_curve_bundle(&[4], None), Err(ConstructError::BadCoordinates));
    }

    #[test]
    fn construction_serializes_fractions() {
        let c = construct_visible(pt(3, 5), None).unwrap();
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["ell"], "7");
        assert_eq!(json["digits"], serde_json::json!([1, 2]));
        assert_eq!(json["curve"], serde_json::json!(["0/1", "5/21", "10/21"]));
        assert_eq!(json["verified"], true);
    }
}
