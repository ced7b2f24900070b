//! Point-level visibility predicates.
//!
//! A point `(a, b)` is visible for the family of `P` when no curve
//! `y = q P(x)` through it meets another lattice point with `0 < x < a`.
//! With `m_{a,t} = P(a) / gcd(P(a), P(t))` this is the statement that no
//! `m_{a,t}` divides `b`, which is what everything here works with.
//!
//! The moduli depend only on the column `a`, so the sieving code in
//! `census` and `geometry` computes them once per column through
//! [`FamilyTable`] and reuses them for every `b`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{factorize, gcd_u128, Natural, Rational};
use crate::polyfam::{LatticePoint, PolyFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VisibilityError {
    #[error("t = {t} is outside [1, {a})")]
    OutOfRange { a: u64, t: u64 },
}

/// Outcome of a visibility query. An invisible verdict carries the
/// smallest `t` whose modulus divides `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VisibilityVerdict {
    Visible,
    Invisible { witness_t: u64, modulus: Natural },
}

impl VisibilityVerdict {
    pub fn is_visible(&self) -> bool {
        matches!(self, Self::Visible)
    }

    pub fn witness_t(&self) -> Option<u64> {
        match self {
            Self::Visible => None,
            Self::Invisible { witness_t, .. } => Some(*witness_t),
        }
    }

    pub fn witness_modulus(&self) -> Option<&Natural> {
        match self {
            Self::Visible => None,
            Self::Invisible { modulus, .. } => Some(modulus),
        }
    }
}

impl Serialize for VisibilityVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Flat {
            visible: bool,
            #[serde(skip_serializing_if = "Option::is_none")]
            witness_t: Option<u64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            witness_modulus: Option<String>,
        }
        Flat {
            visible: self.is_visible(),
            witness_t: self.witness_t(),
            witness_modulus: self.witness_modulus().map(|m| m.to_string()),
        }
        .serialize(serializer)
    }
}

/// Everything column `a` contributes to the visibility of `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnProfile {
    pub a: u64,
    /// `(t, m_{a,t})` for `1 <= t < a`.
    pub moduli: Vec<(u64, Natural)>,
    /// Divisibility-minimal elements of the distinct moduli, ascending.
    pub minimal_moduli: Vec<Natural>,
    /// Primes dividing `L_P(a) = lcm(m_{a,t})`, ascending.
    pub lcm_prime_set: Vec<Natural>,
}

/// `m_{a,t} = P(a) / gcd(P(a), P(t))` for `1 <= t < a`.
pub fn modulus(family: &PolyFamily, a: u64, t: u64) -> Result<Natural, VisibilityError> {
    if t == 0 || t >= a {
        return Err(VisibilityError::OutOfRange { a, t });
    }
    let pa = family.eval(a);
    let pt = family.eval(t);
    let g = pa.gcd(&pt);
    Ok(pa / g)
}

/// Decides visibility of `pt`, reporting the smallest witness `t` when the
/// point is hidden.
pub fn is_visible(family: &PolyFamily, pt: LatticePoint) -> VisibilityVerdict {
    let LatticePoint { a, b } = pt;
    if let Some(pa) = family.eval_u128(a) {
        let b = u128::from(b);
        for t in 1..a {
            // P(t) < P(a) so it fits as well
            let pt = family.eval_u128(t).expect("P(t) < P(a)");
            let m = pa / gcd_u128(pa, pt);
            if b % m == 0 {
                return VisibilityVerdict::Invisible {
                    witness_t: t,
                    modulus: Natural::from(m),
                };
            }
        }
        return VisibilityVerdict::Visible;
    }
    let pa = family.eval(a);
    let b = Natural::from(b);
    for t in 1..a {
        let m = &pa / pa.gcd(&family.eval(t));
        if (&b % &m).is_zero() {
            return VisibilityVerdict::Invisible {
                witness_t: t,
                modulus: m,
            };
        }
    }
    VisibilityVerdict::Visible
}

/// Visibility by the literal ratio test: `(a, b)` is hidden when
/// `b P(t) / P(a)` is an integer for some `1 <= t < a`. Exact rational
/// arithmetic, no moduli; used as a cross-check.
pub fn is_visible_direct(family: &PolyFamily, pt: LatticePoint) -> bool {
    let pa = BigInt::from(family.eval(pt.a));
    let b = BigInt::from(pt.b);
    (1..pt.a).all(|t| {
        let ratio = Rational::new(&b * BigInt::from(family.eval(t)), pa.clone());
        !ratio.is_integer()
    })
}

/// `gcd(P(a), b)`.
pub fn gcd_p(family: &PolyFamily, pt: LatticePoint) -> Natural {
    family.eval(pt.a).gcd(&Natural::from(pt.b))
}

/// `P(a) / gcd(P(a), P(1), ..., P(a-1))`. Its prime divisors are exactly the
/// primes of `L_P(a)`: `p` divides `L_P(a)` iff some `P(t)` carries fewer
/// factors of `p` than `P(a)` does.
pub fn lcm_radical_cofactor(family: &PolyFamily, a: u64) -> Natural {
    let pa = family.eval(a);
    let mut g = pa.clone();
    for t in 1..a {
        if g.is_one() {
            break;
        }
        g = g.gcd(&family.eval(t));
    }
    pa / g
}

/// Full profile of column `a`. Column 1 has no moduli at all.
pub fn column_profile(family: &PolyFamily, a: u64) -> ColumnProfile {
    let pa = family.eval(a);
    let moduli: Vec<(u64, Natural)> = (1..a)
        .map(|t| (t, &pa / pa.gcd(&family.eval(t))))
        .collect();
    let mut distinct: Vec<Natural> = moduli.iter().map(|(_, m)| m.clone()).collect();
    distinct.sort();
    distinct.dedup();
    let minimal_moduli = minimal_elements(&distinct);
    let lcm_prime_set = if a <= 1 {
        Vec::new()
    } else {
        factorize(&lcm_radical_cofactor(family, a))
            .expect("cofactor is nonzero")
            .primes()
            .cloned()
            .collect()
    };
    ColumnProfile {
        a,
        moduli,
        minimal_moduli,
        lcm_prime_set,
    }
}

/// Divisibility-minimal elements of an ascending, duplicate-free list.
fn minimal_elements<T>(sorted: &[T]) -> Vec<T>
where
    T: Clone + num_integer::Integer,
{
    let mut kept: Vec<T> = Vec::new();
    for m in sorted {
        if !kept.iter().any(|k| m.is_multiple_of(k)) {
            kept.push(m.clone());
        }
    }
    kept
}

/// True when `b` shares no prime with `L_P(a)`; a sufficient condition for
/// visibility.
pub fn lcm_criterion(family: &PolyFamily, pt: LatticePoint) -> bool {
    lcm_radical_cofactor(family, pt.a)
        .gcd(&Natural::from(pt.b))
        .is_one()
}

enum Values {
    Small(Vec<u128>),
    Big(Vec<Natural>),
}

/// `P(0..=max_x)` tabulated once, `u128` when every value fits. Column
/// sieves over a region read their moduli from here.
pub struct FamilyTable {
    family: PolyFamily,
    max_x: u64,
    values: Values,
}

impl FamilyTable {
    pub fn new(family: &PolyFamily, max_x: u64) -> Self {
        let values = match family.eval_u128(max_x) {
            Some(_) => Values::Small(
                (0..=max_x)
                    .map(|x| family.eval_u128(x).expect("monotone"))
                    .collect(),
            ),
            None => Values::Big((0..=max_x).map(|x| family.eval(x)).collect()),
        };
        Self {
            family: family.clone(),
            max_x,
            values,
        }
    }

    pub fn family(&self) -> &PolyFamily {
        &self.family
    }

    pub fn max_x(&self) -> u64 {
        self.max_x
    }

    /// Distinct moduli of column `a` that are `<= bound`, ascending.
    pub fn moduli_up_to(&self, a: u64, bound: u64) -> Vec<u64> {
        assert!(a <= self.max_x, "column {a} beyond table");
        let mut out = Vec::new();
        match &self.values {
            Values::Small(v) => {
                let pa = v[a as usize];
                let bound = u128::from(bound);
                for &pt in &v[1..a as usize] {
                    let m = pa / gcd_u128(pa, pt);
                    if m <= bound {
                        out.push(m as u64);
                    }
                }
            }
            Values::Big(v) => {
                let pa = &v[a as usize];
                for pt in &v[1..a as usize] {
                    let m = pa / pa.gcd(pt);
                    if let Some(m) = m.to_u64().filter(|&m| m <= bound) {
                        out.push(m);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Divisibility-minimal moduli of column `a` that are `<= bound`. These
    /// are exactly the minimal elements of the full modulus set lying
    /// below the bound.
    pub fn minimal_moduli_up_to(&self, a: u64, bound: u64) -> Vec<u64> {
        minimal_elements(&self.moduli_up_to(a, bound))
    }

    /// Primes `p <= bound` (taken from the ascending list `primes`) that
    /// divide `L_P(a)`.
    pub fn lcm_primes_in(&self, a: u64, primes: &[u64]) -> Vec<u64> {
        match &self.values {
            Values::Small(v) => {
                let pa = v[a as usize];
                let mut g = pa;
                for &pt in &v[1..a as usize] {
                    if g == 1 {
                        break;
                    }
                    g = gcd_u128(g, pt);
                }
                let r = pa / g;
                primes
                    .iter()
                    .copied()
                    .filter(|&p| r % u128::from(p) == 0)
                    .collect()
            }
            Values::Big(v) => {
                let pa = &v[a as usize];
                let mut g = pa.clone();
                for pt in &v[1..a as usize] {
                    if g.is_one() {
                        break;
                    }
                    g = g.gcd(pt);
                }
                let r = pa / g;
                primes
                    .iter()
                    .copied()
                    .filter(|&p| (&r % p).is_zero())
                    .collect()
            }
        }
    }
}

/// Marks `hidden[b - min_b]` for every `b` in `[min_b, min_b + len)` that is a
/// multiple of some modulus. Moduli must be ascending; a modulus already
/// marked is skipped since its multiples are covered.
pub(crate) fn sieve_multiples(moduli: &[u64], min_b: u64, hidden: &mut [bool]) {
    let len = hidden.len() as u64;
    let max_b = min_b + len - 1;
    for &m in moduli {
        if m >= min_b && m <= max_b && hidden[(m - min_b) as usize] {
            continue;
        }
        let mut b = min_b.div_ceil(m) * m;
        while b <= max_b {
            hidden[(b - min_b) as usize] = true;
            b += m;
        }
    }
}

type ColumnSlot = Arc<OnceLock<Arc<Vec<u64>>>>;

/// Minimal moduli per column, computed at most once per column and shared
/// between threads. Only moduli that fit a `u64` are kept; larger ones
/// never divide a `u64` ordinate.
pub struct ProfileCache {
    family: PolyFamily,
    columns: Mutex<HashMap<u64, ColumnSlot>>,
}

impl ProfileCache {
    pub fn new(family: &PolyFamily) -> Self {
        Self {
            family: family.clone(),
            columns: Mutex::new(HashMap::new()),
        }
    }

    pub fn family(&self) -> &PolyFamily {
        &self.family
    }

    pub fn minimal_moduli(&self, a: u64) -> Arc<Vec<u64>> {
        let slot = {
            let mut map = self.columns.lock().expect("cache poisoned");
            map.entry(a).or_default().clone()
        };
        slot.get_or_init(|| {
            let table = FamilyTable::new(&self.family, a);
            Arc::new(table.minimal_moduli_up_to(a, u64::MAX))
        })
        .clone()
    }

    pub fn is_visible(&self, pt: LatticePoint) -> bool {
        !self.minimal_moduli(pt.a).iter().any(|&m| pt.b.is_multiple_of(m))
    }

    pub fn cached_columns(&self) -> usize {
        self.columns.lock().expect("cache poisoned").len()
    }
}
