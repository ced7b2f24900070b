//! Counting visible points in `[1, N]^2` and the Euler-product constants
//! attached to a family.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{gcd_u64, is_prime_u64, primes_up_to};
use crate::polyfam::PolyFamily;
use crate::visibility::{sieve_multiples, FamilyTable};
use crate::Limits;

/// Widest column the literal subset enumeration accepts (`2^(a-1)` subsets).
pub const MAX_SUBSET_COLUMN: u64 = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("N = {n} exceeds the configured cap of {cap}")]
    CapExceeded { n: u64, cap: u64 },
    #[error("N must be at least 1")]
    EmptyRange,
    #[error("subset enumeration needs columns of width at most {MAX_SUBSET_COLUMN}, got {0}")]
    ModeCapacity(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("gcd({0}, {1}) != 1")]
    NotCoprime(u64, u64),
    #[error("prime bound {bound} is below the minimum {min}")]
    PrimeBoundTooSmall { bound: u64, min: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusResult {
    pub n: u64,
    pub visible_count: u64,
    pub density_estimate: f64,
}

impl CensusResult {
    fn new(n: u64, visible_count: u64) -> Self {
        Self {
            n,
            visible_count,
            density_estimate: visible_count as f64 / (n as f64 * n as f64),
        }
    }
}

/// One row of the prefix-density table: visible points in `[1, n]^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixRow {
    pub n: u64,
    pub visible_count: u64,
    pub density: f64,
}

/// Truncated Euler product with a bound on the neglected tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantResult {
    pub value: f64,
    pub prime_bound: u64,
    /// Bound on `|log(full product) - log(value)|`.
    pub tail_bound: f64,
}

/// How [`exact_count_ie`] expands the inclusion-exclusion sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IeMode {
    /// Every subset of `{1, ..., a-1}`, exactly as written.
    SubsetEnumeration,
    /// Distinct minimal moduli only, branches with `lcm > N` cut off.
    PrunedLcm,
}

fn check_n(n: u64, limits: &Limits) -> Result<(), CensusError> {
    if n == 0 {
        return Err(CensusError::EmptyRange);
    }
    if n > limits.max_n {
        return Err(CensusError::CapExceeded {
            n,
            cap: limits.max_n,
        });
    }
    Ok(())
}

fn hidden_column(table: &FamilyTable, a: u64, n: u64) -> Vec<bool> {
    let mut hidden = vec![false; n as usize];
    sieve_multiples(&table.minimal_moduli_up_to(a, n), 1, &mut hidden);
    hidden
}

/// Visible points `(a, b)` with `a` in `columns` and `1 <= b <= n`. Sums over
/// disjoint column ranges add up to the full count.
pub fn visible_count_columns(table: &FamilyTable, n: u64, columns: std::ops::RangeInclusive<u64>) -> u64 {
    columns
        .into_par_iter()
        .map(|a| hidden_column(table, a, n).iter().filter(|h| !**h).count() as u64)
        .sum()
}

/// Exact visible count over `[1, N]^2` and its ratio to `N^2`.
pub fn empirical_density(
    family: &PolyFamily,
    n: u64,
    limits: &Limits,
) -> Result<CensusResult, CensusError> {
    check_n(n, limits)?;
    let table = FamilyTable::new(family, n);
    Ok(CensusResult::new(n, visible_count_columns(&table, n, 1..=n)))
}

/// Visible counts for every prefix square `[1, k]^2`, `k = 1..=n`. A point
/// `(a, b)` is first counted at `k = max(a, b)`.
pub fn density_prefix(
    family: &PolyFamily,
    n: u64,
    limits: &Limits,
) -> Result<Vec<PrefixRow>, CensusError> {
    check_n(n, limits)?;
    let table = FamilyTable::new(family, n);
    let first_seen = (1..=n)
        .into_par_iter()
        .fold(
            || vec![0u64; n as usize + 1],
            |mut hist, a| {
                for (i, hidden) in hidden_column(&table, a, n).into_iter().enumerate() {
                    if !hidden {
                        hist[(i as u64 + 1).max(a) as usize] += 1;
                    }
                }
                hist
            },
        )
        .reduce(
            || vec![0u64; n as usize + 1],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(s, v)| *s += v);
                x
            },
        );
    let mut total = 0;
    Ok((1..=n)
        .map(|k| {
            total += first_seen[k as usize];
            PrefixRow {
                n: k,
                visible_count: total,
                density: total as f64 / (k as f64 * k as f64),
            }
        })
        .collect())
}

// lcm capped at n + 1: anything larger contributes floor(n / lcm) = 0.
fn capped_lcm(x: u64, y: u64, n: u64) -> u64 {
    if x > n || y > n {
        return n + 1;
    }
    let l = u128::from(x / gcd_u64(x, y)) * u128::from(y);
    if l > u128::from(n) {
        n + 1
    } else {
        l as u64
    }
}

fn subset_sum(moduli: &[u64], n: u64) -> i64 {
    // iterative walk over all 2^k subsets: (next index, lcm, sign)
    let mut total = 0i64;
    let mut stack = vec![(0usize, 1u64, 1i64)];
    while let Some((i, lcm, sign)) = stack.pop() {
        if i == moduli.len() {
            total += sign * (n / lcm) as i64;
            continue;
        }
        stack.push((i + 1, lcm, sign));
        stack.push((i + 1, capped_lcm(lcm, moduli[i], n), -sign));
    }
    total
}

fn pruned_sum(moduli: &[u64], n: u64) -> i64 {
    fn walk(moduli: &[u64], start: usize, lcm: u64, sign: i64, n: u64) -> i64 {
        let mut total = 0;
        for (offset, &m) in moduli[start..].iter().enumerate() {
            let next = capped_lcm(lcm, m, n);
            if next > n {
                continue;
            }
            total += -sign * (n / next) as i64;
            total += walk(moduli, start + offset + 1, next, -sign, n);
        }
        total
    }
    n as i64 + walk(moduli, 0, 1, 1, n)
}

/// Visible pairs in `[1, N]^2` by inclusion-exclusion over the moduli of
/// each column: `sum_a sum_J (-1)^|J| floor(N / lcm(m_{a,t} : t in J))`.
pub fn exact_count_ie(
    family: &PolyFamily,
    n: u64,
    mode: IeMode,
    limits: &Limits,
) -> Result<u64, CensusError> {
    check_n(n, limits)?;
    if mode == IeMode::SubsetEnumeration && n > MAX_SUBSET_COLUMN {
        return Err(CensusError::ModeCapacity(n));
    }
    let table = FamilyTable::new(family, n);
    let total: i64 = (1..=n)
        .into_par_iter()
        .map(|a| match mode {
            IeMode::SubsetEnumeration => {
                let pa = family.eval(a);
                let moduli: Vec<u64> = (1..a)
                    .map(|t| {
                        let m = &pa / num_integer::Integer::gcd(&pa, &family.eval(t));
                        u64::try_from(m).unwrap_or(u64::MAX)
                    })
                    .collect();
                subset_sum(&moduli, n)
            }
            IeMode::PrunedLcm => pruned_sum(&table.minimal_moduli_up_to(a, n), n),
        })
        .sum();
    Ok(u64::try_from(total).expect("count is nonnegative"))
}

/// Pointwise count using the direct visibility test; slow, for cross-checks.
pub fn brute_force_count(family: &PolyFamily, n: u64, limits: &Limits) -> Result<u64, CensusError> {
    check_n(n, limits)?;
    Ok((1..=n)
        .into_par_iter()
        .map(|a| {
            (1..=n)
                .filter(|&b| {
                    crate::visibility::is_visible(family, crate::LatticePoint { a, b }).is_visible()
                })
                .count() as u64
        })
        .sum())
}

/// Number of roots of `P` modulo the prime `p`, by enumerating residues.
pub fn rho(family: &PolyFamily, p: u64) -> u64 {
    debug_assert!(is_prime_u64(p));
    (0..p).filter(|&x| family.eval_mod(x, p) == 0).count() as u64
}

// Dense polynomials over F_p, little-endian, trimmed.
fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let inv = pow_mod(m[dm], p - 2, p);
    while a.len() > dm {
        let lead = a.pop().expect("nonempty") * inv % p;
        if lead == 0 {
            continue;
        }
        let shift = a.len() - dm;
        for (i, &c) in m[..dm].iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - lead * c % p) % p;
        }
    }
    trim(a)
}

fn poly_mulmod(x: &[u64], y: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; x.len() + y.len() - 1];
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in y.iter().enumerate() {
            out[i + j] = (out[i + j] + a * b) % p;
        }
    }
    poly_rem(out, m, p)
}

/// Distinct roots of `P` mod `p` as `deg gcd(P, x^p - x)` over `F_p`.
/// Agrees with [`rho`] and needs `O(deg^2 log p)` work instead of `O(p)`.
pub fn rho_by_gcd(family: &PolyFamily, p: u64) -> u64 {
    debug_assert!(is_prime_u64(p) && p < 1 << 32);
    let mut reduced = vec![0u64];
    reduced.extend(family.coeffs().iter().map(|&c| c % p));
    let reduced = trim(reduced);
    let deg = reduced.len() - 1;
    if deg == 1 {
        return 1;
    }
    // x^p mod P by square-and-multiply
    let x = poly_rem(vec![0, 1], &reduced, p);
    let mut acc = vec![1u64];
    let mut base = x.clone();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, &reduced, p);
        }
        base = poly_mulmod(&base, &base, &reduced, p);
        e >>= 1;
    }
    // x^p - x
    let mut diff = acc;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    let mut a = reduced;
    let mut b = trim(diff);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    (a.len() - 1) as u64
}

fn euler_product(primes: &[u64], factor: impl Fn(u64) -> f64) -> f64 {
    primes.iter().map(|&p| factor(p)).product()
}

/// `C_P = prod_p (1 - rho_P(p) / p^2)` over primes `p <= prime_bound`.
///
/// The tail bound is `deg(P) / (B - 1)`, from `rho_P(p) <= deg P` for
/// `p > deg P` and `sum_{p > B} 1/p^2 <= 1/(B - 1)`. It is only meaningful
/// once `B >= deg P`.
pub fn constant_cp(family: &PolyFamily, prime_bound: u64) -> Result<ConstantResult, CensusError> {
    if prime_bound < 2 {
        return Err(CensusError::PrimeBoundTooSmall {
            bound: prime_bound,
            min: 2,
        });
    }
    let primes = primes_up_to(prime_bound);
    let value = euler_product(&primes, |p| {
        1.0 - rho_by_gcd(family, p) as f64 / (p as f64 * p as f64)
    });
    Ok(ConstantResult {
        value,
        prime_bound,
        tail_bound: family.degree() as f64 / (prime_bound - 1) as f64,
    })
}

/// `C_{p,q} = (1 - 1/p^2)(1 - 1/q^2) prod_{5 <= r <= B} (1 - 2/r^2)`.
pub fn constant_cpq(p: u64, q: u64, prime_bound: u64) -> Result<ConstantResult, CensusError> {
    for x in [p, q] {
        if !is_prime_u64(x) {
            return Err(CensusError::NotPrime(x));
        }
    }
    if prime_bound < 5 {
        return Err(CensusError::PrimeBoundTooSmall {
            bound: prime_bound,
            min: 5,
        });
    }
    let head = (1.0 - 1.0 / (p as f64).powi(2)) * (1.0 - 1.0 / (q as f64).powi(2));
    let primes: Vec<u64> = primes_up_to(prime_bound)
        .into_iter()
        .filter(|&r| r >= 5)
        .collect();
    let tail = euler_product(&primes, |r| 1.0 - 2.0 / (r as f64 * r as f64));
    Ok(ConstantResult {
        value: head * tail,
        prime_bound,
        tail_bound: 2.0 / (prime_bound - 1) as f64,
    })
}

/// `C*_{p,q} = prod_{r | pq} (1 - 1/r^2) prod_{r !| pq} (1 - 2/r^2)`, the
/// first product exact and the second truncated at `prime_bound`.
pub fn constant_cpq_star(p: u64, q: u64, prime_bound: u64) -> Result<ConstantResult, CensusError> {
    if gcd_u64(p, q) != 1 {
        return Err(CensusError::NotCoprime(p, q));
    }
    if prime_bound < 2 {
        return Err(CensusError::PrimeBoundTooSmall {
            bound: prime_bound,
            min: 2,
        });
    }
    let pq = u128::from(p) * u128::from(q);
    let divisors: Vec<u64> = {
        let f = crate::arith::factorize(&crate::arith::Natural::from(pq)).expect("pq >= 1");
        f.primes()
            .map(|r| u64::try_from(r).expect("prime factor of a u128 below 2^64"))
            .collect()
    };
    let head = euler_product(&divisors, |r| 1.0 - 1.0 / (r as f64 * r as f64));
    let primes: Vec<u64> = primes_up_to(prime_bound)
        .into_iter()
        .filter(|r| !divisors.contains(r))
        .collect();
    let tail = euler_product(&primes, |r| 1.0 - 2.0 / (r as f64 * r as f64));
    Ok(ConstantResult {
        value: head * tail,
        prime_bound,
        tail_bound: 2.0 / (prime_bound - 1) as f64,
    })
}

/// Pairs in `[1, N]^2` with `gcd(b, L_P(a)) = 1`, a lower bound for the
/// visible count.
pub fn coprimality_count(family: &PolyFamily, n: u64, limits: &Limits) -> Result<u64, CensusError> {
    check_n(n, limits)?;
    let table = FamilyTable::new(family, n);
    let primes = primes_up_to(n);
    Ok((1..=n)
        .into_par_iter()
        .map(|a| {
            let mut hit = vec![false; n as usize];
            sieve_multiples(&table.lcm_primes_in(a, &primes), 1, &mut hit);
            hit.iter().filter(|h| !**h).count() as u64
        })
        .sum())
}

/// Whether the density-one trend is expected: families with at least two
/// nonzero terms. Monomials `x^n` tend to `1/zeta(n+1)` instead.
pub fn expects_full_density(family: &PolyFamily) -> bool {
    !family.is_monomial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfam::parse_family;

    fn fam(spec: &str) -> PolyFamily {
        parse_family(spec).unwrap()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn density_examples() {
        let r = empirical_density(&fam("1"), 1000, &limits()).unwrap();
        assert_eq!(r.visible_count, 608_383);
        assert!((r.density_estimate - 0.607_927).abs() < 0.01);
        let r = empirical_density(&fam("1,0"), 1000, &limits()).unwrap();
        assert!((r.density_estimate - 0.831_907).abs() < 0.02);
        let r = empirical_density(&fam("3,1"), 1, &limits()).unwrap();
        assert_eq!((r.visible_count, r.density_estimate), (1, 1.0));
    }

    #[test]
    fn density_respects_cap() {
        let tight = Limits {
            max_n: 50,
            ..Limits::default()
        };
        assert_eq!(
            empirical_density(&fam("1"), 51, &tight),
            Err(CensusError::CapExceeded { n: 51, cap: 50 })
        );
        assert_eq!(
            empirical_density(&fam("1"), 0, &tight),
            Err(CensusError::EmptyRange)
        );
    }

    #[test]
    fn prefix_rows_match_direct_counts() {
        let p = fam("1,1");
        let rows = density_prefix(&p, 60, &limits()).unwrap();
        for k in [1, 2, 7, 30, 60] {
            let direct = empirical_density(&p, k, &limits()).unwrap();
            assert_eq!(rows[k as usize - 1].visible_count, direct.visible_count);
        }
    }

    #[test]
    fn ie_examples() {
        for mode in [IeMode::SubsetEnumeration, IeMode::PrunedLcm] {
            assert_eq!(exact_count_ie(&fam("1"), 5, mode, &limits()), Ok(19));
            assert_eq!(exact_count_ie(&fam("1,1"), 1, mode, &limits()), Ok(1));
            assert_eq!(exact_count_ie(&fam("1,1"), 12, mode, &limits()), Ok(109));
        }
        assert_eq!(
            exact_count_ie(&fam("1"), 27, IeMode::SubsetEnumeration, &limits()),
            Err(CensusError::ModeCapacity(27))
        );
    }

    #[test]
    fn pruned_count_at_larger_n() {
        for spec in ["1", "1,1", "2,5"] {
            let p = fam(spec);
            let sieve = empirical_density(&p, 150, &limits()).unwrap().visible_count;
            assert_eq!(exact_count_ie(&p, 150, IeMode::PrunedLcm, &limits()), Ok(sieve));
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&fam("1"), 5), 1);
        assert_eq!(rho(&fam("1,1"), 7), 2);
        assert_eq!(rho(&fam("1,1"), 2), 2);
    }

    #[test]
    fn rho_routes_agree() {
        let primes = primes_up_to(400);
        for spec in ["1", "1,0", "1,1", "2,5", "1,0,1", "2,3", "1,0,0,0,1", "6,11,6"] {
            let p = fam(spec);
            for &q in &primes {
                let r = rho(&p, q);
                assert_eq!(rho_by_gcd(&p, q), r, "{spec} mod {q}");
                assert!(r >= 1);
                if q > p.degree() as u64 {
                    assert!(r <= p.degree() as u64);
                }
            }
        }
    }

    #[test]
    fn constant_examples() {
        let c = constant_cp(&fam("1"), 2).unwrap();
        assert_eq!(c.value, 0.75);
        let c = constant_cpq(2, 2, 5).unwrap();
        assert!((c.value - (9.0 / 16.0) * (1.0 - 2.0 / 25.0)).abs() < 1e-15);
        let c = constant_cpq(3, 5, 100_000).unwrap();
        assert!((c.value - 0.707_952_530_151_351_7).abs() < 1e-12);
        let c = constant_cpq_star(1, 1, 100_000).unwrap();
        assert!((c.value - 0.322_634_616_605_432_36).abs() < 1e-12);
        assert_eq!(
            constant_cpq_star(4, 6, 100).unwrap_err(),
            CensusError::NotCoprime(4, 6)
        );
        assert_eq!(constant_cpq(4, 3, 100).unwrap_err(), CensusError::NotPrime(4));
        assert!(constant_cp(&fam("1"), 1).is_err());
    }

    #[test]
    fn constant_refinements_within_tail() {
        let p = fam("1,1");
        let bounds = [10u64, 100, 1000, 10_000];
        let values: Vec<ConstantResult> =
            bounds.iter().map(|&b| constant_cp(&p, b).unwrap()).collect();
        for w in values.windows(2) {
            assert!(w[1].value <= w[0].value);
            assert!((w[0].value.ln() - w[1].value.ln()).abs() <= w[0].tail_bound);
        }
    }

    #[test]
    fn coprimality_examples() {
        assert_eq!(coprimality_count(&fam("1,1"), 1, &limits()), Ok(1));
        assert_eq!(coprimality_count(&fam("1"), 1000, &limits()), Ok(608_383));
        assert_eq!(coprimality_count(&fam("1,1"), 500, &limits()), Ok(121_232));
        let visible = empirical_density(&fam("1,1"), 500, &limits()).unwrap();
        assert_eq!(visible.visible_count, 235_476);
    }

    #[test]
    fn partitioned_counts_are_identical() {
        let p = fam("2,5");
        let table = FamilyTable::new(&p, 200);
        let whole = visible_count_columns(&table, 200, 1..=200);
        for cut in [1u64, 17, 100, 199] {
            let split = visible_count_columns(&table, 200, 1..=cut)
                + visible_count_columns(&table, 200, cut + 1..=200);
            assert_eq!(split, whole);
        }
    }

    #[test]
    fn full_density_expectation() {
        assert!(expects_full_density(&fam("1,1")));
        assert!(!expects_full_density(&fam("1,0")));
        assert!(!expects_full_density(&fam("1")));
    }
}
