//! Exact integer and rational primitives.
//!
//! Everything here works over unbounded integers (`num-bigint`) so that
//! polynomial values such as `P(a)^2` never overflow. A few `u64`/`u128`
//! fast paths exist for the hot loops in the column sieves.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Unbounded nonnegative integer.
pub type Natural = BigUint;
/// Unbounded signed integer.
pub type Integer = BigInt;
/// Exact rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Trial division bound used by [`factorize`] before switching to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Miller-Rabin rounds for inputs beyond 64 bits. The bases are the first
/// `PROBABLE_PRIME_ROUNDS` primes, so results are reproducible run to run.
pub const PROBABLE_PRIME_ROUNDS: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("invalid base {0}: base must be at least 2")]
    InvalidBase(Natural),
    #[error("input must be at least 1")]
    ZeroInput,
}

/// Prime factorization, primes ascending, exponents at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(Natural, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &Natural> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> Natural {
        self.factors
            .iter()
            .fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e))
    }
}

pub fn gcd(x: &Natural, y: &Natural) -> Natural {
    x.gcd(y)
}

pub fn gcd_u64(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        let r = x % y;
        x = y;
        y = r;
    }
    x
}

pub(crate) fn gcd_u128(mut x: u128, mut y: u128) -> u128 {
    if x == 0 {
        return y;
    }
    if y == 0 {
        return x;
    }
    let shift = (x | y).trailing_zeros();
    x >>= x.trailing_zeros();
    loop {
        y >>= y.trailing_zeros();
        if x > y {
            std::mem::swap(&mut x, &mut y);
        }
        y -= x;
        if y == 0 {
            return x << shift;
        }
    }
}

/// Least common multiple of a list; the empty list gives 1.
pub fn lcm_many(xs: &[Natural]) -> Natural {
    xs.iter().fold(Natural::one(), |acc, x| acc.lcm(x))
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'bases: for a in BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &Natural, base: &Natural) -> bool {
    let one = Natural::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, [`PROBABLE_PRIME_ROUNDS`]
/// Miller-Rabin rounds with fixed prime bases above.
pub fn is_prime(n: &Natural) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    small_primes()
        .iter()
        .take(PROBABLE_PRIME_ROUNDS)
        .all(|&p| strong_probable_prime(n, &Natural::from(p)))
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: &Natural) -> Natural {
    let mut candidate = n + 1u32;
    if candidate <= Natural::from(2u32) {
        return Natural::from(2u32);
    }
    if candidate.is_even() {
        candidate += 1u32;
    }
    while !is_prime(&candidate) {
        candidate += 2u32;
    }
    candidate
}

/// Sieve of Eratosthenes; all primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND))
}

fn abs_diff(x: &Natural, y: &Natural) -> Natural {
    if x >= y {
        x - y
    } else {
        y - x
    }
}

// Brent's cycle-finding variant; `c` is the polynomial offset x^2 + c.
fn pollard_brent(n: &Natural, c: u64) -> Option<Natural> {
    let one = Natural::one();
    let c = Natural::from(c);
    let step = |v: &Natural| (v * v + &c) % n;
    let batch = 128u64;
    let mut y = Natural::from(2u32);
    let mut r = 1u64;
    let mut q = Natural::one();
    let mut g = Natural::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..batch.min(r - k) {
                y = step(&y);
                q = (q * abs_diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = step(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if g > one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

fn split_composite(n: Natural, out: &mut Vec<Natural>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    for c in 1u64.. {
        if let Some(d) = pollard_brent(&n, c) {
            let rest = &n / &d;
            split_composite(d, out);
            split_composite(rest, out);
            return;
        }
    }
}

/// Complete factorization: trial division by primes up to
/// [`TRIAL_DIVISION_BOUND`], then Pollard-Brent with fixed offsets.
pub fn factorize(n: &Natural) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let mut rest = n.clone();
    let mut factors: Vec<(Natural, u32)> = Vec::new();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let pn = Natural::from(p);
        if &pn * &pn > rest {
            break;
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((pn, e));
        }
    }
    if !rest.is_one() {
        let mut big = Vec::new();
        split_composite(rest, &mut big);
        big.sort();
        for p in big {
            match factors.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    factors.sort();
    Ok(Factorization { factors })
}

/// Exponent of `p` in a nonzero natural.
pub fn valuation_natural(p: &Natural, n: &Natural) -> u32 {
    debug_assert!(!n.is_zero());
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// p-adic valuation `v_p(num) - v_p(den)` of a nonzero rational.
pub fn valuation(p: &Natural, x: &Rational) -> Result<i64, ArithError> {
    if x.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    Ok(i64::from(valuation_natural(p, num)) - i64::from(valuation_natural(p, den)))
}

/// Little-endian base-`base` digits of `n >= 1`; index `i` holds the
/// coefficient of `base^i`.
pub fn base_digits(n: &Natural, base: &Natural) -> Result<Vec<Natural>, ArithError> {
    if base < &Natural::from(2u32) {
        return Err(ArithError::InvalidBase(base.clone()));
    }
    if n.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let mut digits = Vec::new();
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(base);
        digits.push(r);
        rest = q;
    }
    Ok(digits)
}
