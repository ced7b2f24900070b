#![allow(dead_code)]

use lattice_scope::{parse_family, PolyFamily};

/// The five families the property suites run over.
pub const CORPUS: [&str; 5] = ["1", "1,0", "1,1", "2,5", "1,0,1"];

pub fn fam(spec: &str) -> PolyFamily {
    parse_family(spec).unwrap()
}

pub fn corpus() -> Vec<(&'static str, PolyFamily)> {
    CORPUS.iter().map(|&s| (s, fam(s))).collect()
}

/// `P(x)` from descending coefficients, plain i128.
pub fn eval_i128(desc: &[i128], x: i128) -> i128 {
    desc.iter().fold(0, |acc, &c| acc * x + c) * x
}

pub fn desc_coeffs(p: &PolyFamily) -> Vec<i128> {
    p.coeffs().iter().rev().map(|&c| c as i128).collect()
}

/// Ratio test: hidden iff `b P(t) / P(a)` is an integer for some `0 < t < a`.
pub fn oracle_visible(desc: &[i128], a: i128, b: i128) -> bool {
    let pa = eval_i128(desc, a);
    (1..a).all(|t| (b * eval_i128(desc, t)) % pa != 0)
}

pub fn gcd(mut x: i128, mut y: i128) -> i128 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x.abs()
}

/// Counts visible points in [1, n]^2 with the ratio oracle.
pub fn oracle_count(desc: &[i128], n: i128) -> u64 {
    let mut count = 0;
    for a in 1..=n {
        for b in 1..=n {
            if oracle_visible(desc, a, b) {
                count += 1;
            }
        }
    }
    count
}
