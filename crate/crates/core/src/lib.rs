//! Visibility of lattice points along polynomial families.
//!
//! A family is the set of curves `y = q P(x)`, `q > 0` rational, for a fixed
//! `P(x) = a_n x^n + ... + a_1 x` with nonnegative coefficients of content 1.
//! A point `(a, b)` is visible when the curve of the family through it meets
//! no other lattice point strictly between the origin and `(a, b)`.
//!
//! - [`arith`]: exact integer and rational helpers.
//! - [`polyfam`]: families, rational curves, lattice points.
//! - [`visibility`]: point predicates and per-column moduli.
//! - [`census`]: visible counts, inclusion-exclusion, Euler products.
//! - [`construct`]: curves through a point that avoid all other points.
//! - [`geometry`]: region maps, hidden blocks, nearest-visible search.
//! - [`reproduce`]: fixed regression checks for the worked example and the
//!   block table.

pub mod arith;
pub mod census;
pub mod construct;
pub mod geometry;
pub mod polyfam;
pub mod reproduce;
pub mod visibility;

pub use polyfam::{parse_family, LatticePoint, PolyFamily, RationalPoly};
pub use visibility::{is_visible, VisibilityVerdict};

/// Environment variable overriding both resource caps.
pub const CAP_ENV: &str = "LATTICE_SCOPE_CAP";

/// Resource caps for the counting and scanning routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `N` for counts over `[1, N]^2`.
    pub max_n: u64,
    /// Largest width or height of a scanned region.
    pub max_region_side: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_n: 10_000,
            max_region_side: 2_000,
        }
    }
}

impl Limits {
    /// Defaults, with both caps replaced by `LATTICE_SCOPE_CAP` when it holds
    /// a positive integer.
    pub fn from_env() -> Self {
        std::env::var(CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&cap| cap > 0)
            .map_or_else(Self::default, |cap| Self {
                max_n: cap,
                max_region_side: cap,
            })
    }
}
