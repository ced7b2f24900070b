//! Region scans: visibility maps, blocks of hidden points, and the layered
//! search for the nearest visible point.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::polyfam::{LatticePoint, PolyFamily};
use crate::visibility::{sieve_multiples, FamilyTable, ProfileCache};
use crate::Limits;

/// Layer cap for [`radius_to_visible`] when none is given.
pub const DEFAULT_MAX_LAYERS: u64 = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("region {width}x{height} exceeds the configured side cap of {cap}")]
    CapExceeded { width: u64, height: u64, cap: u64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("block size must be at least 1")]
    ZeroBlockSize,
}

/// Closed rectangle `[min_x, max_x] x [min_y, max_y]` in the positive
/// quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Region {
    pub min_x: u64,
    pub max_x: u64,
    pub min_y: u64,
    pub max_y: u64,
}

impl Region {
    pub fn new(min_x: u64, max_x: u64, min_y: u64, max_y: u64) -> Result<Self, GeometryError> {
        if min_x == 0 || min_y == 0 {
            return Err(GeometryError::InvalidRegion("coordinates start at 1".into()));
        }
        if min_x > max_x || min_y > max_y {
            return Err(GeometryError::InvalidRegion("min exceeds max".into()));
        }
        Ok(Self {
            min_x,
            max_x,
            min_y,
            max_y,
        })
    }

    /// `[1, x] x [1, y]`.
    pub fn square_from_origin(x: u64, y: u64) -> Result<Self, GeometryError> {
        Self::new(1, x, 1, y)
    }

    pub fn width(&self) -> u64 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> u64 {
        self.max_y - self.min_y + 1
    }

    pub fn contains(&self, pt: LatticePoint) -> bool {
        (self.min_x..=self.max_x).contains(&pt.a) && (self.min_y..=self.max_y).contains(&pt.b)
    }

    fn check_cap(&self, limits: &Limits) -> Result<(), GeometryError> {
        if self.width() > limits.max_region_side || self.height() > limits.max_region_side {
            return Err(GeometryError::CapExceeded {
                width: self.width(),
                height: self.height(),
                cap: limits.max_region_side,
            });
        }
        Ok(())
    }
}

impl FromStr for Region {
    type Err = GeometryError;

    /// `"min_x,max_x,min_y,max_y"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<u64> = s
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| GeometryError::InvalidRegion(format!("cannot parse {s:?}")))?;
        match parts[..] {
            [min_x, max_x, min_y, max_y] => Self::new(min_x, max_x, min_y, max_y),
            _ => Err(GeometryError::InvalidRegion(format!(
                "expected four values, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.min_x, self.max_x, self.min_y, self.max_y
        )
    }
}

/// Visibility flags for every point of a region, column-major (x outer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionGrid {
    pub region: Region,
    flags: Vec<bool>,
}

impl RegionGrid {
    pub fn is_visible(&self, x: u64, y: u64) -> bool {
        let r = &self.region;
        assert!(r.contains(LatticePoint { a: x, b: y }), "({x}, {y}) outside {r}");
        self.flags[((x - r.min_x) * r.height() + (y - r.min_y)) as usize]
    }

    pub fn visible_count(&self) -> u64 {
        self.flags.iter().filter(|v| **v).count() as u64
    }

    /// `(x, y, visible)` rows, x ascending then y ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64, bool)> + '_ {
        let r = self.region;
        self.flags.iter().enumerate().map(move |(i, &v)| {
            let i = i as u64;
            (r.min_x + i / r.height(), r.min_y + i % r.height(), v)
        })
    }

    /// CSV with header `x,y,visible`, visibility as 0/1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,visible")?;
        for (x, y, v) in self.iter() {
            writeln!(out, "{x},{y},{}", u8::from(v))?;
        }
        Ok(())
    }
}

/// Lower-left corner and side of an all-hidden square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockHit {
    pub corner: LatticePoint,
    pub size: u64,
}

impl Serialize for BlockHit {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record {
            corner_x: u64,
            corner_y: u64,
            size: u64,
        }
        Record {
            corner_x: self.corner.a,
            corner_y: self.corner.b,
            size: self.size,
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RadiusResult {
    pub origin: LatticePoint,
    /// Number of layers to the first visible point, `-1` if none was found
    /// within the layer cap.
    pub distance: i64,
}

// hidden[y - min_y] for one column
fn hidden_column(table: &FamilyTable, x: u64, min_y: u64, max_y: u64) -> Vec<bool> {
    let mut hidden = vec![false; (max_y - min_y + 1) as usize];
    sieve_multiples(&table.minimal_moduli_up_to(x, max_y), min_y, &mut hidden);
    hidden
}

/// Visibility of every point in `region`, one sieve per column.
pub fn classify_region(
    family: &PolyFamily,
    region: Region,
    limits: &Limits,
) -> Result<RegionGrid, GeometryError> {
    region.check_cap(limits)?;
    let table = FamilyTable::new(family, region.max_x);
    let flags = (region.min_x..=region.max_x)
        .into_par_iter()
        .flat_map_iter(|x| {
            hidden_column(&table, x, region.min_y, region.max_y)
                .into_iter()
                .map(|h| !h)
        })
        .collect();
    Ok(RegionGrid { region, flags })
}

// For each y: how many consecutive hidden points start at y going up,
// capped at `size`.
fn upward_runs(hidden: &[bool], size: u64) -> Vec<u64> {
    let mut runs = vec![0; hidden.len()];
    let mut run = 0;
    for (i, &h) in hidden.iter().enumerate().rev() {
        run = if h { (run + 1).min(size) } else { 0 };
        runs[i] = run;
    }
    runs
}

/// Column runs for `region`, computed on demand and shared between workers.
struct RunColumns<'a> {
    table: &'a FamilyTable,
    region: Region,
    size: u64,
}

impl RunColumns<'_> {
    fn column(&self, x: u64) -> Vec<u64> {
        upward_runs(
            &hidden_column(self.table, x, self.region.min_y, self.region.max_y),
            self.size,
        )
    }

    /// Block corners with `x` in `corners`, in scan order.
    fn scan(&self, corners: Range<u64>, first_only: bool) -> Vec<BlockHit> {
        let size = self.size;
        let mut hits = Vec::new();
        if corners.is_empty() {
            return hits;
        }
        let mut window: std::collections::VecDeque<Vec<u64>> = (corners.start
            ..corners.start + size - 1)
            .map(|x| self.column(x))
            .collect();
        for x in corners {
            window.push_back(self.column(x + size - 1));
            let height = self.region.height();
            for offset in 0..=(height - size) {
                if window.iter().all(|col| col[offset as usize] >= size) {
                    hits.push(BlockHit {
                        corner: LatticePoint {
                            a: x,
                            b: self.region.min_y + offset,
                        },
                        size,
                    });
                    if first_only {
                        return hits;
                    }
                }
            }
            window.pop_front();
        }
        hits
    }
}

fn block_setup(size: u64, region: &Region, limits: &Limits) -> Result<Option<Range<u64>>, GeometryError> {
    if size == 0 {
        return Err(GeometryError::ZeroBlockSize);
    }
    region.check_cap(limits)?;
    if size > region.width() || size > region.height() {
        return Ok(None);
    }
    Ok(Some(region.min_x..region.max_x - size + 2))
}

/// First all-hidden `size x size` block inside `region`, scanning corners
/// x ascending then y ascending. Work is split among `workers` column
/// ranges; the earliest hit in scan order wins, so the answer does not
/// depend on the split.
pub fn find_block_with_workers(
    family: &PolyFamily,
    size: u64,
    region: Region,
    workers: usize,
    limits: &Limits,
) -> Result<Option<BlockHit>, GeometryError> {
    let Some(corners) = block_setup(size, &region, limits)? else {
        return Ok(None);
    };
    let table = FamilyTable::new(family, region.max_x);
    let runs = RunColumns {
        table: &table,
        region,
        size,
    };
    let span = corners.end - corners.start;
    let workers = (workers.max(1) as u64).min(span);
    let chunk = span.div_ceil(workers);
    let hit = (0..workers)
        .into_par_iter()
        .filter_map(|w| {
            let start = corners.start + w * chunk;
            let end = (start + chunk).min(corners.end);
            runs.scan(start..end, true).into_iter().next()
        })
        .min();
    Ok(hit)
}

/// [`find_block_with_workers`] with one worker per rayon thread.
pub fn find_block(
    family: &PolyFamily,
    size: u64,
    region: Region,
    limits: &Limits,
) -> Result<Option<BlockHit>, GeometryError> {
    find_block_with_workers(family, size, region, rayon::current_num_threads(), limits)
}

/// Every block corner inside `region`, in scan order.
pub fn find_all_blocks(
    family: &PolyFamily,
    size: u64,
    region: Region,
    limits: &Limits,
) -> Result<Vec<BlockHit>, GeometryError> {
    let Some(corners) = block_setup(size, &region, limits)? else {
        return Ok(Vec::new());
    };
    let table = FamilyTable::new(family, region.max_x);
    Ok(RunColumns {
        table: &table,
        region,
        size,
    }
    .scan(corners, false))
}

fn radius_with_cache(cache: &ProfileCache, origin: LatticePoint, max_layers: u64) -> RadiusResult {
    let mut visited = HashSet::new();
    let mut queue = vec![origin];
    let mut distance = 0u64;
    while !queue.is_empty() && distance <= max_layers {
        let mut next = Vec::new();
        let mut queued = HashSet::new();
        for pt in queue {
            if !visited.insert(pt) {
                continue;
            }
            if cache.is_visible(pt) {
                return RadiusResult {
                    origin,
                    distance: distance as i64,
                };
            }
            for step in [(1, 0), (0, 1), (1, 1)] {
                let n = LatticePoint {
                    a: pt.a + step.0,
                    b: pt.b + step.1,
                };
                if !visited.contains(&n) && queued.insert(n) {
                    next.push(n);
                }
            }
        }
        queue = next;
        distance += 1;
    }
    RadiusResult {
        origin,
        distance: -1,
    }
}

/// Breadth-first layers over right, up and diagonal moves from `origin`;
/// returns the layer holding the first visible point.
pub fn radius_to_visible(family: &PolyFamily, origin: LatticePoint, max_layers: u64) -> RadiusResult {
    radius_with_cache(&ProfileCache::new(family), origin, max_layers)
}

/// First point of `region` (x outer, y inner) whose radius is exactly `r`.
pub fn find_point_with_radius(
    family: &PolyFamily,
    region: Region,
    r: u64,
    max_layers: u64,
) -> Option<LatticePoint> {
    let cache = ProfileCache::new(family);
    (region.min_x..=region.max_x)
        .flat_map(|x| (region.min_y..=region.max_y).map(move |y| LatticePoint { a: x, b: y }))
        .find(|&pt| radius_with_cache(&cache, pt, max_layers).distance == r as i64)
}
