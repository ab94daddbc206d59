//! Planar primitives: points, rectangles, disks, circle-covering placement
//! and Monte Carlo coverage estimation.
//!
//! The field is the axis-aligned rectangle `[0, l] x [0, b]`. Targets travel
//! along +x (the length axis); `x = 0` is the entry edge and `x = l` the exit
//! edge.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default sample count for [`coverage_fraction`] when callers have no
/// reason to pick their own.
pub const DEFAULT_COVERAGE_SAMPLES: u64 = 100_000;

/// Samples per Monte Carlo partition. Each partition draws from its own
/// counter-derived RNG stream, so the estimate is independent of how the
/// partitions are scheduled across worker threads.
const MC_PARTITION: u64 = 1 << 16;

/// A 2D point or vector in field coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn length_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn length(self) -> f64 {
        self.length_sq().sqrt()
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).length()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Scales the vector down so its length does not exceed `max_len`.
    /// Zero and sub-limit vectors pass through unchanged.
    pub fn clamp_length(self, max_len: f64) -> Vec2 {
        let len = self.length();
        if len > max_len && len > 0.0 {
            self * (max_len / len)
        } else {
            self
        }
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl std::ops::AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

/// The rectangular field to be tracked: length `l` along the travel axis,
/// breadth `b` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub l: f64,
    pub b: f64,
}

impl Rect {
    pub fn new(l: f64, b: f64) -> Result<Self> {
        if !(l > 0.0) || !(b > 0.0) || !l.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "field sides must be positive and finite, got l={l}, b={b}"
            )));
        }
        Ok(Rect { l, b })
    }

    pub fn area(self) -> f64 {
        self.l * self.b
    }

    pub fn contains(self, p: Vec2) -> bool {
        p.x >= 0.0 && p.x <= self.l && p.y >= 0.0 && p.y <= self.b
    }
}

/// A sensing disk: all points within `radius` of `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Vec2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Ok(Disk { center, radius })
    }

    pub fn contains(self, p: Vec2) -> bool {
        self.center.distance(p) <= self.radius
    }
}

/// Area of a disk of radius `r`.
pub fn disk_area(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {r}"
        )));
    }
    Ok(PI * r * r)
}

/// Centers of a square covering lattice over `field` for disks of radius `r`.
///
/// A disk of radius `r` circumscribes a square of side `s = r * sqrt(2)`, so
/// `ceil(l/s) * ceil(b/s)` cells tile the field. Centers sit at the cell
/// centers with per-axis pitch `len/count <= s`, which keeps every field
/// point within `r` of some center and the lattice symmetric in the field.
pub fn cover_rectangle(field: Rect, r: f64) -> Result<Vec<Vec2>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "covering radius must be positive, got {r}"
        )));
    }
    let s = r * f64::sqrt(2.0);
    let coords = |len: f64| -> Vec<f64> {
        let count = (len / s).ceil().max(1.0) as usize;
        let pitch = len / count as f64;
        (0..count).map(|i| (i as f64 + 0.5) * pitch).collect()
    };
    let xs = coords(field.l);
    let ys = coords(field.b);
    let mut centers = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            centers.push(Vec2::new(x, y));
        }
    }
    Ok(centers)
}

/// Monte Carlo estimate of the fraction of `field` within distance `r` of
/// some center.
///
/// Deterministic for a fixed `sample_seed` and `samples`: the sample stream
/// is split into fixed-size partitions, each drawing from its own
/// counter-indexed RNG stream, so the result does not depend on the number
/// of worker threads.
pub fn coverage_fraction(
    centers: &[Vec2],
    r: f64,
    field: Rect,
    sample_seed: u64,
    samples: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coverage radius must be positive, got {r}"
        )));
    }
    if centers.is_empty() {
        return Ok(0.0);
    }

    let index = CenterIndex::build(centers, r);
    let partitions = samples.div_ceil(MC_PARTITION);
    let hits: u64 = (0..partitions)
        .into_par_iter()
        .map(|part| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
            rng.set_stream(part);
            let start = part * MC_PARTITION;
            let n = MC_PARTITION.min(samples - start);
            let mut hits = 0u64;
            for _ in 0..n {
                let x = rng.random_range(0.0..field.l);
                let y = rng.random_range(0.0..field.b);
                if index.covered(Vec2::new(x, y)) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}

/// Uniform-grid bucket index over disk centers, cell size = radius.
/// Any center within `r` of a query point lies in the 3x3 cell block
/// around the point's cell.
struct CenterIndex {
    r: f64,
    cells: std::collections::HashMap<(i64, i64), Vec<Vec2>>,
}

impl CenterIndex {
    fn build(centers: &[Vec2], r: f64) -> Self {
        let mut cells: std::collections::HashMap<(i64, i64), Vec<Vec2>> =
            std::collections::HashMap::new();
        for &c in centers {
            cells.entry(Self::cell_of(c, r)).or_default().push(c);
        }
        CenterIndex { r, cells }
    }

    fn cell_of(p: Vec2, r: f64) -> (i64, i64) {
        ((p.x / r).floor() as i64, (p.y / r).floor() as i64)
    }

    fn covered(&self, p: Vec2) -> bool {
        let (cx, cy) = Self::cell_of(p, self.r);
        let r_sq = self.r * self.r;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(cx + dx, cy + dy)) {
                    if bucket.iter().any(|c| (*c - p).length_sq() <= r_sq) {
                        return true;
                    }
                }
            }
        }
        false
    }
}
