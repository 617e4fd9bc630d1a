//! Enumeration of `Γ_R`, the integer points of the open annulus
//! `R - 1/√2 < ‖λ‖ < R + 1/√2`, ordered by polar angle.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{in_arc, IntervalSpec};
use crate::numeric::{self, sig17, TwoF64};
use crate::{cal_k, HALF_WIDTH, TAU};

/// Largest radius `enumerate_gamma` accepts. The point list grows like
/// `8.9·R`, so this is a memory guard rather than an arithmetic limit.
pub const MAX_RADIUS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }

    #[inline]
    pub fn norm2(&self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    /// Rotation by a quarter turn, `(x, y) ↦ (-y, x)`.
    pub fn rotate90(&self) -> Self {
        LatticePoint::new(-self.y, self.x)
    }
}

impl std::ops::Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x - o.x, self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusPoint {
    pub point: LatticePoint,
    pub norm: f64,
    /// Shifted radius `‖λ‖ - R`.
    pub r: f64,
    /// Polar angle in `[0, 2π)`.
    pub theta: f64,
    /// 1-based rank in the angular order.
    pub index: usize,
}

/// The angularly ordered point set `Γ_R` for a single radius.
#[derive(Debug, Clone)]
pub struct GammaList {
    radius: f64,
    points: Vec<AnnulusPoint>,
}

impl GammaList {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[AnnulusPoint] {
        &self.points
    }

    /// `K(R)`, the number of points.
    pub fn k(&self) -> usize {
        self.points.len()
    }

    /// `𝒦(R) = √8·π·R`.
    pub fn cal_k(&self) -> f64 {
        cal_k(self.radius)
    }

    /// Point at 0-based circular position `j` (indices wrap modulo `K`).
    #[inline]
    pub fn circular(&self, j: usize) -> &AnnulusPoint {
        &self.points[j % self.points.len()]
    }

    /// Calls `f` with the 0-based position of every point whose angle lies
    /// in the half-open arc `[start, start + width)` modulo `2π`.
    pub fn for_each_in_arc<F: FnMut(usize)>(&self, start: f64, width: f64, mut f: F) {
        let n = self.points.len();
        if n == 0 || !(width > 0.0) {
            return;
        }
        if width >= TAU - 1e-6 {
            for i in 0..n {
                if in_arc(self.points[i].theta, start, width) {
                    f(i);
                }
            }
            return;
        }
        // Candidate ranges from binary search, widened by a margin; the
        // shared predicate then decides membership.
        const MARGIN: f64 = 1e-9;
        let s = start.rem_euclid(TAU);
        let e = s + width;
        let lower = |x: f64| self.points.partition_point(|p| p.theta < x);
        let lo = lower(s - MARGIN);
        if e + MARGIN <= TAU {
            let hi = lower(e + MARGIN);
            for i in lo..hi {
                if in_arc(self.points[i].theta, start, width) {
                    f(i);
                }
            }
        } else {
            for i in lo..n {
                if in_arc(self.points[i].theta, start, width) {
                    f(i);
                }
            }
            let hi = lower(e - TAU + MARGIN).min(lo);
            for i in 0..hi {
                if in_arc(self.points[i].theta, start, width) {
                    f(i);
                }
            }
        }
    }

    /// Writes `x,y,norm,r,theta,index` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,norm,r,theta,index")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                p.point.x,
                p.point.y,
                sig17(p.norm),
                sig17(p.r),
                sig17(p.theta),
                p.index
            )?;
        }
        Ok(())
    }
}

/// Strict integer bounds `n_min <= x² + y² <= n_max` equivalent to the open
/// annulus condition. `(R ± 1/√2)²` is irrational for rational `R > 0`, so
/// neither bound can be attained with equality.
fn norm2_bounds(radius: f64) -> (i64, i64) {
    let half = TwoF64::from_f64(0.5);
    let r2 = numeric::square(radius);
    let cross = numeric::sqrt2_times(radius);
    let outer = r2 + cross + half;
    let inner = r2 - cross + half;
    debug_assert!(outer.hi.fract() != 0.0 || outer.lo != 0.0);
    let n_max = outer.floor() as i64;
    let n_min = inner.floor() as i64 + 1;
    (n_min.max(1), n_max)
}

fn ceil_sqrt(n: i64) -> i64 {
    let s = (n as u64).isqrt() as i64;
    if s * s == n {
        s
    } else {
        s + 1
    }
}

/// Total angular order: angle, then exact cross product, then norm.
fn angular_cmp(a: &AnnulusPoint, b: &AnnulusPoint) -> Ordering {
    a.theta
        .total_cmp(&b.theta)
        .then_with(|| exact_angle_cmp(a.point, b.point))
        .then_with(|| a.point.norm2().cmp(&b.point.norm2()))
}

fn upper_half(p: LatticePoint) -> bool {
    p.y > 0 || (p.y == 0 && p.x > 0)
}

fn exact_angle_cmp(a: LatticePoint, b: LatticePoint) -> Ordering {
    let (ha, hb) = (upper_half(a), upper_half(b));
    if ha != hb {
        return if ha { Ordering::Less } else { Ordering::Greater };
    }
    let cross = a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128;
    0.cmp(&cross)
}

/// Shifted polar coordinates `(r, θ)` of a lattice point relative to the
/// circle of radius `R`. `r` uses `(n - R²)/(√n + R)` with `n - R²` formed
/// in compensated arithmetic.
pub fn polar(point: LatticePoint, radius: f64) -> Result<(f64, f64)> {
    if point.x == 0 && point.y == 0 {
        return Err(Error::domain("polar coordinates of the origin are undefined"));
    }
    let n = point.norm2();
    Ok(polar_unchecked(point, n, radius))
}

#[inline]
fn polar_unchecked(point: LatticePoint, n: i64, radius: f64) -> (f64, f64) {
    let diff = 0.0 - numeric::r2_minus_int(radius, n as i128);
    let r = diff / ((n as f64).sqrt() + radius);
    let mut theta = (point.y as f64).atan2(point.x as f64);
    if theta < 0.0 {
        theta += TAU;
    }
    if theta >= TAU {
        theta = 0.0;
    }
    (r, theta)
}

/// Enumerates `Γ_R` with a band scan over `x`, sorted by angle.
pub fn enumerate_gamma(radius: f64) -> Result<GammaList> {
    if !radius.is_finite() || radius <= HALF_WIDTH {
        return Err(Error::domain(format!("radius must exceed 1/√2, got {radius}")));
    }
    if radius > MAX_RADIUS {
        return Err(Error::RadiusTooLarge { radius, limit: MAX_RADIUS });
    }
    let (n_min, n_max) = norm2_bounds(radius);
    let x_max = (n_max as u64).isqrt() as i64;

    let bands: Vec<Vec<LatticePoint>> = (-x_max..=x_max)
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            let hi = n_max - x * x;
            if hi < 0 {
                return out;
            }
            let y_max = (hi as u64).isqrt() as i64;
            let lo = n_min - x * x;
            if lo <= 0 {
                out.extend((-y_max..=y_max).map(|y| LatticePoint::new(x, y)));
            } else {
                let y_min = ceil_sqrt(lo);
                if y_min <= y_max {
                    out.extend((-y_max..=-y_min).map(|y| LatticePoint::new(x, y)));
                    out.extend((y_min..=y_max).map(|y| LatticePoint::new(x, y)));
                }
            }
            out
        })
        .collect();

    let mut points: Vec<AnnulusPoint> = bands
        .into_iter()
        .flatten()
        .map(|p| {
            let n = p.norm2();
            let (r, theta) = polar_unchecked(p, n, radius);
            AnnulusPoint { point: p, norm: (n as f64).sqrt(), r, theta, index: 0 }
        })
        .collect();
    points.par_sort_unstable_by(angular_cmp);
    for (i, p) in points.iter_mut().enumerate() {
        p.index = i + 1;
        debug_assert!(p.r.abs() < HALF_WIDTH);
    }
    Ok(GammaList { radius, points })
}

/// Number of points with angle in `[theta1, theta2)` modulo `2π` and, when
/// given, `r ∈ I`.
///
/// A window with `theta2 < theta1` wraps through `2π`; a window of length
/// `2π` or more is the full circle.
pub fn sector_count(gamma: &GammaList, theta1: f64, theta2: f64, radial: Option<&IntervalSpec>) -> usize {
    let width = if theta2 >= theta1 { theta2 - theta1 } else { (theta2 - theta1).rem_euclid(TAU) };
    let mut count = 0;
    gamma.for_each_in_arc(theta1, width, |i| {
        if radial.is_none_or(|iv| iv.contains(gamma.points[i].r)) {
            count += 1;
        }
    });
    count
}

/// Circular successive-gap statistics of the angular order.
#[derive(Debug, Clone)]
pub struct NeighborStats {
    pub max_gap_times_r: f64,
    pub min_gap_times_r2: f64,
    pub max_neighbor_distance: f64,
    /// Gaps scaled by `R²`, sorted ascending.
    scaled_gaps: Vec<f64>,
}

impl NeighborStats {
    /// Fraction of indices `j` with `θ_{j+1} - θ_j <= C/R²`.
    pub fn frac_small_gaps(&self, c: f64) -> f64 {
        let n = self.scaled_gaps.partition_point(|&g| g <= c);
        n as f64 / self.scaled_gaps.len() as f64
    }
}

pub fn neighbor_stats(gamma: &GammaList) -> Result<NeighborStats> {
    let k = gamma.k();
    if k < 2 {
        return Err(Error::domain(format!("need at least two points, have {k}")));
    }
    let r = gamma.radius;
    let pts = &gamma.points;
    let mut scaled = Vec::with_capacity(k);
    let mut max_gap: f64 = 0.0;
    let mut max_dist: f64 = 0.0;
    for j in 0..k {
        let a = &pts[j];
        let b = &pts[(j + 1) % k];
        let gap = (b.theta - a.theta).rem_euclid(TAU);
        max_gap = max_gap.max(gap);
        scaled.push(gap * r * r);
        let d = b.point - a.point;
        max_dist = max_dist.max((d.norm2() as f64).sqrt());
    }
    scaled.sort_by(f64::total_cmp);
    Ok(NeighborStats {
        max_gap_times_r: max_gap * r,
        min_gap_times_r2: scaled[0],
        max_neighbor_distance: max_dist,
        scaled_gaps: scaled,
    })
}
