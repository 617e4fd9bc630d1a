//! Fourier transforms of interval indicators, the sector variance constant
//! `D(I)`, and narrow-sector count checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalSpec;
use crate::lattice::{sector_count, GammaList};
use crate::numeric::{pairwise_sum, tree_reduce};
use crate::{cal_k, HALF_WIDTH, TAU};

use std::f64::consts::{FRAC_PI_2, PI};

/// `χ̂_I(ξ) = ∫_a^b e^{-2πitξ} dt`.
pub fn chi_hat(interval: &IntervalSpec, xi: f64) -> Complex64 {
    let len = interval.len();
    let phase = Complex64::from_polar(1.0, -PI * (interval.a + interval.b) * xi);
    let amp = if xi.abs() < 1e-12 {
        let u = PI * len * xi;
        len * (1.0 - u * u / 6.0)
    } else {
        (PI * len * xi).sin() / (PI * xi)
    };
    phase * amp
}

/// `|χ̂_I(ξ)|²`.
fn chi_hat_sq(len: f64, xi: f64) -> f64 {
    if xi.abs() < 1e-12 {
        return len * len;
    }
    let s = (PI * len * xi).sin() / (PI * xi);
    s * s
}

/// `r₂(n) = #{(a, b) ∈ ℤ² : a² + b² = n}`, from `4·(d₁(n) - d₃(n))`.
pub fn r2(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut d1: i64 = 0;
    let mut d3: i64 = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            for e in [d, n / d] {
                match e % 4 {
                    1 => d1 += 1,
                    3 => d3 += 1,
                    _ => {}
                }
            }
            if d * d == n {
                // counted twice above
                match d % 4 {
                    1 => d1 -= 1,
                    3 => d3 -= 1,
                    _ => {}
                }
            }
        }
        d += 1;
    }
    (4 * (d1 - d3)) as u64
}

/// `r₂(n)` for `0 <= n <= max` by a divisor sieve.
pub fn r2_table(max: usize) -> Vec<u32> {
    let mut chi = vec![0i32; max + 1];
    for d in (1..=max).step_by(2) {
        let s = if d % 4 == 1 { 1 } else { -1 };
        for m in (d..=max).step_by(d) {
            chi[m] += s;
        }
    }
    let mut out: Vec<u32> = chi.into_iter().map(|c| 4 * c as u32).collect();
    if max > 0 || out.len() == 1 {
        out[0] = 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DTruncation {
    pub lambda_max: f64,
    pub value: f64,
    /// Upper bound on the omitted terms `‖λ‖ > lambda_max`.
    pub tail_bound: f64,
}

/// Bound on `(1/2π²)·Σ_{‖λ‖ > Λ} |χ̂_I(‖λ‖)|²/‖λ‖`.
///
/// With `|χ̂_I(ξ)| <= 1/(π|ξ|)` the tail is at most `(1/2π⁴)·Σ ‖λ‖⁻³`.
/// Comparing each term with the integral of `‖x‖⁻³` over the unit square
/// at `λ` gives `Σ_{‖λ‖>Λ} ‖λ‖⁻³ <= 2π·(1 + 1/(√2Λ))³/(Λ - 1/√2)`.
pub fn d_tail_bound(lambda_max: f64) -> f64 {
    let grow = (1.0 + HALF_WIDTH / lambda_max).powi(3);
    TAU * grow / (lambda_max - HALF_WIDTH) / (2.0 * PI.powi(4))
}

/// Truncation of `D(I) = (1/2π²)·Σ_{λ ≠ 0} |χ̂_I(‖λ‖)|²/‖λ‖` to
/// `‖λ‖ <= lambda_max`, summed over norms `n` with weight `r₂(n)`.
pub fn d_of_i(interval: &IntervalSpec, lambda_max: f64) -> Result<DTruncation> {
    if !(lambda_max >= 10.0) {
        return Err(Error::domain(format!("lambda_max must be at least 10, got {lambda_max}")));
    }
    let n_max = (lambda_max * lambda_max).floor() as usize;
    if n_max > 400_000_000 {
        return Err(Error::domain(format!("lambda_max = {lambda_max} too large")));
    }
    let table = r2_table(n_max);
    let len = interval.len();
    let chunk = 1 << 16;
    let parts: Vec<f64> = (0..n_max.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = (c * chunk).max(1);
            let hi = ((c + 1) * chunk).min(n_max + 1);
            let terms: Vec<f64> = (lo..hi)
                .filter(|&n| table[n] != 0)
                .map(|n| {
                    let xi = (n as f64).sqrt();
                    table[n] as f64 * chi_hat_sq(len, xi) / xi
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let sum = tree_reduce(parts, |a, b| a + b).unwrap_or(0.0);
    Ok(DTruncation { lambda_max, value: sum / (2.0 * PI * PI), tail_bound: d_tail_bound(lambda_max) })
}

/// Grid angles `g·(π/2)/grid` for `g < grid`.
pub fn theta_grid(grid: usize) -> impl Iterator<Item = f64> {
    (0..grid).map(move |g| g as f64 * (FRAC_PI_2 / grid as f64))
}

/// `N_θ = #{λ : r_λ ∈ I, θ_λ ∈ [θ, θ + width)}` for every grid angle.
pub fn sector_counts_on_grid(gamma: &GammaList, interval: &IntervalSpec, width: f64, grid: usize) -> Vec<usize> {
    let pts = gamma.points();
    theta_grid(grid)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&theta| {
            let mut n = 0;
            gamma.for_each_in_arc(theta, width, |i| {
                if interval.contains(pts[i].r) {
                    n += 1;
                }
            });
            n
        })
        .collect()
}

/// Default grid size: resolves window transitions, `max(10³, ⌈4𝒦·width⌉)`
/// capped at `10⁶`.
pub fn default_grid(radius: f64, width: f64) -> usize {
    ((4.0 * cal_k(radius) * width).ceil() as usize).clamp(1000, 1_000_000)
}

fn check_width(radius: f64, width: f64) -> Result<()> {
    let lo = 1.0 / radius;
    let hi = radius.powf(-0.9);
    if !(width >= lo * (1.0 - 1e-12) && width <= hi * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("width {width} outside [R^-1, R^-9/10] = [{lo}, {hi}]")));
    }
    Ok(())
}

/// Mean of `(N_θ - R·width·|I|)²` over the grid.
pub fn sector_variance_from_counts(radius: f64, interval: &IntervalSpec, width: f64, counts: &[usize]) -> f64 {
    let main = radius * width * interval.len();
    let dev: Vec<f64> = counts.iter().map(|&n| (n as f64 - main).powi(2)).collect();
    pairwise_sum(&dev) / counts.len() as f64
}

pub fn sector_variance_empirical(gamma: &GammaList, interval: &IntervalSpec, width: f64, grid: usize) -> Result<f64> {
    interval.check_radial()?;
    check_width(gamma.radius(), width)?;
    if grid < 1000 {
        return Err(Error::domain(format!("grid must be at least 1000, got {grid}")));
    }
    let counts = sector_counts_on_grid(gamma, interval, width, grid);
    Ok(sector_variance_from_counts(gamma.radius(), interval, width, &counts))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorVarianceReport {
    pub radius: f64,
    pub width: f64,
    pub interval: IntervalSpec,
    pub grid: usize,
    pub empirical: f64,
    /// `R·width·D(I)`.
    pub predicted: f64,
    pub ratio: f64,
    pub d: DTruncation,
}

pub fn sector_variance_report(
    gamma: &GammaList,
    interval: &IntervalSpec,
    width: f64,
    grid: usize,
    lambda_max: f64,
) -> Result<SectorVarianceReport> {
    let empirical = sector_variance_empirical(gamma, interval, width, grid)?;
    let d = d_of_i(interval, lambda_max)?;
    let predicted = gamma.radius() * width * d.value;
    Ok(SectorVarianceReport {
        radius: gamma.radius(),
        width,
        interval: *interval,
        grid,
        empirical,
        predicted,
        ratio: empirical / predicted,
        d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquidistCount {
    pub count: usize,
    pub main_term: f64,
    /// `|count - main_term| / ((d - c)^{1/3}·R^{2/3})`.
    pub normalized_error: f64,
}

/// Points with `θ ∈ [c, d)` and `r ∈ I` against the area main term.
pub fn equidist_count_check(gamma: &GammaList, c: f64, d: f64, interval: &IntervalSpec) -> Result<EquidistCount> {
    interval.check_radial()?;
    let radius = gamma.radius();
    let len = d - c;
    if !(len >= radius.powf(-0.5) && len <= TAU) {
        return Err(Error::domain(format!("window length {len} outside [R^-1/2, 2π]")));
    }
    let count = sector_count(gamma, c, d, Some(interval));
    let main_term = cal_k(radius) * (len / TAU) * (interval.len() / std::f64::consts::SQRT_2);
    Ok(EquidistCount {
        count,
        main_term,
        normalized_error: (count as f64 - main_term).abs() / (len.cbrt() * radius.powf(2.0 / 3.0)),
    })
}
