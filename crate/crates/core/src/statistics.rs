//! Empirical estimators over the annulus points: moments of the area
//! series, circular autocorrelations, angular pair sums and distribution
//! tests against the limit law.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::geometry::{a_inf, area_disc_square};
use crate::interval::IntervalSpec;
use crate::lattice::GammaList;
use crate::numeric::{pairwise_sum, tree_reduce};
use crate::sampling::{batch_rng, sample_g, BATCH};
use crate::{HALF_WIDTH, TAU};

/// Areas `𝒜_R(λ_j)` in angular order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AreaSeries {
    pub radius: f64,
    pub values: Vec<f64>,
}

impl AreaSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn circular(&self, j: usize) -> f64 {
        self.values[j % self.values.len()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    /// Zero for deterministic sums.
    pub stderr: f64,
    pub n: usize,
}

pub fn area_series(gamma: &GammaList) -> AreaSeries {
    let radius = gamma.radius();
    let values = gamma.points().par_iter().map(|p| area_disc_square(p.point, radius)).collect();
    AreaSeries { radius, values }
}

/// Mean and population variance.
pub fn expectation_variance(series: &AreaSeries) -> Result<(f64, f64)> {
    let k = series.len();
    if k < 2 {
        return Err(Error::domain(format!("need at least two values, got {k}")));
    }
    let mean = pairwise_sum(&series.values) / k as f64;
    let dev: Vec<f64> = series.values.iter().map(|v| (v - mean) * (v - mean)).collect();
    Ok((mean, pairwise_sum(&dev) / k as f64))
}

/// `(1/K)·Σ_j (A_j·A_{j+k} - 1/4)` with indices modulo `K`.
pub fn empirical_ck(series: &AreaSeries, k: usize) -> Result<CorrelationEstimate> {
    let n = series.len();
    if k >= n {
        return Err(Error::domain(format!("k = {k} must be below K = {n}")));
    }
    let prods: Vec<f64> = (0..n).map(|j| series.values[j] * series.circular(j + k)).collect();
    Ok(CorrelationEstimate { value: pairwise_sum(&prods) / n as f64 - 0.25, stderr: 0.0, n })
}

/// `(1/L)·Σ_{k=1..L} C_k(R)`.
pub fn ck_average(series: &AreaSeries, l: usize) -> Result<f64> {
    if l == 0 || l >= series.len() {
        return Err(Error::domain(format!("L must be in 1..K, got {l}")));
    }
    let mut vals = Vec::with_capacity(l);
    for k in 1..=l {
        vals.push(empirical_ck(series, k)?.value);
    }
    Ok(pairwise_sum(&vals) / l as f64)
}

/// The pair window `[k/𝒦, (k + 2π)/𝒦)` as `(start, width)`.
pub fn pair_window(gamma: &GammaList, k: usize) -> (f64, f64) {
    let ck = gamma.cal_k();
    (k as f64 / ck, TAU / ck)
}

/// `(θ_λ - θ_μ) mod 2π ∈ [start, start + width)`, with the difference
/// reduced into `[0, 2π)` and the window taken literally, so a window
/// starting beyond `2π` is empty.
#[inline]
pub fn in_pair_window(theta_lambda: f64, theta_mu: f64, start: f64, width: f64) -> bool {
    let d = (theta_lambda - theta_mu).rem_euclid(TAU);
    d >= start && d < start + width
}

/// Calls `f(m)` for every `m` such that `(λ_i, λ_m)` is in the pair window.
fn for_each_pair_of<F: FnMut(usize)>(gamma: &GammaList, i: usize, start: f64, width: f64, mut f: F) {
    const MARGIN: f64 = 1e-9;
    let theta = gamma.points()[i].theta;
    if start >= TAU {
        return;
    }
    if width + 2.0 * MARGIN >= TAU {
        for m in 0..gamma.k() {
            if in_pair_window(theta, gamma.points()[m].theta, start, width) {
                f(m);
            }
        }
        return;
    }
    // θ_μ ∈ (θ_λ - start - width, θ_λ - start], widened, then filtered.
    gamma.for_each_in_arc(theta - start - width - MARGIN, width + 2.0 * MARGIN, |m| {
        if in_pair_window(theta, gamma.points()[m].theta, start, width) {
            f(m);
        }
    });
}

const SWEEP_CHUNK: usize = 4096;

/// Deterministic parallel sum of `term(i)` over `0..n`.
fn chunked_sum<F: Fn(usize) -> f64 + Sync>(n: usize, term: F) -> f64 {
    let parts: Vec<f64> = (0..n.div_ceil(SWEEP_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * SWEEP_CHUNK;
            let hi = (lo + SWEEP_CHUNK).min(n);
            let vals: Vec<f64> = (lo..hi).map(&term).collect();
            pairwise_sum(&vals)
        })
        .collect();
    tree_reduce(parts, |a, b| a + b).unwrap_or(0.0)
}

fn check_series(gamma: &GammaList, series: &AreaSeries) -> Result<()> {
    if gamma.k() != series.len() {
        return Err(Error::domain("area series does not match the point set"));
    }
    Ok(())
}

/// `(1/𝒦)·Σ (A_λ - 1/2)(A_μ - 1/2)` over ordered pairs in the pair window.
pub fn mixed_corr_sum(gamma: &GammaList, series: &AreaSeries, k: usize) -> Result<f64> {
    check_series(gamma, series)?;
    let k_max = gamma.radius().sqrt().floor() as usize;
    if k == 0 || k > k_max {
        return Err(Error::domain(format!("k must be in 1..={k_max}, got {k}")));
    }
    let (start, width) = pair_window(gamma, k);
    let total = chunked_sum(gamma.k(), |i| {
        let a = series.values[i] - 0.5;
        let mut s = 0.0;
        for_each_pair_of(gamma, i, start, width, |m| s += series.values[m] - 0.5);
        a * s
    });
    Ok(total / gamma.cal_k())
}

/// `(1/𝒦)·#{(λ, μ) in the pair window : r_λ ∈ I1, r_μ ∈ I2, θ_λ ∈ J}`.
pub fn pair_corr_count(gamma: &GammaList, k: usize, i1: &IntervalSpec, i2: &IntervalSpec, j: &IntervalSpec) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    i1.check_radial()?;
    i2.check_radial()?;
    j.check_angular()?;
    let (start, width) = pair_window(gamma, k);
    let pts = gamma.points();
    let total = chunked_sum(gamma.k(), |i| {
        let p = &pts[i];
        if !i1.contains(p.r) || !j.contains_angle(p.theta) {
            return 0.0;
        }
        let mut c = 0usize;
        for_each_pair_of(gamma, i, start, width, |m| {
            if i2.contains(pts[m].r) {
                c += 1;
            }
        });
        c as f64
    });
    Ok(total / gamma.cal_k())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointMoments {
    pub mean1: f64,
    pub mean2: f64,
    pub product_mean: f64,
}

/// Moments of `(A_j, A_{j+k})` averaged over all `j` and `k ∈ [M, M+L]`.
pub fn windowed_joint_moments(series: &AreaSeries, m: usize, l: usize) -> Result<JointMoments> {
    let n = series.len();
    if m == 0 || (l as f64) < (m as f64).sqrt() || l > m || m + l >= n {
        return Err(Error::domain(format!("need M >= 1, √M <= L <= M and M + L < K; got M = {m}, L = {l}, K = {n}")));
    }
    let count = (n * (l + 1)) as f64;
    let window = |j: usize| -> f64 { (m..=m + l).map(|k| series.circular(j + k)).sum() };
    let mean1 = pairwise_sum(&series.values) / n as f64;
    let mean2 = chunked_sum(n, window) / count;
    let product_mean = chunked_sum(n, |j| series.values[j] * window(j)) / count;
    Ok(JointMoments { mean1, mean2, product_mean })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of `counts` against equal expected cell counts.
pub fn chi_square_uniform(counts: &[u64]) -> Option<ChiSquare> {
    let total: u64 = counts.iter().sum();
    if total == 0 || counts.len() < 2 {
        return None;
    }
    let expected = total as f64 / counts.len() as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = counts.len() - 1;
    let dist = ChiSquared::new(dof as f64).ok()?;
    Some(ChiSquare { statistic, dof, p_value: dist.sf(statistic) })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairHistogram {
    pub k: usize,
    pub bins: usize,
    /// Row-major over `(r_λ, θ_λ, r_μ)`, `bins³` cells.
    pub counts: Vec<u64>,
    pub pairs: u64,
    /// `None` when there are no pairs.
    pub chi_square: Option<ChiSquare>,
    /// KS distance of the `r_λ` marginal from the uniform law; `None` when empty.
    pub r_marginal_ks: Option<f64>,
}

fn bin_of(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    (((x - lo) / (hi - lo) * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

/// Histogram of `(r_λ, θ_λ, r_μ)` over pairs in the window for `k`.
pub fn pair_joint_hist(gamma: &GammaList, k: usize, bins: usize) -> Result<PairHistogram> {
    if !(4..=64).contains(&bins) {
        return Err(Error::domain(format!("bins must be in 4..=64, got {bins}")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let (start, width) = pair_window(gamma, k);
    let pts = gamma.points();
    let n = gamma.k();
    let parts: Vec<(Vec<u64>, Vec<f64>)> = (0..n.div_ceil(SWEEP_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; bins * bins * bins];
            let mut rs = Vec::new();
            for i in c * SWEEP_CHUNK..((c + 1) * SWEEP_CHUNK).min(n) {
                let p = &pts[i];
                let br = bin_of(p.r, -HALF_WIDTH, HALF_WIDTH, bins);
                let bt = bin_of(p.theta, 0.0, TAU, bins);
                for_each_pair_of(gamma, i, start, width, |m| {
                    let bm = bin_of(pts[m].r, -HALF_WIDTH, HALF_WIDTH, bins);
                    counts[(br * bins + bt) * bins + bm] += 1;
                    rs.push(p.r);
                });
            }
            (counts, rs)
        })
        .collect();
    let mut counts = vec![0u64; bins * bins * bins];
    let mut rs = Vec::new();
    for (c, r) in parts {
        counts.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        rs.extend(r);
    }
    let pairs = counts.iter().sum();
    let r_marginal_ks = if rs.is_empty() { None } else { Some(ks_uniform(&mut rs, -HALF_WIDTH, HALF_WIDTH)) };
    Ok(PairHistogram { k, bins, chi_square: chi_square_uniform(&counts), counts, pairs, r_marginal_ks })
}

/// Chi-square of the `(r, θ)` pairs of all annulus points on a
/// `bins_r × bins_theta` grid over `G` against the uniform law.
pub fn polar_uniformity_chi2(gamma: &GammaList, bins_r: usize, bins_theta: usize) -> Result<ChiSquare> {
    if bins_r == 0 || bins_theta == 0 {
        return Err(Error::domain("bin counts must be positive"));
    }
    let mut counts = vec![0u64; bins_r * bins_theta];
    for p in gamma.points() {
        counts[bin_of(p.r, -HALF_WIDTH, HALF_WIDTH, bins_r) * bins_theta + bin_of(p.theta, 0.0, TAU, bins_theta)] += 1;
    }
    chi_square_uniform(&counts).ok_or_else(|| Error::domain("no points to test"))
}

/// Kolmogorov-Smirnov distance of a sample from the uniform law on `[lo, hi]`.
/// Sorts `xs` in place.
pub fn ks_uniform(xs: &mut [f64], lo: f64, hi: f64) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Two-sample Kolmogorov-Smirnov distance `sup |F_a - F_b|`, with ties
/// (including atoms shared by both samples) handled exactly. Sorts both
/// inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `n` values of `𝒜_∞(r, θ)` at uniform points of `G`.
pub fn sample_a_inf(n: usize, seed: u64) -> Vec<f64> {
    (0..n.div_ceil(BATCH))
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = batch_rng(seed, b as u64);
            let len = BATCH.min(n - b * BATCH);
            (0..len)
                .map(move |_| {
                    let (r, theta) = sample_g(&mut rng);
                    a_inf(r, theta).expect("sampled r lies in G")
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Two-sample KS distance between the area series and `n_model` samples of
/// the limit law.
pub fn limit_distribution_test(series: &AreaSeries, n_model: usize, seed: u64) -> Result<f64> {
    if n_model < 100_000 {
        return Err(Error::domain(format!("n_model must be at least 10^5, got {n_model}")));
    }
    if series.is_empty() {
        return Err(Error::domain("empty area series"));
    }
    let mut model = sample_a_inf(n_model, seed);
    let mut data = series.values.clone();
    Ok(ks_two_sample(&mut data, &mut model))
}
