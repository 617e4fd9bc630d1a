//! The tilted semi-infinite rectangle model.
//!
//! For `(r, θ) ∈ G` the strip `ℛ_{r,θ}` has its long side along `e^{iθ}`
//! and width `√2` across `e^{i(θ+π/2)}`. Its lattice points `κ_1, κ_2, …`
//! (origin excluded) are ordered by the long-side projection `t`, and
//! `ρ_ℓ` is the short-side projection of `κ_ℓ`, normalised so that the
//! origin itself sits at short coordinate `r`:
//!
//! ```text
//! t = ⟨κ, e^{iθ}⟩,    ρ = ⟨κ, e^{i(θ+π/2)}⟩ + r,    |ρ| <= 1/√2.
//! ```
//!
//! `𝒜_{∞,k}(r, θ) = 𝒜_∞(ρ_k, θ)` and the model correlation is
//! `C̃_k = E[𝒜_∞(r, θ)·𝒜_{∞,k}(r, θ)] - 1/4` under the uniform law on `G`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{a_inf, area_disc_square};
use crate::lattice::{GammaList, LatticePoint};
use crate::numeric::tree_reduce;
use crate::sampling::{batch_rng, sample_g_stratified, stratum_of, BATCH, THETA_STRATA};
use crate::statistics::CorrelationEstimate;
use crate::{HALF_WIDTH, TAU};

use std::f64::consts::FRAC_PI_2;

/// Largest `k` accepted by [`rect_points`].
pub const MAX_K: usize = 1_000_000;

/// Largest long-side extent scanned before giving up.
pub const MAX_T: f64 = 1e9;

/// Points closer than this to a long side of the strip are flagged.
pub const EDGE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub kappa: LatticePoint,
    /// Projection on the long side, `> 0`.
    pub t: f64,
    /// Projection on the short side, in `[-1/√2, 1/√2]`.
    pub rho: f64,
    /// Within [`EDGE_EPS`] of a long side.
    pub near_edge: bool,
}

#[derive(Debug, Clone)]
pub struct ModelSequence {
    pub r: f64,
    pub theta: f64,
    /// Sorted by `t`, then `rho`, then `kappa`.
    pub points: Vec<ModelPoint>,
    /// Every lattice point of the strip with `0 < t <= truncation_t` is present.
    pub truncation_t: f64,
}

/// Visits the lattice points `x` of a tilted rectangle: with
/// `e = (cos a, sin a)` and `f = (-sin a, cos a)`, the points satisfying
/// `⟨x - o, e⟩ ∈ t_range` and `⟨x - o, f⟩ ∈ [s_lo, s_hi]`.
///
/// `t_range` is `(t_lo, t_hi]`, or `[t_lo, t_hi]` when `closed_lo` is set.
/// The callback receives the point with its `(t, s)` coordinates.
pub(crate) fn lattice_in_tilted_rect<F: FnMut(LatticePoint, f64, f64)>(
    origin: (f64, f64),
    angle: f64,
    (t_lo, t_hi): (f64, f64),
    closed_lo: bool,
    (s_lo, s_hi): (f64, f64),
    mut visit: F,
) {
    let (sa, ca) = angle.sin_cos();
    let (ox, oy) = origin;
    let corners = [(t_lo, s_lo), (t_lo, s_hi), (t_hi, s_lo), (t_hi, s_hi)].map(|(t, s)| (ox + t * ca - s * sa, oy + t * sa + s * ca));
    let mut check = |x: i64, y: i64| {
        let dx = x as f64 - ox;
        let dy = y as f64 - oy;
        let t = dx * ca + dy * sa;
        let s = -dx * sa + dy * ca;
        let t_ok = if closed_lo { t >= t_lo } else { t > t_lo } && t <= t_hi;
        if t_ok && s >= s_lo && s <= s_hi {
            visit(LatticePoint::new(x, y), t, s);
        }
    };
    if ca.abs() >= sa.abs() {
        let x_min = corners.iter().map(|c| c.0).fold(f64::INFINITY, f64::min).floor() as i64;
        let x_max = corners.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
        for x in x_min..=x_max {
            // s = -(x - ox)·sa + (y - oy)·ca
            let base = (x as f64 - ox) * sa;
            let y1 = oy + (s_lo + base) / ca;
            let y2 = oy + (s_hi + base) / ca;
            let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
            for y in lo.floor() as i64..=hi.ceil() as i64 {
                check(x, y);
            }
        }
    } else {
        let y_min = corners.iter().map(|c| c.1).fold(f64::INFINITY, f64::min).floor() as i64;
        let y_max = corners.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
        for y in y_min..=y_max {
            // s = -(x - ox)·sa + (y - oy)·ca
            let base = (y as f64 - oy) * ca;
            let x1 = ox + (base - s_lo) / sa;
            let x2 = ox + (base - s_hi) / sa;
            let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
            for x in lo.floor() as i64..=hi.ceil() as i64 {
                check(x, y);
            }
        }
    }
}

fn model_order(a: &ModelPoint, b: &ModelPoint) -> std::cmp::Ordering {
    a.t.total_cmp(&b.t).then_with(|| a.rho.total_cmp(&b.rho)).then_with(|| a.kappa.cmp(&b.kappa))
}

fn check_params(r: f64, theta: f64) -> Result<()> {
    if !(r.abs() <= HALF_WIDTH) {
        return Err(Error::domain(format!("r = {r} outside [-1/√2, 1/√2]")));
    }
    if !theta.is_finite() {
        return Err(Error::domain("θ must be finite"));
    }
    Ok(())
}

/// The first (at least) `k` lattice points of `ℛ_{r,θ}` in model order.
///
/// Scans successive windows `(T_prev, T]` of the long coordinate, starting
/// from `T = max(4, √2·k)` (about `2k` expected points) and doubling.
pub fn rect_points(r: f64, theta: f64, k: usize) -> Result<ModelSequence> {
    check_params(r, theta)?;
    if k == 0 || k > MAX_K {
        return Err(Error::domain(format!("k must be in 1..={MAX_K}, got {k}")));
    }
    // The strip origin: short coordinate 0 sits at -r·f.
    let (sa, ca) = theta.sin_cos();
    let origin = (r * sa, -r * ca);
    let mut points: Vec<ModelPoint> = Vec::with_capacity(2 * k + 8);
    let mut t_prev = 0.0;
    let mut t_cur = (std::f64::consts::SQRT_2 * k as f64).max(4.0);
    loop {
        let start = points.len();
        lattice_in_tilted_rect(origin, theta, (t_prev, t_cur), false, (-HALF_WIDTH, HALF_WIDTH), |p, t, s| {
            if p.x == 0 && p.y == 0 {
                return;
            }
            points.push(ModelPoint { kappa: p, t, rho: s, near_edge: HALF_WIDTH - s.abs() <= EDGE_EPS });
        });
        points[start..].sort_unstable_by(model_order);
        if points.len() >= k {
            return Ok(ModelSequence { r, theta, points, truncation_t: t_cur });
        }
        if t_cur >= MAX_T {
            return Err(Error::ModelTruncation { wanted: k, found: points.len(), t_max: t_cur });
        }
        t_prev = t_cur;
        t_cur = (2.0 * t_cur).min(MAX_T);
    }
}

/// `ρ_k(r, θ)`.
pub fn rho_k(r: f64, theta: f64, k: usize) -> Result<f64> {
    Ok(rect_points(r, theta, k)?.points[k - 1].rho)
}

/// `𝒜_{∞,k}(r, θ)`; `k = 0` is `𝒜_∞(r, θ)` itself.
pub fn a_inf_k(r: f64, theta: f64, k: usize) -> Result<f64> {
    if k == 0 {
        check_params(r, theta)?;
        return a_inf(r, theta);
    }
    a_inf(rho_k(r, theta, k)?, theta)
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: f64,
    sumsq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    fn merge(self, o: Moments) -> Moments {
        Moments { n: self.n + o.n, sum: self.sum + o.sum, sumsq: self.sumsq + o.sumsq }
    }
}

/// Monte Carlo estimate of `C̃_k` for each `k` in `ks` from one shared
/// sample of `(r, θ)`, stratified over θ.
///
/// The sample stream depends only on `seed`, so the estimate for a given
/// `k` is the same whichever other `k` values are requested alongside it,
/// and whatever the thread count. Samples whose `κ_k` lies within
/// [`EDGE_EPS`] of the strip boundary are dropped for that `k`.
pub fn model_ck_many(ks: &[usize], n_samples: usize, seed: u64) -> Result<Vec<CorrelationEstimate>> {
    if n_samples < 10_000 {
        return Err(Error::domain(format!("n_samples must be at least 10^4, got {n_samples}")));
    }
    let k_max = ks.iter().copied().max().unwrap_or(0);
    if k_max > MAX_K {
        return Err(Error::domain(format!("k must be at most {MAX_K}")));
    }
    let n_batches = n_samples.div_ceil(BATCH);
    let per_batch: Vec<Vec<Moments>> = (0..n_batches)
        .into_par_iter()
        .map(|b| -> Result<Vec<Moments>> {
            let mut rng = batch_rng(seed, b as u64);
            let mut acc = vec![Moments::default(); ks.len() * THETA_STRATA];
            let lo = b * BATCH;
            let hi = ((b + 1) * BATCH).min(n_samples);
            for i in lo..hi {
                let stratum = stratum_of(i);
                let (r, theta) = sample_g_stratified(&mut rng, stratum);
                let base = a_inf(r, theta)?;
                let seq = if k_max > 0 { Some(rect_points(r, theta, k_max)?) } else { None };
                for (slot, &k) in ks.iter().enumerate() {
                    let other = if k == 0 {
                        base
                    } else {
                        let p = &seq.as_ref().expect("k_max > 0").points[k - 1];
                        if p.near_edge {
                            continue;
                        }
                        a_inf(p.rho, theta)?
                    };
                    acc[slot * THETA_STRATA + stratum].push(base * other - 0.25);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total = tree_reduce(per_batch, |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect())
        .expect("at least one batch");

    Ok(ks
        .iter()
        .enumerate()
        .map(|(slot, _)| {
            let strata = &total[slot * THETA_STRATA..(slot + 1) * THETA_STRATA];
            let h = THETA_STRATA as f64;
            let mut value = 0.0;
            let mut var = 0.0;
            let mut n = 0;
            for m in strata {
                let cnt = m.n as f64;
                if m.n == 0 {
                    continue;
                }
                let mean = m.sum / cnt;
                value += mean / h;
                if m.n > 1 {
                    let s2 = ((m.sumsq - cnt * mean * mean) / (cnt - 1.0)).max(0.0);
                    var += s2 / cnt / (h * h);
                }
                n += m.n as usize;
            }
            CorrelationEstimate { value, stderr: var.sqrt(), n }
        })
        .collect())
}

/// Monte Carlo estimate of `C̃_k`; `k = 0` estimates `Var(𝒜_∞) = c₀`.
pub fn model_ck(k: usize, n_samples: usize, seed: u64) -> Result<CorrelationEstimate> {
    Ok(model_ck_many(&[k], n_samples, seed)?.remove(0))
}

/// Model parameters whose strip reproduces the neighbourhood of an annulus
/// point at shifted polar coordinates `(r, θ)`.
///
/// Conjugating the lattice maps the strip `ℛ_{r, -θ-π/2}` onto the tangent
/// strip at angle `θ`, with its long side pointing in the direction of
/// increasing polar angle and `ρ` equal to the shifted radius. Since
/// `𝒜_∞(ρ, -θ-π/2) = 𝒜_∞(ρ, θ)`, the model values carry over unchanged.
pub fn annulus_to_model(r: f64, theta: f64) -> (f64, f64) {
    (r, (-theta - FRAC_PI_2).rem_euclid(TAU))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KPrimeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    /// Number of `j` with `k' < k`.
    pub below_k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectDiagnostic {
    pub k: usize,
    pub cprime: f64,
    pub frac_set_mismatch: f64,
    /// Among `j` whose sets match, the fraction whose orders differ.
    pub frac_order_mismatch: f64,
    /// `max |𝒜_R(λ_{j+k''}) - 𝒜_{∞,k''}(r_j, θ_j)|` over matched `j` and `0 <= k'' <= k'`.
    pub max_area_gap: f64,
    /// The same maximum restricted to `0 <= k'' <= k`.
    pub max_area_gap_to_k: f64,
    pub kprime_stats: KPrimeStats,
}

#[derive(Default)]
struct DiagAcc {
    set_mismatch: usize,
    order_mismatch: usize,
    matched: usize,
    gap: f64,
    gap_to_k: f64,
    kp_min: usize,
    kp_max: usize,
    kp_sum: usize,
    below_k: usize,
}

impl DiagAcc {
    fn merge(self, o: DiagAcc) -> DiagAcc {
        DiagAcc {
            set_mismatch: self.set_mismatch + o.set_mismatch,
            order_mismatch: self.order_mismatch + o.order_mismatch,
            matched: self.matched + o.matched,
            gap: self.gap.max(o.gap),
            gap_to_k: self.gap_to_k.max(o.gap_to_k),
            kp_min: self.kp_min.min(o.kp_min),
            kp_max: self.kp_max.max(o.kp_max),
            kp_sum: self.kp_sum + o.kp_sum,
            below_k: self.below_k + o.below_k,
        }
    }
}

/// Compares, around every `λ_j`, the annulus sector with the approximating
/// rectangle `[0, C'k] × [-1/√2, 1/√2]` laid along the tangent at `R·e^{iθ_j}`.
///
/// For each `j`, `k'` is the number of rectangle lattice points minus one.
/// The rectangle set is compared with `{λ_j, …, λ_{j+k'}}`, then the
/// long-side order with the angular order, and on matching `j` the areas
/// `𝒜_R(λ_{j+k''})` with the model values `𝒜_{∞,k''}(r_j, θ_j)`.
pub fn rect_approx_diagnostic(gamma: &GammaList, k: usize, cprime: f64) -> Result<RectDiagnostic> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if !(cprime > 0.0) {
        return Err(Error::domain(format!("C' must be positive, got {cprime}")));
    }
    let big_k = gamma.k();
    if big_k == 0 {
        return Err(Error::domain("empty point set"));
    }
    let radius = gamma.radius();
    let pts = gamma.points();
    let areas: Vec<f64> = pts.par_iter().map(|p| area_disc_square(p.point, radius)).collect();
    let long = cprime * k as f64;

    let chunk = 1024;
    let parts: Vec<DiagAcc> = (0..big_k.div_ceil(chunk))
        .into_par_iter()
        .map(|c| -> Result<DiagAcc> {
            let mut acc = DiagAcc { kp_min: usize::MAX, ..Default::default() };
            let mut rect: Vec<(f64, LatticePoint)> = Vec::new();
            for j in c * chunk..((c + 1) * chunk).min(big_k) {
                let lam = &pts[j];
                rect.clear();
                // Coordinates are taken relative to λ_j itself, which has
                // t = 0 and short coordinate -r_j, so that λ_j is never lost
                // to rounding at the t = 0 edge.
                lattice_in_tilted_rect(
                    (lam.point.x as f64, lam.point.y as f64),
                    lam.theta + FRAC_PI_2,
                    (0.0, long),
                    true,
                    (lam.r - HALF_WIDTH, lam.r + HALF_WIDTH),
                    |p, t, _| rect.push((t, p)),
                );
                let kp = rect.len().saturating_sub(1);
                acc.kp_min = acc.kp_min.min(kp);
                acc.kp_max = acc.kp_max.max(kp);
                acc.kp_sum += kp;
                if kp < k {
                    acc.below_k += 1;
                }
                if rect.is_empty() || rect.len() > big_k {
                    acc.set_mismatch += 1;
                    continue;
                }
                let sector: Vec<LatticePoint> = (0..rect.len()).map(|i| gamma.circular(j + i).point).collect();
                let mut a: Vec<LatticePoint> = rect.iter().map(|x| x.1).collect();
                let mut b = sector.clone();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    acc.set_mismatch += 1;
                    continue;
                }
                rect.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
                if rect.iter().map(|x| x.1).ne(sector.iter().copied()) {
                    acc.order_mismatch += 1;
                    continue;
                }
                acc.matched += 1;
                let (mr, mt) = annulus_to_model(lam.r, lam.theta);
                let seq = if kp > 0 { Some(rect_points(mr, mt, kp)?) } else { None };
                for kk in 0..=kp {
                    let model = if kk == 0 {
                        a_inf(lam.r, lam.theta)?
                    } else {
                        a_inf(seq.as_ref().expect("kp > 0").points[kk - 1].rho, mt)?
                    };
                    let gap = (areas[(j + kk) % big_k] - model).abs();
                    acc.gap = acc.gap.max(gap);
                    if kk <= k {
                        acc.gap_to_k = acc.gap_to_k.max(gap);
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let acc = tree_reduce(parts, DiagAcc::merge).expect("non-empty");
    let with_set = big_k - acc.set_mismatch;
    Ok(RectDiagnostic {
        k,
        cprime,
        frac_set_mismatch: acc.set_mismatch as f64 / big_k as f64,
        frac_order_mismatch: if with_set > 0 { acc.order_mismatch as f64 / with_set as f64 } else { 0.0 },
        max_area_gap: acc.gap,
        max_area_gap_to_k: acc.gap_to_k,
        kprime_stats: KPrimeStats {
            min: acc.kp_min,
            max: acc.kp_max,
            mean: acc.kp_sum as f64 / big_k as f64,
            below_k: acc.below_k,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn axis_direction_collapses() {
        let s = rect_points(0.0, 0.0, 3).unwrap();
        let first: Vec<_> = s.points[..3].iter().map(|p| (p.kappa, p.rho)).collect();
        assert_eq!(
            first,
            vec![(LatticePoint::new(1, 0), 0.0), (LatticePoint::new(2, 0), 0.0), (LatticePoint::new(3, 0), 0.0)]
        );
        assert_eq!(rho_k(0.0, 0.0, 5).unwrap(), 0.0);
    }

    #[test]
    fn thirty_degrees() {
        let s = rect_points(0.0, PI / 6.0, 2).unwrap();
        let p1 = s.points[0];
        assert_eq!(p1.kappa, LatticePoint::new(1, 0));
        assert!((p1.t - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p1.rho + 0.5).abs() < 1e-15);
        let p2 = s.points[1];
        assert_eq!(p2.kappa, LatticePoint::new(1, 1));
        assert!((p2.t - (3f64.sqrt() + 1.0) / 2.0).abs() < 1e-15);
        assert!((p2.rho - (3f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn a_inf_k_cases() {
        for k in 1..=5 {
            assert_eq!(a_inf_k(0.0, 0.0, k).unwrap(), 0.5);
            // Only the row through the origin fits, and the axis-aligned
            // square at ρ = 0.2 keeps 0.3 of its area on the left.
            assert!((a_inf_k(0.2, 0.0, k).unwrap() - 0.3).abs() < 1e-15);
        }
        // At r = 0.4 the row below also fits, at ρ = -0.6; it comes first
        // among equal t.
        let s = rect_points(0.4, 0.0, 2).unwrap();
        assert_eq!(s.points[0].kappa, LatticePoint::new(1, -1));
        assert!((s.points[0].rho + 0.6).abs() < 1e-15);
        assert!((s.points[1].rho - 0.4).abs() < 1e-15);
        assert_eq!(a_inf_k(0.3, 1.1, 0).unwrap(), a_inf(0.3, 1.1).unwrap());
        let expect = a_inf(-0.5, PI / 6.0).unwrap();
        assert!((a_inf_k(0.0, PI / 6.0, 1).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn origin_sits_at_r() {
        // A lattice point at t = 0 is excluded, but its neighbours along the
        // long side at θ = 0 carry ρ = r.
        let s = rect_points(0.25, 0.0, 4).unwrap();
        assert!(s.points.iter().take(4).all(|p| (p.rho - 0.25).abs() < 1e-15));
    }

    #[test]
    fn errors() {
        assert!(rect_points(0.9, 0.0, 1).is_err());
        assert!(rect_points(0.0, 0.0, 0).is_err());
        assert!(rect_points(0.0, f64::NAN, 1).is_err());
        assert!(model_ck(1, 100, 0).is_err());
        assert!(rect_approx_diagnostic(&crate::enumerate_gamma(10.0).unwrap(), 0, 1.0).is_err());
    }

    #[test]
    fn mapping_matches_annulus_neighbours() {
        // Around a point far from the axes, the model's ρ_1 approximates
        // the shifted radius of the next annulus point.
        let g = crate::enumerate_gamma(5000.0).unwrap();
        let j = g.k() / 7;
        let lam = g.points()[j];
        let next = g.points()[j + 1];
        let (mr, mt) = annulus_to_model(lam.r, lam.theta);
        let rho = rho_k(mr, mt, 1).unwrap();
        assert!((rho - next.r).abs() < 1e-2, "{rho} vs {}", next.r);
    }
}
