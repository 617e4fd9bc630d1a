//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use annulus_core::{LatticePoint, HALF_WIDTH};

/// Every lattice point of the open annulus, by a full double loop.
pub fn naive_annulus(radius: f64) -> Vec<LatticePoint> {
    let m = (radius + 1.0).ceil() as i64;
    let (lo, hi) = (radius - HALF_WIDTH, radius + HALF_WIDTH);
    let mut v = Vec::new();
    for x in -m..=m {
        for y in -m..=m {
            let n = ((x * x + y * y) as f64).sqrt();
            if lo < n && n < hi {
                v.push(LatticePoint::new(x, y));
            }
        }
    }
    v.sort();
    v
}

/// The first `k` lattice points of the strip for `(r, θ)`, found by testing
/// every point with `|a|, |b| <= bound` and sorting by `(t, ρ, κ)`.
pub fn brute_rect(r: f64, theta: f64, k: usize, bound: i64) -> Vec<(LatticePoint, f64, f64)> {
    let (sa, ca) = theta.sin_cos();
    let (ox, oy) = (r * sa, -r * ca);
    let mut v = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            if a == 0 && b == 0 {
                continue;
            }
            let (dx, dy) = (a as f64 - ox, b as f64 - oy);
            let t = dx * ca + dy * sa;
            let s = -dx * sa + dy * ca;
            if t > 0.0 && s.abs() <= HALF_WIDTH {
                v.push((LatticePoint::new(a, b), t, s));
            }
        }
    }
    v.sort_by(|p, q| p.1.total_cmp(&q.1).then(p.2.total_cmp(&q.2)).then(p.0.cmp(&q.0)));
    v.truncate(k);
    v
}
