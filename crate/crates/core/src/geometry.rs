//! Square/disc intersection areas.
//!
//! [`area_disc_square`] is the exact area `𝒜_R(λ)` of the unit square
//! centred at a lattice point that lies inside the disc of radius `R`.
//! [`a_inf`] is its straight-boundary limit `𝒜_∞(r, θ)`: the part of a unit
//! square tilted by `θ` and centred at `(r, 0)` lying left of the `y` axis.
//! [`a_inf_oracle`] recomputes the same quantity by polygon clipping.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{GammaList, LatticePoint};
use crate::numeric::{gauss_integrate, gauss_legendre, r2_minus_quarter};
use crate::HALF_WIDTH;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

/// `φ - sin φ` without cancellation for small `φ`.
fn phi_minus_sin(phi: f64) -> f64 {
    if phi < 0.1 {
        let p2 = phi * phi;
        let p3 = p2 * phi;
        p3 * (1.0 / 6.0 - p2 * (1.0 / 120.0 - p2 * (1.0 / 5040.0 - p2 * (1.0 / 362_880.0 - p2 / 39_916_800.0))))
    } else {
        phi - phi.sin()
    }
}

/// Area of the circular segment cut from a disc of radius `radius` by a
/// chord of length `chord`.
fn segment_area(radius: f64, chord: f64) -> f64 {
    if chord <= 0.0 {
        return 0.0;
    }
    let phi = 2.0 * (chord / (2.0 * radius)).min(1.0).asin();
    0.5 * radius * radius * phi_minus_sin(phi)
}

/// Area of `[x0, x1] × [p, q]` inside the disc of radius `radius`, for
/// `0 <= x0 < x1` and `0 <= p < q`. All four coordinates are passed in half-units (`2·x0`, …)
/// so that `R² - x² - y²` can be formed without rounding the squares.
///
/// On `[p, q]` the boundary is the decreasing graph `x = X(y) = √(R² - y²)`.
/// The area splits into a full-width part (`X >= x1`), a trapezoid under
/// the chord of the remaining arc, and the circular segment above that
/// chord. Everything is computed in coordinates local to the box.
fn box_area(radius: f64, x0h: i64, x1h: i64, ph: i64, qh: i64) -> f64 {
    let s = |xh: i64, yh: i64| r2_minus_quarter(radius, xh as i128 * xh as i128 + yh as i128 * yh as i128);
    let x0 = x0h as f64 * 0.5;
    let p = ph as f64 * 0.5;
    let width = (x1h - x0h) as f64 * 0.5;
    let alpha_q = (qh - ph) as f64 * 0.5;

    let s0p = s(x0h, ph);
    if s0p <= 0.0 {
        return 0.0;
    }
    let y_b = s(x0h, 0).sqrt();
    let alpha_b = s0p / (y_b + p);

    let s1p = s(x1h, ph);
    let alpha_a = if s1p > 0.0 {
        let y_a = s(x1h, 0).sqrt();
        s1p / (y_a + p)
    } else {
        0.0
    };
    if alpha_a >= alpha_q {
        return alpha_q * width;
    }

    let d_start = if s1p > 0.0 { width } else { s0p / (s(0, ph).sqrt() + x0) };
    let (alpha_end, d_end) = if alpha_b <= alpha_q {
        (alpha_b, 0.0)
    } else {
        (alpha_q, s(x0h, qh) / (s(0, qh).sqrt() + x0))
    };
    let run = alpha_end - alpha_a;
    let trapezoid = 0.5 * run * (d_start + d_end);
    let chord = run.hypot(d_start - d_end);
    alpha_a * width + trapezoid + segment_area(radius, chord)
}

/// Exact area of `S(λ) ∩ B(R)`: the unit square centred at `point`
/// intersected with the closed disc of radius `radius` about the origin.
///
/// The square is first moved into the octant `x >= y >= 0` using the
/// symmetries shared by the disc and the grid.
pub fn area_disc_square(point: LatticePoint, radius: f64) -> f64 {
    if !(radius > 0.0) {
        return 0.0;
    }
    let (mut cx, mut cy) = (point.x.abs(), point.y.abs());
    if cy > cx {
        std::mem::swap(&mut cx, &mut cy);
    }
    let a = if cx == 0 {
        4.0 * box_area(radius, 0, 1, 0, 1)
    } else if cy == 0 {
        2.0 * box_area(radius, 2 * cx - 1, 2 * cx + 1, 0, 1)
    } else {
        box_area(radius, 2 * cx - 1, 2 * cx + 1, 2 * cy - 1, 2 * cy + 1)
    };
    a.clamp(0.0, 1.0)
}

fn check_r(r: f64) -> Result<()> {
    // One part in 1e12 of slack absorbs rounding in callers that build r
    // from projections.
    if !(r.abs() <= HALF_WIDTH * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("r = {r} outside [-1/√2, 1/√2]")));
    }
    Ok(())
}

/// Maps any angle to `[0, π/4]` using the quarter-turn symmetry of the
/// square and `𝒜_∞(r, θ) = 𝒜_∞(r, π/2 - θ)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(FRAC_PI_2);
    if t > FRAC_PI_4 {
        FRAC_PI_2 - t
    } else {
        t
    }
}

/// Branch points of `r ↦ 𝒜_∞(r, θ)` for a reduced angle `t ∈ [0, π/4]`:
/// `(sin(t+π/4)/√2, cos(t+π/4)/√2)`.
fn branch_points(t: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    (0.5 * (s + c), 0.5 * (c - s))
}

fn a_inf_reduced(r: f64, t: f64) -> f64 {
    let (hi, lo) = branch_points(t);
    if r < -hi {
        1.0
    } else if r < -lo {
        let d = r + hi;
        1.0 - d * d / (2.0 * t).sin()
    } else if r < lo {
        0.5 * t.tan() - (r - lo) / t.cos()
    } else if r < hi {
        let d = hi - r;
        d * d / (2.0 * t).sin()
    } else {
        0.0
    }
}

/// `𝒜_∞(r, θ)` from the five-branch closed form.
pub fn a_inf(r: f64, theta: f64) -> Result<f64> {
    check_r(r)?;
    Ok(a_inf_reduced(r, reduce_angle(theta)).clamp(0.0, 1.0))
}

/// Half-plane clipping of a convex polygon against `x <= 0`.
fn clip_left(poly: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (ina, inb) = (a.0 <= 0.0, b.0 <= 0.0);
        if ina {
            out.push(a);
        }
        if ina != inb {
            let s = a.0 / (a.0 - b.0);
            out.push((0.0, a.1 + s * (b.1 - a.1)));
        }
    }
    out
}

fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        s += x1 * y2 - x2 * y1;
    }
    0.5 * s.abs()
}

/// `𝒜_∞(r, θ)` by clipping the tilted square against the left half-plane.
pub fn a_inf_oracle(r: f64, theta: f64) -> Result<f64> {
    check_r(r)?;
    let (s, c) = theta.sin_cos();
    let square: Vec<(f64, f64)> = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
        .iter()
        .map(|&(u, v)| (r + c * u - s * v, s * u + c * v))
        .collect();
    Ok(shoelace(&clip_left(&square)))
}

/// `E[𝒜_∞ | θ] = (1/√2)·∫ 𝒜_∞(r, θ) dr`, integrating each branch with an
/// `n_quad`-point Gauss rule.
pub fn cond_expectation(theta: f64, n_quad: usize) -> Result<f64> {
    if n_quad < 16 {
        return Err(Error::domain(format!("n_quad must be at least 16, got {n_quad}")));
    }
    let rule = gauss_legendre(n_quad);
    Ok(integrate_over_r(reduce_angle(theta), &rule, |a| a) / SQRT_2)
}

/// `∫_{-1/√2}^{1/√2} g(𝒜_∞(r, t)) dr`, piecewise over the branches.
fn integrate_over_r<G: Fn(f64) -> f64>(t: f64, rule: &(Vec<f64>, Vec<f64>), g: G) -> f64 {
    let (hi, lo) = branch_points(t);
    let cuts = [-HALF_WIDTH, -hi, -lo, lo, hi, HALF_WIDTH];
    cuts.windows(2)
        .map(|w| gauss_integrate(|r| g(a_inf_reduced(r, t)), w[0], w[1], rule))
        .sum()
}

/// `c₀ = 1/4 - (1/(2π√2))·(4/15 + 2·ln(1+√2)/3 + 2√2/15)`, the variance of
/// `𝒜_∞` under the uniform law on `G`.
pub fn c0_constant() -> f64 {
    let bracket = 4.0 / 15.0 + 2.0 * (1.0 + SQRT_2).ln() / 3.0 + 2.0 * SQRT_2 / 15.0;
    0.25 - bracket / (2.0 * PI * SQRT_2)
}

/// `Var(𝒜_∞)` by two-dimensional quadrature of the second moment over
/// `θ ∈ [0, π/4]`, with `n_theta` Gauss nodes in `θ`.
pub fn a_inf_variance_quadrature(n_theta: usize) -> f64 {
    let r_rule = gauss_legendre(8);
    let t_rule = gauss_legendre(n_theta);
    let second = gauss_integrate(|t| integrate_over_r(t, &r_rule, |a| a * a) / SQRT_2, 0.0, FRAC_PI_4, &t_rule)
        / FRAC_PI_4;
    second - 0.25
}

/// `max_λ |𝒜_R(λ) - 𝒜_∞(r_λ, θ_λ)|` over `Γ_R`.
pub fn a_r_vs_a_inf_gap(gamma: &GammaList) -> Result<f64> {
    if gamma.k() == 0 {
        return Err(Error::domain("empty point set"));
    }
    let radius = gamma.radius();
    gamma
        .points()
        .par_iter()
        .map(|p| Ok((area_disc_square(p.point, radius) - a_inf(p.r, p.theta)?).abs()))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
