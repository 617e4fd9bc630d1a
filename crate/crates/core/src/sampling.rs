//! Seeded sampling of the parameter rectangle `G = [-1/√2, 1/√2] × [0, 2π)`
//! and low-discrepancy grids for the deterministic property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{HALF_WIDTH, TAU};

/// Number of equal θ-strata used by the stratified samplers.
pub const THETA_STRATA: usize = 256;

/// Samples per batch. Every batch owns one generator stream, so results do
/// not depend on how batches are spread across threads.
pub const BATCH: usize = 4096;

/// The generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Stratum of global sample index `i`.
#[inline]
pub fn stratum_of(i: usize) -> usize {
    i % THETA_STRATA
}

/// A uniform point of `G` whose θ lies in stratum `stratum`.
#[inline]
pub fn sample_g_stratified<R: Rng>(rng: &mut R, stratum: usize) -> (f64, f64) {
    let r = (rng.random::<f64>() * 2.0 - 1.0) * HALF_WIDTH;
    let u: f64 = rng.random();
    let theta = (stratum as f64 + u) * (TAU / THETA_STRATA as f64);
    (r, theta.min(TAU * (1.0 - f64::EPSILON)))
}

/// A uniform point of `G`.
#[inline]
pub fn sample_g<R: Rng>(rng: &mut R) -> (f64, f64) {
    let r = (rng.random::<f64>() * 2.0 - 1.0) * HALF_WIDTH;
    let theta = rng.random::<f64>() * TAU;
    (r, theta)
}

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    x
}

/// The first `n` points (skipping index 0) of the 2-D Halton sequence
/// mapped onto `G`.
pub fn halton_g(n: usize) -> Vec<(f64, f64)> {
    (1..=n as u64)
        .map(|i| {
            let r = (radical_inverse(i, 2) * 2.0 - 1.0) * HALF_WIDTH;
            let theta = radical_inverse(i, 3) * TAU;
            (r, theta)
        })
        .collect()
}
