mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use annulus_core::geometry::c0_constant;
use annulus_core::model::{model_ck, model_ck_many, rect_points};
use annulus_core::statistics::ks_uniform;
use annulus_core::HALF_WIDTH;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rect_points_match_brute_force(r in -HALF_WIDTH..=HALF_WIDTH, theta in 0.0..2.0 * PI, k in 1usize..=50) {
        let seq = rect_points(r, theta, k).unwrap();
        let t_max = seq.points[k - 1].t;
        let brute = common::brute_rect(r, theta, k, t_max.ceil() as i64 + 2);
        prop_assert_eq!(brute.len(), k);
        for (p, b) in seq.points[..k].iter().zip(&brute) {
            prop_assert_eq!(p.kappa, b.0);
            prop_assert_eq!(p.t, b.1);
            prop_assert_eq!(p.rho, b.2);
        }
        for w in seq.points.windows(2) {
            prop_assert!(w[0].t <= w[1].t);
        }
        prop_assert!(seq.points.iter().all(|p| p.t > 0.0 && p.t <= seq.truncation_t && p.rho.abs() <= HALF_WIDTH));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 60, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rational_directions_give_periodic_atoms(p in 0i64..=5, q in 1i64..=5, r in -0.7f64..0.7) {
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let theta = (p as f64).atan2(q as f64);
        let n = p * p + q * q;
        let root = (n as f64).sqrt();
        // Skip the measure-zero offsets that put an atom on a long side.
        prop_assume!((-10 * n..=10 * n).all(|j| ((j as f64 / root + r).abs() - HALF_WIDTH).abs() > 1e-9));
        let seq = rect_points(r, theta, 200).unwrap();
        let rho: Vec<f64> = seq.points[..200].iter().map(|x| x.rho).collect();
        let mut distinct = rho[..100].to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let m = distinct.len();
        // ρ ∈ r + ℤ/√N, so the atoms are the j with |j/√N + r| <= 1/√2.
        let atoms = (-10 * n..=10 * n).filter(|&j| (j as f64 / root + r).abs() <= HALF_WIDTH).count();
        prop_assert!(m <= 100);
        prop_assert_eq!(m, atoms);
        prop_assert!(m <= ((2 * n) as f64).sqrt().floor() as usize + 1);
        // One point per atom in each period of length √N along the strip.
        for l in 0..100 {
            prop_assert!((rho[l] - rho[l + m]).abs() < 1e-9, "l = {l}, m = {m}");
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn rho_equidistributes_along_generic_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut good = 0;
    for _ in 0..50 {
        let theta = rng.random_range(0.0..2.0 * PI);
        let seq = rect_points(0.0, theta, 10_000).unwrap();
        let mut rho: Vec<f64> = seq.points[..10_000].iter().map(|x| x.rho).collect();
        if ks_uniform(&mut rho, -HALF_WIDTH, HALF_WIDTH) < 0.05 {
            good += 1;
        }
    }
    assert!(good >= 45, "{good} of 50");
}

#[test]
fn axis_direction_is_one_atom() {
    for k in [1, 5, 40] {
        let seq = rect_points(0.0, 0.0, k).unwrap();
        assert!(seq.points[..k].iter().all(|x| x.rho == 0.0));
        let seq = rect_points(0.0, FRAC_PI_2, k).unwrap();
        assert!(seq.points[..k].iter().all(|x| x.rho.abs() < 1e-12));
    }
}

#[test]
fn model_correlations_are_bounded() {
    let ks: Vec<usize> = vec![0, 1, 2, 3, 5, 8, 13, 50];
    for e in model_ck_many(&ks, 10_000, 5).unwrap() {
        assert!((-0.25..=0.25).contains(&e.value), "{e:?}");
        assert!(e.stderr >= 0.0);
    }
}

#[test]
fn lag_zero_recovers_c0() {
    let e = model_ck(0, 1_000_000, 42).unwrap();
    assert!((e.value - c0_constant()).abs() <= 3.0 * e.stderr, "{e:?}");
}

#[test]
fn lag_one_reference_run() {
    let e = model_ck(1, 1_000_000, 42).unwrap();
    assert!(e.stderr < 2e-3);
    assert_eq!(e.value, -0.08163351756342085);
    assert_eq!(e.stderr, 0.00019000979585007618);
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| model_ck_many(&[1, 2, 7], 50_000, 9).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    // Requesting a lag alongside others leaves its estimate unchanged.
    assert_eq!(one[2], rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap().install(|| model_ck(7, 50_000, 9).unwrap()));
}
