use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use teleport_core::channel::{classify, pqr, DEFAULT_TOL};
use teleport_core::optimizer::{compass_minimize, optimize, r_grid_min};
use teleport_core::qcore::{apply_local_unitary, normalize};
use teleport_core::stationary::{derived_coefficients, k1k2, stationary_candidates};
use teleport_core::{canonicalize, CanonicalCoefficients, Complex, LocalUnitary, MeasurementBasis, OptimizerConfig};

fn general_case(rng: &mut ChaCha8Rng) -> CanonicalCoefficients {
    loop {
        let a: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.05..1.0));
        let mu = rng.gen_range(0.0..PI);
        if let Ok(c) = CanonicalCoefficients::normalized(a, mu) {
            if c.a().iter().all(|&v| v >= 0.05) && mu.sin() >= 0.05 && (c.a2() - c.a3()).abs() > 0.05 {
                return c;
            }
        }
    }
}

fn r(c: &CanonicalCoefficients, t: f64, p: f64) -> f64 {
    pqr(c, &MeasurementBasis::wrapped(t, p)).unwrap().2
}

fn angle_gap(a: &MeasurementBasis, b: &MeasurementBasis) -> f64 {
    let dp = (a.phi() - b.phi()).rem_euclid(TAU);
    (a.theta() - b.theta()).abs().max(dp.min(TAU - dp))
}

#[test]
fn interior_local_minima_are_analytic_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (nt, np) = (65usize, 128usize);
    let mut checked = 0;
    for _ in 0..25 {
        let c = general_case(&mut rng);
        let cands = stationary_candidates(&c, 1e-6).unwrap();
        let grid: Vec<f64> = (0..nt * np)
            .map(|k| r(&c, PI * (k / np) as f64 / (nt - 1) as f64, TAU * (k % np) as f64 / np as f64))
            .collect();
        for i in 1..nt - 1 {
            for j in 0..np {
                let v = grid[i * np + j];
                let neighbours = [
                    grid[(i - 1) * np + j],
                    grid[(i + 1) * np + j],
                    grid[i * np + (j + 1) % np],
                    grid[i * np + (j + np - 1) % np],
                ];
                if neighbours.iter().any(|&n| n <= v) {
                    continue;
                }
                let seed = MeasurementBasis::wrapped(PI * i as f64 / (nt - 1) as f64, TAU * j as f64 / np as f64);
                let (b, _) = compass_minimize(|t, p| r(&c, t, p), seed, 1e-12);
                let (bp, bq, _) = pqr(&c, &b).unwrap();
                if bp.min(bq) < 1e-6 || b.theta().sin() < 0.05 {
                    continue;
                }
                checked += 1;
                let hit = cands.iter().any(|s| angle_gap(&s.basis, &b) < 1e-3);
                assert!(hit, "minimum at ({}, {}) of {:?} mu={} missing from {} candidates", b.theta(), b.phi(), c.a(), c.mu(), cands.len());
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn optimizer_dominates_fine_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = OptimizerConfig::default();
    for _ in 0..6 {
        let c = general_case(&mut rng);
        let rep = optimize(&c, &cfg).unwrap();
        let fine = r_grid_min(&c, 513, 1024);
        assert!(rep.r_min <= fine.r_value + 1e-12, "{} > {}", rep.r_min, fine.r_value);
        assert!((rep.p_max - (1.0 - rep.r_min)).abs() < 1e-15);
    }
}

#[test]
fn perfect_teleportation_matches_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cfg = OptimizerConfig { grid_theta: 65, grid_phi: 128, ..OptimizerConfig::default() };
    for k in 0..200 {
        let c = if k % 2 == 0 {
            let s = rng.gen_range(0.05..(PI / 2.0));
            let h = FRAC_1_SQRT_2;
            CanonicalCoefficients::new([h * s.cos(), h * s.sin(), 0.0, 0.0, h], rng.gen_range(0.0..PI)).unwrap()
        } else {
            let a: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
            match CanonicalCoefficients::normalized(a, rng.gen_range(0.0..PI)) {
                Ok(c) if c.a0() > 0.05 => c,
                _ => continue,
            }
        };
        let perfect = classify(&c, DEFAULT_TOL).perfect_ct;
        let p_max = optimize(&c, &cfg).unwrap().p_max;
        assert_eq!(perfect, k % 2 == 0);
        assert_eq!(perfect, p_max > 1.0 - 1e-6, "{:?} mu={} p_max={}", c.a(), c.mu(), p_max);
    }
}

#[test]
fn remainder_vanishes_on_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..25 {
        let c = general_case(&mut rng);
        let dc = derived_coefficients(&c).unwrap();
        let scale: f64 = dc.c.iter().map(|v| v.abs()).sum();
        for s in stationary_candidates(&c, 1e-6).unwrap() {
            let x = c.a0() / s.basis.theta().tan();
            let (k1, k2) = k1k2(&dc, s.basis.phi());
            assert!((-x * k1 + k2).abs() < 1e-6 * scale * x.abs().max(1.0));
            assert!(s.residuals.grad_norm < 1e-6);
        }
    }
}

fn gaussian_state() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn p_max_is_local_unitary_invariant(
        amps in gaussian_state(),
        seed in any::<u64>(),
    ) {
        let Ok(s) = normalize(amps.iter().map(|&(re, im)| Complex::new(re, im)).collect()) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = s.clone();
        for q in 0..3 {
            let mut a = || rng.sample::<f64, _>(StandardNormal);
            let u = LocalUnitary::from_angles(a(), a(), a(), a());
            t = apply_local_unitary(&t, q, &u).unwrap();
        }
        let (c1, c2) = (canonicalize(&s).unwrap().coeffs, canonicalize(&t).unwrap().coeffs);
        prop_assume!(c1.a0() > 0.05);
        let cfg = OptimizerConfig { grid_theta: 65, grid_phi: 128, ..OptimizerConfig::default() };
        let (p1, p2) = (optimize(&c1, &cfg).unwrap().p_max, optimize(&c2, &cfg).unwrap().p_max);
        prop_assert!((p1 - p2).abs() < 1e-8, "{} vs {}", p1, p2);
    }
}
