//! Randomized property tests for the structural invariants of the core
//! algorithms.

use comwb_core::exclusion::{asep_step, AsepParams, ParticleConfig};
use comwb_core::foursquare::{log_prob_exact, w_q_log, QuadrantCounts};
use comwb_core::ginibre::densities::{o1_density, r1_density, r2_density, Method};
use comwb_core::kacwalk::{kac_step, OrthoMatrix};
use comwb_core::lis::{binary_walk_lis, lis_witness, patience_sort, Mode};
use comwb_core::mallows::{
    inversions, mallows_log_pmf, sample_mallows_fy, sample_uniform_fy, Permutation,
};
use comwb_core::qcomb::{log_q_factorial, q_integer};
use comwb_core::spectra::{kolmogorov_distance, Esd};
use comwb_core::stream::derive_stream;
use num_complex::Complex64;
use proptest::prelude::*;

/// O(n²) reference for the longest strictly-increasing subsequence length.
fn lis_reference(seq: &[f64]) -> usize {
    let mut best = vec![1usize; seq.len()];
    for i in 0..seq.len() {
        for j in 0..i {
            if seq[j] < seq[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn lnds_reference(seq: &[f64]) -> usize {
    let mut best = vec![1usize; seq.len()];
    for i in 0..seq.len() {
        for j in 0..i {
            if seq[j] <= seq[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

proptest! {
    #[test]
    fn patience_matches_quadratic_reference(seq in prop::collection::vec(-50i32..50, 1..60)) {
        let vals: Vec<f64> = seq.iter().map(|&v| v as f64).collect();
        let (strict, state) = patience_sort(&vals, Mode::Strict).unwrap();
        prop_assert_eq!(strict, lis_reference(&vals));
        let (lax, _) = patience_sort(&vals, Mode::Lax).unwrap();
        prop_assert_eq!(lax, lnds_reference(&vals));
        // The witness is a valid strictly increasing subsequence of length l.
        let w = lis_witness(&state);
        prop_assert_eq!(w.len(), strict);
        prop_assert!(w.windows(2).all(|p| p[0] < p[1] && vals[p[0]] < vals[p[1]]));
    }

    #[test]
    fn binary_walk_lis_matches_patience(bits in prop::collection::vec(0u8..2, 1..80)) {
        let vals: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
        let (lax, _) = patience_sort(&vals, Mode::Lax).unwrap();
        prop_assert_eq!(binary_walk_lis(&bits), lax);
    }

    #[test]
    fn mallows_sample_is_permutation_with_valid_pmf(
        n in 1usize..30,
        q in 0.05f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = derive_stream(seed, 0);
        let p = sample_mallows_fy(n, q, &mut rng).unwrap();
        prop_assert_eq!(p.len(), n);
        let mut seen = vec![false; n];
        for &v in p.as_slice() {
            prop_assert!(v >= 1 && v as usize <= n && !seen[v as usize - 1]);
            seen[v as usize - 1] = true;
        }
        // inversions within [0, n(n−1)/2] and the pmf is a valid log-probability.
        let inv = inversions(&p);
        prop_assert!(inv <= (n as u64) * (n as u64 - 1) / 2);
        let lp = mallows_log_pmf(&p, q).unwrap();
        prop_assert!(lp <= 1e-12 && lp.is_finite());
    }

    #[test]
    fn uniform_sample_is_permutation(n in 1usize..50, seed in any::<u64>()) {
        let mut rng = derive_stream(seed, 1);
        let p = sample_uniform_fy(n, &mut rng);
        let mut sorted: Vec<u32> = p.as_slice().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (1..=n as u32).collect::<Vec<_>>());
    }

    #[test]
    fn asep_conserves_particles_and_stays_binary(
        n in 2usize..40,
        q in 0.05f64..1.0,
        steps in 1usize..200,
        seed in any::<u64>(),
    ) {
        let mut rng = derive_stream(seed, 2);
        let n = n * 2;
        let mut cfg = ParticleConfig::balanced_shuffled(n, &mut rng).unwrap();
        let count = cfg.particle_count();
        let params = AsepParams::new(q).unwrap();
        for _ in 0..steps {
            asep_step(&mut cfg, &params, &mut rng);
        }
        prop_assert_eq!(cfg.particle_count(), count);
        prop_assert!(cfg.occupancy().iter().all(|&x| x <= 1));
    }

    #[test]
    fn kac_steps_preserve_orthogonality(n in 2usize..20, steps in 1usize..300, seed in any::<u64>()) {
        let mut rng = derive_stream(seed, 3);
        let mut g = OrthoMatrix::identity(n);
        for _ in 0..steps {
            kac_step(&mut g, &mut rng);
        }
        prop_assert!(g.ortho_defect() < 1e-10);
    }

    #[test]
    fn q_factorial_ratio_is_q_integer(n in 2u64..60, q in 0.05f64..0.999) {
        let ratio = (log_q_factorial(n, q).unwrap() - log_q_factorial(n - 1, q).unwrap()).exp();
        let qi = q_integer(n, q).unwrap();
        prop_assert!((ratio / qi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kolmogorov_distance_is_a_bounded_metric(
        a in prop::collection::vec(-10.0f64..10.0, 1..30),
        b in prop::collection::vec(-10.0f64..10.0, 1..30),
    ) {
        let (fa, fb) = (Esd::new(a.clone()), Esd::new(b.clone()));
        let d = kolmogorov_distance(&fa, &fb);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - kolmogorov_distance(&fb, &fa)).abs() < 1e-15);
        prop_assert_eq!(kolmogorov_distance(&fa, &Esd::new(a.clone())), 0.0);
    }

    #[test]
    fn ginibre_densities_are_nonnegative_and_dominated(
        n in 2u64..40,
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
    ) {
        let z = Complex64::new(re, im);
        let r1 = r1_density(n, z, Method::ClosedForm).unwrap();
        let o1 = o1_density(n, z, Method::ClosedForm).unwrap();
        prop_assert!(r1 >= 0.0 && o1 >= 0.0);
        prop_assert!(o1 >= r1 - 1e-13);
        let (r2, _) = r2_density(n, z, Complex64::new(0.1, -0.2)).unwrap();
        prop_assert!(r2 >= 0.0);
    }

    #[test]
    fn four_square_law_is_subnormalized(
        c in prop::collection::vec(1u64..8, 4),
        s in 0.1f64..0.9,
        t in 0.1f64..0.9,
        q in 0.05f64..1.0,
    ) {
        let counts = QuadrantCounts::from_split([c[0], c[1], c[2], c[3]], s, t).unwrap();
        // W_1 = 1 and the weight factor is log-finite for q in (0, 1].
        prop_assert!((w_q_log(&counts, 1.0).unwrap()).abs() < 1e-12);
        prop_assert!(w_q_log(&counts, q).unwrap().is_finite());
        prop_assert!(log_prob_exact(&counts, q).unwrap().is_finite());
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), idx in 0u64..1000) {
        use rand::Rng;
        let mut a = derive_stream(seed, idx);
        let mut b = derive_stream(seed, idx);
        for _ in 0..50 {
            prop_assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn mallows_pmf_normalizes(n in 1usize..6, q in 0.1f64..1.0) {
        let total: f64 = comwb_core::mallows::exact_distribution(n, q)
            .unwrap()
            .values()
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn permutation_rejects_non_bijections() {
    assert!(Permutation::new(vec![1, 1, 3]).is_err());
    assert!(Permutation::new(vec![0, 1]).is_err());
    assert!(Permutation::new(vec![2, 3]).is_err());
}
