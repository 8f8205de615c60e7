use approx::assert_relative_eq;
use bead_lab::budget::Budget;
use bead_lab::mc::sample_uniform_config;
use bead_lab::ringset::{colex_rank, colex_unrank};
use bead_lab::torus::BeadConfiguration;
use bead_lab::{Complex64, LogComplex};
use proptest::prelude::*;

/// One bead per string: every set of distinct coordinates interlaces.
fn single_bead_config() -> impl Strategy<Value = BeadConfiguration> {
    (2usize..=9).prop_flat_map(|n| {
        prop::collection::btree_set(1u32..10_000, n)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(move |coords| {
                let strings = coords.into_iter().map(|c| vec![c as f64 / 10_000.0]).collect();
                BeadConfiguration::new(n, 1, strings).expect("well formed")
            })
    })
}

proptest! {
    #[test]
    fn single_bead_invariants(cfg in single_bead_config()) {
        prop_assert!(cfg.is_valid());
        let n = cfg.n();
        let ell = cfg.occupation_number().unwrap();
        prop_assert!((1..n).contains(&ell));
        prop_assert_eq!(cfg.occupation_path().unwrap().occupation_number(), ell);
        let tilt = cfg.tilt().unwrap();
        prop_assert!((tilt.tau * n as f64 - ell as f64).abs() < 1e-9);
        prop_assert_eq!(cfg.reflect().occupation_number().unwrap(), n - ell);
    }

    #[test]
    fn rotation_keeps_occupation_number(cfg in single_bead_config(), shift in 0.0f64..1.0) {
        let rotated = cfg.rotate(shift);
        prop_assume!(rotated.is_valid());
        prop_assert_eq!(rotated.occupation_number().unwrap(), cfg.occupation_number().unwrap());
    }

    #[test]
    fn sampled_configurations_have_requested_occupation(seed in any::<u64>(), n in 2usize..=4, k in 1usize..=2) {
        let ell = 1 + (seed as usize % (n - 1));
        let out = sample_uniform_config(n, k, ell, seed, &Budget::default()).unwrap();
        prop_assert!(out.config.is_valid());
        prop_assert_eq!(out.config.occupation_number().unwrap(), ell);
        prop_assert_eq!(out.config.occupation_path().unwrap().occupation_number(), ell);
    }

    #[test]
    fn colex_round_trip(bits in 1u64..(1 << 20)) {
        let k = bits.count_ones();
        prop_assert_eq!(colex_unrank(colex_rank(bits), k), bits);
    }

    #[test]
    fn log_sum_matches_direct_sum(parts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..40)) {
        let zs: Vec<Complex64> = parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let direct: Complex64 = zs.iter().sum();
        prop_assume!(direct.norm() > 1e-3);
        let logs: Vec<LogComplex> = zs.iter().map(|&z| LogComplex::from_complex(z)).collect();
        let got = LogComplex::sum(&logs).to_complex();
        let scale: f64 = zs.iter().map(|z| z.norm()).sum();
        assert_relative_eq!(got.re, direct.re, epsilon = 1e-12 * scale);
        assert_relative_eq!(got.im, direct.im, epsilon = 1e-12 * scale);
    }
}
