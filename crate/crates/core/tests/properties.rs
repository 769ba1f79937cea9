use mc_mosaic::config::{sample_clocks_with, RankedConfig};
use mc_mosaic::walk::{decompose, sweep};
use mc_mosaic::{breadth_first_forest, build_f1, run_trajectory, WalkPath, WeightedConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(masses: Vec<f64>, seed: u64) -> (WeightedConfig, mc_mosaic::ClockAssignment) {
    let config = WeightedConfig::new(masses).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clocks = sample_clocks_with(&config, &mut rng);
    (config, clocks)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mass_is_conserved(masses in prop::collection::vec(0.01f64..5.0, 1..16), seed: u64, q in 0.01f64..6.0) {
        let (config, clocks) = setup(masses, seed);
        let total: f64 = config.masses().iter().sum();
        let (_, y) = breadth_first_forest(&config, &clocks, q).unwrap();
        let sum: f64 = y.iter().sum();
        prop_assert!((sum - total).abs() <= 1e-9 * total);
        let path = WalkPath::from_clocks(&config, &clocks, q).unwrap();
        let d = decompose(&path);
        let len: f64 = d.excursions.iter().map(|e| e.length()).sum();
        prop_assert!((len - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn excursions_are_trees(masses in prop::collection::vec(0.01f64..5.0, 1..16), seed: u64, q in 0.01f64..6.0) {
        let (config, clocks) = setup(masses, seed);
        let rc = RankedConfig::new(&config, &clocks);
        let sw = sweep(&rc, q).unwrap();
        let exc = &sw.decomposition.excursions;
        prop_assert_eq!(exc[0].first, 0);
        prop_assert_eq!(exc.last().unwrap().last, rc.len() - 1);
        for w in exc.windows(2) {
            prop_assert_eq!(w[0].last + 1, w[1].first);
        }
        for e in exc {
            prop_assert!(sw.parent[e.first].is_none());
            for r in (e.first + 1)..=e.last {
                let p = sw.parent[r].unwrap();
                prop_assert!(p >= e.first && p < r);
                prop_assert_eq!(sw.depth[r], sw.depth[p] + 1);
            }
        }
    }

    #[test]
    fn partitions_coarsen_and_agree(
        masses in prop::collection::vec(0.01f64..5.0, 1..12),
        seed: u64,
        q1 in 0.01f64..3.0,
        dq in 0.0f64..3.0,
    ) {
        let (config, clocks) = setup(masses, seed);
        let q2 = q1 + dq;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let t = run_trajectory(&config, &clocks, &mut rng, q2).unwrap();
        let f1 = build_f1(&t);
        let p1 = t.partition_at(q1);
        let p2 = t.partition_at(q2);
        for b in &p1.blocks {
            prop_assert!(p2.blocks.iter().any(|c| b.iter().all(|v| c.contains(v))));
        }
        for q in [q1, q2] {
            let (f0, _) = breadth_first_forest(&config, &clocks, q).unwrap();
            prop_assert_eq!(&f0.partition(), &t.partition_at(q));
            prop_assert_eq!(&f1.partition_at(q), &t.partition_at(q));
        }
    }
}
