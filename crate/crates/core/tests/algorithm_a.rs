//! The breadth-first sweep against a literal transcription of the nested-loop forest algorithm.

use mc_mosaic::config::{sample_clocks_with, RankedConfig};
use mc_mosaic::walk::sweep;
use mc_mosaic::{breadth_first_forest, WeightedConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Literal {
    parent: Vec<Option<usize>>,
    y: Vec<f64>,
}

/// Ranks `0..len` in clock order; parents and `Y` are reported by rank.
fn literal(rc: &RankedConfig, q: f64) -> Literal {
    let len = rc.len();
    let pos: Vec<f64> = rc.clock.iter().map(|c| c / q).collect();
    let mut parent = vec![None; len];
    let mut y: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < len {
        y.push(rc.mass[i]);
        let k = y.len() - 1;
        let start = pos[i];
        let mut prev_end = start;
        let mut end = start + rc.mass[i];
        let mut j = i;
        while i <= j && i < len {
            for r in (j + 1)..len {
                if pos[r] > prev_end && pos[r] <= end {
                    parent[r] = Some(i);
                    y[k] += rc.mass[r];
                    j += 1;
                }
            }
            i += 1;
            if i <= j && i < len {
                prev_end = end;
                end += rc.mass[i];
            }
        }
    }
    Literal { parent, y }
}

fn instance(rng: &mut ChaCha8Rng) -> (WeightedConfig, mc_mosaic::ClockAssignment, f64) {
    let len = rng.random_range(1..=12);
    let masses: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..3.0)).collect();
    let config = WeightedConfig::new(masses).unwrap();
    let clocks = sample_clocks_with(&config, rng);
    let q = rng.random_range(0.05..4.0);
    (config, clocks, q)
}

#[test]
fn sweep_matches_nested_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5000 {
        let (config, clocks, q) = instance(&mut rng);
        let rc = RankedConfig::new(&config, &clocks);
        let lit = literal(&rc, q);
        let sw = sweep(&rc, q).unwrap();
        assert_eq!(lit.parent, sw.parent);
        let lengths = sw.decomposition.lengths();
        assert_eq!(lit.y.len(), lengths.len());
        for (a, b) in lit.y.iter().zip(&lengths) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn forest_labels_match_nested_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let (config, clocks, q) = instance(&mut rng);
        let rc = RankedConfig::new(&config, &clocks);
        let lit = literal(&rc, q);
        let (forest, y) = breadth_first_forest(&config, &clocks, q).unwrap();
        for r in 0..rc.len() {
            assert_eq!(forest.parent[rc.vertex[r]], lit.parent[r].map(|p| rc.vertex[p]));
        }
        assert_eq!(forest.roots.len(), lit.y.len());
        assert_eq!(y.len(), lit.y.len());
    }
}

#[test]
fn two_unit_example() {
    // x = (2, 1), clocks (1.0, 3.5): heard at q = 2.5 / 2
    let config = WeightedConfig::new(vec![2.0, 1.0]).unwrap();
    let clocks = mc_mosaic::ClockAssignment::from_xi(&config, vec![1.0, 3.5]).unwrap();
    let rc = RankedConfig::new(&config, &clocks);
    assert_eq!(literal(&rc, 1.0).y, vec![2.0, 1.0]);
    assert_eq!(literal(&rc, 1.3).y, vec![3.0]);
    assert_eq!(sweep(&rc, 1.3).unwrap().parent, vec![None, Some(0)]);
}
