//! Verification suites comparing the walk constructions with the oracles and with exact
//! identities. Each suite returns a JSON-serializable verdict; a failing suite is rerun
//! once with a fresh seed and both attempts are reported.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{sample_clocks, ClockAssignment, RankedConfig, RngStream, StreamPurpose, WeightedConfig};
use crate::dynamics::{build_f1, last_vertex_forest, run_trajectory, Trajectory};
use crate::error::{Error, Result};
use crate::graph::{pair_index, Edge, Partition};
use crate::limit::{scaling_experiment, ScalingConfig};
use crate::mosaic::{build_mosaic, orders, replay, same_excursion, slice_decomposition, validate, OrnamentedExcursion, Rule};
use crate::oracle::{exact_edge_set_law, gillespie_trajectory};
use crate::stats::{
    binomial_quantile, chi_square, chi_square_sf, chi_square_two_sample, counts, ks_test, poisson_mean_test, ALPHA,
};
use crate::surplus::{dynamic_surplus, intensity_pair, static_graph, zeta_family, SurplusVariant};
use crate::walk::{breadth_first_forest, decompose, excursion_area, sweep, WalkPath};

pub const SUITES: [&str; 10] = [
    "lemma21",
    "theorem33",
    "prop31",
    "cor32",
    "eq6",
    "monotone",
    "mosaic",
    "rate",
    "scaling",
    "determinism",
];

const EXACT_TOL: f64 = 1e-9;
const MIN_CELL: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides the suite's default replication count.
    pub reps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub seed: u64,
    pub pass: bool,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub reps: usize,
    pub attempts: Vec<Attempt>,
    #[serde(skip)]
    pub seconds: f64,
}

/// Seed for the single retry.
pub fn retry_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x2545_F491_4F6C_DD1D)
}

fn default_reps(suite: &str) -> usize {
    match suite {
        "lemma21" | "theorem33" | "cor32" | "rate" => 100_000,
        "prop31" | "eq6" | "monotone" | "mosaic" => 1000,
        "scaling" => 10_000,
        _ => 200,
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let f: fn(u64, usize) -> (bool, Value) = match name {
        "lemma21" => lemma21,
        "theorem33" => theorem33,
        "prop31" => prop31,
        "cor32" => cor32,
        "eq6" => eq6,
        "monotone" => monotone,
        "mosaic" => mosaic,
        "rate" => rate,
        "scaling" => scaling,
        "determinism" => determinism,
        other => return Err(Error::Usage(format!("unknown suite `{other}`"))),
    };
    let reps = opts.reps.unwrap_or_else(|| default_reps(name));
    let start = Instant::now();
    let (pass, details) = f(opts.seed, reps);
    let mut attempts = vec![Attempt {
        seed: opts.seed,
        pass,
        details,
    }];
    if !pass {
        let seed = retry_seed(opts.seed);
        let (pass, details) = f(seed, reps);
        attempts.push(Attempt { seed, pass, details });
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        pass: attempts.last().is_some_and(|a| a.pass),
        reps,
        attempts,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, opts)).collect()
}

fn stream(seed: u64, purpose: StreamPurpose, rep: usize) -> RngStream {
    RngStream::for_purpose(seed, purpose, rep as u64)
}

/// Random masses in `[0.1, 2.1)`, random clocks and a random `q` in `[0.05, 4.05)`.
pub fn random_instance(seed: u64, rep: usize, max_len: usize) -> (WeightedConfig, ClockAssignment, f64) {
    let mut rng = stream(seed, StreamPurpose::Fixtures, rep).rng();
    let n = rng.random_range(1..=max_len);
    let masses: Vec<f64> = (0..n).map(|_| 0.1 + 2.0 * rng.random::<f64>()).collect();
    let q = 0.05 + 4.0 * rng.random::<f64>();
    let config = WeightedConfig::new(masses).expect("positive masses");
    let clocks = sample_clocks(&config, stream(seed, StreamPurpose::Clocks, rep));
    (config, clocks, q)
}

fn random_trajectory(seed: u64, rep: usize, max_len: usize) -> (WeightedConfig, ClockAssignment, f64, Trajectory) {
    let (config, clocks, q) = random_instance(seed, rep, max_len);
    let mut rng = stream(seed, StreamPurpose::MergeEdges, rep).rng();
    let t = run_trajectory(&config, &clocks, &mut rng, q).expect("valid instance");
    (config, clocks, q, t)
}

fn chi_json(r: &crate::stats::ChiSquareResult) -> Value {
    json!({
        "statistic": r.statistic,
        "df": r.df,
        "p_value": r.p_value,
        "cells": r.cells,
        "inconclusive": r.inconclusive,
    })
}

/// Static law: walk forest plus static surplus against the exact `G(4, 1 - e^{-0.8})` edge-set law.
fn lemma21(seed: u64, reps: usize) -> (bool, Value) {
    let n = 4;
    let q: f64 = 0.8;
    let config = WeightedConfig::uniform(n, 1.0).expect("unit masses");
    let p = -(-q).exp_m1();
    let law = exact_edge_set_law(n, p).expect("n <= 6");
    let expected: BTreeMap<u64, f64> = law.into_iter().enumerate().map(|(m, p)| (m as u64, p)).collect();
    let masks: Vec<u64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let clocks = sample_clocks(&config, stream(seed, StreamPurpose::Clocks, rep));
            let mut rng = stream(seed, StreamPurpose::StaticSurplus, rep).rng();
            static_graph(&config, &clocks, q, &mut rng).expect("q > 0").edge_mask()
        })
        .collect();
    let r = chi_square(&counts(masks), &expected, MIN_CELL);
    let pass = !r.inconclusive && r.pass(ALPHA);
    (pass, json!({ "n": n, "q": q, "p": p, "chi_square": chi_json(&r) }))
}

/// Per pair: 0 absent at `q2`, 1 present at `q1`, 2 born in `(q1, q2]`.
fn edge_state_key<'a, I: Iterator<Item = &'a Edge>>(n: usize, edges: I, q1: f64, q2: f64) -> u64 {
    let m = n * (n - 1) / 2;
    let mut born = vec![f64::INFINITY; m];
    for e in edges {
        if e.source == e.target {
            continue;
        }
        let (a, b) = e.unordered();
        let i = pair_index(n, a, b);
        born[i] = born[i].min(e.q);
    }
    born.iter().fold(0u64, |acc, &t| {
        let s = if t <= q1 {
            1
        } else if t <= q2 {
            2
        } else {
            0
        };
        acc * 3 + s
    })
}

/// Process law: joint partitions and joint edge states at two times, walk construction
/// against pairwise clocks.
fn theorem33(seed: u64, reps: usize) -> (bool, Value) {
    let (q1, q2) = (0.5, 1.0);
    let config = WeightedConfig::uniform(3, 1.0).expect("unit masses");
    let bfw: Vec<((Partition, Partition), u64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let clocks = sample_clocks(&config, stream(seed, StreamPurpose::Clocks, rep));
            let mut merge = stream(seed, StreamPurpose::MergeEdges, rep).rng();
            let t = run_trajectory(&config, &clocks, &mut merge, q2).expect("q2 > 0");
            let mut sur = stream(seed, StreamPurpose::DynamicSurplus, rep).rng();
            let g = dynamic_surplus(&t, &mut sur, q2, SurplusVariant::Simple).expect("q2 > 0").graph;
            let parts = (g.at(q1).partition(), g.at(q2).partition());
            (parts, edge_state_key(3, g.edges(), q1, q2))
        })
        .collect();
    let oracle: Vec<((Partition, Partition), u64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(seed, StreamPurpose::Oracle, rep).rng();
            let log = gillespie_trajectory(&config, &mut rng, q2).expect("q2 > 0");
            let g = log.graph_at(q2);
            let parts = (log.partition_at(q1), log.partition_at(q2));
            (parts, edge_state_key(3, g.edges(), q1, q2))
        })
        .collect();
    let part = chi_square_two_sample(
        &counts(bfw.iter().map(|x| x.0.clone())),
        &counts(oracle.iter().map(|x| x.0.clone())),
        MIN_CELL,
    );
    let edges = chi_square_two_sample(
        &counts(bfw.iter().map(|x| x.1)),
        &counts(oracle.iter().map(|x| x.1)),
        MIN_CELL,
    );
    let pass = !part.inconclusive && !edges.inconclusive && part.pass(ALPHA) && edges.pass(ALPHA);
    (
        pass,
        json!({ "q1": q1, "q2": q2, "partitions": chi_json(&part), "edge_states": chi_json(&edges) }),
    )
}

/// Cumulative rate of every activated process against `q` times its parallelogram area.
fn prop31(seed: u64, reps: usize) -> (bool, Value) {
    let worst: Vec<(f64, usize, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let (_, _, q, t) = random_trajectory(seed, rep, 10);
            let slices = slice_decomposition(&t, q).expect("q > 0");
            let mut para: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
            for s in &slices {
                for p in &s.parallelograms {
                    para.insert((p.l, p.j, p.k), q * p.area());
                }
            }
            let mut err: f64 = 0.0;
            let mut checked = 0;
            for z in zeta_family(&t, q, false) {
                let area = para.get(&(z.l, z.j, z.k)).copied().unwrap_or(f64::NAN);
                let e = (z.cumulative_rate(q) - area).abs();
                err = if e.is_nan() { f64::INFINITY } else { err.max(e) };
                checked += 1;
            }
            if para.len() != checked {
                err = f64::INFINITY;
            }
            // areas also tile each excursion
            let path = WalkPath::new(&t.ranked, q).expect("q > 0");
            let dec = decompose(&path);
            let mut tile: f64 = 0.0;
            for (b, e) in t.blocks_at(q).iter().zip(&dec.excursions) {
                tile = tile.max((crate::mosaic::block_area(&slices, b) - excursion_area(&path, e)).abs());
            }
            (err, checked, tile)
        })
        .collect();
    let max_err = worst.iter().map(|w| w.0).fold(0.0, f64::max);
    let processes: usize = worst.iter().map(|w| w.1).sum();
    let max_tile = worst.iter().map(|w| w.2).fold(0.0, f64::max);
    let pass = max_err <= EXACT_TOL && max_tile <= EXACT_TOL;
    (
        pass,
        json!({ "instances": reps, "processes": processes, "max_error": max_err, "max_tiling_error": max_tile }),
    )
}

/// Multigraph surplus counts per component against `q` times the excursion area.
fn cor32(seed: u64, reps: usize) -> (bool, Value) {
    let trajectories = 100;
    let checks: Vec<Vec<(f64, crate::stats::PoissonCheck)>> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let (_, _, q, t) = random_trajectory(seed, i, 8);
            let blocks = t.blocks_at(q);
            let path = WalkPath::new(&t.ranked, q).expect("q > 0");
            let dec = decompose(&path);
            assert_eq!(dec.excursions.len(), blocks.len());
            let mut rank_of = vec![0; t.len()];
            for (r, &v) in t.ranked.vertex.iter().enumerate() {
                rank_of[v] = r;
            }
            let mut per_block = vec![vec![0u64; reps]; blocks.len()];
            let mut rng = RngStream::for_purpose(seed, StreamPurpose::DynamicSurplus, i as u64).rng();
            for rep in 0..reps {
                let g = dynamic_surplus(&t, &mut rng, q, SurplusVariant::Multigraph).expect("q > 0");
                for e in &g.graph.surplus {
                    let r = rank_of[e.source];
                    per_block[blocks.partition_point(|b| b.last < r)][rep] += 1;
                }
            }
            dec.excursions
                .iter()
                .zip(per_block)
                .map(|(e, c)| {
                    let target = q * excursion_area(&path, e);
                    (target, poisson_mean_test(&c, target))
                })
                .collect()
        })
        .collect();
    let all: Vec<&crate::stats::PoissonCheck> = checks.iter().flatten().map(|c| &c.1).collect();
    let tests = all.len() as u64;
    let failures = all.iter().filter(|c| !c.pass).count() as u64;
    // per-test false-alarm rate of the 3-SE mean band
    let nominal = 2.0 * (1.0 - statrs_normal_cdf(3.0));
    let allowed = binomial_quantile(tests, nominal, 1.0 - ALPHA);
    let z2: f64 = all.iter().map(|c| c.z * c.z).sum();
    let combined_p = chi_square_sf(z2, tests as usize);
    let pass = failures <= allowed && combined_p > ALPHA;
    let worst = all
        .iter()
        .max_by(|a, b| a.z.abs().total_cmp(&b.z.abs()))
        .map(|c| json!({ "mean": c.mean, "var": c.var, "target": c.target, "z": c.z }));
    (
        pass,
        json!({
            "trajectories": trajectories,
            "reps": reps,
            "components": tests,
            "failed_components": failures,
            "allowed_failures": allowed,
            "nominal_rate": nominal,
            "combined_chi_square": z2,
            "combined_p_value": combined_p,
            "worst": worst,
        }),
    )
}

fn statrs_normal_cdf(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).expect("standard normal").cdf(x)
}

/// Joint intensity identity for every non-root vertex.
fn eq6(seed: u64, reps: usize) -> (bool, Value) {
    let res: Vec<(f64, usize)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let (config, clocks, q) = random_instance(seed, rep, 10);
            let rc = RankedConfig::new(&config, &clocks);
            let sw = sweep(&rc, q).expect("q > 0");
            let walk = WalkPath::new(&rc, q).expect("q > 0");
            let mut err: f64 = 0.0;
            let mut checked = 0;
            for h in 0..rc.len() {
                if sw.parent[h].is_some() {
                    let (a, b) = intensity_pair(&rc, &sw, &walk, h).expect("non-root");
                    err = err.max((a - b).abs());
                    checked += 1;
                }
            }
            (err, checked)
        })
        .collect();
    let max_err = res.iter().map(|r| r.0).fold(0.0, f64::max);
    let vertices: usize = res.iter().map(|r| r.1).sum();
    (
        max_err <= EXACT_TOL,
        json!({ "instances": reps, "vertices": vertices, "max_error": max_err }),
    )
}

/// Append-only logs and agreement of the monotone forest with the fixed-q forest.
fn monotone(seed: u64, reps: usize) -> (bool, Value) {
    let res: Vec<Vec<String>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut problems = Vec::new();
            let (config, clocks, q) = random_instance(seed, rep, 12);
            let q_max = 2.0 * q;
            let run = |qm: f64| {
                let mut rng = stream(seed, StreamPurpose::MergeEdges, rep).rng();
                run_trajectory(&config, &clocks, &mut rng, qm).expect("q > 0")
            };
            let t = run(q_max);
            let short = run(q);
            if short.events[..] != t.events[..short.events.len()] {
                problems.push("shorter horizon is not a prefix".to_string());
            }
            let f1 = build_f1(&t);
            if !f1.edges.windows(2).all(|w| w[0].q <= w[1].q) {
                problems.push("F1 timestamps decrease".into());
            }
            let mut rng = stream(seed, StreamPurpose::DynamicSurplus, rep).rng();
            let g = dynamic_surplus(&t, &mut rng, q_max, SurplusVariant::Simple).expect("q > 0");
            if !g.graph.surplus.windows(2).all(|w| w[0].q <= w[1].q) {
                problems.push("surplus timestamps decrease".into());
            }
            let mut probes: Vec<f64> = t.events.iter().map(|e| e.time).collect();
            probes.extend(t.events.windows(2).map(|w| 0.5 * (w[0].time + w[1].time)));
            probes.push(q_max);
            for &s in &probes {
                if s <= 0.0 {
                    continue;
                }
                let (f0, _) = breadth_first_forest(&config, &clocks, s).expect("s > 0");
                let p0 = f0.partition();
                if f1.partition_at(s) != p0 || t.partition_at(s) != p0 || g.at(s).partition() != p0 {
                    problems.push(format!("partition mismatch at {s}"));
                }
            }
            problems
        })
        .collect();
    let bad: Vec<&String> = res.iter().flatten().collect();
    (
        bad.is_empty(),
        json!({ "trajectories": reps, "problems": bad.len(), "first": bad.first() }),
    )
}

/// The four-vertex excursion with gray reach ends `e2, e3` (1-based, `e4 = 4`).
pub fn four_vertex_fixture(e2: usize, e3: usize) -> OrnamentedExcursion {
    OrnamentedExcursion::from_reach_ends(
        1.0,
        0,
        vec![0, 1, 2, 3],
        vec![1.0; 4],
        vec![0.0, 0.1, 0.2, 0.3],
        &[e2 - 1, e3 - 1, 3],
    )
}

/// A gray baseline that skips part of its interval.
pub fn skipping_fixture() -> OrnamentedExcursion {
    let mut exc = OrnamentedExcursion::from_reach_ends(1.0, 0, vec![0, 1, 2], vec![1.0; 3], vec![0.0, 0.3, 0.5], &[2, 2]);
    let b = exc.baselines.iter_mut().find(|b| b.owner == 1).expect("gray");
    let (a, z) = b.extent[0];
    b.extent = vec![(a, a + 0.3 * (z - a)), (a + 0.6 * (z - a), z)];
    exc
}

/// A gray baseline reaching the hypotenuse of `pi_4` but not that of `pi_3`.
pub fn non_monotone_fixture() -> OrnamentedExcursion {
    let mut exc = four_vertex_fixture(4, 3);
    let b = exc.baselines.iter_mut().find(|b| b.owner == 1).expect("gray");
    b.reach = vec![1, 3];
    exc
}

/// The order table for four vertices: `(e2, e3)` and the expected total order, 1-based.
pub const FOUR_VERTEX_TABLE: [((usize, usize), [usize; 3]); 5] = [
    ((2, 3), [4, 3, 2]),
    ((2, 4), [3, 2, 4]),
    ((3, 3), [4, 2, 3]),
    ((4, 3), [2, 4, 3]),
    ((4, 4), [2, 3, 4]),
];

fn mosaic(seed: u64, reps: usize) -> (bool, Value) {
    let res: Vec<(usize, usize)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let (_, _, q, t) = random_trajectory(seed, rep, 8);
            let m = build_mosaic(&t, q).expect("q > 0");
            let mut bad = 0;
            for exc in &m {
                let ok = validate(exc).is_ok()
                    && replay(exc)
                        .and_then(|r| build_mosaic(&r, q))
                        .is_ok_and(|back| back.len() == 1 && same_excursion(&back[0], exc, 1e-12));
                bad += usize::from(!ok);
            }
            (m.len(), bad)
        })
        .collect();
    let excursions: usize = res.iter().map(|r| r.0).sum();
    let failures: usize = res.iter().map(|r| r.1).sum();

    let a = validate(&skipping_fixture()).err();
    let b = validate(&non_monotone_fixture()).err();
    let a_ok = a.as_ref().is_some_and(|r| r.rules() == vec![Rule::Continuity]);
    let b_ok = b.as_ref().is_some_and(|r| r.rules() == vec![Rule::Monotonicity]);

    let mut table = Vec::new();
    let mut table_ok = true;
    for ((e2, e3), want) in FOUR_VERTEX_TABLE {
        let got: Vec<usize> = orders(&four_vertex_fixture(e2, e3))
            .map(|o| o.total.iter().map(|l| l + 1).collect())
            .unwrap_or_default();
        table_ok &= got == want;
        table.push(json!({ "reach_ends": [e2, e3], "order": got, "expected": want }));
    }
    let pass = failures == 0 && a_ok && b_ok && table_ok;
    (
        pass,
        json!({
            "instances": reps,
            "excursions": excursions,
            "round_trip_failures": failures,
            "fixture_a": a.map(|r| r.to_string()),
            "fixture_b": b.map(|r| r.to_string()),
            "table": table,
        }),
    )
}

type EdgeSeq = Vec<(usize, usize)>;

/// First-merger time of masses (2, 3) against `Exp(6)`, and the spanning-edge law of a
/// three-vertex trajectory against pairwise clocks for both the true rule and the
/// last-vertex fixture (which must be rejected).
fn rate(seed: u64, reps: usize) -> (bool, Value) {
    let pair = WeightedConfig::new(vec![2.0, 3.0]).expect("positive");
    let times: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let clocks = sample_clocks(&pair, stream(seed, StreamPurpose::Clocks, rep));
            let mut rng = stream(seed, StreamPurpose::MergeEdges, rep).rng();
            let t = run_trajectory(&pair, &clocks, &mut rng, 1e9).expect("q > 0");
            t.events[0].time
        })
        .collect();
    let ks = ks_test(&times, |t| -(-6.0 * t).exp_m1());

    let three = WeightedConfig::new(vec![1.0, 2.0, 4.0]).expect("positive");
    let q_max = 1e9;
    let seqs: Vec<(EdgeSeq, EdgeSeq, EdgeSeq)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let clocks = sample_clocks(&three, stream(seed ^ 1, StreamPurpose::Clocks, rep));
            let mut rng = stream(seed ^ 1, StreamPurpose::MergeEdges, rep).rng();
            let t = run_trajectory(&three, &clocks, &mut rng, q_max).expect("q > 0");
            let f1 = build_f1(&t).edges.iter().map(Edge::unordered).collect();
            let fixture = last_vertex_forest(&t).edges.iter().map(Edge::unordered).collect();
            let mut orng = stream(seed ^ 1, StreamPurpose::Oracle, rep).rng();
            let log = gillespie_trajectory(&three, &mut orng, q_max).expect("q > 0");
            let oracle = log.mergers.iter().map(|m| m.pair).collect();
            (f1, fixture, oracle)
        })
        .collect();
    let oracle = counts(seqs.iter().map(|s| s.2.clone()));
    let f1 = chi_square_two_sample(&counts(seqs.iter().map(|s| s.0.clone())), &oracle, MIN_CELL);
    let fixture = chi_square_two_sample(&counts(seqs.iter().map(|s| s.1.clone())), &oracle, MIN_CELL);
    let fixture_rejected = !fixture.inconclusive && !fixture.pass(ALPHA);
    let pass = ks.pass(ALPHA) && !f1.inconclusive && f1.pass(ALPHA) && fixture_rejected;
    (
        pass,
        json!({
            "ks_exp6": { "statistic": ks.statistic, "p_value": ks.p_value, "n": ks.n },
            "f1_edges": chi_json(&f1),
            "last_vertex_fixture": chi_json(&fixture),
            "fixture_rejected": fixture_rejected,
        }),
    )
}

/// Largest-component KS distance to the limit decreasing in `n` in at least 4 of 5 batches.
fn scaling(seed: u64, reps: usize) -> (bool, Value) {
    let mut batches = Vec::new();
    let mut decreasing = 0;
    for b in 0..5u64 {
        let cfg = ScalingConfig::standard(vec![1000, 3000, 10_000], 0.0, reps, seed.wrapping_add(b));
        let r = scaling_experiment(&cfg).expect("standard sequence");
        let ks: Vec<f64> = r.rows.iter().map(|row| row.ks_largest.statistic).collect();
        let dec = r.ks_decreasing();
        decreasing += usize::from(dec);
        batches.push(json!({
            "seed": cfg.seed,
            "ks_largest": ks,
            "mean_largest": r.rows.iter().map(|row| row.mean_largest).collect::<Vec<_>>(),
            "limit_mean_largest": r.limit_mean_largest,
            "decreasing": dec,
            "warnings": r.warnings,
        }));
    }
    (
        decreasing >= 4,
        json!({ "n_values": [1000, 3000, 10_000], "reps": reps, "decreasing_batches": decreasing, "batches": batches }),
    )
}

/// Library outputs serialized twice, under one and four worker threads.
fn determinism(seed: u64, reps: usize) -> (bool, Value) {
    let work = || -> String {
        let out: Vec<String> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let (_, _, q, t) = random_trajectory(seed, rep, 10);
                let mut rng = stream(seed, StreamPurpose::DynamicSurplus, rep).rng();
                let g = dynamic_surplus(&t, &mut rng, q, SurplusVariant::Multigraph).expect("q > 0");
                let svg = crate::mosaic::render_svg(&t, q, true).expect("q > 0");
                serde_json::to_string(&(t, g.graph, svg)).expect("serializable")
            })
            .collect();
        out.join("\n")
    };
    let pool = |k: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
    };
    let a = pool(1).install(work);
    let b = pool(4).install(work);
    let c = pool(4).install(work);
    let pass = a == b && b == c;
    (pass, json!({ "reps": reps, "bytes": a.len(), "identical": pass }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_usage_error() {
        let opts = VerifyOptions { seed: 1, reps: Some(1) };
        assert!(matches!(run_suite("nope", &opts), Err(Error::Usage(_))));
    }

    #[test]
    fn quick_exact_suites() {
        let opts = VerifyOptions { seed: 3, reps: Some(100) };
        for s in ["prop31", "eq6", "monotone", "mosaic", "determinism"] {
            let r = run_suite(s, &opts).unwrap();
            assert!(r.pass, "{s}: {:?}", r.attempts);
            assert_eq!(r.attempts.len(), 1);
        }
    }

    #[test]
    fn edge_states() {
        let e = |a, b, q| Edge {
            source: a,
            target: b,
            q,
            kind: crate::graph::EdgeKind::Simple,
        };
        let edges = [e(1, 0, 0.2), e(2, 1, 0.7)];
        // pairs (0,1), (0,2), (1,2) -> states 1, 0, 2
        assert_eq!(edge_state_key(3, edges.iter(), 0.5, 1.0), 9 + 2);
    }
}
