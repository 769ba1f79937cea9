//! Surplus edges on top of the spanning forests.
//!
//! Static: for a fixed `q`, each vertex listens for surplus edges from the vertices in
//! its influence region on top of `F0(q)`.
//!
//! Dynamic: every merger of a block `[j..k]` with the block after it activates one
//! Poisson process per vertex `l` of the absorbed block, of rate `x_l * (x_j + ... + x_k)`;
//! each arrival picks a size-biased endpoint in `[j..k]`. Processes are created only
//! when their merger happens.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::config::RankedConfig;
use crate::dynamics::{build_f1, size_biased_rank, Trajectory};
use crate::error::{Error, Result};
use crate::walk::{forest_from_sweep, sweep, BreadthFirstSweep, ReflectedWalk, WalkPath};

pub use crate::graph::{Edge, EdgeKind, LabeledGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generation {
    /// Listed after the target, in the target's generation.
    Same,
    /// A child of an earlier vertex of the target's generation.
    Next,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceRegion {
    /// Rank of the target vertex.
    pub target: usize,
    /// `(rank, generation class)` of each candidate source.
    pub candidates: Vec<(usize, Generation)>,
}

impl InfluenceRegion {
    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.candidates.iter().map(|c| c.0)
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }
}

/// Candidates for surplus edges into rank `h`: ranks `l > h` whose scaled clocks fall in
/// `(xi_(h)/q, sup I_{h-1}]`. A root has no region.
pub fn influence_region(rc: &RankedConfig, sw: &BreadthFirstSweep, h: usize) -> Result<InfluenceRegion> {
    if sw.parent[h].is_none() {
        return Err(Error::RootVertex(h));
    }
    let q = sw.decomposition.q;
    let exc = sw.decomposition.excursion_of(h);
    let root = exc.first;
    let mut candidates = Vec::new();
    let mut l = h + 1;
    while l <= exc.last && rc.heard(root, h - 1, l, q) {
        let class = if sw.depth[l] == sw.depth[h] {
            Generation::Same
        } else {
            Generation::Next
        };
        candidates.push((l, class));
        l += 1;
    }
    Ok(InfluenceRegion {
        target: h,
        candidates,
    })
}

/// `q * (B(sup I_{h-1}) - x_h)`, the joint intensity of the marking processes feeding rank `h`.
pub fn total_intensity(rc: &RankedConfig, sw: &BreadthFirstSweep, walk: &ReflectedWalk, h: usize) -> Result<f64> {
    if sw.parent[h].is_none() {
        return Err(Error::RootVertex(h));
    }
    let q = sw.decomposition.q;
    let exc = sw.decomposition.excursion_of(h);
    let sup = walk.path().jump_times()[exc.first] + rc.block_mass(exc.first, h - 1);
    Ok(q * (walk.eval(sup) - rc.mass[h]))
}

/// `F0(q)` plus static surplus: each candidate `l` of each non-root `h` contributes the edge
/// `l -> h` independently with probability `1 - exp(-q x_h x_l)`.
pub fn static_surplus<R: Rng + ?Sized>(rc: &RankedConfig, q: f64, rng: &mut R) -> Result<LabeledGraph> {
    let sw = sweep(rc, q)?;
    Ok(static_surplus_on(rc, &sw, rng))
}

pub fn static_surplus_on<R: Rng + ?Sized>(rc: &RankedConfig, sw: &BreadthFirstSweep, rng: &mut R) -> LabeledGraph {
    let q = sw.decomposition.q;
    let (forest, _) = forest_from_sweep(rc, sw, q);
    let mut graph = LabeledGraph::new(rc.len());
    graph.spanning = forest.edges();
    for h in 0..rc.len() {
        if sw.parent[h].is_none() {
            continue;
        }
        let region = influence_region(rc, sw, h).expect("non-root");
        for l in region.ranks() {
            let p = -(-q * rc.mass[h] * rc.mass[l]).exp_m1();
            if Bernoulli::new(p).expect("probability").sample(rng) {
                graph.surplus.push(Edge {
                    source: rc.vertex[l],
                    target: rc.vertex[h],
                    q,
                    kind: EdgeKind::Simple,
                });
            }
        }
    }
    graph
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurplusVariant {
    /// No loops, at most one edge per unordered pair.
    Simple,
    /// Loops and repeated edges kept.
    Multigraph,
}

/// `zeta^{l; j-k}`: surplus edges from rank `l` into ranks `j..=k`, active from `activation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaProcess {
    pub l: usize,
    pub j: usize,
    pub k: usize,
    pub activation: f64,
    pub rate: f64,
    /// Arrival times in `(activation, q_max]`, increasing.
    pub arrivals: Vec<f64>,
}

impl ZetaProcess {
    pub fn is_loop(&self) -> bool {
        self.l == self.k
    }

    /// Integrated rate over `[activation, q]`.
    pub fn cumulative_rate(&self, q: f64) -> f64 {
        (q - self.activation).max(0.0) * self.rate
    }
}

/// The time-indexed graph `G1(q)` (or its multigraph analogue) for `q <= q_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicGraph {
    pub variant: SurplusVariant,
    pub q_max: f64,
    pub graph: LabeledGraph,
    pub processes: Vec<ZetaProcess>,
}

impl DynamicGraph {
    pub fn at(&self, q: f64) -> LabeledGraph {
        self.graph.at(q)
    }
}

/// Activation data of every `zeta^{l;j-k}` with `l > k` that activates before `q_max`,
/// plus the loop processes `zeta^{l;l-l}` (activation 0) when `with_loops`.
pub fn zeta_family(trajectory: &Trajectory, q_max: f64, with_loops: bool) -> Vec<ZetaProcess> {
    let rc = &trajectory.ranked;
    let mut out = Vec::new();
    if with_loops {
        for l in 0..rc.len() {
            out.push(ZetaProcess {
                l,
                j: l,
                k: l,
                activation: 0.0,
                rate: rc.mass[l] * rc.mass[l] / 2.0,
                arrivals: Vec::new(),
            });
        }
    }
    for ev in trajectory.events.iter().take_while(|e| e.time <= q_max) {
        for l in ev.right.ranks() {
            out.push(ZetaProcess {
                l,
                j: ev.left.first,
                k: ev.left.last,
                activation: ev.time,
                rate: rc.mass[l] * ev.left.mass,
                arrivals: Vec::new(),
            });
        }
    }
    out
}

/// Spanning edges of `F1` plus surplus edges generated by the activated `zeta` processes on `[0, q_max]`.
pub fn dynamic_surplus<R: Rng + ?Sized>(
    trajectory: &Trajectory,
    rng: &mut R,
    q_max: f64,
    variant: SurplusVariant,
) -> Result<DynamicGraph> {
    crate::walk::check_time(q_max)?;
    let rc = &trajectory.ranked;
    let mut processes = zeta_family(trajectory, q_max, variant == SurplusVariant::Multigraph);
    // (time, source rank, target rank)
    let mut arrivals: Vec<(f64, usize, usize)> = Vec::new();
    for z in &mut processes {
        let mean = z.cumulative_rate(q_max);
        let count = poisson_count(mean, rng);
        let span = q_max - z.activation;
        let mut times: Vec<f64> = (0..count)
            .map(|_| z.activation + span * (1.0 - rng.random::<f64>()))
            .collect();
        times.sort_by(f64::total_cmp);
        for &t in &times {
            let target = if z.is_loop() {
                z.l
            } else {
                size_biased_rank(rc, z.j, z.k, rng)
            };
            arrivals.push((t, z.l, target));
        }
        z.arrivals = times;
    }
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let f1 = build_f1(trajectory);
    let spanning: Vec<Edge> = f1.edges.into_iter().filter(|e| e.q <= q_max).collect();
    let mut present: HashSet<(usize, usize)> = spanning.iter().map(Edge::unordered).collect();
    let mut surplus = Vec::with_capacity(arrivals.len());
    for (t, l, i) in arrivals {
        let edge = Edge {
            source: rc.vertex[l],
            target: rc.vertex[i],
            q: t,
            kind: match (variant, l == i) {
                (SurplusVariant::Simple, _) => EdgeKind::Simple,
                (SurplusVariant::Multigraph, true) => EdgeKind::Loop,
                (SurplusVariant::Multigraph, false) => EdgeKind::Multi,
            },
        };
        if variant == SurplusVariant::Simple && (l == i || !present.insert(edge.unordered())) {
            continue;
        }
        surplus.push(edge);
    }
    Ok(DynamicGraph {
        variant,
        q_max,
        graph: LabeledGraph {
            n: rc.len(),
            spanning,
            surplus,
        },
        processes,
    })
}

/// Multigraph surplus counts per excursion at `q`, sampled directly from the cumulative
/// rates of the activated processes (loops included). Indexed like `trajectory.blocks_at(q)`.
pub fn multigraph_surplus_counts<R: Rng + ?Sized>(trajectory: &Trajectory, q: f64, rng: &mut R) -> Vec<u64> {
    let blocks = trajectory.blocks_at(q);
    let mut counts = vec![0u64; blocks.len()];
    let block_of = |r: usize| blocks.partition_point(|b| b.last < r);
    for z in zeta_family(trajectory, q, true) {
        counts[block_of(z.l)] += poisson_count(z.cumulative_rate(q), rng);
    }
    counts
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

/// `F0(q)` with static surplus, starting from a configuration and clocks.
pub fn static_graph<R: Rng + ?Sized>(
    config: &crate::config::WeightedConfig,
    clocks: &crate::config::ClockAssignment,
    q: f64,
    rng: &mut R,
) -> Result<LabeledGraph> {
    static_surplus(&RankedConfig::new(config, clocks), q, rng)
}

/// Both sides of the joint-intensity identity for rank `h`: `(walk form, candidate sum)`.
pub fn intensity_pair(rc: &RankedConfig, sw: &BreadthFirstSweep, walk: &WalkPath, h: usize) -> Result<(f64, f64)> {
    let reflected = walk.reflect();
    let lhs = total_intensity(rc, sw, &reflected, h)?;
    let region = influence_region(rc, sw, h)?;
    let q = sw.decomposition.q;
    let rhs = q * crate::config::neumaier_sum(region.ranks().map(|l| rc.mass[l]));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{sample_clocks, ClockAssignment, RngStream, WeightedConfig};
    use crate::dynamics::run_trajectory;

    fn rc_of(masses: Vec<f64>, xi: Vec<f64>) -> RankedConfig {
        let c = WeightedConfig::new(masses).unwrap();
        let a = ClockAssignment::from_xi(&c, xi).unwrap();
        RankedConfig::new(&c, &a)
    }

    #[test]
    fn influence_region_three_vertices() {
        let rc = rc_of(vec![1.0; 3], vec![0.1, 0.2, 0.25]);
        let sw = sweep(&rc, 1.0).unwrap();
        assert_eq!(sw.parent, vec![None, Some(0), Some(0)]);
        let r2 = influence_region(&rc, &sw, 1).unwrap();
        assert_eq!(r2.candidates, vec![(2, Generation::Same)]);
        assert!(influence_region(&rc, &sw, 2).unwrap().is_empty());
        assert!(matches!(influence_region(&rc, &sw, 0), Err(Error::RootVertex(0))));
    }

    #[test]
    fn next_generation_candidates() {
        // root 0 hears 1 and 2; 1 hears 3; 4 arrives within I_2 but after the target 2
        let rc = rc_of(vec![1.0; 5], vec![0.0, 0.5, 0.9, 1.5, 2.9]);
        let sw = sweep(&rc, 1.0).unwrap();
        assert_eq!(sw.parent, vec![None, Some(0), Some(0), Some(1), Some(2)]);
        let region = influence_region(&rc, &sw, 2).unwrap();
        assert_eq!(region.candidates, vec![(3, Generation::Next)]);
    }

    #[test]
    fn region_size_bound_and_intensity() {
        let mut rng = RngStream::new(21, 0).rng();
        for rep in 0..300 {
            let n = 2 + rep % 9;
            let masses: Vec<f64> = (0..n).map(|_| 0.2 + 2.0 * rng.random::<f64>()).collect();
            let c = WeightedConfig::new(masses).unwrap();
            let a = sample_clocks(&c, RngStream::new(rep as u64, 1));
            let rc = RankedConfig::new(&c, &a);
            let q = 0.1 + 3.0 * rng.random::<f64>();
            let sw = sweep(&rc, q).unwrap();
            let walk = WalkPath::new(&rc, q).unwrap();
            for h in 0..n {
                if sw.parent[h].is_none() {
                    continue;
                }
                let exc = sw.decomposition.excursion_of(h);
                let region = influence_region(&rc, &sw, h).unwrap();
                assert!(region.len() + 2 <= exc.last - exc.first + 1);
                let (lhs, rhs) = intensity_pair(&rc, &sw, &walk, h).unwrap();
                assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn single_candidate_intensity() {
        let rc = rc_of(vec![1.0, 1.0, 0.7], vec![0.1, 0.2, 0.25]);
        let sw = sweep(&rc, 1.0).unwrap();
        let walk = WalkPath::new(&rc, 1.0).unwrap();
        let (lhs, rhs) = intensity_pair(&rc, &sw, &walk, 1).unwrap();
        assert!((lhs - 0.7).abs() < 1e-12);
        assert!((rhs - 0.7).abs() < 1e-12);
    }

    #[test]
    fn static_edge_probability_half() {
        // three unit masses with pi_3 in the region of pi_2; q = ln 2 gives probability 1/2
        let q = std::f64::consts::LN_2;
        let rc = rc_of(vec![1.0; 3], vec![0.01, 0.02, 0.03]);
        let mut rng = RngStream::new(4, 3).rng();
        let reps = 40_000;
        let hits = (0..reps)
            .filter(|_| static_surplus(&rc, q, &mut rng).unwrap().surplus.len() == 1)
            .count();
        let p = hits as f64 / reps as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / reps as f64).sqrt(), "{p}");
    }

    #[test]
    fn simple_variant_has_no_loops_or_duplicates() {
        let c = WeightedConfig::new(vec![1.0, 2.0, 0.5, 1.5, 3.0, 0.2]).unwrap();
        for seed in 0..200 {
            let a = sample_clocks(&c, RngStream::new(seed, 0));
            let mut rng = RngStream::new(seed, 1).rng();
            let t = run_trajectory(&c, &a, &mut rng, 5.0).unwrap();
            let g = dynamic_surplus(&t, &mut rng, 5.0, SurplusVariant::Simple).unwrap();
            assert_eq!(g.graph.loop_count(), 0);
            assert!(!g.graph.has_duplicate_pairs());
            assert!(g.graph.surplus.windows(2).all(|w| w[0].q <= w[1].q));
        }
    }

    #[test]
    fn single_vertex_loops_are_poisson() {
        let c = WeightedConfig::new(vec![2.0]).unwrap();
        let a = ClockAssignment::from_xi(&c, vec![0.3]).unwrap();
        let mut rng = RngStream::new(9, 9).rng();
        let t = run_trajectory(&c, &a, &mut rng, 1.5).unwrap();
        let reps = 100_000;
        let counts: Vec<u64> = (0..reps)
            .map(|_| {
                dynamic_surplus(&t, &mut rng, 1.5, SurplusVariant::Multigraph)
                    .unwrap()
                    .graph
                    .loop_count() as u64
            })
            .collect();
        // q x^2 / 2 = 1.5 * 4 / 2 = 3
        let v = crate::stats::poisson_mean_test(&counts, 3.0);
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn zeta_activations_follow_events() {
        let rc = rc_of(vec![2.0, 1.0], vec![1.0, 3.5]);
        let mut rng = RngStream::new(1, 1).rng();
        let t = crate::dynamics::run_ranked(rc, &mut rng, 3.0).unwrap();
        let fam = zeta_family(&t, 3.0, true);
        assert_eq!(fam.len(), 3);
        let z = fam.iter().find(|z| !z.is_loop()).unwrap();
        assert_eq!((z.l, z.j, z.k), (1, 0, 0));
        assert_eq!(z.activation, 1.25);
        assert_eq!(z.rate, 2.0);
        assert_eq!(fam[0].rate, 2.0);
        assert_eq!(fam[1].rate, 0.5);
    }
}
