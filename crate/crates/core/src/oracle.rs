//! Direct pairwise-clock simulation of the random graph and its multigraph variant, and
//! exhaustive small-graph laws. Nothing here goes through the walk machinery.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::WeightedConfig;
use crate::error::{Error, Result};
use crate::graph::{pair_index, Edge, EdgeKind, LabeledGraph, Partition, UnionFind};
use crate::surplus::SurplusVariant;

/// Largest `n` accepted by the exhaustive enumerations.
pub const MAX_EXACT_N: usize = 6;

/// Largest `n` the pairwise-clock engines are run at outside benchmarks.
pub const GILLESPIE_MAX_N: usize = 200;

fn exp_clock<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    -u.ln() / rate
}

/// Arrival times of a homogeneous Poisson process of the given rate on `[0, q]`.
fn arrivals<R: Rng + ?Sized>(rate: f64, q: f64, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = exp_clock(rate, rng);
    while t <= q {
        out.push(t);
        t += exp_clock(rate, rng);
    }
    out
}

/// Sample the graph at time `q`. Simple: pair `{i,j}` present iff its `Exp(x_i x_j)` clock is
/// at most `q`. Multigraph: directed edges `i -> j` at rate `x_i x_j / 2` for each ordered
/// pair and loops at rate `x_i^2 / 2`. All edges are reported as surplus-free records
/// with their (first) arrival time in `q`; spanning is left empty.
pub fn gillespie_graph<R: Rng + ?Sized>(
    config: &WeightedConfig,
    q: f64,
    rng: &mut R,
    variant: SurplusVariant,
) -> Result<LabeledGraph> {
    if q.is_nan() || q < 0.0 {
        return Err(Error::InvalidTime(q));
    }
    let x = config.masses();
    let n = x.len();
    let mut g = LabeledGraph::new(n);
    match variant {
        SurplusVariant::Simple => {
            for i in 0..n {
                for j in i + 1..n {
                    let t = exp_clock(x[i] * x[j], rng);
                    if t <= q {
                        g.surplus.push(Edge {
                            source: i,
                            target: j,
                            q: t,
                            kind: EdgeKind::Simple,
                        });
                    }
                }
            }
        }
        SurplusVariant::Multigraph => {
            for i in 0..n {
                for t in arrivals(x[i] * x[i] / 2.0, q, rng) {
                    g.surplus.push(Edge {
                        source: i,
                        target: i,
                        q: t,
                        kind: EdgeKind::Loop,
                    });
                }
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for t in arrivals(x[i] * x[j] / 2.0, q, rng) {
                        g.surplus.push(Edge {
                            source: i,
                            target: j,
                            q: t,
                            kind: EdgeKind::Multi,
                        });
                    }
                }
            }
        }
    }
    g.surplus.sort_by(|a, b| a.q.total_cmp(&b.q));
    Ok(g)
}

/// One merger extracted from the pairwise clocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMerger {
    pub time: f64,
    /// The pair whose clock rang.
    pub pair: (usize, usize),
    /// Masses of the two components joined.
    pub masses: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairClockLog {
    pub n: usize,
    pub q_max: f64,
    /// `(time, i, j)` with `i < j`, sorted by time: every pair clock at most `q_max`.
    pub arrivals: Vec<(f64, usize, usize)>,
    /// The arrivals that joined two distinct components.
    pub mergers: Vec<OracleMerger>,
}

impl PairClockLog {
    pub fn partition_at(&self, q: f64) -> Partition {
        let mut uf = UnionFind::new(self.n);
        for m in self.mergers.iter().take_while(|m| m.time <= q) {
            uf.union(m.pair.0, m.pair.1);
        }
        uf.partition()
    }

    /// The simple graph present at `q`.
    pub fn graph_at(&self, q: f64) -> LabeledGraph {
        let mut g = LabeledGraph::new(self.n);
        for &(t, i, j) in self.arrivals.iter().take_while(|a| a.0 <= q) {
            g.surplus.push(Edge {
                source: i,
                target: j,
                q: t,
                kind: EdgeKind::Simple,
            });
        }
        g
    }
}

/// Pair clocks `Exp(x_i x_j)` for every unordered pair, sorted, with the merger subsequence.
pub fn gillespie_trajectory<R: Rng + ?Sized>(config: &WeightedConfig, rng: &mut R, q_max: f64) -> Result<PairClockLog> {
    if q_max.is_nan() || q_max <= 0.0 {
        return Err(Error::InvalidTime(q_max));
    }
    let x = config.masses();
    let n = x.len();
    let mut arrivals = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let t = exp_clock(x[i] * x[j], rng);
            if t <= q_max {
                arrivals.push((t, i, j));
            }
        }
    }
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut uf = UnionFind::new(n);
    let mut mass = x.to_vec();
    let mut mergers = Vec::new();
    for &(t, i, j) in &arrivals {
        let (ri, rj) = (uf.find(i), uf.find(j));
        if ri == rj {
            continue;
        }
        let masses = (mass[ri], mass[rj]);
        uf.union(i, j);
        let r = uf.find(i);
        mass[r] = masses.0 + masses.1;
        mergers.push(OracleMerger {
            time: t,
            pair: (i, j),
            masses,
        });
    }
    Ok(PairClockLog {
        n,
        q_max,
        arrivals,
        mergers,
    })
}

fn check_exact(n: usize, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyConfig);
    }
    if n > MAX_EXACT_N {
        return Err(Error::TooLarge { n, max: MAX_EXACT_N });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            debug_assert_eq!(pair_index(n, a, b), out.len());
            out.push((a, b));
        }
    }
    out
}

/// Probability of each edge subset of `G(n, p)`, indexed by the pair bitmask of
/// [`LabeledGraph::edge_mask`].
pub fn exact_edge_set_law(n: usize, p: f64) -> Result<Vec<f64>> {
    check_exact(n, p)?;
    let m = n * (n - 1) / 2;
    Ok((0..1u64 << m)
        .map(|mask| {
            let k = mask.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(m as i32 - k)
        })
        .collect())
}

/// Law of the component-size shape (sizes in nonincreasing order) of `G(n, p)`, by
/// enumerating every edge subset.
pub fn exact_partition_law(n: usize, p: f64) -> Result<BTreeMap<Vec<usize>, f64>> {
    let law = exact_edge_set_law(n, p)?;
    let ps = pairs(n);
    let mut out = BTreeMap::new();
    for (mask, prob) in law.into_iter().enumerate() {
        let mut uf = UnionFind::new(n);
        for (b, &(i, j)) in ps.iter().enumerate() {
            if mask >> b & 1 == 1 {
                uf.union(i, j);
            }
        }
        *out.entry(uf.partition().shape()).or_insert(0.0) += prob;
    }
    Ok(out)
}

/// Law of the labelled set partition of `G(n, p)`.
pub fn exact_labeled_partition_law(n: usize, p: f64) -> Result<BTreeMap<Partition, f64>> {
    let law = exact_edge_set_law(n, p)?;
    let ps = pairs(n);
    let mut out = BTreeMap::new();
    for (mask, prob) in law.into_iter().enumerate() {
        let mut uf = UnionFind::new(n);
        for (b, &(i, j)) in ps.iter().enumerate() {
            if mask >> b & 1 == 1 {
                uf.union(i, j);
            }
        }
        *out.entry(uf.partition()).or_insert(0.0) += prob;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RngStream;
    use crate::stats::{chi_square, counts, ks_test, poisson_mean_test, ALPHA};

    #[test]
    fn q_zero_is_edgeless() {
        let c = WeightedConfig::uniform(5, 1.0).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        for v in [SurplusVariant::Simple, SurplusVariant::Multigraph] {
            assert_eq!(gillespie_graph(&c, 0.0, &mut rng, v).unwrap().edge_count(), 0);
        }
    }

    #[test]
    fn two_vertices_half() {
        let c = WeightedConfig::uniform(2, 1.0).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        let reps = 40_000;
        let hits = (0..reps)
            .filter(|_| {
                gillespie_graph(&c, std::f64::consts::LN_2, &mut rng, SurplusVariant::Simple)
                    .unwrap()
                    .edge_count()
                    == 1
            })
            .count();
        let p = hits as f64 / reps as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / reps as f64).sqrt());
    }

    #[test]
    fn multigraph_loops_poisson() {
        let c = WeightedConfig::new(vec![2.0]).unwrap();
        let mut rng = RngStream::new(2, 0).rng();
        let counts: Vec<u64> = (0..100_000)
            .map(|_| {
                gillespie_graph(&c, 1.0, &mut rng, SurplusVariant::Multigraph)
                    .unwrap()
                    .loop_count() as u64
            })
            .collect();
        assert!(poisson_mean_test(&counts, 2.0).pass);
    }

    #[test]
    fn exact_laws() {
        let l2 = exact_partition_law(2, 0.3).unwrap();
        assert!((l2[&vec![2]] - 0.3).abs() < 1e-15);
        assert!((l2[&vec![1, 1]] - 0.7).abs() < 1e-15);
        let l3 = exact_partition_law(3, 0.5).unwrap();
        assert!((l3[&vec![3]] - 0.5).abs() < 1e-15);
        for n in 1..=6 {
            for p in [0.0, 0.17, 0.5, 1.0] {
                let s: f64 = exact_partition_law(n, p).unwrap().values().sum();
                assert!((s - 1.0).abs() < 1e-12);
                let s: f64 = exact_labeled_partition_law(n, p).unwrap().values().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(exact_partition_law(7, 0.5), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn simple_marginal_matches_bernoulli_product() {
        let c = WeightedConfig::uniform(4, 1.0).unwrap();
        let q = 0.8;
        let law = exact_edge_set_law(4, 1.0 - (-q as f64).exp()).unwrap();
        let expected: BTreeMap<u64, f64> = law.into_iter().enumerate().map(|(m, p)| (m as u64, p)).collect();
        let mut rng = RngStream::new(3, 0).rng();
        let obs = counts(
            (0..50_000).map(|_| gillespie_graph(&c, q, &mut rng, SurplusVariant::Simple).unwrap().edge_mask()),
        );
        assert!(chi_square(&obs, &expected, 5.0).pass(ALPHA));
    }

    #[test]
    fn tagged_merger_rate() {
        let c = WeightedConfig::new(vec![2.0, 3.0]).unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        let times: Vec<f64> = (0..20_000)
            .map(|_| gillespie_trajectory(&c, &mut rng, 1e6).unwrap().mergers[0].time)
            .collect();
        assert!(ks_test(&times, |t| 1.0 - (-6.0 * t).exp()).pass(ALPHA));
    }

    #[test]
    fn trajectory_log_is_sorted_and_spanning() {
        let c = WeightedConfig::new(vec![1.0, 0.5, 2.0, 1.5]).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..100 {
            let log = gillespie_trajectory(&c, &mut rng, 50.0).unwrap();
            assert!(log.arrivals.windows(2).all(|w| w[0].0 <= w[1].0));
            assert!(log.mergers.len() <= 3);
            if log.mergers.len() == 3 {
                let last = log.mergers[2].time;
                assert_eq!(log.partition_at(last).len(), 1);
            }
        }
    }
}
