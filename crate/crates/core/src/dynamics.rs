//! Event-driven evolution in `q`: exact merger times of adjacent excursions, the
//! component partition and the monotone spanning forest `F1`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ClockAssignment, RankedConfig, WeightedConfig};
use crate::error::Result;
use crate::graph::{Edge, EdgeKind, Partition, UnionFind};
use crate::walk::check_time;

/// Consecutive ranks `first..=last` forming one component; `root` is the vertex at `first`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentBlock {
    pub first: usize,
    pub last: usize,
    pub mass: f64,
    pub root: usize,
}

impl ComponentBlock {
    pub fn new(rc: &RankedConfig, first: usize, last: usize) -> Self {
        Self {
            first,
            last,
            mass: rc.block_mass(first, last),
            root: rc.vertex[first],
        }
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ranks(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }
}

/// The left block absorbs the block that immediately follows it at `time`.
/// `edge = (L1, L2)`: `L1` from the right block, `L2` from the left block, edge `L1 -> L2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergerEvent {
    pub time: f64,
    pub left: ComponentBlock,
    pub right: ComponentBlock,
    pub edge: (usize, usize),
}

/// Ordered merger log; together with the ranked clocks it determines every derived object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub ranked: RankedConfig,
    pub q_max: f64,
    pub events: Vec<MergerEvent>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    /// Blocks present at time `q` (events with `time <= q` applied).
    pub fn blocks_at(&self, q: f64) -> Vec<ComponentBlock> {
        let n = self.len();
        let mut last: Vec<usize> = (0..n).collect();
        let mut alive = vec![true; n];
        for ev in self.events.iter().take_while(|e| e.time <= q) {
            alive[ev.right.first] = false;
            last[ev.left.first] = ev.right.last;
        }
        (0..n)
            .filter(|&r| alive[r])
            .map(|r| ComponentBlock::new(&self.ranked, r, last[r]))
            .collect()
    }

    pub fn partition_at(&self, q: f64) -> Partition {
        Partition::from_blocks(
            self.blocks_at(q)
                .iter()
                .map(|b| b.ranks().map(|r| self.ranked.vertex[r]).collect())
                .collect(),
        )
    }

    pub fn component_count_at(&self, q: f64) -> usize {
        self.len() - self.events.iter().take_while(|e| e.time <= q).count()
    }
}

/// `T = (xi_(k+1) - xi_(j)) / Xi` for a block `[j..k]`; `None` if nothing follows it.
pub fn merger_time(rc: &RankedConfig, left: &ComponentBlock) -> Option<f64> {
    (left.last + 1 < rc.len()).then(|| rc.hear_time(left.first, left.last, left.last + 1))
}

/// Draw a rank in `first..=last` with probability proportional to its mass.
pub fn size_biased_rank<R: Rng + ?Sized>(rc: &RankedConfig, first: usize, last: usize, rng: &mut R) -> usize {
    if first == last {
        return first;
    }
    let u: f64 = rng.random();
    let target = rc.prefix[first] + u * rc.block_mass(first, last);
    let r = first + rc.prefix[first + 1..=last + 1].partition_point(|&p| p <= target);
    r.min(last)
}

/// `(L1, L2)`: `L1` size-biased from `right`, `L2` size-biased from `left`.
pub fn sample_merge_edge<R: Rng + ?Sized>(
    rc: &RankedConfig,
    left: &ComponentBlock,
    right: &ComponentBlock,
    rng: &mut R,
) -> (usize, usize) {
    let l1 = size_biased_rank(rc, right.first, right.last, rng);
    let l2 = size_biased_rank(rc, left.first, left.last, rng);
    (rc.vertex[l1], rc.vertex[l2])
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    time: f64,
    root: usize,
    last: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.root.cmp(&other.root))
            .then(self.last.cmp(&other.last))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Run the coalescence up to `q_max` with a priority queue of candidate mergers.
/// Each block keeps one candidate (its merger with the block that follows); after a
/// merger only the enlarged block's candidate is pushed, older entries go stale.
pub fn run_trajectory<R: Rng + ?Sized>(
    config: &WeightedConfig,
    clocks: &ClockAssignment,
    rng: &mut R,
    q_max: f64,
) -> Result<Trajectory> {
    run_ranked(RankedConfig::new(config, clocks), rng, q_max)
}

pub fn run_ranked<R: Rng + ?Sized>(rc: RankedConfig, rng: &mut R, q_max: f64) -> Result<Trajectory> {
    check_time(q_max)?;
    let n = rc.len();
    let mut last: Vec<usize> = (0..n).collect();
    let mut heap = BinaryHeap::with_capacity(n);
    for r in 0..n.saturating_sub(1) {
        heap.push(Reverse(Pending {
            time: rc.hear_time(r, r, r + 1),
            root: r,
            last: r,
        }));
    }
    let mut events = Vec::new();
    while let Some(Reverse(p)) = heap.pop() {
        if p.time > q_max {
            break;
        }
        if last[p.root] != p.last {
            continue;
        }
        let left = ComponentBlock::new(&rc, p.root, p.last);
        let right = ComponentBlock::new(&rc, p.last + 1, last[p.last + 1]);
        let edge = sample_merge_edge(&rc, &left, &right, rng);
        events.push(MergerEvent {
            time: p.time,
            left,
            right,
            edge,
        });
        // the absorbed root no longer leads a block; mark it so its pending entry is stale
        last[right.first] = usize::MAX;
        last[p.root] = right.last;
        if right.last + 1 < n {
            let t = rc.hear_time(p.root, right.last, right.last + 1).max(p.time);
            heap.push(Reverse(Pending {
                time: t,
                root: p.root,
                last: right.last,
            }));
        }
    }
    Ok(Trajectory {
        ranked: rc,
        q_max,
        events,
    })
}

/// Append-only forest `F1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneForest {
    pub n: usize,
    pub edges: Vec<Edge>,
}

impl MonotoneForest {
    pub fn edges_at(&self, q: f64) -> &[Edge] {
        let k = self.edges.partition_point(|e| e.q <= q);
        &self.edges[..k]
    }

    pub fn partition_at(&self, q: f64) -> Partition {
        let mut uf = UnionFind::new(self.n);
        for e in self.edges_at(q) {
            uf.union(e.source, e.target);
        }
        uf.partition()
    }
}

/// One edge per merger event, never removed.
pub fn build_f1(trajectory: &Trajectory) -> MonotoneForest {
    MonotoneForest {
        n: trajectory.len(),
        edges: trajectory
            .events
            .iter()
            .map(|ev| Edge {
                source: ev.edge.0,
                target: ev.edge.1,
                q: ev.time,
                kind: EdgeKind::Spanning,
            })
            .collect(),
    }
}

/// Negative fixture: attach the absorbed root to the last-listed vertex of the block before it.
/// Produces a monotone forest with the right partition but the wrong edge law.
pub(crate) fn last_vertex_forest(trajectory: &Trajectory) -> MonotoneForest {
    let rc = &trajectory.ranked;
    MonotoneForest {
        n: trajectory.len(),
        edges: trajectory
            .events
            .iter()
            .map(|ev| Edge {
                source: rc.vertex[ev.right.first],
                target: rc.vertex[ev.left.last],
                q: ev.time,
                kind: EdgeKind::Spanning,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RngStream;

    fn rc_of(masses: Vec<f64>, xi: Vec<f64>) -> RankedConfig {
        let c = WeightedConfig::new(masses).unwrap();
        let a = ClockAssignment::from_xi(&c, xi).unwrap();
        RankedConfig::new(&c, &a)
    }

    #[test]
    fn merger_time_examples() {
        let rc = rc_of(vec![2.0, 1.0], vec![1.0, 3.5]);
        let b = ComponentBlock::new(&rc, 0, 0);
        assert_eq!(merger_time(&rc, &b), Some(1.25));
        assert_eq!(merger_time(&rc, &ComponentBlock::new(&rc, 1, 1)), None);

        let rc = rc_of(vec![1.0, 1.0], vec![0.3, 1.1]);
        let t = merger_time(&rc, &ComponentBlock::new(&rc, 0, 0)).unwrap();
        assert!((t - 0.8).abs() < 1e-15);

        let rc = rc_of(vec![1e9, 1.0], vec![0.3, 1.1]);
        assert!(merger_time(&rc, &ComponentBlock::new(&rc, 0, 0)).unwrap() < 1e-8);
    }

    #[test]
    fn trajectory_examples() {
        let mut rng = RngStream::new(1, 0).rng();
        let c = WeightedConfig::new(vec![3.0]).unwrap();
        let a = ClockAssignment::from_xi(&c, vec![0.4]).unwrap();
        assert!(run_trajectory(&c, &a, &mut rng, 10.0).unwrap().events.is_empty());

        let c = WeightedConfig::new(vec![2.0, 1.0]).unwrap();
        let a = ClockAssignment::from_xi(&c, vec![1.0, 3.5]).unwrap();
        let t = run_trajectory(&c, &a, &mut rng, 10.0).unwrap();
        assert_eq!(t.events.len(), 1);
        assert_eq!(t.events[0].time, 1.25);
        assert_eq!(t.events[0].edge, (1, 0));
        let t = run_trajectory(&c, &a, &mut rng, 1.0).unwrap();
        assert!(t.events.is_empty());
    }

    #[test]
    fn event_count_matches_components() {
        let c = WeightedConfig::new((1..=30).map(|i| 0.05 * i as f64).collect()).unwrap();
        for seed in 0..20 {
            let a = crate::config::sample_clocks(&c, RngStream::new(seed, 0));
            let mut rng = RngStream::new(seed, 1).rng();
            let t = run_trajectory(&c, &a, &mut rng, 0.3).unwrap();
            assert_eq!(t.events.len(), c.len() - t.blocks_at(0.3).len());
            assert!(t.events.windows(2).all(|w| w[0].time < w[1].time));
        }
    }

    #[test]
    fn singleton_edges_are_deterministic() {
        let rc = rc_of(vec![1.0, 2.0], vec![0.1, 0.2]);
        let mut rng = RngStream::new(5, 5).rng();
        let l = ComponentBlock::new(&rc, 0, 0);
        let r = ComponentBlock::new(&rc, 1, 1);
        for _ in 0..10 {
            assert_eq!(sample_merge_edge(&rc, &l, &r, &mut rng), (1, 0));
        }
    }

    #[test]
    fn size_biased_frequencies() {
        // left block masses (1, 3): probabilities (0.25, 0.75)
        let rc = rc_of(vec![1.0, 3.0, 1.0], vec![0.1, 0.2, 0.3]);
        let left = ComponentBlock::new(&rc, 0, 1);
        let right = ComponentBlock::new(&rc, 2, 2);
        let mut rng = RngStream::new(8, 8).rng();
        let reps = 100_000;
        let hits = (0..reps)
            .filter(|_| sample_merge_edge(&rc, &left, &right, &mut rng).1 == 0)
            .count();
        let p = hits as f64 / reps as f64;
        let se = (0.25f64 * 0.75 / reps as f64).sqrt();
        assert!((p - 0.25).abs() < 3.0 * se, "{p}");

        // two unit masses: 1/2 each
        let rc = rc_of(vec![1.0, 1.0, 1.0], vec![0.1, 0.2, 0.3]);
        let left = ComponentBlock::new(&rc, 0, 1);
        let hits = (0..reps)
            .filter(|_| sample_merge_edge(&rc, &left, &right, &mut rng).1 == 0)
            .count();
        let p = hits as f64 / reps as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / reps as f64).sqrt(), "{p}");
    }

    #[test]
    fn f1_edges() {
        let c = WeightedConfig::uniform(12, 1.0).unwrap();
        let a = crate::config::sample_clocks(&c, RngStream::new(3, 0));
        let mut rng = RngStream::new(3, 1).rng();
        let empty = run_trajectory(&c, &a, &mut rng, 1e-9).unwrap();
        assert!(build_f1(&empty).edges.is_empty());
        let full = run_trajectory(&c, &a, &mut rng, 1e9).unwrap();
        let f1 = build_f1(&full);
        assert_eq!(f1.edges.len(), 11);
        assert_eq!(f1.partition_at(1e9).len(), 1);
    }
}
