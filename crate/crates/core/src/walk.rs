//! The breadth-first walk `Z^{x,q}`, its reflection `B^{x,q}`, the excursion
//! decomposition and the breadth-first forest `F0(q)`.

use serde::{Deserialize, Serialize};

use crate::config::{neumaier_sum, ClockAssignment, RankedConfig, WeightedConfig};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeKind, Partition};

pub(crate) fn check_time(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(q))
    }
}

/// Piecewise-linear path with unit negative drift and jumps `mass[r]` at `clock[r] / q`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub q: f64,
    ranked: RankedConfig,
    jump_times: Vec<f64>,
}

impl WalkPath {
    pub fn new(ranked: &RankedConfig, q: f64) -> Result<Self> {
        check_time(q)?;
        let jump_times = ranked.clock.iter().map(|c| c / q).collect();
        Ok(Self {
            q,
            ranked: ranked.clone(),
            jump_times,
        })
    }

    pub fn from_clocks(config: &WeightedConfig, clocks: &ClockAssignment, q: f64) -> Result<Self> {
        Self::new(&RankedConfig::new(config, clocks), q)
    }

    pub fn ranked(&self) -> &RankedConfig {
        &self.ranked
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump_sizes(&self) -> &[f64] {
        &self.ranked.mass
    }

    pub fn len(&self) -> usize {
        self.jump_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jump_times.is_empty()
    }

    pub fn total_jump_mass(&self) -> f64 {
        self.ranked.total_mass()
    }

    /// Number of jumps at times `<= s`.
    fn jumps_through(&self, s: f64) -> usize {
        self.jump_times.partition_point(|&t| t <= s)
    }

    /// Number of jumps at times `< s`.
    fn jumps_before(&self, s: f64) -> usize {
        self.jump_times.partition_point(|&t| t < s)
    }

    /// `Z(s)`, right-continuous.
    pub fn eval_z(&self, s: f64) -> f64 {
        self.ranked.prefix[self.jumps_through(s)] - s
    }

    /// `Z(s-)`.
    pub fn eval_z_left(&self, s: f64) -> f64 {
        self.ranked.prefix[self.jumps_before(s)] - s
    }

    /// `Z(t_r -)`, the level just before the jump of rank `r`.
    pub fn level_before_jump(&self, r: usize) -> f64 {
        self.ranked.prefix[r] - self.jump_times[r]
    }

    /// `Z(t_r)`, the top of the jump of rank `r`.
    pub fn level_after_jump(&self, r: usize) -> f64 {
        self.ranked.prefix[r + 1] - self.jump_times[r]
    }

    pub fn reflect(&self) -> ReflectedWalk {
        ReflectedWalk::new(self.clone())
    }

    /// Walk as an event list for plotting.
    pub fn events(&self) -> WalkEvents {
        let events = (0..self.len())
            .map(|r| WalkEvent {
                s: self.jump_times[r],
                rank: r,
                vertex: self.ranked.vertex[r],
                mass: self.ranked.mass[r],
                z_before: self.level_before_jump(r),
                z_after: self.level_after_jump(r),
            })
            .collect();
        WalkEvents {
            q: self.q,
            drift: -1.0,
            events,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkEvent {
    pub s: f64,
    pub rank: usize,
    pub vertex: usize,
    pub mass: f64,
    pub z_before: f64,
    pub z_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkEvents {
    pub q: f64,
    pub drift: f64,
    pub events: Vec<WalkEvent>,
}

/// `B(s) = Z(s) - inf_{u <= s} Z(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedWalk {
    path: WalkPath,
    /// `running_min[i] = min(0, Z(t_0-), ..., Z(t_{i-1}-))`.
    running_min: Vec<f64>,
}

impl ReflectedWalk {
    fn new(path: WalkPath) -> Self {
        let mut running_min = Vec::with_capacity(path.len() + 1);
        let mut m = 0.0f64;
        running_min.push(m);
        for r in 0..path.len() {
            m = m.min(path.level_before_jump(r));
            running_min.push(m);
        }
        Self { path, running_min }
    }

    pub fn path(&self) -> &WalkPath {
        &self.path
    }

    pub fn eval(&self, s: f64) -> f64 {
        let z = self.path.eval_z(s);
        let floor = self.running_min[self.path.jumps_through(s)].min(z);
        z - floor
    }

    pub fn eval_left(&self, s: f64) -> f64 {
        let z = self.path.eval_z_left(s);
        let floor = self.running_min[self.path.jumps_before(s)].min(z);
        z - floor
    }
}

/// One excursion of `B` above zero carrying ranks `first..=last`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    pub first: usize,
    pub last: usize,
    pub start: f64,
    pub end: f64,
}

impl Excursion {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn ranks(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }

    pub fn contains_rank(&self, r: usize) -> bool {
        self.first <= r && r <= self.last
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionDecomposition {
    pub q: f64,
    pub excursions: Vec<Excursion>,
    /// Load-free intervals `F_k = (sup I_{k-1}, start of excursion k]`.
    pub load_free: Vec<(f64, f64)>,
}

impl ExcursionDecomposition {
    /// Excursion containing rank `r`.
    pub fn excursion_of(&self, r: usize) -> &Excursion {
        let i = self.excursions.partition_point(|e| e.last < r);
        &self.excursions[i]
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.excursions.iter().map(Excursion::length).collect()
    }
}

/// Split the walk into excursions. Rank `r` joins the excursion rooted at `root`
/// iff it is heard through `r - 1`.
pub fn decompose(path: &WalkPath) -> ExcursionDecomposition {
    let rc = path.ranked();
    let q = path.q;
    let n = rc.len();
    let mut excursions = Vec::new();
    let mut load_free = Vec::new();
    let mut prev_end = 0.0;
    let mut root = 0;
    while root < n {
        let mut last = root;
        while last + 1 < n && rc.heard(root, last, last + 1, q) {
            last += 1;
        }
        let start = path.jump_times()[root];
        let end = start + rc.block_mass(root, last);
        load_free.push((prev_end, start));
        excursions.push(Excursion {
            first: root,
            last,
            start,
            end,
        });
        prev_end = end;
        root = last + 1;
    }
    ExcursionDecomposition {
        q,
        excursions,
        load_free,
    }
}

/// Rooted forest on vertex labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub q: f64,
    pub parent: Vec<Option<usize>>,
    pub roots: Vec<usize>,
}

impl Forest {
    pub fn trivial(n: usize) -> Self {
        Self {
            q: 0.0,
            parent: vec![None; n],
            roots: (0..n).collect(),
        }
    }

    /// Edges `child -> parent`, all born at this forest's `q`, listed by child label.
    pub fn edges(&self) -> Vec<Edge> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(child, p)| {
                p.map(|parent| Edge {
                    source: child,
                    target: parent,
                    q: self.q,
                    kind: EdgeKind::Spanning,
                })
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    pub fn partition(&self) -> Partition {
        let mut uf = crate::graph::UnionFind::new(self.parent.len());
        for (c, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                uf.union(c, *p);
            }
        }
        uf.partition()
    }
}

/// Rank-level output of the breadth-first sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BreadthFirstSweep {
    pub decomposition: ExcursionDecomposition,
    /// Parent rank of each rank (`None` for roots).
    pub parent: Vec<Option<usize>>,
    /// Generation of each rank within its tree (roots at 0).
    pub depth: Vec<usize>,
}

/// Single left-to-right sweep producing the same forest as the nested-loop
/// formulation: rank `r` is a child of the first `i` (in rank order) whose
/// listening interval `I_i` contains `clock[r] / q`.
pub fn sweep(rc: &RankedConfig, q: f64) -> Result<BreadthFirstSweep> {
    let path = WalkPath::new(rc, q)?;
    let decomposition = decompose(&path);
    let n = rc.len();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    for exc in &decomposition.excursions {
        let root = exc.first;
        let mut listener = root;
        for r in root + 1..=exc.last {
            while !rc.heard(root, listener, r, q) {
                listener += 1;
            }
            parent[r] = Some(listener);
            depth[r] = depth[listener] + 1;
        }
    }
    Ok(BreadthFirstSweep {
        decomposition,
        parent,
        depth,
    })
}

/// Forest `F0(q)` and the (unordered) component masses `Y(q)` in excursion order.
pub fn breadth_first_forest(
    config: &WeightedConfig,
    clocks: &ClockAssignment,
    q: f64,
) -> Result<(Forest, Vec<f64>)> {
    let rc = RankedConfig::new(config, clocks);
    let sw = sweep(&rc, q)?;
    Ok(forest_from_sweep(&rc, &sw, q))
}

pub(crate) fn forest_from_sweep(rc: &RankedConfig, sw: &BreadthFirstSweep, q: f64) -> (Forest, Vec<f64>) {
    let n = rc.len();
    let mut parent = vec![None; n];
    for r in 0..n {
        parent[rc.vertex[r]] = sw.parent[r].map(|p| rc.vertex[p]);
    }
    let roots = sw
        .decomposition
        .excursions
        .iter()
        .map(|e| rc.vertex[e.first])
        .collect();
    let masses = sw
        .decomposition
        .excursions
        .iter()
        .map(|e| neumaier_sum(rc.mass[e.first..=e.last].iter().copied()))
        .collect();
    (Forest { q, parent, roots }, masses)
}

/// Exact integral of `B` over an excursion. Between jumps `B` is linear with slope -1,
/// so each piece is a trapezoid.
pub fn excursion_area(path: &WalkPath, exc: &Excursion) -> f64 {
    let base = path.level_before_jump(exc.first);
    let times = path.jump_times();
    let mut pieces = Vec::with_capacity(exc.last - exc.first + 1);
    for r in exc.ranks() {
        let left = times[r];
        let right = if r < exc.last { times[r + 1] } else { exc.end };
        let top = path.level_after_jump(r) - base;
        let bottom = top - (right - left);
        pieces.push(0.5 * (top + bottom) * (right - left));
    }
    neumaier_sum(pieces)
}
