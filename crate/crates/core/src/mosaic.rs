//! The excursion mosaic at a fixed `q`: ornamented excursions with their blue (active)
//! and gray (inactive) baselines, structural validation, the orders they induce,
//! reconstruction of a merger history, and the slice decomposition of the area under
//! the reflected walk.
//!
//! Baselines are stored combinatorially. Every vertex except the leading one of its
//! excursion owns one gray baseline, created when its block was absorbed; it reaches the
//! hypotenuse lines of the vertices that block carried at that moment.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{neumaier_sum, RankedConfig};
use crate::dynamics::{ComponentBlock, MergerEvent, Trajectory};
use crate::error::{Error, Result};
use crate::walk::check_time;

const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineStatus {
    Active,
    Inactive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    /// Local index of the owning vertex (0 is the leading vertex).
    pub owner: usize,
    pub status: BaselineStatus,
    /// Height above the excursion's own baseline, i.e. `B(t_owner -)`.
    pub level: f64,
    /// Horizontal pieces `[a, b]`, positions relative to the excursion start.
    pub extent: Vec<(f64, f64)>,
    /// Local indices of the vertices whose hypotenuse lines the baseline reaches, sorted.
    pub reach: Vec<usize>,
}

/// One excursion of the reflected walk at `q` with its baselines. Self-contained: the
/// geometry can be recomputed from `q`, the masses and the clocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrnamentedExcursion {
    pub q: f64,
    /// Rank of the leading vertex in the full configuration.
    pub first_rank: usize,
    /// Vertex labels in clock order.
    pub vertices: Vec<usize>,
    pub masses: Vec<f64>,
    /// Raw clocks `xi`, nondecreasing.
    pub clocks: Vec<f64>,
    /// Active baseline first, then gray baselines by owner.
    pub baselines: Vec<Baseline>,
}

struct LocalGeometry {
    prefix: Vec<f64>,
    pos: Vec<f64>,
}

impl LocalGeometry {
    fn new(q: f64, masses: &[f64], clocks: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(masses.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &m in masses {
            acc += m;
            prefix.push(acc);
        }
        let pos = clocks.iter().map(|&c| (c - clocks[0]) / q).collect();
        Self { prefix, pos }
    }

    fn level(&self, r: usize) -> f64 {
        if r == 0 {
            0.0
        } else {
            self.prefix[r] - self.pos[r]
        }
    }

    /// Where the hypotenuse line of `e` crosses the level of `r`.
    fn crossing(&self, r: usize, e: usize) -> f64 {
        self.prefix[e + 1] - self.level(r)
    }

    fn length(&self) -> f64 {
        self.prefix[self.prefix.len() - 1]
    }
}

impl OrnamentedExcursion {
    /// Build from local data and, for each non-leading vertex `r`, the last vertex `reach_end[r - 1]`
    /// reached by its gray baseline.
    pub fn from_reach_ends(
        q: f64,
        first_rank: usize,
        vertices: Vec<usize>,
        masses: Vec<f64>,
        clocks: Vec<f64>,
        reach_end: &[usize],
    ) -> Self {
        let n = masses.len();
        debug_assert_eq!(reach_end.len() + 1, n);
        let geo = LocalGeometry::new(q, &masses, &clocks);
        let mut baselines = vec![Baseline {
            owner: 0,
            status: BaselineStatus::Active,
            level: 0.0,
            extent: vec![(0.0, geo.length())],
            reach: (0..n).collect(),
        }];
        for r in 1..n {
            let e = reach_end[r - 1];
            baselines.push(Baseline {
                owner: r,
                status: BaselineStatus::Inactive,
                level: geo.level(r),
                extent: vec![(geo.pos[r], geo.crossing(r, e))],
                reach: (r..=e).collect(),
            });
        }
        Self {
            q,
            first_rank,
            vertices,
            masses,
            clocks,
            baselines,
        }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Excursion length, the total mass carried.
    pub fn length(&self) -> f64 {
        neumaier_sum(self.masses.iter().copied())
    }

    pub fn gray(&self) -> impl Iterator<Item = &Baseline> {
        self.baselines.iter().filter(|b| b.status == BaselineStatus::Inactive)
    }

    fn gray_of(&self, owner: usize) -> Option<&Baseline> {
        self.gray().find(|b| b.owner == owner)
    }

    /// Jump positions relative to the excursion start.
    pub fn positions(&self) -> Vec<f64> {
        LocalGeometry::new(self.q, &self.masses, &self.clocks).pos
    }

    /// Area under the reflected walk over the excursion, segment by segment.
    pub fn area(&self) -> f64 {
        let geo = LocalGeometry::new(self.q, &self.masses, &self.clocks);
        let n = self.len();
        let mut parts = Vec::with_capacity(n);
        for r in 0..n {
            let top = geo.level(r) + self.masses[r];
            let end = if r + 1 < n { geo.pos[r + 1] } else { geo.length() };
            let bottom = if r + 1 < n { geo.level(r + 1) } else { 0.0 };
            parts.push(0.5 * (top + bottom) * (end - geo.pos[r]));
        }
        neumaier_sum(parts)
    }

    /// The ranked data of the excursion, ranks local.
    pub fn ranked(&self) -> RankedConfig {
        RankedConfig::from_ranked(self.vertices.clone(), self.masses.clone(), self.clocks.clone())
    }
}

/// One ornamented excursion per component present at `q`.
pub fn build_mosaic(trajectory: &Trajectory, q: f64) -> Result<Vec<OrnamentedExcursion>> {
    check_time(q)?;
    let rc = &trajectory.ranked;
    let n = rc.len();
    let mut reach_end: Vec<usize> = (0..n).collect();
    for ev in trajectory.events.iter().take_while(|e| e.time <= q) {
        reach_end[ev.right.first] = ev.right.last;
    }
    Ok(trajectory
        .blocks_at(q)
        .iter()
        .map(|b| {
            let ends: Vec<usize> = (b.first + 1..=b.last).map(|r| reach_end[r] - b.first).collect();
            OrnamentedExcursion::from_reach_ends(
                q,
                b.first,
                rc.vertex[b.ranks()].to_vec(),
                rc.mass[b.ranks()].to_vec(),
                rc.clock[b.ranks()].to_vec(),
                &ends,
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Two baselines on the same level.
    #[serde(rename = "O'.1")]
    DistinctLevels,
    /// A gray baseline is not one continuous segment starting at its owner.
    #[serde(rename = "O'.2")]
    Continuity,
    /// Reach not contiguous from the owner, or not nested.
    #[serde(rename = "O'.3")]
    Monotonicity,
    /// Baselines inconsistent with the walk, or missing/duplicated.
    #[serde(rename = "structure")]
    Structure,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::DistinctLevels => "O'.1",
            Rule::Continuity => "O'.2",
            Rule::Monotonicity => "O'.3",
            Rule::Structure => "structure",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Local owners of the offending baselines.
    pub owners: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn rules(&self) -> Vec<Rule> {
        let mut r: Vec<Rule> = self.violations.iter().map(|v| v.rule).collect();
        r.dedup();
        r
    }

    pub fn cites(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} {:?}: {}", v.rule, v.owners, v.detail)?;
        }
        Ok(())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= GEOMETRY_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Check the structural rules. Geometry (levels, extents) is also checked against the
/// walk recomputed from the excursion's own masses and clocks.
pub fn validate(exc: &OrnamentedExcursion) -> std::result::Result<(), ViolationReport> {
    let mut report = ViolationReport::default();
    let n = exc.len();
    macro_rules! push {
        ($rule:expr, $owners:expr, $detail:expr) => {
            report.violations.push(Violation {
                rule: $rule,
                owners: $owners,
                detail: $detail,
            })
        };
    }

    if n == 0 || exc.vertices.len() != n || exc.clocks.len() != n {
        push!(Rule::Structure, vec![], "inconsistent vertex data".into());
        return Err(report);
    }
    let geo = LocalGeometry::new(exc.q, &exc.masses, &exc.clocks);

    let active: Vec<&Baseline> = exc
        .baselines
        .iter()
        .filter(|b| b.status == BaselineStatus::Active)
        .collect();
    if active.len() != 1 || active[0].owner != 0 {
        push!(Rule::Structure, active.iter().map(|b| b.owner).collect(), "need one active baseline owned by the leading vertex".into());
    }
    let mut owned = vec![0usize; n];
    for b in exc.gray() {
        if b.owner == 0 || b.owner >= n {
            push!(Rule::Structure, vec![b.owner], "gray baseline owner out of range".into());
        } else {
            owned[b.owner] += 1;
        }
    }
    for (r, &c) in owned.iter().enumerate().skip(1) {
        if c != 1 {
            push!(Rule::Structure, vec![r], format!("{c} gray baselines"));
        }
    }
    if !report.violations.is_empty() {
        return Err(report);
    }

    // O'.1
    let mut levels: Vec<(f64, usize)> = exc.baselines.iter().map(|b| (b.level, b.owner)).collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in levels.windows(2) {
        if w[0].0 == w[1].0 {
            push!(Rule::DistinctLevels, vec![w[0].1, w[1].1], format!("shared level {}", w[0].0));
        }
    }

    // O'.2
    for b in exc.gray() {
        let start = geo.pos[b.owner];
        match b.extent.as_slice() {
            [(a, e)] if close(*a, start) && e > a => {}
            [_] => push!(Rule::Continuity, vec![b.owner], "segment does not start at its owner".into()),
            pieces => push!(Rule::Continuity, vec![b.owner], format!("{} pieces", pieces.len())),
        }
    }

    // O'.3
    for b in exc.gray() {
        let contiguous = b.reach.first() == Some(&b.owner)
            && b.reach.windows(2).all(|w| w[1] == w[0] + 1)
            && b.reach.last().is_some_and(|&e| e < n);
        if !contiguous {
            push!(Rule::Monotonicity, vec![b.owner], format!("reach {:?} skips a hypotenuse", b.reach));
            continue;
        }
        for &l in &b.reach[1..] {
            let inner = exc.gray_of(l).expect("counted above");
            if !inner.reach.iter().all(|m| b.reach.contains(m)) {
                push!(Rule::Monotonicity, vec![b.owner, l], "reach not nested".into());
            }
        }
    }

    // geometry
    for b in exc.gray() {
        if !close(b.level, geo.level(b.owner)) {
            push!(Rule::Structure, vec![b.owner], "level does not match the walk".into());
        }
        if let (Some(&(_, end)), Some(&e)) = (b.extent.last(), b.reach.iter().max()) {
            if e < n && !close(end, geo.crossing(b.owner, e)) {
                push!(Rule::Structure, vec![b.owner], "extent does not end on its last hypotenuse".into());
            }
        }
    }
    if active[0].level != 0.0 || active[0].reach != (0..n).collect::<Vec<_>>() {
        push!(Rule::Structure, vec![0], "active baseline must sit at 0 and reach every vertex".into());
    }

    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(report)
    }
}

/// The partial order as a rooted tree on local indices and the induced total order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseOrders {
    /// Covering parent of each vertex; `None` for the leading vertex.
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Non-leading vertices, greatest first.
    pub total: Vec<usize>,
}

impl HasseOrders {
    /// `i` dominates `j`.
    pub fn succeq(&self, i: usize, j: usize) -> bool {
        let mut v = Some(j);
        while let Some(u) = v {
            if u == i {
                return true;
            }
            v = self.parent[u];
        }
        false
    }
}

pub fn orders(exc: &OrnamentedExcursion) -> Result<HasseOrders> {
    validate(exc).map_err(|r| Error::InvalidExcursion(r.to_string()))?;
    let n = exc.len();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    for j in 1..n {
        let p = (1..j)
            .rev()
            .find(|&i| exc.gray_of(i).is_some_and(|b| b.reach.contains(&j)))
            .unwrap_or(0);
        parent[j] = Some(p);
        depth[j] = depth[p] + 1;
    }
    let mut total: Vec<usize> = (1..n).collect();
    total.sort_by(|&a, &b| depth[a].cmp(&depth[b]).then(b.cmp(&a)));
    Ok(HasseOrders { parent, depth, total })
}

/// A merger history that produces `exc`: absorptions in reverse total order at synthetic
/// times spread over `(0, q)`. Ranks are local to the excursion.
pub fn replay(exc: &OrnamentedExcursion) -> Result<Trajectory> {
    let ord = orders(exc)?;
    let rc = exc.ranked();
    let n = exc.len();
    // block_end[f] is the last rank of the block led by f
    let mut block_end: Vec<usize> = (0..n).collect();
    let mut leader: Vec<usize> = (0..n).collect();
    let mut events = Vec::with_capacity(n.saturating_sub(1));
    for (i, &r) in ord.total.iter().rev().enumerate() {
        let e = exc.gray_of(r).and_then(|b| b.reach.last().copied()).expect("valid");
        if block_end[r] != e {
            return Err(Error::InvalidExcursion(format!("vertex {r} cannot carry 0..={e}")));
        }
        let f = leader[r - 1];
        let left = ComponentBlock::new(&rc, f, block_end[f]);
        let right = ComponentBlock::new(&rc, r, e);
        block_end[f] = e;
        for l in r..=e {
            leader[l] = f;
        }
        let p = ord.parent[r].expect("non-leading");
        events.push(MergerEvent {
            time: exc.q * (i + 1) as f64 / n as f64,
            left,
            right,
            edge: (rc.vertex[r], rc.vertex[p]),
        });
    }
    Ok(Trajectory {
        ranked: rc,
        q_max: exc.q,
        events,
    })
}

/// Whether two excursions agree: same data and reaches, levels and extents within `tol`.
pub fn same_excursion(a: &OrnamentedExcursion, b: &OrnamentedExcursion, tol: f64) -> bool {
    a.q == b.q
        && a.vertices == b.vertices
        && a.masses == b.masses
        && a.clocks == b.clocks
        && a.baselines.len() == b.baselines.len()
        && a.baselines.iter().zip(&b.baselines).all(|(x, y)| {
            x.owner == y.owner
                && x.status == y.status
                && x.reach == y.reach
                && (x.level - y.level).abs() <= tol
                && x.extent.len() == y.extent.len()
                && x.extent
                    .iter()
                    .zip(&y.extent)
                    .all(|(p, r)| (p.0 - r.0).abs() <= tol && (p.1 - r.1).abs() <= tol)
        })
}

/// The region contributed by `zeta^{l; j-k}`: base `x_l`, height `Xi (1 - T/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parallelogram {
    pub l: usize,
    pub j: usize,
    pub k: usize,
    pub activation: f64,
    pub base: f64,
    pub height: f64,
    /// Rank owning the upper boundary, always `k + 1`.
    pub top_owner: usize,
}

impl Parallelogram {
    pub fn area(&self) -> f64 {
        self.base * self.height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    /// Rank of the owner.
    pub rank: usize,
    pub vertex: usize,
    /// `x^2 / 2`.
    pub triangle: f64,
    pub parallelograms: Vec<Parallelogram>,
}

impl Slice {
    pub fn area(&self) -> f64 {
        neumaier_sum(std::iter::once(self.triangle).chain(self.parallelograms.iter().map(Parallelogram::area)))
    }
}

/// One slice per rank, parallelograms for every merger at or before `q`.
pub fn slice_decomposition(trajectory: &Trajectory, q: f64) -> Result<Vec<Slice>> {
    check_time(q)?;
    let rc = &trajectory.ranked;
    let mut slices: Vec<Slice> = (0..rc.len())
        .map(|r| Slice {
            rank: r,
            vertex: rc.vertex[r],
            triangle: rc.mass[r] * rc.mass[r] / 2.0,
            parallelograms: Vec::new(),
        })
        .collect();
    for ev in trajectory.events.iter().take_while(|e| e.time <= q) {
        let height = ev.left.mass * (1.0 - ev.time / q);
        for l in ev.right.ranks() {
            slices[l].parallelograms.push(Parallelogram {
                l,
                j: ev.left.first,
                k: ev.left.last,
                activation: ev.time,
                base: rc.mass[l],
                height,
                top_owner: ev.left.last + 1,
            });
        }
    }
    Ok(slices)
}

/// Total slice area of the ranks in `block`.
pub fn block_area(slices: &[Slice], block: &ComponentBlock) -> f64 {
    neumaier_sum(slices[block.first..=block.last].iter().map(Slice::area))
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 300.0;
const SVG_PAD: f64 = 20.0;

/// SVG picture of the reflected walk at `q` with its mosaic: walk polyline, blue and gray
/// baselines, dashed hypotenuse lines and optionally the jump triangles shaded.
pub fn render_svg(trajectory: &Trajectory, q: f64, shade_slices: bool) -> Result<String> {
    let excursions = build_mosaic(trajectory, q)?;
    let rc = &trajectory.ranked;
    let start = |e: &OrnamentedExcursion| rc.clock[e.first_rank] / q;
    let width = excursions
        .iter()
        .map(|e| start(e) + e.length())
        .fold(0.0, f64::max)
        .max(1e-12);
    let mut height: f64 = 1e-12;
    for e in &excursions {
        let geo = LocalGeometry::new(q, &e.masses, &e.clocks);
        for r in 0..e.len() {
            height = height.max(geo.level(r) + e.masses[r]);
        }
    }
    let sx = (SVG_W - 2.0 * SVG_PAD) / width;
    let sy = (SVG_H - 2.0 * SVG_PAD) / height;
    let px = |s: f64| SVG_PAD + s * sx;
    let py = |b: f64| SVG_H - SVG_PAD - b * sy;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SVG_W}" height="{SVG_H}" fill="white"/>"#);

    let mut points = vec![(0.0, 0.0)];
    for e in &excursions {
        let s0 = start(e);
        let geo = LocalGeometry::new(q, &e.masses, &e.clocks);
        for r in 0..e.len() {
            let lv = geo.level(r);
            points.push((s0 + geo.pos[r], lv));
            points.push((s0 + geo.pos[r], lv + e.masses[r]));
            if shade_slices {
                let _ = writeln!(
                    out,
                    r##"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="#f0c080" fill-opacity="0.5" stroke="none"/>"##,
                    px(s0 + geo.pos[r]),
                    py(lv),
                    px(s0 + geo.pos[r]),
                    py(lv + e.masses[r]),
                    px(s0 + geo.pos[r] + e.masses[r]),
                    py(lv)
                );
            }
        }
        points.push((s0 + geo.length(), 0.0));
    }
    points.push((width, 0.0));

    for e in &excursions {
        let s0 = start(e);
        let geo = LocalGeometry::new(q, &e.masses, &e.clocks);
        for r in 0..e.len() {
            let top = geo.level(r) + e.masses[r];
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888888" stroke-dasharray="4,3"/>"##,
                px(s0 + geo.pos[r]),
                py(top),
                px(s0 + geo.pos[r] + top),
                py(0.0)
            );
        }
        for b in &e.baselines {
            let color = match b.status {
                BaselineStatus::Active => "#1f5fd0",
                BaselineStatus::Inactive => "#9a9a9a",
            };
            for &(a, z) in &b.extent {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                    px(s0 + a),
                    py(b.level),
                    px(s0 + z),
                    py(b.level)
                );
            }
        }
    }

    out.push_str(r#"<polyline fill="none" stroke="black" stroke-width="1.5" points=""#);
    for (i, (s, b)) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", px(*s), py(*b));
    }
    out.push_str("\"/>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{sample_clocks, ClockAssignment, RngStream, WeightedConfig};
    use crate::dynamics::{run_ranked, run_trajectory};
    use crate::walk::{decompose, excursion_area, WalkPath};
    use rand::Rng;

    fn four(ends: [usize; 2]) -> OrnamentedExcursion {
        OrnamentedExcursion::from_reach_ends(
            1.0,
            0,
            vec![0, 1, 2, 3],
            vec![1.0; 4],
            vec![0.0, 0.1, 0.2, 0.3],
            &[ends[0], ends[1], 3],
        )
    }

    /// Four-vertex order table rows as `(e2, e3)` in 1-based labels, with the expected total order.
    const TABLE: [([usize; 2], [usize; 3]); 5] = [
        ([2, 3], [4, 3, 2]),
        ([2, 4], [3, 2, 4]),
        ([3, 3], [4, 2, 3]),
        ([4, 3], [2, 4, 3]),
        ([4, 4], [2, 3, 4]),
    ];

    #[test]
    fn five_shapes_give_table_orders() {
        for (ends, want) in TABLE {
            let exc = four([ends[0] - 1, ends[1] - 1]);
            validate(&exc).unwrap();
            let ord = orders(&exc).unwrap();
            let got: Vec<usize> = ord.total.iter().map(|&l| l + 1).collect();
            assert_eq!(got, want.to_vec(), "{ends:?}");
            let back = build_mosaic(&replay(&exc).unwrap(), 1.0).unwrap();
            assert_eq!(back.len(), 1);
            assert!(same_excursion(&back[0], &exc, 0.0));
        }
    }

    #[test]
    fn chain_and_star_trees() {
        let chain = orders(&four([3, 3])).unwrap();
        assert_eq!(chain.parent, vec![None, Some(0), Some(1), Some(2)]);
        assert!(chain.succeq(1, 3));
        let star = orders(&four([1, 2])).unwrap();
        assert_eq!(star.parent, vec![None, Some(0), Some(0), Some(0)]);
        assert!(!star.succeq(1, 2));
    }

    #[test]
    fn skipped_interval_cites_continuity() {
        let mut exc = OrnamentedExcursion::from_reach_ends(1.0, 0, vec![0, 1, 2], vec![1.0; 3], vec![0.0, 0.3, 0.5], &[2, 2]);
        let b = exc.baselines.iter_mut().find(|b| b.owner == 1).unwrap();
        let (a, z) = b.extent[0];
        b.extent = vec![(a, a + 0.3 * (z - a)), (a + 0.6 * (z - a), z)];
        let report = validate(&exc).unwrap_err();
        assert_eq!(report.rules(), vec![Rule::Continuity]);
        assert_eq!(report.violations[0].owners, vec![1]);
    }

    #[test]
    fn skipped_hypotenuse_cites_monotonicity() {
        let mut exc = four([3, 2]);
        let b = exc.baselines.iter_mut().find(|b| b.owner == 1).unwrap();
        b.reach = vec![1, 3];
        let report = validate(&exc).unwrap_err();
        assert_eq!(report.rules(), vec![Rule::Monotonicity]);
        assert!(orders(&exc).is_err());
        assert!(replay(&exc).is_err());
    }

    #[test]
    fn before_first_merger_all_trivial() {
        let c = WeightedConfig::new(vec![2.0, 1.0]).unwrap();
        let a = ClockAssignment::from_xi(&c, vec![1.0, 3.5]).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        let t = run_trajectory(&c, &a, &mut rng, 3.0).unwrap();
        let m = build_mosaic(&t, 1.0).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|e| e.gray().count() == 0));
        let m = build_mosaic(&t, 2.0).unwrap();
        assert_eq!(m.len(), 1);
        let gray: Vec<&Baseline> = m[0].gray().collect();
        assert_eq!(gray.len(), 1);
        // Z(t_1 -) - Z(t_0 -) = 2 - (3.5 - 1) / 2
        assert!((gray[0].level - 0.75).abs() < 1e-12);
        assert_eq!(gray[0].extent, vec![(1.25, 2.25)]);
        assert!((m[0].area() - 3.25).abs() < 1e-12);
    }

    #[test]
    fn forced_chain() {
        // each merger absorbs the next singleton into the growing block
        let rc = RankedConfig::from_ranked(vec![0, 1, 2, 3], vec![1.0; 4], vec![0.0, 1.0, 3.0, 6.0]);
        let mut rng = RngStream::new(0, 0).rng();
        let t = run_ranked(rc, &mut rng, 10.0).unwrap();
        let m = build_mosaic(&t, 10.0).unwrap();
        assert_eq!(m.len(), 1);
        let ord = orders(&m[0]).unwrap();
        assert_eq!(ord.total, vec![3, 2, 1]);
        let gray: Vec<&Baseline> = m[0].gray().collect();
        assert!(gray.iter().all(|b| b.reach.len() == 1));
        assert!(gray.windows(2).all(|w| w[0].level < w[1].level));
    }

    #[test]
    fn random_round_trips_and_areas() {
        let mut rng = RngStream::new(77, 0).rng();
        for rep in 0..400u64 {
            let n = 1 + (rep as usize % 8);
            let masses: Vec<f64> = (0..n).map(|_| 0.1 + 2.0 * rng.random::<f64>()).collect();
            let c = WeightedConfig::new(masses).unwrap();
            let a = sample_clocks(&c, RngStream::new(rep, 1));
            let q = 0.05 + 4.0 * rng.random::<f64>();
            let t = run_trajectory(&c, &a, &mut rng, q).unwrap();
            let mosaic = build_mosaic(&t, q).unwrap();
            let slices = slice_decomposition(&t, q).unwrap();
            let path = WalkPath::new(&t.ranked, q).unwrap();
            let dec = decompose(&path);
            assert_eq!(dec.excursions.len(), mosaic.len());
            for ((exc, block), walk_exc) in mosaic.iter().zip(t.blocks_at(q)).zip(&dec.excursions) {
                validate(exc).unwrap();
                let back = build_mosaic(&replay(exc).unwrap(), q).unwrap();
                assert!(same_excursion(&back[0], exc, 1e-12));
                let trapezoid = excursion_area(&path, walk_exc);
                assert!((block_area(&slices, &block) - trapezoid).abs() < 1e-9);
                assert!((exc.area() - trapezoid).abs() < 1e-9);
            }
            for s in &slices {
                for p in &s.parallelograms {
                    let rate = (q - p.activation) * s_mass(&t, p.l) * (p.height / (1.0 - p.activation / q));
                    assert!((rate - q * p.area()).abs() < 1e-9);
                    assert_eq!(p.top_owner, p.k + 1);
                }
            }
        }
    }

    fn s_mass(t: &Trajectory, l: usize) -> f64 {
        t.ranked.mass[l]
    }

    #[test]
    fn parallelogram_height_example() {
        let rc = RankedConfig::from_ranked(vec![0, 1], vec![2.0, 1.0], vec![1.0, 3.5]);
        let mut rng = RngStream::new(0, 0).rng();
        let t = run_ranked(rc, &mut rng, 3.0).unwrap();
        let s = slice_decomposition(&t, 2.5).unwrap();
        assert_eq!(s[1].parallelograms[0].height, 1.0);
        assert_eq!(s[1].parallelograms[0].area(), 1.0);
        let s = slice_decomposition(&t, 1.25).unwrap();
        assert_eq!(s[1].parallelograms[0].height, 0.0);
    }

    #[test]
    fn svg_is_deterministic() {
        let c = WeightedConfig::new(vec![1.0, 0.5, 2.0, 1.5, 0.7]).unwrap();
        let a = sample_clocks(&c, RngStream::new(3, 1));
        let t1 = run_trajectory(&c, &a, &mut RngStream::new(3, 2).rng(), 2.5).unwrap();
        let t2 = run_trajectory(&c, &a, &mut RngStream::new(3, 2).rng(), 2.5).unwrap();
        let s1 = render_svg(&t1, 2.5, true).unwrap();
        assert_eq!(s1, render_svg(&t2, 2.5, true).unwrap());
        assert!(s1.starts_with("<svg"));
        assert!(s1.contains("polyline"));
    }
}
