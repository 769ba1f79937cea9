//! Edge records, labelled (multi)graphs and component partitions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Spanning,
    Simple,
    Multi,
    Loop,
}

impl EdgeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeKind::Spanning => "spanning",
            EdgeKind::Simple => "simple",
            EdgeKind::Multi => "multi",
            EdgeKind::Loop => "loop",
        }
    }
}

/// A directed edge `source -> target` between vertex labels, born at coalescent time `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub q: f64,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn unordered(&self) -> (usize, usize) {
        (self.source.min(self.target), self.source.max(self.target))
    }
}

/// Vertices `0..n`, spanning edges and surplus edges.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub n: usize,
    pub spanning: Vec<Edge>,
    pub surplus: Vec<Edge>,
}

impl LabeledGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            spanning: Vec::new(),
            surplus: Vec::new(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.spanning.iter().chain(self.surplus.iter())
    }

    pub fn edge_count(&self) -> usize {
        self.spanning.len() + self.surplus.len()
    }

    /// Restriction to edges born at or before `q`.
    pub fn at(&self, q: f64) -> LabeledGraph {
        LabeledGraph {
            n: self.n,
            spanning: self.spanning.iter().copied().filter(|e| e.q <= q).collect(),
            surplus: self.surplus.iter().copied().filter(|e| e.q <= q).collect(),
        }
    }

    pub fn loop_count(&self) -> usize {
        self.edges().filter(|e| e.source == e.target).count()
    }

    /// Whether some unordered pair (or loop) appears more than once.
    pub fn has_duplicate_pairs(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges().any(|e| !seen.insert(e.unordered()))
    }

    pub fn partition(&self) -> Partition {
        let mut uf = UnionFind::new(self.n);
        for e in self.edges() {
            uf.union(e.source, e.target);
        }
        uf.partition()
    }

    /// Bitmask of present unordered pairs in the lexicographic pair order
    /// `(0,1), (0,2), ..., (n-2,n-1)`. Only meaningful for simple graphs with `n <= 11`.
    pub fn edge_mask(&self) -> u64 {
        let mut mask = 0u64;
        for e in self.edges() {
            if e.source != e.target {
                let (a, b) = e.unordered();
                mask |= 1 << pair_index(self.n, a, b);
            }
        }
        mask
    }

    /// Number of surplus edges per component, keyed by the component's smallest vertex.
    pub fn surplus_by_component(&self) -> BTreeMap<usize, usize> {
        let partition = self.partition();
        let mut owner = vec![0; self.n];
        for block in &partition.blocks {
            for &v in block {
                owner[v] = block[0];
            }
        }
        let mut counts: BTreeMap<usize, usize> =
            partition.blocks.iter().map(|b| (b[0], 0)).collect();
        for e in &self.surplus {
            *counts.get_mut(&owner[e.source]).unwrap() += 1;
        }
        counts
    }
}

/// Index of the unordered pair `a < b` among the `n(n-1)/2` pairs in lexicographic order.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// A set partition of vertex labels; blocks sorted internally and by their minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        Self { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block sizes in nonincreasing order.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns `true` if `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }

    pub fn partition(&mut self) -> Partition {
        let n = self.parent.len();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = self.find(v);
            groups.entry(r).or_default().push(v);
        }
        Partition::from_blocks(groups.into_values().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indices_are_dense() {
        let n = 5;
        let mut seen = vec![false; n * (n - 1) / 2];
        for a in 0..n {
            for b in a + 1..n {
                let i = pair_index(n, a, b);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn partition_of_graph() {
        let mut g = LabeledGraph::new(4);
        g.spanning.push(Edge {
            source: 2,
            target: 0,
            q: 1.0,
            kind: EdgeKind::Spanning,
        });
        g.surplus.push(Edge {
            source: 3,
            target: 3,
            q: 2.0,
            kind: EdgeKind::Loop,
        });
        assert_eq!(g.partition().blocks, vec![vec![0, 2], vec![1], vec![3]]);
        assert_eq!(g.loop_count(), 1);
        assert_eq!(g.at(1.5).edge_count(), 1);
        let counts = g.surplus_by_component();
        assert_eq!(counts[&3], 1);
        assert_eq!(counts[&0], 0);
    }
}
