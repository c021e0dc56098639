//! Stallings foldings: finitely generated subgroups of a free group as
//! folded labeled graphs.
//!
//! A subgroup given by generator words becomes a wedge of loops at a base
//! vertex, one loop per generator, edges labeled by generator index. Edges
//! are then folded (same-label edges out of, or into, a vertex are merged)
//! until the graph is deterministic, and degree-one vertices other than the
//! base are pruned. Membership of a word is path tracing from the base;
//! the subgroup is all of F exactly when the folded graph is the rank-n
//! rose on a single vertex.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::word::{Sign, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("generator word uses letter x{index} outside rank {rank}")]
    WordOutOfRank { index: u16, rank: u16 },
    #[error("operation requires a folded graph")]
    NotFolded,
}

/// Directed edge labeled by a positive generator index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Edge {
    from: u32,
    label: u16,
    to: u32,
}

/// Labeled graph with a distinguished base vertex (always vertex 0).
///
/// Unfolded graphs exist only as wedges fresh from [`SubgroupGraph::wedge`];
/// [`SubgroupGraph::fold`] produces the deterministic core graph on which
/// membership and generation queries are allowed.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    rank: u16,
    folded: bool,
    vertex_count: u32,
    edges: Vec<Edge>,
    /// Folded only: `out[v][k-1]` is the target of the `k`-labeled edge
    /// leaving `v`; `inn[v][k-1]` its mirror.
    out: Vec<Vec<Option<u32>>>,
    inn: Vec<Vec<Option<u32>>>,
}

/// Builds and folds the subgroup graph for the given generators.
pub fn fold(generators: &[Word], rank: u16) -> Result<SubgroupGraph, SubgroupError> {
    Ok(SubgroupGraph::wedge(generators, rank)?.fold())
}

impl SubgroupGraph {
    /// The unfolded wedge: one cycle at the base per nonempty generator.
    pub fn wedge(generators: &[Word], rank: u16) -> Result<SubgroupGraph, SubgroupError> {
        for w in generators {
            if w.max_index() > rank {
                return Err(SubgroupError::WordOutOfRank {
                    index: w.max_index(),
                    rank,
                });
            }
        }
        let mut graph = SubgroupGraph {
            rank,
            folded: false,
            vertex_count: 1,
            edges: Vec::new(),
            out: Vec::new(),
            inn: Vec::new(),
        };
        for w in generators {
            if w.is_empty() {
                continue;
            }
            let mut cur = 0u32;
            let letters = w.letters();
            for (pos, l) in letters.iter().enumerate() {
                let next = if pos + 1 == letters.len() {
                    0
                } else {
                    let v = graph.vertex_count;
                    graph.vertex_count += 1;
                    v
                };
                // A positively signed letter is a forward edge; an inverse
                // letter is the same edge traversed backwards.
                let edge = match l.sign() {
                    Sign::Plus => Edge { from: cur, label: l.index(), to: next },
                    Sign::Minus => Edge { from: next, label: l.index(), to: cur },
                };
                graph.edges.push(edge);
                cur = next;
            }
        }
        Ok(graph)
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    pub fn rank(&self) -> u16 {
        self.rank
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    /// Folds to a fixpoint, prunes hanging vertices, and renumbers
    /// canonically (breadth-first from the base, labels ascending, forward
    /// direction before backward). The result is independent of the order
    /// the generators were inserted in.
    pub fn fold(self) -> SubgroupGraph {
        let mut uf = UnionFind::new(self.vertex_count as usize);
        let mut edges = self.edges.clone();

        // Merge targets of same-label edges leaving one class, and sources
        // of same-label edges entering one class, until stable.
        loop {
            let mut changed = false;
            let mut seen_out: std::collections::HashMap<(u32, u16), u32> = Default::default();
            let mut seen_in: std::collections::HashMap<(u32, u16), u32> = Default::default();
            for e in &edges {
                let from = uf.find(e.from);
                let to = uf.find(e.to);
                match seen_out.entry((from, e.label)) {
                    std::collections::hash_map::Entry::Occupied(prev) => {
                        if uf.union(*prev.get(), to) {
                            changed = true;
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(to);
                    }
                }
                let from = uf.find(e.from);
                let to = uf.find(e.to);
                match seen_in.entry((to, e.label)) {
                    std::collections::hash_map::Entry::Occupied(prev) => {
                        if uf.union(*prev.get(), from) {
                            changed = true;
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(from);
                    }
                }
            }
            if !changed {
                break;
            }
        }

        // Collapse to class representatives and dedup parallel edges.
        for e in &mut edges {
            e.from = uf.find(e.from);
            e.to = uf.find(e.to);
        }
        edges.sort_unstable_by_key(|e| (e.from, e.label, e.to));
        edges.dedup();

        // Prune degree-1 vertices other than the base until none remain.
        // (The wedge has none, but folding can create hair.)
        let base = uf.find(0);
        loop {
            let mut degree: std::collections::HashMap<u32, u32> = Default::default();
            for e in &edges {
                *degree.entry(e.from).or_default() += 1;
                *degree.entry(e.to).or_default() += 1;
            }
            let before = edges.len();
            edges.retain(|e| {
                let hanging = |v: u32| v != base && degree.get(&v).copied().unwrap_or(0) <= 1;
                !hanging(e.from) && !hanging(e.to)
            });
            if edges.len() == before {
                break;
            }
        }

        // Canonical renumbering by BFS from the base.
        let mut order: std::collections::HashMap<u32, u32> = Default::default();
        order.insert(base, 0);
        let mut queue = VecDeque::from([base]);
        let neighbor = |v: u32, edges: &[Edge]| {
            let mut found: Vec<(u16, u8, u32)> = Vec::new();
            for e in edges {
                if e.from == v {
                    found.push((e.label, 0, e.to));
                }
                if e.to == v {
                    found.push((e.label, 1, e.from));
                }
            }
            found.sort_unstable();
            found
        };
        while let Some(v) = queue.pop_front() {
            for (_, _, next) in neighbor(v, &edges) {
                if !order.contains_key(&next) {
                    order.insert(next, order.len() as u32);
                    queue.push_back(next);
                }
            }
        }

        let vertex_count = order.len() as u32;
        let mut renumbered: Vec<Edge> = edges
            .iter()
            .map(|e| Edge {
                from: order[&e.from],
                label: e.label,
                to: order[&e.to],
            })
            .collect();
        renumbered.sort_unstable_by_key(|e| (e.from, e.label, e.to));

        let mut out = vec![vec![None; self.rank as usize]; vertex_count as usize];
        let mut inn = vec![vec![None; self.rank as usize]; vertex_count as usize];
        for e in &renumbered {
            let slot = &mut out[e.from as usize][e.label as usize - 1];
            debug_assert!(slot.is_none(), "folding left a nondeterministic edge");
            *slot = Some(e.to);
            let slot = &mut inn[e.to as usize][e.label as usize - 1];
            debug_assert!(slot.is_none(), "folding left a nondeterministic co-edge");
            *slot = Some(e.from);
        }

        SubgroupGraph {
            rank: self.rank,
            folded: true,
            vertex_count,
            edges: renumbered,
            out,
            inn,
        }
    }

    /// Membership by path tracing from the base vertex.
    pub fn contains(&self, w: &Word) -> Result<bool, SubgroupError> {
        if !self.folded {
            return Err(SubgroupError::NotFolded);
        }
        if w.max_index() > self.rank {
            return Err(SubgroupError::WordOutOfRank {
                index: w.max_index(),
                rank: self.rank,
            });
        }
        let mut cur = 0u32;
        for l in w.letters() {
            let next = match l.sign() {
                Sign::Plus => self.out[cur as usize][l.index() as usize - 1],
                Sign::Minus => self.inn[cur as usize][l.index() as usize - 1],
            };
            match next {
                Some(v) => cur = v,
                None => return Ok(false),
            }
        }
        Ok(cur == 0)
    }

    /// True exactly when the subgroup is the whole free group: a single
    /// vertex carrying a loop for every generator.
    pub fn generates_full_group(&self) -> Result<bool, SubgroupError> {
        if !self.folded {
            return Err(SubgroupError::NotFolded);
        }
        Ok(self.vertex_count == 1
            && (0..self.rank as usize).all(|k| self.out[0][k] == Some(0)))
    }

    /// Stable text serialization of the folded graph, used to compare
    /// graphs for isomorphism-after-canonical-numbering.
    pub fn canonical_serialization(&self) -> String {
        let mut s = format!("rank {} vertices {}\n", self.rank, self.vertex_count);
        for e in &self.edges {
            let _ = writeln!(s, "{} -{}-> {}", e.from, e.label, e.to);
        }
        s
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Returns true when two distinct classes were joined.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Keep the smaller root so the base vertex class stays at 0.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}
