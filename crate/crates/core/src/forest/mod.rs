//! Rooted forests on a family of vertex sets `V_1..V_m` plus `n` extra single
//! vertices.
//!
//! A forest is admissible when it has no edge inside any `V_i`, is acyclic,
//! contracts (each set and each extra vertex to one node) to a single
//! spanning tree, and, rooting that tree at `V_1`, every bundle of edges
//! from a parent unit to a child unit leaves the parent from one vertex.

mod constructive;
mod filter;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::Range;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::{MPoly, Monomial, Vars};
use crate::error::{param_err, Result};

pub use constructive::oracle_constructive_count;
pub use filter::{
    count_admissible_witnesses, oracle_filter_census, oracle_filter_count, search_census,
    witnesses_with, SearchOptions, DEFAULT_MAX_NODES,
};

/// Sizes of the sets `V_1..V_m` and the number of extra single vertices.
///
/// Global vertex ids: `V_1` occupies `0..|V_1|`, then `V_2`, and so on; the
/// extras come last. Units are numbered `0..m` for the sets and `m..m+n`
/// for the extras.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexFamily {
    sizes: Vec<usize>,
    extras: usize,
    offsets: Vec<usize>,
}

impl VertexFamily {
    pub fn new(sizes: Vec<usize>, extras: usize) -> Result<Self> {
        if sizes.is_empty() {
            return param_err("a vertex family needs at least one set");
        }
        if sizes.contains(&0) {
            return param_err("set sizes must be positive");
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        offsets.push(acc);
        Ok(VertexFamily {
            sizes,
            extras,
            offsets,
        })
    }

    pub fn sets(sizes: &[usize]) -> Result<Self> {
        VertexFamily::new(sizes.to_vec(), 0)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn extras(&self) -> usize {
        self.extras
    }

    /// `m`.
    pub fn num_sets(&self) -> usize {
        self.sizes.len()
    }

    /// `m + n`.
    pub fn num_units(&self) -> usize {
        self.sizes.len() + self.extras
    }

    /// `|V| = |V_1| + ... + |V_m|`.
    pub fn set_vertex_count(&self) -> usize {
        self.offsets[self.sizes.len()]
    }

    pub fn num_vertices(&self) -> usize {
        self.set_vertex_count() + self.extras
    }

    pub fn unit_of(&self, v: usize) -> usize {
        let set_vertices = self.set_vertex_count();
        if v >= set_vertices {
            self.sizes.len() + (v - set_vertices)
        } else {
            // offsets is sorted; the set is the last offset <= v.
            self.offsets.partition_point(|&o| o <= v) - 1
        }
    }

    pub fn is_extra(&self, v: usize) -> bool {
        v >= self.set_vertex_count()
    }

    pub fn is_extra_unit(&self, unit: usize) -> bool {
        unit >= self.sizes.len()
    }

    pub fn unit_vertices(&self, unit: usize) -> Range<usize> {
        if unit < self.sizes.len() {
            self.offsets[unit]..self.offsets[unit + 1]
        } else {
            let v = self.set_vertex_count() + (unit - self.sizes.len());
            v..v + 1
        }
    }

    /// Applies `perm` to the set labels `V_2..V_m` (`perm[i]` is the new
    /// position of set `i`; `perm[0]` must be 0).
    pub fn permuted_sets(&self, perm: &[usize]) -> Result<VertexFamily> {
        if perm.len() != self.sizes.len() || perm.first() != Some(&0) {
            return param_err("permutation must fix V_1 and cover every set");
        }
        let mut sizes = vec![0; perm.len()];
        for (i, &target) in perm.iter().enumerate() {
            sizes[target] = self.sizes[i];
        }
        VertexFamily::new(sizes, self.extras)
    }
}

/// Simple undirected graph on global vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ForestGraph {
    edges: BTreeSet<(usize, usize)>,
}

impl ForestGraph {
    pub fn empty() -> Self {
        ForestGraph::default()
    }

    /// Normalizes each pair to `(min, max)`; rejects self-loops and repeats.
    pub fn from_edges(edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return param_err(format!("self-loop at vertex {u}"));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return param_err(format!("duplicate edge ({u}, {v})"));
            }
        }
        Ok(ForestGraph { edges: set })
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn to_pairs(&self) -> Vec<[usize; 2]> {
        self.edges.iter().map(|&(u, v)| [u, v]).collect()
    }
}

/// The contraction of a forest: one node per unit, one edge per unit pair
/// joined by at least one crossing edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGraph {
    nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ReducedGraph {
    pub fn of(g: &ForestGraph, fam: &VertexFamily) -> ReducedGraph {
        let edges = g
            .edges()
            .map(|(u, v)| (fam.unit_of(u), fam.unit_of(v)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        ReducedGraph {
            nodes: fam.num_units(),
            edges,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// BFS parents from `root`; `None` for unreached nodes and the root.
    fn parents(&self, root: usize) -> (Vec<Option<usize>>, usize) {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; self.nodes];
        let mut seen = vec![false; self.nodes];
        seen[root] = true;
        let mut reached = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        (parent, reached)
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.edges.len() + 1 == self.nodes && self.parents(0).1 == self.nodes
    }
}

/// Which clauses of the admissibility predicate are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rules {
    /// Reject every edge between two different sets `V_i`, `V_j`.
    pub forbid_interset: bool,
    /// Require each parent-to-child bundle to leave the parent from one vertex.
    pub root_constraint: bool,
}

impl Rules {
    pub fn standard() -> Self {
        Rules {
            forbid_interset: false,
            root_constraint: true,
        }
    }

    pub fn no_interset() -> Self {
        Rules {
            forbid_interset: true,
            root_constraint: true,
        }
    }

    pub fn with_forbid_interset(forbid_interset: bool) -> Self {
        Rules {
            forbid_interset,
            ..Rules::standard()
        }
    }
}

impl Default for Rules {
    fn default() -> Self {
        Rules::standard()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The admissibility predicate, applied directly to a complete edge set.
pub fn is_admissible(g: &ForestGraph, fam: &VertexFamily, rules: Rules) -> Result<bool> {
    let nv = fam.num_vertices();
    if let Some((u, v)) = g.edges().find(|&(u, v)| u >= nv || v >= nv) {
        return param_err(format!("edge ({u}, {v}) outside {nv} vertices"));
    }

    for (u, v) in g.edges() {
        let (cu, cv) = (fam.unit_of(u), fam.unit_of(v));
        if cu == cv {
            return Ok(false);
        }
        if rules.forbid_interset && !fam.is_extra(u) && !fam.is_extra(v) {
            return Ok(false);
        }
    }

    let mut uf: Vec<usize> = (0..nv).collect();
    for (u, v) in g.edges() {
        let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
        if ru == rv {
            return Ok(false);
        }
        uf[ru] = rv;
    }

    let reduced = ReducedGraph::of(g, fam);
    if reduced.edges.len() + 1 != reduced.nodes {
        return Ok(false);
    }
    let (parent, reached) = reduced.parents(0);
    if reached != reduced.nodes {
        return Ok(false);
    }

    if rules.root_constraint {
        // For each child unit, the parent-side endpoints of its bundle.
        let mut roots: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (u, v) in g.edges() {
            let (cu, cv) = (fam.unit_of(u), fam.unit_of(v));
            let (child, parent_end) = if parent[cv] == Some(cu) {
                (cv, u)
            } else {
                (cu, v)
            };
            roots.entry(child).or_default().insert(parent_end);
        }
        if roots.values().any(|r| r.len() != 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weighted forest census in `Z[lambda, a]`: each edge between two extra
/// vertices weighs `a`, every other edge weighs `lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CensusPolynomial(MPoly);

pub const LAMBDA: usize = 0;
pub const A: usize = 1;

impl CensusPolynomial {
    pub fn new(poly: MPoly) -> Self {
        debug_assert!(poly.max_var().is_none_or(|v| v <= A));
        CensusPolynomial(poly)
    }

    /// From a histogram `(lambda exponent, a exponent) -> count`.
    pub fn from_histogram(hist: &BTreeMap<(u32, u32), u64>) -> Self {
        let mut poly = MPoly::zero();
        for (&(l, a), &c) in hist {
            poly += MPoly::monomial(Monomial::from_exponents(&[l, a]), c);
        }
        CensusPolynomial(poly)
    }

    pub fn poly(&self) -> &MPoly {
        &self.0
    }

    pub fn into_poly(self) -> MPoly {
        self.0
    }

    pub fn render(&self) -> String {
        self.0.render(&Vars::census())
    }

    pub fn term_map(&self) -> BTreeMap<String, String> {
        self.0.term_map(&Vars::census())
    }

    /// Value with `lambda = a = 1`, i.e. the unweighted number of forests.
    pub fn total_count(&self) -> BigInt {
        self.0.terms().map(|(_, c)| c.clone()).sum()
    }
}

/// Witness listing with its family header, as written by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDump {
    pub sizes: Vec<usize>,
    pub extras: usize,
    pub forests: Vec<Vec<[usize; 2]>>,
}

impl WitnessDump {
    pub fn new(fam: &VertexFamily, forests: &[ForestGraph]) -> Self {
        WitnessDump {
            sizes: fam.sizes().to_vec(),
            extras: fam.extras(),
            forests: forests.iter().map(ForestGraph::to_pairs).collect(),
        }
    }
}
