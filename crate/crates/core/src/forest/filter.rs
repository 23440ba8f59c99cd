//! Subset-filter oracle: walk every subset of the candidate edges (pairs of
//! vertices in different units) and keep those the admissibility predicate
//! accepts.
//!
//! The walk is a depth-first include/exclude search over a fixed edge order.
//! Branches are cut as soon as the included edges close a cycle, close a
//! cycle in the contraction, or (when the root constraint is on) form a
//! bundle between two units that is not a star. Every surviving leaf is
//! still judged by [`is_admissible`].

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{is_admissible, CensusPolynomial, ForestGraph, Rules, VertexFamily};
use crate::error::{param_err, Error, Result};

/// Default budget of visited search nodes.
pub const DEFAULT_MAX_NODES: u64 = 1 << 26;

const FLUSH_EVERY: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Abort with [`Error::Capacity`] once more nodes than this are visited.
    pub max_nodes: u64,
    /// Worker threads; 1 runs serially on the calling thread.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_nodes: DEFAULT_MAX_NODES,
            workers: 1,
        }
    }
}

type Histogram = BTreeMap<(u32, u32), u64>;

struct Candidates {
    edges: Vec<(usize, usize)>,
    /// Both endpoints are extra vertices.
    extra_pair: Vec<bool>,
}

impl Candidates {
    fn new(fam: &VertexFamily, rules: Rules) -> Self {
        let nv = fam.num_vertices();
        let mut edges = Vec::new();
        let mut extra_pair = Vec::new();
        for u in 0..nv {
            for v in u + 1..nv {
                if fam.unit_of(u) == fam.unit_of(v) {
                    continue;
                }
                let (eu, ev) = (fam.is_extra(u), fam.is_extra(v));
                if rules.forbid_interset && !eu && !ev {
                    continue;
                }
                edges.push((u, v));
                extra_pair.push(eu && ev);
            }
        }
        Candidates { edges, extra_pair }
    }
}

/// Union-find without path compression so unions can be undone.
struct RollbackUf {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl RollbackUf {
    fn new(n: usize) -> Self {
        RollbackUf {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Joins two distinct roots; returns what `undo` needs.
    fn union_roots(&mut self, a: usize, b: usize) -> (usize, bool) {
        let (hi, lo) = if self.rank[a] >= self.rank[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[lo] = hi;
        let bumped = self.rank[hi] == self.rank[lo];
        if bumped {
            self.rank[hi] += 1;
        }
        (lo, bumped)
    }

    fn undo(&mut self, (lo, bumped): (usize, bool)) {
        let hi = self.parent[lo];
        self.parent[lo] = lo;
        if bumped {
            self.rank[hi] -= 1;
        }
    }
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy)]
struct Bundle {
    count: u32,
    /// Vertices shared by every edge of the bundle so far.
    common: [usize; 2],
}

enum Undo {
    Vertex((usize, bool)),
    Unit((usize, bool)),
    Bundle(usize, Bundle),
}

struct Search<'a> {
    fam: &'a VertexFamily,
    rules: Rules,
    cands: &'a Candidates,
    vertices: RollbackUf,
    units: RollbackUf,
    bundles: Vec<Bundle>,
    chosen: Vec<usize>,
    undo_log: Vec<Vec<Undo>>,
    visited: u64,
    shared: &'a AtomicU64,
    max_nodes: u64,
}

impl<'a> Search<'a> {
    fn new(
        fam: &'a VertexFamily,
        rules: Rules,
        cands: &'a Candidates,
        shared: &'a AtomicU64,
        max_nodes: u64,
    ) -> Self {
        let units = fam.num_units();
        Search {
            fam,
            rules,
            cands,
            vertices: RollbackUf::new(fam.num_vertices()),
            units: RollbackUf::new(units),
            bundles: vec![
                Bundle {
                    count: 0,
                    common: [NONE, NONE]
                };
                units * units
            ],
            chosen: Vec::new(),
            undo_log: Vec::new(),
            visited: 0,
            shared,
            max_nodes,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited == FLUSH_EVERY {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let total = self.shared.fetch_add(self.visited, Ordering::Relaxed) + self.visited;
        self.visited = 0;
        if total > self.max_nodes {
            return Err(Error::Capacity {
                limit: self.max_nodes,
            });
        }
        Ok(())
    }

    /// Includes candidate `idx` unless doing so is already fatal.
    fn try_include(&mut self, idx: usize) -> bool {
        let (u, v) = self.cands.edges[idx];
        let (ru, rv) = (self.vertices.find(u), self.vertices.find(v));
        if ru == rv {
            return false;
        }
        let (cu, cv) = (self.fam.unit_of(u), self.fam.unit_of(v));
        let key = cu.min(cv) * self.fam.num_units() + cu.max(cv);
        let bundle = self.bundles[key];
        let mut log = Vec::with_capacity(3);
        let mut next = bundle;
        if bundle.count == 0 {
            let (ou, ov) = (self.units.find(cu), self.units.find(cv));
            if ou == ov {
                return false;
            }
            log.push(Undo::Unit(self.units.union_roots(ou, ov)));
            next.common = [u, v];
        } else {
            let keep = |x: usize| if x == u || x == v { x } else { NONE };
            next.common = [keep(bundle.common[0]), keep(bundle.common[1])];
            if self.rules.root_constraint && next.common == [NONE, NONE] {
                return false;
            }
        }
        next.count += 1;
        log.push(Undo::Bundle(key, bundle));
        self.bundles[key] = next;
        log.push(Undo::Vertex(self.vertices.union_roots(ru, rv)));
        self.chosen.push(idx);
        self.undo_log.push(log);
        true
    }

    fn pop(&mut self) {
        self.chosen.pop();
        let log = self.undo_log.pop().expect("pop after include");
        for entry in log.into_iter().rev() {
            match entry {
                Undo::Vertex(u) => self.vertices.undo(u),
                Undo::Unit(u) => self.units.undo(u),
                Undo::Bundle(key, b) => self.bundles[key] = b,
            }
        }
    }

    fn graph(&self) -> ForestGraph {
        ForestGraph::from_edges(self.chosen.iter().map(|&i| self.cands.edges[i]))
            .expect("candidates are distinct non-loop pairs")
    }

    /// Depth-first walk from candidate `idx`; `visit` sees each admissible
    /// leaf and returns `false` to stop the walk.
    fn walk(
        &mut self,
        idx: usize,
        visit: &mut dyn FnMut(&Search<'_>, ForestGraph) -> bool,
    ) -> Result<bool> {
        self.tick()?;
        if idx == self.cands.edges.len() {
            let root = self.units.find(0);
            let connected = (1..self.fam.num_units()).all(|u| self.units.find(u) == root);
            if !connected {
                return Ok(true);
            }
            let g = self.graph();
            if is_admissible(&g, self.fam, self.rules)? {
                return Ok(visit(self, g));
            }
            return Ok(true);
        }
        if !self.walk(idx + 1, visit)? {
            return Ok(false);
        }
        if self.try_include(idx) {
            let go_on = self.walk(idx + 1, visit)?;
            self.pop();
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Collects the included-edge lists at depth `depth`, visiting the
    /// nodes above it.
    fn prefixes(&mut self, idx: usize, depth: usize, out: &mut Vec<Vec<usize>>) -> Result<()> {
        if idx == depth {
            out.push(self.chosen.clone());
            return Ok(());
        }
        self.tick()?;
        self.prefixes(idx + 1, depth, out)?;
        if self.try_include(idx) {
            self.prefixes(idx + 1, depth, out)?;
            self.pop();
        }
        Ok(())
    }

    fn histogram_leaf(&self, hist: &mut Histogram) {
        let a = self
            .chosen
            .iter()
            .filter(|&&i| self.cands.extra_pair[i])
            .count() as u32;
        let lambda = self.chosen.len() as u32 - a;
        *hist.entry((lambda, a)).or_default() += 1;
    }
}

fn merge(into: &mut Histogram, from: Histogram) {
    for (k, v) in from {
        *into.entry(k).or_default() += v;
    }
}

fn serial_histogram(
    fam: &VertexFamily,
    rules: Rules,
    cands: &Candidates,
    opts: SearchOptions,
) -> Result<Histogram> {
    let shared = AtomicU64::new(0);
    let mut search = Search::new(fam, rules, cands, &shared, opts.max_nodes);
    let mut hist = Histogram::new();
    search.walk(0, &mut |s, _| {
        s.histogram_leaf(&mut hist);
        true
    })?;
    search.flush()?;
    Ok(hist)
}

fn parallel_histogram(
    fam: &VertexFamily,
    rules: Rules,
    cands: &Candidates,
    opts: SearchOptions,
) -> Result<Histogram> {
    let shared = AtomicU64::new(0);
    // Enough subtrees to balance, never deeper than the edge list.
    let depth = (usize::BITS - (opts.workers * 8).leading_zeros()) as usize;
    let depth = depth.min(cands.edges.len());
    let mut prefixes = Vec::new();
    {
        let mut top = Search::new(fam, rules, cands, &shared, opts.max_nodes);
        top.prefixes(0, depth, &mut prefixes)?;
        top.flush()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<Histogram> = pool.install(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut search = Search::new(fam, rules, cands, &shared, opts.max_nodes);
                for &idx in prefix {
                    let ok = search.try_include(idx);
                    debug_assert!(ok, "prefix replays cleanly");
                }
                let mut hist = Histogram::new();
                search.walk(depth, &mut |s, _| {
                    s.histogram_leaf(&mut hist);
                    true
                })?;
                search.flush()?;
                Ok(hist)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut total = Histogram::new();
    for part in parts {
        merge(&mut total, part);
    }
    Ok(total)
}

/// Weighted census of admissible forests under `rules`.
pub fn search_census(
    fam: &VertexFamily,
    rules: Rules,
    opts: SearchOptions,
) -> Result<CensusPolynomial> {
    if opts.workers == 0 {
        return param_err("workers must be at least 1");
    }
    let cands = Candidates::new(fam, rules);
    let hist = if opts.workers == 1 {
        serial_histogram(fam, rules, &cands, opts)?
    } else {
        parallel_histogram(fam, rules, &cands, opts)?
    };
    Ok(CensusPolynomial::from_histogram(&hist))
}

/// Number of admissible forests on sets without extra vertices.
pub fn oracle_filter_count(fam: &VertexFamily, opts: SearchOptions) -> Result<BigInt> {
    if fam.extras() != 0 {
        return param_err("the forest count is defined for families without extra vertices");
    }
    Ok(search_census(fam, Rules::standard(), opts)?.total_count())
}

/// `sum over admissible forests of lambda^(#other edges) a^(#extra-extra edges)`.
pub fn oracle_filter_census(
    fam: &VertexFamily,
    forbid_interset: bool,
    opts: SearchOptions,
) -> Result<CensusPolynomial> {
    search_census(fam, Rules::with_forbid_interset(forbid_interset), opts)
}

/// The first `limit` admissible forests in search order (edge subsets
/// visited exclusion-first over the lexicographic candidate order).
pub fn witnesses_with(
    fam: &VertexFamily,
    rules: Rules,
    limit: usize,
    max_nodes: u64,
) -> Result<Vec<ForestGraph>> {
    let mut found = Vec::new();
    if limit == 0 {
        return Ok(found);
    }
    let cands = Candidates::new(fam, rules);
    let shared = AtomicU64::new(0);
    let mut search = Search::new(fam, rules, &cands, &shared, max_nodes);
    search.walk(0, &mut |_, g| {
        found.push(g);
        found.len() < limit
    })?;
    Ok(found)
}

pub fn count_admissible_witnesses(fam: &VertexFamily, limit: usize) -> Result<Vec<ForestGraph>> {
    witnesses_with(fam, Rules::standard(), limit, DEFAULT_MAX_NODES)
}
