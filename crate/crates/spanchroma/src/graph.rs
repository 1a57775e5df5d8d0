//! Finite simple graphs, a backtracking graph-homomorphism engine, and the
//! derived chromatic / clique invariants.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex index {0} out of range for {1} vertices")]
    IndexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph parse error: {0}")]
    Parse(String),
}

/// A dense bit set sized at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    blocks: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits { blocks: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits::new(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        self.blocks[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.blocks[i / 64] >> (i % 64) & 1 != 0
    }

    pub fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &b)| {
            let mut b = b;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let t = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(bi * 64 + t)
                }
            })
        })
    }
}

/// A finite simple graph on vertices `0..n` with dense packed adjacency.
/// Equality is structural (adjacency only); labels are presentation.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Bits>,
    labels: Option<Vec<String>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Graph) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
    let mut adj = vec![Bits::new(n); n];
    for &(u, v) in edges {
        if u >= n {
            return Err(GraphError::IndexOutOfRange(u, n));
        }
        if v >= n {
            return Err(GraphError::IndexOutOfRange(v, n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        adj[u].set(v);
        adj[v].set(u);
    }
    Ok(Graph { n, adj, labels: None })
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph { n, adj: vec![Bits::new(n); n], labels: None }
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        graph_from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        graph_from_edges(n, &edges).unwrap()
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn adj_row(&self, v: usize) -> &Bits {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    /// Sorted edge list with u < v.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.adj[u].ones() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Induced subgraph on `kept` (ascending); vertex i of the result is
    /// `kept[i]` in self.
    pub fn induced(&self, kept: &[usize]) -> Graph {
        let mut edges = Vec::new();
        for (i, &u) in kept.iter().enumerate() {
            for (j, &v) in kept.iter().enumerate() {
                if i < j && self.has_edge(u, v) {
                    edges.push((i, j));
                }
            }
        }
        let mut g = graph_from_edges(kept.len(), &edges).unwrap();
        if let Some(labels) = &self.labels {
            g.set_labels(kept.iter().map(|&v| labels[v].clone()).collect());
        }
        g
    }
}

/// A validated graph homomorphism, as the image vertex per source vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

pub fn is_homomorphism(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    map.len() == g.n_vertices()
        && map.iter().all(|&w| w < h.n_vertices())
        && g.edges().iter().all(|&(u, v)| h.has_edge(map[u], map[v]))
}

/// Composition of validated maps g -> h and h -> j.
pub fn compose(first: &Homomorphism, second: &Homomorphism) -> Homomorphism {
    Homomorphism { map: first.map.iter().map(|&v| second.map[v]).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomMode {
    First,
    Count,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomResult {
    First(Option<Homomorphism>),
    Count(u64),
}

impl HomResult {
    pub fn found(&self) -> bool {
        match self {
            HomResult::First(o) => o.is_some(),
            HomResult::Count(c) => *c > 0,
        }
    }

    pub fn witness(&self) -> Option<&Homomorphism> {
        match self {
            HomResult::First(o) => o.as_ref(),
            HomResult::Count(_) => None,
        }
    }

    pub fn count(&self) -> Option<u64> {
        match self {
            HomResult::Count(c) => Some(*c),
            HomResult::First(_) => None,
        }
    }
}

struct HomSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
}

impl HomSearch<'_> {
    /// Most-constrained unassigned vertex, ties by lowest index.
    fn pick(&self, assigned: &[Option<usize>], cand: &[Bits]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.g.n_vertices() {
            if assigned[v].is_none() {
                let c = cand[v].count();
                if best.map_or(true, |(bc, _)| c < bc) {
                    best = Some((c, v));
                }
            }
        }
        best.map(|(_, v)| v)
    }

    fn assign(
        &self,
        v: usize,
        w: usize,
        assigned: &mut [Option<usize>],
        cand: &[Bits],
    ) -> Option<Vec<Bits>> {
        let mut next = cand.to_vec();
        assigned[v] = Some(w);
        let mut only_w = Bits::new(self.h.n_vertices());
        only_w.set(w);
        next[v] = only_w;
        for u in self.g.neighbours(v) {
            if assigned[u].is_none() {
                next[u].and_assign(self.h.adj_row(w));
                if next[u].is_empty() {
                    assigned[v] = None;
                    return None;
                }
            }
        }
        Some(next)
    }

    fn run(&self, assigned: &mut [Option<usize>], cand: &[Bits], out: &mut HomResult) -> bool {
        let Some(v) = self.pick(assigned, cand) else {
            match out {
                HomResult::First(slot) => {
                    *slot = Some(Homomorphism {
                        map: assigned.iter().map(|a| a.unwrap()).collect(),
                    });
                    return true;
                }
                HomResult::Count(c) => {
                    *c += 1;
                    return false;
                }
            }
        };
        let ws: Vec<usize> = cand[v].ones().collect();
        for w in ws {
            if let Some(next) = self.assign(v, w, assigned, cand) {
                let stop = self.run(assigned, &next, out);
                assigned[v] = None;
                if stop {
                    return true;
                }
            }
        }
        false
    }
}

/// Exhaustive homomorphism search from `g` to `h`.
///
/// `First` returns one homomorphism (deterministic: branches explored in
/// ascending image order under the most-constrained-vertex heuristic);
/// `Count` returns the exact size of Hom(g, h) with no symmetry quotient.
pub fn find_homomorphism(g: &Graph, h: &Graph, mode: HomMode) -> HomResult {
    find_homomorphism_jobs(g, h, mode, 1)
}

/// Work-split variant: the branches of the first search level are
/// distributed over `jobs` workers; results are merged deterministically
/// (first-found by smallest branch index, counts summed).
pub fn find_homomorphism_jobs(g: &Graph, h: &Graph, mode: HomMode, jobs: usize) -> HomResult {
    let empty_out = |mode| match mode {
        HomMode::First => HomResult::First(None),
        HomMode::Count => HomResult::Count(0),
    };
    if g.n_vertices() == 0 {
        return match mode {
            HomMode::First => HomResult::First(Some(Homomorphism { map: vec![] })),
            HomMode::Count => HomResult::Count(1),
        };
    }
    if h.n_vertices() == 0 {
        return empty_out(mode);
    }
    let search = HomSearch { g, h };
    let cand = vec![Bits::full(h.n_vertices()); g.n_vertices()];
    let jobs = jobs.max(1);
    if jobs == 1 {
        let mut assigned = vec![None; g.n_vertices()];
        let mut out = empty_out(mode);
        search.run(&mut assigned, &cand, &mut out);
        return out;
    }

    // split the first level into contiguous chunks of branches
    let v0 = search.pick(&vec![None; g.n_vertices()], &cand).unwrap();
    let branches: Vec<usize> = cand[v0].ones().collect();
    let chunk = branches.len().div_ceil(jobs);
    let results: Vec<HomResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = branches
            .chunks(chunk.max(1))
            .map(|bs| {
                let cand = &cand;
                let search = &search;
                scope.spawn(move || {
                    let mut out = empty_out(mode);
                    let mut assigned = vec![None; search.g.n_vertices()];
                    for &w in bs {
                        if let Some(next) = search.assign(v0, w, &mut assigned, cand) {
                            let stop = search.run(&mut assigned, &next, &mut out);
                            assigned[v0] = None;
                            if stop {
                                break;
                            }
                        }
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    match mode {
        HomMode::First => results
            .into_iter()
            .find(|r| r.found())
            .unwrap_or(HomResult::First(None)),
        HomMode::Count => {
            HomResult::Count(results.iter().map(|r| r.count().unwrap()).sum())
        }
    }
}

/// Least n >= 0 with Hom(G, K_n) nonempty.
pub fn chromatic_number(g: &Graph) -> usize {
    (0..)
        .find(|&n| find_homomorphism(g, &Graph::complete(n), HomMode::First).found())
        .unwrap()
}

/// Size of the largest complete subgraph, by branch and bound with a greedy
/// colouring bound.
pub fn clique_number(g: &Graph) -> usize {
    fn colour_sort(g: &Graph, p: &[usize]) -> (Vec<usize>, Vec<usize>) {
        // greedy colour classes; vertices emitted class by class so the
        // bound at position i is the colour count used so far
        let mut order = Vec::with_capacity(p.len());
        let mut bounds = Vec::with_capacity(p.len());
        let mut remaining: Vec<usize> = p.to_vec();
        let mut colour = 0;
        while !remaining.is_empty() {
            colour += 1;
            let mut class = Vec::new();
            let mut rest = Vec::new();
            for &v in &remaining {
                if class.iter().all(|&u| !g.has_edge(u, v)) {
                    class.push(v);
                } else {
                    rest.push(v);
                }
            }
            for v in class {
                order.push(v);
                bounds.push(colour);
            }
            remaining = rest;
        }
        (order, bounds)
    }

    fn expand(g: &Graph, p: &[usize], size: usize, best: &mut usize) {
        if p.is_empty() {
            *best = (*best).max(size);
            return;
        }
        let (order, bounds) = colour_sort(g, p);
        for i in (0..order.len()).rev() {
            if size + bounds[i] <= *best {
                return;
            }
            let v = order[i];
            let np: Vec<usize> =
                order[..i].iter().copied().filter(|&u| g.has_edge(u, v)).collect();
            expand(g, &np, size + 1, best);
        }
    }

    let mut best = 0;
    let all: Vec<usize> = (0..g.n_vertices()).collect();
    expand(g, &all, 0, &mut best);
    best
}

/// Result of the 2-core computation: the maximal subgraph of minimum degree
/// at least 2, with the ordered removal sequence (original vertex indices)
/// and the surviving vertices (original indices, ascending).
#[derive(Debug, Clone)]
pub struct TwoCore {
    pub graph: Graph,
    pub removed: Vec<usize>,
    pub kept: Vec<usize>,
}

/// Removes one vertex of degree <= 1 at a time (lowest index first) until
/// none remain.
pub fn two_core(g: &Graph) -> TwoCore {
    let n = g.n_vertices();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = Vec::new();
    loop {
        let Some(v) = (0..n).find(|&v| alive[v] && deg[v] <= 1) else {
            break;
        };
        alive[v] = false;
        removed.push(v);
        for u in g.neighbours(v) {
            if alive[u] {
                deg[u] -= 1;
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    TwoCore { graph: g.induced(&kept), removed, kept }
}

/// Parses the text graph format: header `p <n> <m>`, then `e <u> <v>` lines
/// with 1-based vertex indices. Lines starting with `c` are comments.
pub fn parse_graph(input: &str) -> Result<Graph, GraphError> {
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut edges = Vec::new();
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("p") => {
                let nv = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| GraphError::Parse("bad p line".into()))?;
                let ne = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| GraphError::Parse("bad p line".into()))?;
                n = Some(nv);
                m = Some(ne);
            }
            Some("e") => {
                let u: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| GraphError::Parse("bad e line".into()))?;
                let v: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| GraphError::Parse("bad e line".into()))?;
                if u == 0 || v == 0 {
                    return Err(GraphError::Parse("vertices are 1-based".into()));
                }
                edges.push((u - 1, v - 1));
            }
            _ => return Err(GraphError::Parse(format!("unrecognized line: {line}"))),
        }
    }
    let n = n.ok_or_else(|| GraphError::Parse("missing p line".into()))?;
    let g = graph_from_edges(n, &edges)?;
    if let Some(m) = m {
        if g.n_edges() != m {
            return Err(GraphError::Parse(format!(
                "header declares {m} edges but {} distinct edges found",
                g.n_edges()
            )));
        }
    }
    Ok(g)
}

/// Writes the text graph format with sorted edges.
pub fn write_graph(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("p {} {}\n", g.n_vertices(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}
