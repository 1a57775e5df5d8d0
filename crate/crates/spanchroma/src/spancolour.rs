//! Span colourings of graphs over a finite field, in three variants:
//!
//! * weak — a nonzero vector per vertex, outside the span of the
//!   neighbours' vectors;
//! * intermediate — a line per vertex, not contained in the span of the
//!   neighbours' lines;
//! * full — a (line, hyperplane) pair per vertex with U not inside V,
//!   where adjacent vertices put each other's line inside their hyperplane.
//!
//! Full n-colourings of G are exactly the graph homomorphisms G -> A_{k^n}
//! into the representing graph built here, and all three variants have the
//! same least admissible n.

use crate::gf::{
    self, all_vectors, enumerate_subspaces, gaussian_binomial, span, subspace_leq, FVector, Field,
    GfError, RrefBuilder, Subspace,
};
use crate::graph::{clique_number, find_homomorphism, Graph, HomMode};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpanError {
    #[error("malformed colouring: {0}")]
    Malformed(String),
    #[error("no admissible hyperplane extension at vertex {0}")]
    NoExtension(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("colouring JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Weak,
    Intermediate,
    Full,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Weak => "weak",
            Variant::Intermediate => "intermediate",
            Variant::Full => "full",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "weak" => Ok(Variant::Weak),
            "intermediate" => Ok(Variant::Intermediate),
            "full" => Ok(Variant::Full),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assignments {
    Weak(Vec<FVector>),
    Intermediate(Vec<Subspace>),
    Full(Vec<(Subspace, Subspace)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanColouring {
    pub field: Field,
    pub n: usize,
    pub data: Assignments,
}

impl SpanColouring {
    pub fn variant(&self) -> Variant {
        match self.data {
            Assignments::Weak(_) => Variant::Weak,
            Assignments::Intermediate(_) => Variant::Intermediate,
            Assignments::Full(_) => Variant::Full,
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            Assignments::Weak(v) => v.len(),
            Assignments::Intermediate(v) => v.len(),
            Assignments::Full(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub vertex: usize,
    pub reason: String,
}

/// The graph A_{k^n} on pairs (U, V) with dim U = 1, dim V = n-1, U not
/// inside V; edges join pairs with U ⊂ V' and U' ⊂ V. Vertex order is
/// lexicographic on the canonical (U, V) basis matrices.
#[derive(Debug, Clone)]
pub struct RepGraph {
    pub graph: Graph,
    pub pairs: Vec<(Subspace, Subspace)>,
    pub field: Field,
    pub n: usize,
}

fn subspace_label(s: &Subspace) -> String {
    let rows: Vec<String> = s
        .basis()
        .iter()
        .map(|r| r.iter().map(|c| c.to_string()).collect::<String>())
        .collect();
    rows.join(",")
}

pub fn build_rep_graph(field: Field, n: usize) -> Result<RepGraph, GfError> {
    if n == 0 {
        return Ok(RepGraph { graph: Graph::empty(0), pairs: vec![], field, n });
    }
    let lines = enumerate_subspaces(field, n, 1)?;
    let hypers = enumerate_subspaces(field, n, n - 1)?;
    let mut pairs = Vec::new();
    for u in &lines {
        for v in &hypers {
            if !subspace_leq(u, v)? {
                pairs.push((u.clone(), v.clone()));
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if subspace_leq(&pairs[i].0, &pairs[j].1)? && subspace_leq(&pairs[j].0, &pairs[i].1)? {
                edges.push((i, j));
            }
        }
    }
    let mut graph = crate::graph::graph_from_edges(pairs.len(), &edges)
        .expect("rep graph edges are in range");
    graph.set_labels(
        pairs
            .iter()
            .map(|(u, v)| format!("({}|{})", subspace_label(u), subspace_label(v)))
            .collect(),
    );
    Ok(RepGraph { graph, pairs, field, n })
}

/// Canonical generator of a dim-1 subspace.
fn line_generator(s: &Subspace) -> FVector {
    s.basis_vectors().into_iter().next().expect("dim-1 subspace has a basis vector")
}

fn check_well_formed(g: &Graph, c: &SpanColouring) -> Result<(), SpanError> {
    if c.len() != g.n_vertices() {
        return Err(SpanError::Malformed(format!(
            "{} assignments for {} vertices",
            c.len(),
            g.n_vertices()
        )));
    }
    match &c.data {
        Assignments::Weak(vs) => {
            for (i, v) in vs.iter().enumerate() {
                if v.field != c.field || v.len() != c.n {
                    return Err(SpanError::Malformed(format!("vertex {i}: wrong ambient")));
                }
                if v.is_zero() {
                    return Err(SpanError::Malformed(format!("vertex {i}: zero vector")));
                }
            }
        }
        Assignments::Intermediate(ls) => {
            for (i, l) in ls.iter().enumerate() {
                if l.field != c.field || l.ambient != c.n {
                    return Err(SpanError::Malformed(format!("vertex {i}: wrong ambient")));
                }
                if l.dim() != 1 {
                    return Err(SpanError::Malformed(format!(
                        "vertex {i}: subspace of dim {} (want 1)",
                        l.dim()
                    )));
                }
            }
        }
        Assignments::Full(ps) => {
            for (i, (u, v)) in ps.iter().enumerate() {
                if u.field != c.field
                    || v.field != c.field
                    || u.ambient != c.n
                    || v.ambient != c.n
                {
                    return Err(SpanError::Malformed(format!("vertex {i}: wrong ambient")));
                }
                if u.dim() != 1 || v.dim() + 1 != c.n {
                    return Err(SpanError::Malformed(format!(
                        "vertex {i}: dims ({}, {}) (want (1, {}))",
                        u.dim(),
                        v.dim(),
                        c.n - 1
                    )));
                }
            }
        }
    }
    Ok(())
}

fn neighbour_span(
    g: &Graph,
    v: usize,
    vector_of: &dyn Fn(usize) -> FVector,
    field: Field,
    n: usize,
) -> Result<Subspace, GfError> {
    let vs: Vec<FVector> = g.neighbours(v).map(vector_of).collect();
    span(field, n, &vs)
}

/// Checks the defining condition of the colouring's variant at every vertex
/// (and, for the full variant, along every edge); returns the first
/// violation in vertex order, or None for a valid colouring.
pub fn validate_colouring(g: &Graph, c: &SpanColouring) -> Result<Option<Violation>, SpanError> {
    check_well_formed(g, c)?;
    match &c.data {
        Assignments::Weak(vs) => {
            for v in 0..g.n_vertices() {
                let nsp = neighbour_span(g, v, &|u| vs[u].clone(), c.field, c.n)?;
                if nsp.contains(&vs[v]) {
                    return Ok(Some(Violation {
                        vertex: v,
                        reason: "vector lies in the span of its neighbours' vectors".into(),
                    }));
                }
            }
        }
        Assignments::Intermediate(ls) => {
            for v in 0..g.n_vertices() {
                let nsp = neighbour_span(g, v, &|u| line_generator(&ls[u]), c.field, c.n)?;
                if nsp.contains(&line_generator(&ls[v])) {
                    return Ok(Some(Violation {
                        vertex: v,
                        reason: "line lies in the span of its neighbours' lines".into(),
                    }));
                }
            }
        }
        Assignments::Full(ps) => {
            for v in 0..g.n_vertices() {
                if subspace_leq(&ps[v].0, &ps[v].1)? {
                    return Ok(Some(Violation {
                        vertex: v,
                        reason: "line is contained in its own hyperplane".into(),
                    }));
                }
                for u in g.neighbours(v) {
                    if !subspace_leq(&ps[v].0, &ps[u].1)? {
                        return Ok(Some(Violation {
                            vertex: v,
                            reason: format!(
                                "line not contained in the hyperplane of neighbour {u}"
                            ),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn require_valid(g: &Graph, c: &SpanColouring) -> Result<(), SpanError> {
    match validate_colouring(g, c)? {
        None => Ok(()),
        Some(viol) => Err(SpanError::Malformed(format!(
            "input colouring invalid at vertex {}: {}",
            viol.vertex, viol.reason
        ))),
    }
}

/// Converts a valid colouring to the target variant.
///
/// full -> intermediate is the first projection; intermediate -> weak takes
/// the canonical generator of each line; weak -> intermediate takes spans;
/// intermediate -> full extends the neighbourhood span to the
/// lexicographically least hyperplane avoiding the vertex's line. Other
/// conversions compose these.
pub fn convert_colouring(
    g: &Graph,
    c: &SpanColouring,
    target: Variant,
) -> Result<SpanColouring, SpanError> {
    require_valid(g, c)?;
    let mut cur = c.clone();
    while cur.variant() != target {
        cur = match (&cur.data, target) {
            (Assignments::Full(ps), _) => SpanColouring {
                field: cur.field,
                n: cur.n,
                data: Assignments::Intermediate(ps.iter().map(|(u, _)| u.clone()).collect()),
            },
            (Assignments::Weak(vs), _) => {
                let lines: Result<Vec<Subspace>, GfError> = vs
                    .iter()
                    .map(|v| span(cur.field, cur.n, std::slice::from_ref(v)))
                    .collect();
                SpanColouring {
                    field: cur.field,
                    n: cur.n,
                    data: Assignments::Intermediate(lines?),
                }
            }
            (Assignments::Intermediate(ls), Variant::Weak) => SpanColouring {
                field: cur.field,
                n: cur.n,
                data: Assignments::Weak(ls.iter().map(line_generator).collect()),
            },
            (Assignments::Intermediate(ls), _) => {
                let hypers = enumerate_subspaces(cur.field, cur.n, cur.n - 1)?;
                let mut pairs = Vec::with_capacity(ls.len());
                for v in 0..g.n_vertices() {
                    let nsp =
                        neighbour_span(g, v, &|u| line_generator(&ls[u]), cur.field, cur.n)?;
                    let gen = line_generator(&ls[v]);
                    let hit = hypers
                        .iter()
                        .find(|h| {
                            subspace_leq(&nsp, h).unwrap() && !h.contains(&gen)
                        })
                        .ok_or(SpanError::NoExtension(v))?;
                    pairs.push((ls[v].clone(), hit.clone()));
                }
                SpanColouring { field: cur.field, n: cur.n, data: Assignments::Full(pairs) }
            }
        };
    }
    Ok(cur)
}

/// Number of full colourings projecting to the given valid intermediate
/// colouring: the product over vertices of the number of hyperplanes
/// containing the neighbourhood span but not the vertex's line.
pub fn count_span_extensions(g: &Graph, c: &SpanColouring) -> Result<u128, SpanError> {
    let Assignments::Intermediate(ls) = &c.data else {
        return Err(SpanError::Malformed("extension counting expects an intermediate colouring".into()));
    };
    require_valid(g, c)?;
    let hypers = enumerate_subspaces(c.field, c.n, c.n - 1)?;
    let mut total: u128 = 1;
    for v in 0..g.n_vertices() {
        let nsp = neighbour_span(g, v, &|u| line_generator(&ls[u]), c.field, c.n)?;
        let gen = line_generator(&ls[v]);
        let count = hypers
            .iter()
            .filter(|h| subspace_leq(&nsp, h).unwrap() && !h.contains(&gen))
            .count();
        total *= count as u128;
    }
    Ok(total)
}

/// Least n with a valid n-span colouring of G over the field, with a full
/// witness. Searches upward from the clique number (a proven lower bound);
/// at each n an ordinary n-colouring is tried first (basis vectors of a
/// proper colouring give a valid weak colouring), then Hom(G, A_{k^n}).
pub fn span_chromatic_number(
    g: &Graph,
    field: Field,
) -> Result<(usize, SpanColouring), SpanError> {
    if g.n_vertices() == 0 {
        return Ok((0, SpanColouring { field, n: 0, data: Assignments::Full(vec![]) }));
    }
    for n in clique_number(g).max(1).. {
        let kn = Graph::complete(n);
        if let Some(h) = find_homomorphism(g, &kn, HomMode::First).witness() {
            let weak = SpanColouring {
                field,
                n,
                data: Assignments::Weak(
                    h.map.iter().map(|&c| FVector::basis(field, n, c)).collect(),
                ),
            };
            return Ok((n, convert_colouring(g, &weak, Variant::Full)?));
        }
        let rep = build_rep_graph(field, n)?;
        if let Some(h) = find_homomorphism(g, &rep.graph, HomMode::First).witness() {
            let full = SpanColouring {
                field,
                n,
                data: Assignments::Full(
                    h.map.iter().map(|&w| rep.pairs[w].clone()).collect(),
                ),
            };
            return Ok((n, full));
        }
    }
    unreachable!("search is bounded above by the chromatic number")
}

/// Basis census report: enumerated counts next to the closed formulas.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub q: u64,
    pub n: usize,
    /// Unordered bases of k^n, enumerated.
    pub basis_count: u128,
    /// (1/n!) prod_{i<n} (q^n - q^i).
    pub basis_count_formula: u128,
    /// Classes after the diagonal scalar action on unordered bases.
    pub quotient_count: u128,
    /// Per rep-graph vertex: classes whose associated n-clique uses it.
    pub fiber_counts: Vec<u128>,
    /// (1/(n-1)!) prod_{i<n-1} (q^{n-1} - q^i).
    pub fiber_formula: u128,
    pub matches: bool,
}

fn falling_gl_count(q: u128, n: usize) -> u128 {
    // prod_{i<n} (q^n - q^i) / n!
    let qn = q.pow(n as u32);
    let mut num: u128 = 1;
    for i in 0..n {
        num *= qn - q.pow(i as u32);
    }
    let fact: u128 = (1..=n as u128).product();
    num / fact
}

fn is_independent(field: Field, n: usize, vs: &[&FVector]) -> bool {
    let mut b = RrefBuilder::new(field, n);
    vs.iter().all(|v| b.push(&v.coords))
}

pub fn basis_census(field: Field, n: usize) -> Result<CensusReport, GfError> {
    let q = field.p as u64;
    let q = q.pow(field.e as u32);
    let nonzero: Vec<FVector> =
        all_vectors(field, n).into_iter().filter(|v| !v.is_zero()).collect();
    let pool = nonzero.len();
    if n > 0 {
        let mut choose: u128 = 1;
        for i in 0..n {
            choose = choose * (pool - i) as u128 / (i as u128 + 1);
        }
        if choose > gf::DEFAULT_ENUM_CAP as u128 {
            return Err(GfError::CapExceeded(choose as u64, gf::DEFAULT_ENUM_CAP));
        }
    }
    let rep = build_rep_graph(field, n)?;
    let mut index_of = std::collections::HashMap::new();
    for (i, (u, v)) in rep.pairs.iter().enumerate() {
        index_of.insert((u.flat_key(), v.flat_key()), i);
    }

    let mut basis_count: u128 = 0;
    let mut quotient_count: u128 = 0;
    let mut fiber_counts = vec![0u128; rep.pairs.len()];

    // iterate n-subsets of nonzero vectors in lexicographic index order
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        if n == 0 || idx[n - 1] < pool {
            let vs: Vec<&FVector> = idx.iter().map(|&i| &nonzero[i]).collect();
            if is_independent(field, n, &vs) {
                basis_count += 1;
                // canonical class representative: least sorted coordinate
                // sequence over all diagonal scalings
                let key: Vec<Vec<u8>> = vs.iter().map(|v| v.coords.clone()).collect();
                let mut least = true;
                for a in field.elements().skip(2) {
                    let mut scaled: Vec<Vec<u8>> =
                        vs.iter().map(|v| v.scale(a).coords).collect();
                    scaled.sort();
                    if scaled < key {
                        least = false;
                        break;
                    }
                }
                if least {
                    quotient_count += 1;
                    for j in 0..n {
                        let u = span(field, n, std::slice::from_ref(vs[j]))?;
                        let rest: Vec<FVector> = (0..n)
                            .filter(|&i| i != j)
                            .map(|i| vs[i].clone())
                            .collect();
                        let v = span(field, n, &rest)?;
                        let vi = index_of[&(u.flat_key(), v.flat_key())];
                        fiber_counts[vi] += 1;
                    }
                }
            }
        }
        // advance the subset
        if n == 0 {
            break;
        }
        let mut k = n;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] + (n - 1 - k) < pool {
                for j in k + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if idx[0] + n > pool {
            break;
        }
    }

    let basis_count_formula = falling_gl_count(q as u128, n);
    let fiber_formula = if n == 0 { 0 } else { falling_gl_count(q as u128, n - 1) };
    let matches = basis_count == basis_count_formula
        && fiber_counts.iter().all(|&c| c == fiber_formula);
    let _ = gaussian_binomial(q, n as u64, 1); // cheap sanity anchor for q
    Ok(CensusReport {
        q,
        n,
        basis_count,
        basis_count_formula,
        quotient_count,
        fiber_counts,
        fiber_formula,
        matches,
    })
}

/// Counting obstruction for colouring A_{k^p} with p colours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub q: u64,
    pub p: u64,
    pub q_mod_p: u64,
    /// Whether p divides (q^p - 1) q^{p-1}, the necessary condition for a
    /// map A_{k^p} -> K_p.
    pub divides: bool,
    /// Whether the obstruction proves chi(A_{k^p}) > p.
    pub applies: bool,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn hom_obstruction(q: u64, p: u64) -> Result<Obstruction, SpanError> {
    if !is_prime(p) {
        return Err(SpanError::NotPrime(p));
    }
    let q_mod_p = q % p;
    // (q^p - 1) q^{p-1} mod p, computed modularly
    let t = (modpow(q, p, p) + p - 1) % p * modpow(q, p - 1, p) % p;
    let divides = t == 0;
    let applies = q_mod_p != 0 && q_mod_p != 1;
    Ok(Obstruction { q, p, q_mod_p, divides, applies })
}

// ---------------------------------------------------------------------------
// independent brute-force search, used as an oracle in the property suites

/// All candidate (line, hyperplane) pairs with U not inside V.
fn full_candidates(field: Field, n: usize) -> Result<Vec<(Subspace, Subspace)>, GfError> {
    if n == 0 {
        return Ok(vec![]);
    }
    let lines = enumerate_subspaces(field, n, 1)?;
    let hypers = enumerate_subspaces(field, n, n - 1)?;
    let mut out = Vec::new();
    for u in &lines {
        for v in &hypers {
            if !subspace_leq(u, v)? {
                out.push((u.clone(), v.clone()));
            }
        }
    }
    Ok(out)
}

/// Incremental check shared by the weak/intermediate searches: with `vecs`
/// assigned on `done` vertices (prefix order) and vertex `v` just set,
/// every condition touching only assigned vertices must hold.
fn vector_prefix_ok(
    g: &Graph,
    field: Field,
    n: usize,
    vecs: &[FVector],
    v: usize,
) -> Result<bool, GfError> {
    let assigned = vecs.len(); // vertices 0..assigned hold values, v == assigned-1
    debug_assert_eq!(v + 1, assigned);
    for x in 0..assigned {
        if x != v && !g.has_edge(x, v) {
            continue;
        }
        let nb: Vec<FVector> =
            g.neighbours(x).filter(|&u| u < assigned).map(|u| vecs[u].clone()).collect();
        if span(field, n, &nb)?.contains(&vecs[x]) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn search_vectors(
    g: &Graph,
    field: Field,
    n: usize,
    candidates: &dyn Fn(usize) -> Vec<FVector>, // r = dim of span assigned so far
    echelon: bool,
    count: Option<&mut u128>,
) -> Result<bool, GfError> {
    fn rec(
        g: &Graph,
        field: Field,
        n: usize,
        candidates: &dyn Fn(usize) -> Vec<FVector>,
        echelon: bool,
        vecs: &mut Vec<FVector>,
        rref: &RrefBuilder,
        count: &mut Option<&mut u128>,
    ) -> Result<bool, GfError> {
        let v = vecs.len();
        if v == g.n_vertices() {
            if let Some(c) = count {
                **c += 1;
                return Ok(false);
            }
            return Ok(true);
        }
        let r = if echelon { rref.dim() } else { n };
        for cand in candidates(r.min(n)) {
            vecs.push(cand);
            if vector_prefix_ok(g, field, n, vecs, v)? {
                let mut next = rref.clone();
                next.push(&vecs[v].coords);
                if rec(g, field, n, candidates, echelon, vecs, &next, count)? {
                    vecs.pop();
                    return Ok(true);
                }
            }
            vecs.pop();
        }
        Ok(false)
    }
    let mut vecs = Vec::new();
    let rref = RrefBuilder::new(field, n);
    let mut count = count;
    rec(g, field, n, candidates, echelon, &mut vecs, &rref, &mut count)
}

/// Whether a valid colouring of the variant exists in ambient dim n,
/// by direct backtracking over the definition. Uses a soundness-preserving
/// change-of-basis restriction (each new vector may only use one fresh
/// basis direction) for the weak/intermediate variants and fixes the first
/// vertex's pair for the full variant.
pub fn brute_force_exists(
    g: &Graph,
    field: Field,
    variant: Variant,
    n: usize,
) -> Result<bool, GfError> {
    if g.n_vertices() == 0 {
        return Ok(true);
    }
    match variant {
        Variant::Weak => {
            let all: Vec<FVector> =
                all_vectors(field, n).into_iter().filter(|v| !v.is_zero()).collect();
            let cands = |r: usize| -> Vec<FVector> {
                all.iter()
                    .filter(|v| v.coords[(r + 1).min(n)..].iter().all(|&c| c == 0))
                    .cloned()
                    .collect()
            };
            search_vectors(g, field, n, &cands, true, None)
        }
        Variant::Intermediate => {
            let gens: Vec<FVector> =
                enumerate_subspaces(field, n, 1)?.iter().map(line_generator).collect();
            let cands = |r: usize| -> Vec<FVector> {
                gens.iter()
                    .filter(|v| v.coords[(r + 1).min(n)..].iter().all(|&c| c == 0))
                    .cloned()
                    .collect()
            };
            search_vectors(g, field, n, &cands, true, None)
        }
        Variant::Full => {
            let cands = full_candidates(field, n)?;
            Ok(search_pairs(g, &cands, true, None)?)
        }
    }
}

fn search_pairs(
    g: &Graph,
    cands: &[(Subspace, Subspace)],
    fix_first: bool,
    count: Option<&mut u128>,
) -> Result<bool, GfError> {
    fn rec(
        g: &Graph,
        cands: &[(Subspace, Subspace)],
        fix_first: bool,
        chosen: &mut Vec<usize>,
        count: &mut Option<&mut u128>,
    ) -> Result<bool, GfError> {
        let v = chosen.len();
        if v == g.n_vertices() {
            if let Some(c) = count {
                **c += 1;
                return Ok(false);
            }
            return Ok(true);
        }
        let limit = if fix_first && v == 0 && count.is_none() { 1.min(cands.len()) } else { cands.len() };
        'cand: for ci in 0..limit {
            let (u_v, v_v) = &cands[ci];
            for x in g.neighbours(v).filter(|&x| x < v) {
                let (u_x, v_x) = &cands[chosen[x]];
                if !subspace_leq(u_v, v_x)? || !subspace_leq(u_x, v_v)? {
                    continue 'cand;
                }
            }
            chosen.push(ci);
            if rec(g, cands, fix_first, chosen, count)? {
                chosen.pop();
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    let mut chosen = Vec::new();
    let mut count = count;
    rec(g, cands, fix_first, &mut chosen, &mut count)
}

/// Least n <= max_n admitting a valid colouring of the variant, independent
/// of the homomorphism-based search.
pub fn brute_force_least_n(
    g: &Graph,
    field: Field,
    variant: Variant,
    max_n: usize,
) -> Result<Option<usize>, GfError> {
    if g.n_vertices() == 0 {
        return Ok(Some(0));
    }
    for n in 1..=max_n {
        if brute_force_exists(g, field, variant, n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Exact number of valid colourings of the variant in ambient dim n, with
/// no symmetry reduction.
pub fn count_colourings(
    g: &Graph,
    field: Field,
    variant: Variant,
    n: usize,
) -> Result<u128, GfError> {
    let mut total: u128 = 0;
    match variant {
        Variant::Weak => {
            let all: Vec<FVector> =
                all_vectors(field, n).into_iter().filter(|v| !v.is_zero()).collect();
            let cands = move |_r: usize| all.clone();
            search_vectors(g, field, n, &cands, false, Some(&mut total))?;
        }
        Variant::Intermediate => {
            let gens: Vec<FVector> =
                enumerate_subspaces(field, n, 1)?.iter().map(line_generator).collect();
            let cands = move |_r: usize| gens.clone();
            search_vectors(g, field, n, &cands, false, Some(&mut total))?;
        }
        Variant::Full => {
            let cands = full_candidates(field, n)?;
            search_pairs(g, &cands, false, Some(&mut total))?;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// JSON form: {"assignments": [...], "field": {"e", "p"}, "n", "variant"}

fn subspace_to_json(s: &Subspace) -> Value {
    Value::Array(
        s.basis()
            .iter()
            .map(|row| Value::Array(row.iter().map(|&c| json!(c)).collect()))
            .collect(),
    )
}

pub fn colouring_to_json(c: &SpanColouring) -> Value {
    let assignments: Vec<Value> = match &c.data {
        Assignments::Weak(vs) => vs
            .iter()
            .map(|v| Value::Array(v.coords.iter().map(|&x| json!(x)).collect()))
            .collect(),
        Assignments::Intermediate(ls) => ls.iter().map(subspace_to_json).collect(),
        Assignments::Full(ps) => ps
            .iter()
            .map(|(u, v)| json!({"u": subspace_to_json(u), "v": subspace_to_json(v)}))
            .collect(),
    };
    json!({
        "variant": c.variant().as_str(),
        "field": {"p": c.field.p, "e": c.field.e},
        "n": c.n,
        "assignments": assignments,
    })
}

fn coords_from_json(v: &Value) -> Result<Vec<u8>, SpanError> {
    v.as_array()
        .ok_or_else(|| SpanError::Json("expected coordinate array".into()))?
        .iter()
        .map(|c| {
            c.as_u64()
                .filter(|&x| x < 256)
                .map(|x| x as u8)
                .ok_or_else(|| SpanError::Json("bad coordinate".into()))
        })
        .collect()
}

fn subspace_from_json(field: Field, n: usize, v: &Value) -> Result<Subspace, SpanError> {
    let rows = v
        .as_array()
        .ok_or_else(|| SpanError::Json("expected basis matrix".into()))?;
    let vs: Result<Vec<FVector>, SpanError> = rows
        .iter()
        .map(|r| Ok(FVector::new(field, coords_from_json(r)?)))
        .collect();
    Ok(span(field, n, &vs?)?)
}

pub fn colouring_from_json(v: &Value) -> Result<SpanColouring, SpanError> {
    let obj = v.as_object().ok_or_else(|| SpanError::Json("expected object".into()))?;
    let variant: Variant = obj
        .get("variant")
        .and_then(|x| x.as_str())
        .ok_or_else(|| SpanError::Json("missing variant".into()))?
        .parse()
        .map_err(SpanError::Json)?;
    let field_obj = obj
        .get("field")
        .and_then(|x| x.as_object())
        .ok_or_else(|| SpanError::Json("missing field".into()))?;
    let p = field_obj.get("p").and_then(|x| x.as_u64()).ok_or_else(|| SpanError::Json("missing field.p".into()))?;
    let e = field_obj.get("e").and_then(|x| x.as_u64()).ok_or_else(|| SpanError::Json("missing field.e".into()))?;
    let field = gf::make_field(p, e as u32)?;
    let n = obj
        .get("n")
        .and_then(|x| x.as_u64())
        .ok_or_else(|| SpanError::Json("missing n".into()))? as usize;
    let assignments = obj
        .get("assignments")
        .and_then(|x| x.as_array())
        .ok_or_else(|| SpanError::Json("missing assignments".into()))?;
    let data = match variant {
        Variant::Weak => {
            let vs: Result<Vec<FVector>, SpanError> = assignments
                .iter()
                .map(|a| Ok(FVector::new(field, coords_from_json(a)?)))
                .collect();
            Assignments::Weak(vs?)
        }
        Variant::Intermediate => {
            let ls: Result<Vec<Subspace>, SpanError> =
                assignments.iter().map(|a| subspace_from_json(field, n, a)).collect();
            Assignments::Intermediate(ls?)
        }
        Variant::Full => {
            let ps: Result<Vec<(Subspace, Subspace)>, SpanError> = assignments
                .iter()
                .map(|a| {
                    let o = a
                        .as_object()
                        .ok_or_else(|| SpanError::Json("expected {u, v} pair".into()))?;
                    let u = subspace_from_json(
                        field,
                        n,
                        o.get("u").ok_or_else(|| SpanError::Json("missing u".into()))?,
                    )?;
                    let v = subspace_from_json(
                        field,
                        n,
                        o.get("v").ok_or_else(|| SpanError::Json("missing v".into()))?,
                    )?;
                    Ok((u, v))
                })
                .collect();
            Assignments::Full(ps?)
        }
    };
    Ok(SpanColouring { field, n, data })
}
