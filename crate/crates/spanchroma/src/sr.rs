//! Simplicial complexes with even vertex degrees, the join construction
//! A(n, L) = SR(Δ^{n-1} * L) with deg x_i = 4 and deg y_j = 6, the poset of
//! facet intersections, and truncated polynomial arithmetic over Z/2 in the
//! Stanley-Reisner quotient.
//!
//! Generator supports are stored as u64 bitmasks, so rings are limited to
//! 64 generators.

use crate::graph::Graph;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SrError {
    #[error("vertex name clash: {0}")]
    NameClash(String),
    #[error("bad degrees: {0}")]
    BadDegrees(String),
    #[error("operands belong to different ring contexts")]
    ContextMismatch,
    #[error("not a simplex of the complex")]
    NotASimplex,
    #[error("vertex index {0} out of range")]
    BadIndex(usize),
    #[error("at most 64 vertices are supported, got {0}")]
    TooManyVertices(usize),
    #[error("complex JSON: {0}")]
    Json(String),
}

/// A finite simplicial complex on named vertices, stored by its facets
/// (inclusion-maximal simplices). Every vertex appears in some facet;
/// vertices absent from all given faces become singleton facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    names: Vec<String>,
    degrees: Vec<u32>,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn new(
        names: Vec<String>,
        degrees: Vec<u32>,
        faces: Vec<Vec<usize>>,
    ) -> Result<SimplicialComplex, SrError> {
        let n = names.len();
        if n > 64 {
            return Err(SrError::TooManyVertices(n));
        }
        if degrees.len() != n {
            return Err(SrError::BadDegrees(format!(
                "{} degrees for {} vertices",
                degrees.len(),
                n
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(SrError::NameClash(name.clone()));
            }
        }
        if let Some(&d) = degrees.iter().find(|&&d| d == 0 || d % 2 != 0) {
            return Err(SrError::BadDegrees(format!("degree {d} is not a positive even integer")));
        }
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        for f in faces {
            for &v in &f {
                if v >= n {
                    return Err(SrError::BadIndex(v));
                }
            }
            sets.push(f.into_iter().collect());
        }
        let mut covered = vec![false; n];
        for s in &sets {
            for &v in s {
                covered[v] = true;
            }
        }
        for v in 0..n {
            if !covered[v] {
                sets.push(BTreeSet::from([v]));
            }
        }
        // keep only maximal faces
        let mut facets: Vec<Vec<usize>> = sets
            .iter()
            .filter(|s| !sets.iter().any(|t| s.len() < t.len() && s.is_subset(t)))
            .map(|s| s.iter().copied().collect())
            .collect();
        facets.sort();
        facets.dedup();
        Ok(SimplicialComplex { names, degrees, facets })
    }

    pub fn empty() -> SimplicialComplex {
        SimplicialComplex { names: vec![], degrees: vec![], facets: vec![] }
    }

    pub fn n_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn is_face(&self, s: &[usize]) -> bool {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        self.facets.iter().any(|f| set.iter().all(|v| f.contains(v)))
    }

    fn max_facet_size(&self) -> usize {
        self.facets.iter().map(|f| f.len()).max().unwrap_or(0)
    }
}

/// Default truncation degree; every verification in scope closes below it.
pub const DEFAULT_TRUNC: u32 = 18;

/// The 1-skeleton of a complex as a graph on the same vertex order.
pub fn one_skeleton(k: &SimplicialComplex) -> Graph {
    let n = k.n_vertices();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| k.is_face(&[u, v]))
        .collect();
    let mut g = crate::graph::graph_from_edges(n, &edges).expect("indices in range");
    g.set_labels(k.names().to_vec());
    g
}

/// A graph as a 1-dimensional complex with all vertices in degree 6;
/// vertex i becomes y_{i+1}.
pub fn graph_complex(g: &Graph) -> SimplicialComplex {
    let n = g.n_vertices();
    let names = (1..=n).map(|i| format!("y{i}")).collect();
    let faces = g.edges().into_iter().map(|(u, v)| vec![u, v]).collect();
    SimplicialComplex::new(names, vec![6; n], faces).expect("graph complexes are well-formed")
}

/// The join Δ^{n-1} * L: n fresh vertices x_1..x_n of degree 4 joined to
/// every facet of L. With no facets in L the single facet is the simplex
/// itself; with n = 0 the result is L.
pub fn join_with_simplex(n: usize, l: &SimplicialComplex) -> Result<SimplicialComplex, SrError> {
    let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    for name in l.names() {
        if xs.contains(name) {
            return Err(SrError::NameClash(name.clone()));
        }
    }
    let mut names = xs;
    names.extend(l.names().iter().cloned());
    let mut degrees = vec![4u32; n];
    degrees.extend_from_slice(l.degrees());
    let faces: Vec<Vec<usize>> = if l.facets().is_empty() {
        if n == 0 {
            vec![]
        } else {
            vec![(0..n).collect()]
        }
    } else {
        l.facets()
            .iter()
            .map(|f| (0..n).chain(f.iter().map(|&v| v + n)).collect())
            .collect()
    };
    SimplicialComplex::new(names, degrees, faces)
}

/// A(n, G) for a graph G: the join of the (n-1)-simplex with the graph
/// complex of G.
pub fn a_n_graph(n: usize, g: &Graph) -> SimplicialComplex {
    join_with_simplex(n, &graph_complex(g)).expect("generated names are distinct")
}

/// The simplices expressible as intersections of facets, ordered by
/// inclusion. Computed as the closure of the facet set under pairwise
/// intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmaxPoset {
    /// Sorted by (size, content); includes all facets.
    pub elements: Vec<Vec<usize>>,
}

impl PmaxPoset {
    pub fn leq(&self, i: usize, j: usize) -> bool {
        let b: BTreeSet<usize> = self.elements[j].iter().copied().collect();
        self.elements[i].iter().all(|v| b.contains(v))
    }
}

pub fn p_max(k: &SimplicialComplex) -> PmaxPoset {
    let mut elems: BTreeSet<BTreeSet<usize>> =
        k.facets().iter().map(|f| f.iter().copied().collect()).collect();
    loop {
        let snapshot: Vec<BTreeSet<usize>> = elems.iter().cloned().collect();
        let before = elems.len();
        for i in 0..snapshot.len() {
            for j in i + 1..snapshot.len() {
                elems.insert(snapshot[i].intersection(&snapshot[j]).copied().collect());
            }
        }
        if elems.len() == before {
            break;
        }
    }
    let mut elements: Vec<Vec<usize>> =
        elems.into_iter().map(|s| s.into_iter().collect()).collect();
    elements.sort_by_key(|e| (e.len(), e.clone()));
    PmaxPoset { elements }
}

/// Inclusion-minimal non-faces; the squarefree monomials on these sets
/// generate the Stanley-Reisner ideal.
pub fn minimal_nonfaces(k: &SimplicialComplex) -> Vec<Vec<usize>> {
    let n = k.n_vertices();
    let mut out = Vec::new();
    let max_size = (k.max_facet_size() + 1).min(n);
    let mut subset = Vec::new();
    fn visit(
        k: &SimplicialComplex,
        n: usize,
        size: usize,
        start: usize,
        subset: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if subset.len() == size {
            // minimal iff not a face while every proper subset is one;
            // it suffices to drop one element at a time
            if !k.is_face(subset)
                && (0..size).all(|i| {
                    let mut s = subset.clone();
                    s.remove(i);
                    k.is_face(&s)
                })
            {
                out.push(subset.clone());
            }
            return;
        }
        for v in start..n {
            subset.push(v);
            visit(k, n, size, v + 1, subset, out);
            subset.pop();
        }
    }
    for size in 1..=max_size {
        visit(k, n, size, 0, &mut subset, &mut out);
    }
    out.sort_by_key(|e| (e.len(), e.clone()));
    out
}

#[derive(Debug, Clone)]
pub struct Classification {
    /// All minimal non-faces touch only degree-6 vertices, so the complex
    /// is a join of a simplex on the degree-4 vertices with a complex L.
    pub is_anl: bool,
    /// Additionally every degree-6 triple is a non-face, so L is (at most)
    /// a graph.
    pub is_ang: bool,
    /// Number of degree-4 vertices.
    pub n: usize,
    /// The induced complex on the degree-6 vertices, when is_anl.
    pub link: Option<SimplicialComplex>,
    /// The graph on the degree-6 vertices, when is_ang.
    pub graph: Option<Graph>,
}

pub fn classify_complex(k: &SimplicialComplex) -> Result<Classification, SrError> {
    if let Some(&d) = k.degrees().iter().find(|&&d| d != 4 && d != 6) {
        return Err(SrError::BadDegrees(format!("degree {d} outside {{4, 6}}")));
    }
    let ys: Vec<usize> = (0..k.n_vertices()).filter(|&v| k.degrees()[v] == 6).collect();
    let n = k.n_vertices() - ys.len();
    let nonfaces = minimal_nonfaces(k);
    let is_anl = nonfaces.iter().all(|nf| nf.iter().all(|&v| k.degrees()[v] == 6));
    if !is_anl {
        return Ok(Classification { is_anl, is_ang: false, n, link: None, graph: None });
    }
    // induced complex on the y's
    let pos: std::collections::HashMap<usize, usize> =
        ys.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let link_faces: Vec<Vec<usize>> = k
        .facets()
        .iter()
        .map(|f| f.iter().filter(|v| pos.contains_key(v)).map(|v| pos[v]).collect())
        .collect();
    let link = SimplicialComplex::new(
        ys.iter().map(|&v| k.names()[v].clone()).collect(),
        vec![6; ys.len()],
        link_faces,
    )?;
    let mut is_ang = true;
    'triples: for a in 0..ys.len() {
        for b in a + 1..ys.len() {
            for c in b + 1..ys.len() {
                if k.is_face(&[ys[a], ys[b], ys[c]]) {
                    is_ang = false;
                    break 'triples;
                }
            }
        }
    }
    let graph = if is_ang {
        let edges: Vec<(usize, usize)> = (0..ys.len())
            .flat_map(|a| (a + 1..ys.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| k.is_face(&[ys[a], ys[b]]))
            .collect();
        let mut g = crate::graph::graph_from_edges(ys.len(), &edges)
            .expect("edge indices are in range");
        g.set_labels(ys.iter().map(|&v| k.names()[v].clone()).collect());
        Some(g)
    } else {
        None
    };
    Ok(Classification { is_anl, is_ang, n, link: Some(link), graph })
}

// ---------------------------------------------------------------------------
// truncated Z/2 Stanley-Reisner arithmetic

/// Immutable ring context: generator names and degrees, truncation degree,
/// and the minimal-non-face support masks (empty for a free ring).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingCtx {
    pub names: Vec<String>,
    pub degrees: Vec<u32>,
    pub trunc: u32,
    pub nonface_masks: Vec<u64>,
    complex: Option<SimplicialComplex>,
}

pub type Ring = Arc<RingCtx>;

impl RingCtx {
    pub fn n_gens(&self) -> usize {
        self.names.len()
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn complex(&self) -> Option<&SimplicialComplex> {
        self.complex.as_ref()
    }

    pub fn mono_degree(&self, exps: &[u16]) -> u32 {
        exps.iter().zip(&self.degrees).map(|(&e, &d)| e as u32 * d).sum()
    }
}

fn mask_of(exps: &[u16]) -> u64 {
    exps.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .fold(0u64, |m, (i, _)| m | 1 << i)
}

/// SR(K) ⊗ Z/2 truncated above degree `trunc`.
pub fn ring_of_complex(k: &SimplicialComplex, trunc: u32) -> Ring {
    let nonface_masks = minimal_nonfaces(k)
        .iter()
        .map(|nf| nf.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    Arc::new(RingCtx {
        names: k.names().to_vec(),
        degrees: k.degrees().to_vec(),
        trunc,
        nonface_masks,
        complex: Some(k.clone()),
    })
}

/// Free truncated polynomial ring (no relations).
pub fn free_ring(names: Vec<String>, degrees: Vec<u32>, trunc: u32) -> Result<Ring, SrError> {
    // a free ring is the Stanley-Reisner ring of the full simplex
    let n = names.len();
    let faces = if n == 0 { vec![] } else { vec![(0..n).collect()] };
    let k = SimplicialComplex::new(names, degrees, faces)?;
    Ok(ring_of_complex(&k, trunc))
}

/// The quotient killing every generator outside σ; the target of the
/// restriction map SR(K) -> Z/2[σ].
pub fn simplex_ring(base: &Ring, sigma: &[usize]) -> Ring {
    let sigma_mask = sigma.iter().fold(0u64, |m, &v| m | 1 << v);
    let mut nonface_masks: Vec<u64> = (0..base.n_gens())
        .filter(|&v| sigma_mask >> v & 1 == 0)
        .map(|v| 1u64 << v)
        .collect();
    nonface_masks.extend(base.nonface_masks.iter().filter(|&&m| m & !sigma_mask == 0));
    Arc::new(RingCtx {
        names: base.names.clone(),
        degrees: base.degrees.clone(),
        trunc: base.trunc,
        nonface_masks,
        complex: None,
    })
}

/// A polynomial over Z/2 in a ring context, stored as the set of its
/// monomials' exponent vectors, eagerly reduced modulo the ideal and the
/// truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyZ2 {
    pub ring: Ring,
    terms: BTreeSet<Vec<u16>>,
}

fn reduced(ring: &Ring, exps: &[u16]) -> bool {
    if ring.mono_degree(exps) > ring.trunc {
        return false;
    }
    let m = mask_of(exps);
    !ring.nonface_masks.iter().any(|&nf| nf & m == nf)
}

impl PolyZ2 {
    pub fn zero(ring: &Ring) -> PolyZ2 {
        PolyZ2 { ring: ring.clone(), terms: BTreeSet::new() }
    }

    pub fn one(ring: &Ring) -> PolyZ2 {
        PolyZ2::from_exps(ring, [vec![0; ring.n_gens()]])
    }

    pub fn generator(ring: &Ring, i: usize) -> PolyZ2 {
        let mut exps = vec![0u16; ring.n_gens()];
        exps[i] = 1;
        PolyZ2::from_exps(ring, [exps])
    }

    /// Builds a polynomial by toggling each exponent vector (duplicates
    /// cancel mod 2), reducing eagerly.
    pub fn from_exps<I: IntoIterator<Item = Vec<u16>>>(ring: &Ring, exps: I) -> PolyZ2 {
        let mut terms = BTreeSet::new();
        for e in exps {
            assert_eq!(e.len(), ring.n_gens(), "exponent vector length mismatch");
            if reduced(ring, &e) && !terms.remove(&e) {
                terms.insert(e);
            }
        }
        PolyZ2 { ring: ring.clone(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Vec<u16>> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree of each monomial if homogeneous, else None; zero gives
    /// Some(0).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.iter().map(|e| self.ring.mono_degree(e));
        let Some(first) = degs.next() else { return Some(0) };
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &PolyZ2) -> Result<PolyZ2, SrError> {
        if self.ring != other.ring {
            return Err(SrError::ContextMismatch);
        }
        let terms: BTreeSet<Vec<u16>> =
            self.terms.symmetric_difference(&other.terms).cloned().collect();
        Ok(PolyZ2 { ring: self.ring.clone(), terms })
    }

    pub fn mul(&self, other: &PolyZ2) -> Result<PolyZ2, SrError> {
        if self.ring != other.ring {
            return Err(SrError::ContextMismatch);
        }
        let mut terms = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let e: Vec<u16> = a.iter().zip(b).map(|(&x, &y)| x + y).collect();
                if reduced(&self.ring, &e) && !terms.remove(&e) {
                    terms.insert(e);
                }
            }
        }
        Ok(PolyZ2 { ring: self.ring.clone(), terms })
    }

    pub fn pow(&self, k: u32) -> PolyZ2 {
        let mut acc = PolyZ2::one(&self.ring);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// The same terms reinterpreted (and re-reduced) in another ring on the
    /// same generators.
    pub fn into_ring(&self, ring: &Ring) -> PolyZ2 {
        assert_eq!(ring.n_gens(), self.ring.n_gens());
        PolyZ2::from_exps(ring, self.terms.iter().cloned())
    }
}

/// Image of `a` under SR(K) -> Z/2[σ], killing monomials with support
/// outside σ. Errors unless σ is a simplex of the ring's complex.
pub fn restrict_to_simplex(a: &PolyZ2, sigma: &[usize]) -> Result<PolyZ2, SrError> {
    match a.ring.complex() {
        Some(k) if k.is_face(sigma) => {}
        _ => return Err(SrError::NotASimplex),
    }
    let target = simplex_ring(&a.ring, sigma);
    Ok(a.into_ring(&target))
}

/// Degree-by-degree comparison (supports with total degree <= D) of the
/// intersection ideal ⋂_{σ∈U} (V∖σ) against the Stanley-Reisner ideal I_K
/// and against the kernel of SR(K) -> SR(K_U), where K_U has facet set U.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WipeoutReport {
    pub equals_ideal: bool,
    /// Support in exactly one of the two ideals, by vertex index.
    pub ideal_witness: Option<Vec<usize>>,
    pub equals_kernel: bool,
    pub kernel_witness: Option<Vec<usize>>,
}

pub fn wipeout_check(k: &SimplicialComplex, trunc: u32, u: &[Vec<usize>]) -> WipeoutReport {
    let mut report = WipeoutReport {
        equals_ideal: true,
        ideal_witness: None,
        equals_kernel: true,
        kernel_witness: None,
    };
    let n = k.n_vertices();
    let in_intersection =
        |s: &[usize]| u.iter().all(|sigma| !s.iter().all(|v| sigma.contains(v)));
    // supports realizable below the truncation degree
    let mut stack = vec![(0usize, Vec::new(), 0u32)];
    while let Some((next, cur, deg)) = stack.pop() {
        if !cur.is_empty() {
            let inter = in_intersection(&cur);
            let in_ideal = !k.is_face(&cur);
            // dies in SR(K_U): already in I_K, or not covered by any σ
            let in_kernel = in_ideal || inter;
            if report.equals_ideal && inter != in_ideal {
                report.equals_ideal = false;
                report.ideal_witness = Some(cur.clone());
            }
            if report.equals_kernel && inter != in_kernel {
                report.equals_kernel = false;
                report.kernel_witness = Some(cur.clone());
            }
        }
        for v in next..n {
            let d = deg + k.degrees()[v];
            if d <= trunc {
                let mut c = cur.clone();
                c.push(v);
                stack.push((v + 1, c, d));
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// JSON forms

pub fn complex_to_json(k: &SimplicialComplex) -> Value {
    json!({
        "vertices": k
            .names()
            .iter()
            .zip(k.degrees())
            .map(|(n, &d)| json!({"name": n, "degree": d}))
            .collect::<Vec<_>>(),
        "facets": k
            .facets()
            .iter()
            .map(|f| f.iter().map(|&v| json!(k.names()[v])).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn complex_from_json(v: &Value) -> Result<SimplicialComplex, SrError> {
    let obj = v.as_object().ok_or_else(|| SrError::Json("expected object".into()))?;
    let vertices = obj
        .get("vertices")
        .and_then(|x| x.as_array())
        .ok_or_else(|| SrError::Json("missing vertices".into()))?;
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    for v in vertices {
        let o = v.as_object().ok_or_else(|| SrError::Json("bad vertex entry".into()))?;
        names.push(
            o.get("name")
                .and_then(|x| x.as_str())
                .ok_or_else(|| SrError::Json("missing vertex name".into()))?
                .to_string(),
        );
        degrees.push(
            o.get("degree")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| SrError::Json("missing vertex degree".into()))? as u32,
        );
    }
    let facets = obj
        .get("facets")
        .and_then(|x| x.as_array())
        .ok_or_else(|| SrError::Json("missing facets".into()))?;
    let mut faces = Vec::new();
    for f in facets {
        let f = f.as_array().ok_or_else(|| SrError::Json("bad facet".into()))?;
        let mut face = Vec::new();
        for name in f {
            let name = name.as_str().ok_or_else(|| SrError::Json("bad facet vertex".into()))?;
            let i = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| SrError::Json(format!("unknown vertex {name}")))?;
            face.push(i);
        }
        faces.push(face);
    }
    SimplicialComplex::new(names, degrees, faces)
}

/// Polynomial as a list of {generator: exponent} maps, ordered by
/// (degree, exponents).
pub fn poly_to_json(p: &PolyZ2) -> Value {
    let mut terms: Vec<&Vec<u16>> = p.terms().collect();
    terms.sort_by_key(|e| (p.ring.mono_degree(e), (*e).clone()));
    Value::Array(
        terms
            .iter()
            .map(|e| {
                let mut m = serde_json::Map::new();
                for (i, &x) in e.iter().enumerate() {
                    if x > 0 {
                        m.insert(p.ring.names[i].clone(), json!(x));
                    }
                }
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn poly_from_json(ring: &Ring, v: &Value) -> Result<PolyZ2, SrError> {
    let arr = v.as_array().ok_or_else(|| SrError::Json("expected term array".into()))?;
    let mut exps_list = Vec::new();
    for t in arr {
        let o = t.as_object().ok_or_else(|| SrError::Json("bad term".into()))?;
        let mut exps = vec![0u16; ring.n_gens()];
        for (name, e) in o {
            let i = ring
                .gen_index(name)
                .ok_or_else(|| SrError::Json(format!("unknown generator {name}")))?;
            exps[i] = e
                .as_u64()
                .filter(|&x| x < 1 << 16)
                .ok_or_else(|| SrError::Json("bad exponent".into()))? as u16;
        }
        exps_list.push(exps);
    }
    Ok(PolyZ2::from_exps(ring, exps_list))
}
