//! Unstable mod-2 Steenrod algebra actions on graded Stanley-Reisner rings
//! with generators in degrees 4 and 6: construction from span colourings,
//! certificate-based verification bounded by the ring truncation, extraction
//! of colourings back out of actions, a limited mod-p P^1 construction, and
//! the realizability classifiers for the two-generator case.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::gf::{self, FVector, Field, GfError, Subspace};
use crate::graph::{chromatic_number, two_core, Graph};
use crate::spancolour::{
    convert_colouring, span_chromatic_number, validate_colouring, Assignments, SpanColouring,
    SpanError, Variant,
};
use crate::sr::{
    a_n_graph, classify_complex, complex_from_json, complex_to_json, free_ring, join_with_simplex,
    one_skeleton, p_max, poly_from_json, poly_to_json, ring_of_complex, simplex_ring,
    SimplicialComplex, PolyZ2, Ring, SrError,
};

#[derive(Debug, Error)]
pub enum SteenrodError {
    #[error("malformed action: {0}")]
    Malformed(String),
    #[error("invalid colouring: {0}")]
    InvalidColouring(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ring is not of the form A(n, G)")]
    NotAnG,
    #[error("Sq^4 image of degree-6 generator for vertex {0} is not in its principal ideal")]
    Sq4NotInPrincipalIdeal(usize),
    #[error("extraction failed: {0}")]
    ExtractionInvalid(String),
    #[error("prime {0} is not congruent to 5 mod 6")]
    BadPrime(u64),
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error(transparent)]
    Sr(#[from] SrError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("span colouring error: {0}")]
    Span(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<SpanError> for SteenrodError {
    fn from(e: SpanError) -> Self {
        SteenrodError::Span(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// actions

/// An action is determined by Sq^2 of every generator and Sq^4 of every
/// degree-6 generator; Sq^0 is the identity, Sq^deg squares, and everything
/// above the degree (or odd) vanishes since the ring sits in even degrees.
///
/// Images are stored in the free polynomial ring on the same generators so
/// that well-definedness on the quotient can itself be tested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteenrodAction {
    ring: Ring,
    free: Ring,
    sq2: Vec<PolyZ2>,
    sq4: Vec<PolyZ2>,
}

impl SteenrodAction {
    /// `sq4` entries must be present exactly for the degree-6 generators;
    /// Sq^4 of a degree-4 generator is its square by the unstable law.
    pub fn new(
        ring: Ring,
        sq2: Vec<PolyZ2>,
        sq4: Vec<Option<PolyZ2>>,
    ) -> Result<SteenrodAction, SteenrodError> {
        let n = ring.n_gens();
        if sq2.len() != n || sq4.len() != n {
            return Err(SteenrodError::Malformed(format!(
                "expected {n} generator images, got {} and {}",
                sq2.len(),
                sq4.len()
            )));
        }
        if let Some(&d) = ring.degrees.iter().find(|&&d| d != 4 && d != 6) {
            return Err(SteenrodError::Malformed(format!("generator degree {d} outside {{4, 6}}")));
        }
        let free = free_ring(ring.names.clone(), ring.degrees.clone(), ring.trunc)?;
        let reembed = |p: &PolyZ2| -> Result<PolyZ2, SteenrodError> {
            if p.ring.names != ring.names || p.ring.degrees != ring.degrees {
                return Err(SteenrodError::Malformed("image in a foreign ring".into()));
            }
            Ok(p.into_ring(&free))
        };
        let sq2: Vec<PolyZ2> = sq2.iter().map(&reembed).collect::<Result<_, _>>()?;
        let mut sq4_full = Vec::with_capacity(n);
        for (i, entry) in sq4.iter().enumerate() {
            match (ring.degrees[i], entry) {
                (4, None) => sq4_full.push(PolyZ2::generator(&free, i).pow(2)),
                (6, Some(p)) => sq4_full.push(reembed(p)?),
                (4, Some(_)) => {
                    return Err(SteenrodError::Malformed(format!(
                        "Sq^4 of degree-4 generator {} is forced to its square",
                        ring.names[i]
                    )))
                }
                (6, None) => {
                    return Err(SteenrodError::Malformed(format!(
                        "missing Sq^4 image for degree-6 generator {}",
                        ring.names[i]
                    )))
                }
                _ => unreachable!(),
            }
        }
        Ok(SteenrodAction { ring, free, sq2, sq4: sq4_full })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Free polynomial ring on the same generators and truncation.
    pub fn free(&self) -> &Ring {
        &self.free
    }

    /// Sq^2 image of generator i, in the free ring.
    pub fn sq2_image(&self, i: usize) -> &PolyZ2 {
        &self.sq2[i]
    }

    /// Sq^4 image of generator i, in the free ring.
    pub fn sq4_image(&self, i: usize) -> &PolyZ2 {
        &self.sq4[i]
    }
}

/// Memoizing Cartan-recursion engine, tied to one target ring (the action's
/// own ring, its free cover, or a facet quotient of either).
pub struct SqEvaluator {
    ring: Ring,
    img2: Vec<PolyZ2>,
    img4: Vec<PolyZ2>,
    memo: HashMap<(Vec<u16>, u32), PolyZ2>,
}

impl SqEvaluator {
    pub fn new(action: &SteenrodAction, ring: &Ring) -> SqEvaluator {
        assert_eq!(action.ring.names, ring.names, "evaluator ring over foreign generators");
        SqEvaluator {
            ring: ring.clone(),
            img2: action.sq2.iter().map(|p| p.into_ring(ring)).collect(),
            img4: action.sq4.iter().map(|p| p.into_ring(ring)).collect(),
            memo: HashMap::new(),
        }
    }

    pub fn sq(&mut self, a: &PolyZ2, k: u32) -> Result<PolyZ2, SteenrodError> {
        if *a.ring != *self.ring {
            return Err(SteenrodError::Sr(SrError::ContextMismatch));
        }
        let mut acc = PolyZ2::zero(&self.ring);
        for t in a.terms() {
            let part = self.sq_mono(t, k);
            acc = acc.add(&part).expect("same ring");
        }
        Ok(acc)
    }

    fn sq_gen(&self, i: usize, k: u32) -> PolyZ2 {
        let d = self.ring.degrees[i];
        match k {
            0 => PolyZ2::generator(&self.ring, i),
            2 => self.img2[i].clone(),
            4 => self.img4[i].clone(),
            6 if d == 6 => PolyZ2::generator(&self.ring, i).pow(2),
            _ => PolyZ2::zero(&self.ring),
        }
    }

    fn sq_mono(&mut self, exps: &[u16], k: u32) -> PolyZ2 {
        if k == 0 {
            return PolyZ2::from_exps(&self.ring, [exps.to_vec()]);
        }
        let deg = self.ring.mono_degree(exps);
        if k % 2 == 1 || k > deg || deg + k > self.ring.trunc {
            return PolyZ2::zero(&self.ring);
        }
        let key = (exps.to_vec(), k);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let i = exps.iter().position(|&e| e > 0).expect("degree > 0");
        let mut rest = exps.to_vec();
        rest[i] -= 1;
        let mut acc = PolyZ2::zero(&self.ring);
        let top = self.ring.degrees[i].min(k);
        for j in (0..=top).step_by(2) {
            let left = self.sq_gen(i, j);
            if left.is_zero() {
                continue;
            }
            let right = self.sq_mono(&rest, k - j);
            acc = acc.add(&left.mul(&right).expect("same ring")).expect("same ring");
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}

/// Sq^k(a) where a lives in the action's ring or its free cover.
pub fn sq(action: &SteenrodAction, a: &PolyZ2, k: u32) -> Result<PolyZ2, SteenrodError> {
    let ring = if *a.ring == *action.ring {
        &action.ring
    } else if *a.ring == *action.free {
        &action.free
    } else {
        return Err(SteenrodError::Sr(SrError::ContextMismatch));
    };
    SqEvaluator::new(action, ring).sq(a, k)
}

/// The Wu-formula action of H^*(BSU(3); Z/2)^{⊗m} ⊗ H^*(BSU(2); Z/2)^{⊗(n-m)}
/// on the free ring Z/2[x_1..x_n, y_1..y_m]: Sq^2(x_i) = y_i and
/// Sq^4(y_i) = y_i x_i for i <= m, Sq^2 = 0 on surplus x's and on all y's.
pub fn su3_generator_action(
    n: usize,
    m: usize,
    trunc: u32,
) -> Result<SteenrodAction, SteenrodError> {
    if m > n {
        return Err(SteenrodError::DimensionMismatch(format!(
            "{m} degree-6 generators need at least as many degree-4 generators, got {n}"
        )));
    }
    let names: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=m).map(|i| format!("y{i}")))
        .collect();
    let degrees: Vec<u32> = vec![4; n].iter().copied().chain(vec![6; m]).collect();
    let ring = free_ring(names, degrees, trunc)?;
    let mut sq2 = Vec::new();
    let mut sq4 = Vec::new();
    for i in 0..n {
        if i < m {
            sq2.push(PolyZ2::generator(&ring, n + i));
        } else {
            sq2.push(PolyZ2::zero(&ring));
        }
        sq4.push(None);
    }
    for i in 0..m {
        sq2.push(PolyZ2::zero(&ring));
        sq4.push(Some(
            PolyZ2::generator(&ring, n + i).mul(&PolyZ2::generator(&ring, i)).expect("same ring"),
        ));
    }
    SteenrodAction::new(ring, sq2, sq4)
}

// ---------------------------------------------------------------------------
// construction from a colouring

fn dot(field: Field, w: &[u8], v: &FVector) -> u8 {
    w.iter().zip(&v.coords).fold(0, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

/// The lexicographically least functional w with <w, target> = 1 and
/// <w, z> = 0 for every z in `zeros`. Exists whenever target is outside
/// the span of `zeros`.
fn least_splitting(field: Field, n: usize, target: &FVector, zeros: &[FVector]) -> Option<Vec<u8>> {
    let q = field.q as u64;
    let total = q.checked_pow(n as u32)?;
    for idx in 0..total {
        let mut w = vec![0u8; n];
        let mut v = idx;
        for j in (0..n).rev() {
            w[j] = (v % q) as u8;
            v /= q;
        }
        if dot(field, &w, target) == 1 && zeros.iter().all(|z| dot(field, &w, z) == 0) {
            return Some(w);
        }
    }
    None
}

fn weak_vectors(c: &SpanColouring) -> Result<&[FVector], SteenrodError> {
    match &c.data {
        Assignments::Weak(vs) => Ok(vs),
        _ => Err(SteenrodError::InvalidColouring("weak-variant colouring required".into())),
    }
}

fn checked_weak_colouring(
    l: &SimplicialComplex,
    n: usize,
    c: &SpanColouring,
    field: Field,
) -> Result<(Graph, Vec<FVector>), SteenrodError> {
    if c.field != field {
        return Err(SteenrodError::InvalidColouring(format!(
            "colouring over GF({}), expected GF({})",
            c.field.q, field.q
        )));
    }
    if c.n != n || c.len() != l.n_vertices() {
        return Err(SteenrodError::DimensionMismatch(format!(
            "colouring of {} vertices in ambient dimension {}, complex has {} and n = {}",
            c.len(),
            c.n,
            l.n_vertices(),
            n
        )));
    }
    let skeleton = one_skeleton(l);
    if let Some(v) = validate_colouring(&skeleton, c)? {
        return Err(SteenrodError::InvalidColouring(format!(
            "vertex {}: {}",
            v.vertex, v.reason
        )));
    }
    Ok((skeleton, weak_vectors(c)?.to_vec()))
}

/// Builds the action on A(n,L) ⊗ Z/2 induced by a weak span colouring of
/// the 1-skeleton of L over GF(2): Sq^4(y_i) = y_i f(y_i), Sq^2(y_i) = 0,
/// and Sq^2(x_j) collects the splittings dual to the colouring vectors.
pub fn action_from_colouring(
    l: &SimplicialComplex,
    n: usize,
    c: &SpanColouring,
    trunc: u32,
) -> Result<SteenrodAction, SteenrodError> {
    let gf2 = gf::make_field(2, 1)?;
    let (skeleton, fs) = checked_weak_colouring(l, n, c, gf2)?;
    let k = join_with_simplex(n, l)?;
    let ring = ring_of_complex(&k, trunc);
    let m = l.n_vertices();

    let mut splittings = Vec::with_capacity(m);
    for i in 0..m {
        let zeros: Vec<FVector> = skeleton.neighbours(i).map(|j| fs[j].clone()).collect();
        let w = least_splitting(gf2, n, &fs[i], &zeros).ok_or_else(|| {
            SteenrodError::InvalidColouring(format!("no splitting separates vertex {i}"))
        })?;
        splittings.push(w);
    }

    let mut sq2 = Vec::with_capacity(n + m);
    let mut sq4 = Vec::with_capacity(n + m);
    for j in 0..n {
        let terms = (0..m).filter(|&i| splittings[i][j] == 1).map(|i| {
            let mut e = vec![0u16; n + m];
            e[n + i] = 1;
            e
        });
        sq2.push(PolyZ2::from_exps(&ring, terms));
        sq4.push(None);
    }
    for i in 0..m {
        sq2.push(PolyZ2::zero(&ring));
        let terms = (0..n).filter(|&j| fs[i].coords[j] == 1).map(|j| {
            let mut e = vec![0u16; n + m];
            e[n + i] = 1;
            e[j] = 1;
            e
        });
        sq4.push(Some(PolyZ2::from_exps(&ring, terms)));
    }
    SteenrodAction::new(ring, sq2, sq4)
}

// ---------------------------------------------------------------------------
// verification

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckResult {
    fn pass() -> CheckResult {
        CheckResult { pass: true, witness: None }
    }

    fn fail(witness: String) -> CheckResult {
        CheckResult { pass: false, witness: Some(witness) }
    }
}

/// Bounded verification certificate: every check ranges over degrees at
/// most `trunc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub trunc: u32,
    pub unstable: CheckResult,
    pub ideal: CheckResult,
    pub adem: CheckResult,
    pub pmax: CheckResult,
}

impl Certificate {
    pub fn all_pass(&self) -> bool {
        self.unstable.pass && self.ideal.pass && self.adem.pass && self.pmax.pass
    }
}

fn mono_name(ring: &Ring, exps: &[u16]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                ring.names[i].clone()
            } else {
                format!("{}^{}", ring.names[i], e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn check_unstable(action: &SteenrodAction) -> CheckResult {
    for i in 0..action.ring.n_gens() {
        let d = action.ring.degrees[i];
        let name = &action.ring.names[i];
        let im2 = action.sq2[i].into_ring(&action.ring);
        if !im2.is_zero() && im2.homogeneous_degree() != Some(d + 2) {
            return CheckResult::fail(format!("Sq^2({name}) is not homogeneous of degree {}", d + 2));
        }
        let im4 = action.sq4[i].into_ring(&action.ring);
        if !im4.is_zero() && im4.homogeneous_degree() != Some(d + 4) {
            return CheckResult::fail(format!("Sq^4({name}) is not homogeneous of degree {}", d + 4));
        }
        if d == 4 && action.sq4[i] != PolyZ2::generator(&action.free, i).pow(2) {
            return CheckResult::fail(format!("Sq^4({name}) differs from {name}^2"));
        }
    }
    CheckResult::pass()
}

fn check_ideal(action: &SteenrodAction) -> CheckResult {
    let mut eval = SqEvaluator::new(action, &action.free);
    for &mask in &action.ring.nonface_masks {
        let exps: Vec<u16> = (0..action.ring.n_gens())
            .map(|i| if mask >> i & 1 == 1 { 1 } else { 0 })
            .collect();
        let m = PolyZ2::from_exps(&action.free, [exps.clone()]);
        if m.is_zero() {
            continue;
        }
        let deg = action.free.mono_degree(&exps);
        for k in (2..=deg.min(action.ring.trunc.saturating_sub(deg))).step_by(2) {
            let image = eval.sq(&m, k).expect("free ring element");
            if !image.into_ring(&action.ring).is_zero() {
                return CheckResult::fail(format!(
                    "Sq^{k}({}) does not reduce to 0 in the quotient",
                    mono_name(&action.free, &exps)
                ));
            }
        }
    }
    CheckResult::pass()
}

/// binom(n, k) mod 2 by Lucas: 1 exactly when the bits of k sit inside n.
pub fn binom_mod2(n: u64, k: u64) -> u64 {
    u64::from(n & k == k)
}

fn check_adem(action: &SteenrodAction) -> CheckResult {
    let trunc = action.ring.trunc;
    let mut eval = SqEvaluator::new(action, &action.ring);
    for i in 0..action.ring.n_gens() {
        let d = action.ring.degrees[i];
        let g = PolyZ2::generator(&action.ring, i);
        for b in 1u32..=trunc {
            for a in 1..2 * b {
                if a + b + d > trunc {
                    continue;
                }
                let inner = eval.sq(&g, b).expect("ring element");
                let lhs = eval.sq(&inner, a).expect("ring element");
                let mut rhs = PolyZ2::zero(&action.ring);
                for c in 0..=a / 2 {
                    if binom_mod2((b - c - 1) as u64, (a - 2 * c) as u64) == 1 {
                        let base = eval.sq(&g, c).expect("ring element");
                        let term = eval.sq(&base, a + b - c).expect("ring element");
                        rhs = rhs.add(&term).expect("same ring");
                    }
                }
                if lhs != rhs {
                    return CheckResult::fail(format!(
                        "Sq^{a}Sq^{b}({}) violates the Adem relation",
                        action.ring.names[i]
                    ));
                }
            }
        }
    }
    CheckResult::pass()
}

fn monomials_below(ring: &Ring, support: &[usize]) -> Vec<Vec<u16>> {
    fn rec(
        ring: &Ring,
        support: &[usize],
        pos: usize,
        budget: u32,
        cur: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if pos == support.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(cur.clone());
            }
            return;
        }
        let v = support[pos];
        let d = ring.degrees[v];
        for e in 0..=(budget / d) as u16 {
            cur[v] = e;
            rec(ring, support, pos + 1, budget - e as u32 * d, cur, out);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u16; ring.n_gens()];
    rec(ring, support, 0, ring.trunc, &mut cur, &mut out);
    out
}

fn check_pmax(action: &SteenrodAction) -> CheckResult {
    let Some(k) = action.ring.complex() else {
        return CheckResult::pass();
    };
    let pm = p_max(k);
    let rings: Vec<Ring> =
        pm.elements.iter().map(|sigma| simplex_ring(&action.ring, sigma)).collect();
    let mut evals: Vec<SqEvaluator> =
        rings.iter().map(|r| SqEvaluator::new(action, r)).collect();
    for s in 0..pm.elements.len() {
        let monos = monomials_below(&rings[s], &pm.elements[s]);
        for t in 0..pm.elements.len() {
            if t == s || !pm.leq(t, s) {
                continue;
            }
            for exps in &monos {
                let mono = PolyZ2::from_exps(&rings[s], [exps.clone()]);
                if mono.is_zero() {
                    continue;
                }
                let deg = rings[s].mono_degree(exps);
                for k in (2..=action.ring.trunc.saturating_sub(deg)).step_by(2) {
                    let lhs = evals[s].sq(&mono, k).expect("quotient element").into_ring(&rings[t]);
                    let rhs =
                        evals[t].sq(&mono.into_ring(&rings[t]), k).expect("quotient element");
                    if lhs != rhs {
                        return CheckResult::fail(format!(
                            "Sq^{k}({}) does not commute with restriction {:?} -> {:?}",
                            mono_name(&rings[s], exps),
                            pm.elements[s],
                            pm.elements[t],
                        ));
                    }
                }
            }
        }
    }
    CheckResult::pass()
}

/// Four bounded checks: (i) images sit in the right degrees and respect the
/// unstable law; (ii) squares of the ideal generators, computed freely,
/// vanish in the quotient; (iii) Adem relations hold on generators; (iv)
/// restriction to every pair of nested facet intersections commutes with
/// the action on a monomial basis.
pub fn verify_action(action: &SteenrodAction) -> Certificate {
    Certificate {
        trunc: action.ring.trunc,
        unstable: check_unstable(action),
        ideal: check_ideal(action),
        adem: check_adem(action),
        pmax: check_pmax(action),
    }
}

// ---------------------------------------------------------------------------
// extraction

#[derive(Debug, Clone)]
pub struct ExtractReport {
    pub n: usize,
    /// Vertices deleted on the way to the 2-core, in deletion order.
    pub removed: Vec<usize>,
    pub core_vertices: Vec<usize>,
}

fn sugawara_toda_ok(k: &SimplicialComplex) -> bool {
    k.facets().iter().all(|f| {
        let six = f.iter().filter(|&&v| k.degrees()[v] == 6).count();
        six <= f.len() - six
    })
}

fn least_full_pair(field: Field, n: usize) -> Result<(Subspace, Subspace), SteenrodError> {
    let lines = gf::enumerate_subspaces(field, n, 1)?;
    let hypers = gf::enumerate_subspaces(field, n, n - 1)?;
    let u = lines[0].clone();
    for v in hypers {
        if !gf::subspace_leq(&u, &v)? {
            return Ok((u, v));
        }
    }
    Err(SteenrodError::ExtractionInvalid("no admissible hyperplane".into()))
}

/// Extends over a deleted degree-<=1 vertex: an isolated vertex takes the
/// least pair; a pendant vertex next to (U, V) takes (U', W + U) for the
/// least line U' in V and least complement W of U' in V.
fn extend_pair(
    field: Field,
    n: usize,
    neighbour: Option<&(Subspace, Subspace)>,
) -> Result<(Subspace, Subspace), SteenrodError> {
    let Some((u, v)) = neighbour else {
        return least_full_pair(field, n);
    };
    let u_new = gf::enumerate_subspaces(field, n, 1)?
        .into_iter()
        .find(|l| gf::subspace_leq(l, v).unwrap_or(false))
        .ok_or_else(|| SteenrodError::ExtractionInvalid("hyperplane has no line".into()))?;
    let w = gf::enumerate_subspaces(field, n, n - 2)?
        .into_iter()
        .find(|w| {
            gf::subspace_leq(w, v).unwrap_or(false) && !gf::subspace_leq(&u_new, w).unwrap_or(true)
        })
        .ok_or_else(|| SteenrodError::ExtractionInvalid("no complement found".into()))?;
    Ok((u_new, gf::subspace_sum(&w, u)?))
}

/// Reads a weak span colouring of G over GF(2) back out of an action on
/// A(n, G) ⊗ Z/2: restrict to the 2-core, decode f from the Sq^4 images
/// there, validate, and extend over the deleted low-degree vertices.
pub fn extract_colouring(
    action: &SteenrodAction,
    g: &Graph,
) -> Result<(SpanColouring, ExtractReport), SteenrodError> {
    let complex = action.ring.complex().ok_or(SteenrodError::NotAnG)?.clone();
    let cls = classify_complex(&complex)?;
    if !cls.is_ang {
        return Err(SteenrodError::NotAnG);
    }
    let cls_graph = cls.graph.expect("present when is_ang");
    if cls_graph != *g {
        return Err(SteenrodError::Malformed(
            "graph does not match the action's ring".into(),
        ));
    }
    let n = cls.n;
    let gf2 = gf::make_field(2, 1)?;
    let xs: Vec<usize> = (0..complex.n_vertices()).filter(|&v| complex.degrees()[v] == 4).collect();
    let ys: Vec<usize> = (0..complex.n_vertices()).filter(|&v| complex.degrees()[v] == 6).collect();

    if n <= 1 {
        if !sugawara_toda_ok(&complex) {
            return Err(SteenrodError::ExtractionInvalid(
                "a facet has more degree-6 than degree-4 vertices, so no action exists".into(),
            ));
        }
        // no edges survive the facet condition, so any nonzero value works
        let vs = vec![FVector::new(gf2, vec![1; n]); g.n_vertices()];
        let c = SpanColouring { field: gf2, n, data: Assignments::Weak(vs) };
        if validate_colouring(g, &c)?.is_some() {
            return Err(SteenrodError::ExtractionInvalid("constant assignment rejected".into()));
        }
        let report =
            ExtractReport { n, removed: (0..g.n_vertices()).collect(), core_vertices: vec![] };
        return Ok((c, report));
    }

    let tc = two_core(g);
    let mut pairs: Vec<Option<(Subspace, Subspace)>> = vec![None; g.n_vertices()];

    if !tc.kept.is_empty() {
        let complex2 = a_n_graph(n, &tc.graph);
        let ring2 = ring_of_complex(&complex2, action.ring.trunc);
        let kept_pos: HashMap<usize, usize> =
            tc.kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let project = |p: &PolyZ2| -> PolyZ2 {
            let mapped = p.terms().filter_map(|exps| {
                let mut out = vec![0u16; ring2.n_gens()];
                for (j, &x) in xs.iter().enumerate() {
                    out[j] = exps[x];
                }
                for (v, &y) in ys.iter().enumerate() {
                    if exps[y] > 0 {
                        let &i = kept_pos.get(&v)?;
                        out[n + i] = exps[y];
                    }
                }
                Some(out)
            });
            PolyZ2::from_exps(&ring2, mapped.collect::<Vec<_>>())
        };

        let mut core_vectors = Vec::with_capacity(tc.kept.len());
        for (i, &v) in tc.kept.iter().enumerate() {
            let image = project(&action.sq4[ys[v]].into_ring(&action.ring));
            let mut coords = vec![0u8; n];
            if image.is_zero() {
                return Err(SteenrodError::Sq4NotInPrincipalIdeal(v));
            }
            for exps in image.terms() {
                let y_part: Vec<usize> =
                    (n..ring2.n_gens()).filter(|&j| exps[j] > 0).collect();
                let x_part: Vec<usize> = (0..n).filter(|&j| exps[j] > 0).collect();
                if y_part != [n + i] || exps[n + i] != 1 || x_part.len() != 1 || exps[x_part[0]] != 1
                {
                    return Err(SteenrodError::Sq4NotInPrincipalIdeal(v));
                }
                coords[x_part[0]] = 1;
            }
            core_vectors.push(FVector::new(gf2, coords));
        }
        let core_colouring =
            SpanColouring { field: gf2, n, data: Assignments::Weak(core_vectors) };
        if let Some(viol) = validate_colouring(&tc.graph, &core_colouring)? {
            return Err(SteenrodError::ExtractionInvalid(format!(
                "decoded assignment invalid at core vertex {}: {}",
                tc.kept[viol.vertex], viol.reason
            )));
        }
        let full = convert_colouring(&tc.graph, &core_colouring, Variant::Full)?;
        if let Assignments::Full(ps) = full.data {
            for (i, pair) in ps.into_iter().enumerate() {
                pairs[tc.kept[i]] = Some(pair);
            }
        }
    }

    for &v in tc.removed.iter().rev() {
        let neighbour = g
            .neighbours(v)
            .find_map(|u| pairs[u].as_ref());
        pairs[v] = Some(extend_pair(gf2, n, neighbour)?);
    }

    let assignments: Vec<(Subspace, Subspace)> =
        pairs.into_iter().map(|p| p.expect("every vertex assigned")).collect();
    let full = SpanColouring { field: gf2, n, data: Assignments::Full(assignments) };
    if let Some(viol) = validate_colouring(g, &full)? {
        return Err(SteenrodError::ExtractionInvalid(format!(
            "extended assignment invalid at vertex {}: {}",
            viol.vertex, viol.reason
        )));
    }
    let weak = convert_colouring(g, &full, Variant::Weak)?;
    Ok((weak, ExtractReport { n, removed: tc.removed, core_vertices: tc.kept }))
}

/// Exhaustive search over all assignments Sq^4(y_i) = y_i v_i with
/// v_i ∈ GF(2)^n (zero allowed): counts how many decode to valid weak
/// colourings of G. A zero total certifies that no action on A(n, G) has
/// its Sq^4 images in the forced principal-ideal form.
pub fn forced_sq4_search(g: &Graph, n: usize) -> Result<(u128, u128), SteenrodError> {
    let gf2 = gf::make_field(2, 1)?;
    let m = g.n_vertices();
    let per = 1u128 << n;
    let total = per.pow(m as u32);
    let mut valid = 0u128;
    let mut choice = vec![0u64; m];
    loop {
        let vs: Vec<FVector> = choice
            .iter()
            .map(|&bits| FVector::new(gf2, (0..n).map(|j| (bits >> j & 1) as u8).collect()))
            .collect();
        // a zero vector can never satisfy the span condition
        if vs.iter().all(|v| !v.is_zero()) {
            let c = SpanColouring { field: gf2, n, data: Assignments::Weak(vs) };
            if validate_colouring(g, &c)?.is_none() {
                valid += 1;
            }
        }
        let mut i = 0;
        while i < m {
            choice[i] += 1;
            if choice[i] < per as u64 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    Ok((total, valid))
}

// ---------------------------------------------------------------------------
// mod-p P^1 images

/// A polynomial with Z/p coefficients in a ring context, reduced modulo the
/// context's ideal and truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyZp {
    pub ring: Ring,
    pub p: u64,
    terms: BTreeMap<Vec<u16>, u64>,
}

impl PolyZp {
    pub fn zero(ring: &Ring, p: u64) -> PolyZp {
        PolyZp { ring: ring.clone(), p, terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring, p: u64) -> PolyZp {
        PolyZp::from_terms(ring, p, [(vec![0; ring.n_gens()], 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u16>, u64)>>(
        ring: &Ring,
        p: u64,
        terms: I,
    ) -> PolyZp {
        let mut out = PolyZp::zero(ring, p);
        for (exps, coeff) in terms {
            out.accumulate(exps, coeff);
        }
        out
    }

    fn accumulate(&mut self, exps: Vec<u16>, coeff: u64) {
        assert_eq!(exps.len(), self.ring.n_gens(), "exponent vector length mismatch");
        if self.ring.mono_degree(&exps) > self.ring.trunc {
            return;
        }
        let mask = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        if self.ring.nonface_masks.iter().any(|&nf| nf & mask == nf) {
            return;
        }
        let slot = self.terms.entry(exps).or_insert(0);
        *slot = (*slot + coeff) % self.p;
        if *slot == 0 {
            let key: Vec<Vec<u16>> =
                self.terms.iter().filter(|(_, &c)| c == 0).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| self.ring.mono_degree(e));
        let first = degs.next().unwrap_or(0);
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &PolyZp) -> PolyZp {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.accumulate(e.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: u64) -> PolyZp {
        PolyZp::from_terms(&self.ring, self.p, self.terms().map(|(e, a)| (e.clone(), a * (c % self.p))))
    }

    pub fn mul(&self, other: &PolyZp) -> PolyZp {
        let mut out = PolyZp::zero(&self.ring, self.p);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.accumulate(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> PolyZp {
        let mut out = PolyZp::one(&self.ring, self.p);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn into_ring(&self, ring: &Ring) -> PolyZp {
        PolyZp::from_terms(ring, self.p, self.terms().map(|(e, c)| (e.clone(), c)))
    }
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
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

fn inv_mod(a: u64, p: u64) -> u64 {
    modpow(a, p - 2, p)
}

fn factorial_mod(n: u64, p: u64) -> u64 {
    (1..=n).fold(1u64, |acc, i| acc * (i % p) % p)
}

/// The coefficient (-1)^{i2+i3+1} (i2+i3-1)! / (i2! i3!) reduced mod p;
/// every factorial argument stays below p.
pub fn p1_coefficient_mod(i2: u64, i3: u64, p: u64) -> u64 {
    let num = factorial_mod(i2 + i3 - 1, p);
    let den = inv_mod(factorial_mod(i2, p) * factorial_mod(i3, p) % p, p);
    let mag = num * den % p;
    if (i2 + i3 + 1) % 2 == 0 {
        mag
    } else {
        (p - mag) % p
    }
}

/// Σ_{2 i2 + 3 i3 = target} coeff(i2, i3) f^{i2} y^{i3} for a linear form f
/// in the degree-4 generators and a degree-6 generator y.
fn p1_series(f: &PolyZp, y: usize, target: u64, p: u64) -> PolyZp {
    let ring = f.ring.clone();
    let mut acc = PolyZp::zero(&ring, p);
    for i3 in 0..=target / 3 {
        let rem = target - 3 * i3;
        if rem % 2 != 0 {
            continue;
        }
        let i2 = rem / 2;
        if i2 + i3 == 0 {
            continue;
        }
        let coeff = p1_coefficient_mod(i2, i3, p);
        let y_pow = PolyZp::from_terms(&ring, p, [(
            {
                let mut e = vec![0u16; ring.n_gens()];
                e[y] = i3 as u16;
                e
            },
            1,
        )]);
        acc = acc.add(&f.pow(i2 as u32).mul(&y_pow).scale(coeff));
    }
    acc
}

#[derive(Debug, Clone)]
pub struct ModpReport {
    pub p: u64,
    pub trunc: u32,
    /// P^1 images of the degree-4 generators, in the free ring on the
    /// generators of A(n,L).
    pub p1_x: Vec<PolyZp>,
    /// P^1 images of the degree-6 generators.
    pub p1_y: Vec<PolyZp>,
    pub degrees: CheckResult,
    pub ideal: CheckResult,
}

impl ModpReport {
    pub fn all_pass(&self) -> bool {
        self.degrees.pass && self.ideal.pass
    }
}

/// P^1 generator images on A(n,L) ⊗ Z/p assembled from a weak span
/// colouring of the 1-skeleton over GF(p), for p ≡ 5 mod 6, with a limited
/// certificate: image degrees and ideal preservation only. P^1 is a
/// derivation, so ideal preservation is checked by the Leibniz rule on the
/// ideal generators.
pub fn modp_p1_action(
    p: u64,
    l: &SimplicialComplex,
    n: usize,
    c: &SpanColouring,
    trunc: u32,
) -> Result<ModpReport, SteenrodError> {
    if p < 2 || (2..p).any(|d| p % d == 0) || p % 6 != 5 {
        return Err(SteenrodError::BadPrime(p));
    }
    let field = gf::make_field(p, 1)?;
    let (skeleton, fs) = checked_weak_colouring(l, n, c, field)?;
    let k = join_with_simplex(n, l)?;
    let ring = ring_of_complex(&k, trunc);
    let free = free_ring(ring.names.clone(), ring.degrees.clone(), trunc)?;
    let m = l.n_vertices();

    let linear_forms: Vec<PolyZp> = (0..m)
        .map(|i| {
            PolyZp::from_terms(&free, p, (0..n).filter(|&j| fs[i].coords[j] != 0).map(|j| {
                let mut e = vec![0u16; n + m];
                e[j] = 1;
                (e, fs[i].coords[j] as u64)
            }))
        })
        .collect();

    let mut p1_y = Vec::with_capacity(m);
    for i in 0..m {
        p1_y.push(p1_series(&linear_forms[i], n + i, p + 2, p).scale(2));
    }

    let mut p1_x = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = PolyZp::zero(&free, p);
        for i in 0..m {
            let zeros: Vec<FVector> = skeleton.neighbours(i).map(|v| fs[v].clone()).collect();
            let w = least_splitting(field, n, &fs[i], &zeros).ok_or_else(|| {
                SteenrodError::InvalidColouring(format!("no splitting separates vertex {i}"))
            })?;
            if w[j] != 0 {
                acc = acc.add(&p1_series(&linear_forms[i], n + i, p + 1, p).scale(w[j] as u64));
            }
        }
        p1_x.push(acc);
    }

    let mut degrees = CheckResult::pass();
    for (j, img) in p1_x.iter().enumerate() {
        if !img.is_zero() && img.homogeneous_degree() != Some(4 + 2 * (p as u32 - 1)) {
            degrees = CheckResult::fail(format!("P^1({}) in a wrong degree", ring.names[j]));
        }
    }
    for (i, img) in p1_y.iter().enumerate() {
        if !img.is_zero() && img.homogeneous_degree() != Some(6 + 2 * (p as u32 - 1)) {
            degrees = CheckResult::fail(format!("P^1({}) in a wrong degree", ring.names[n + i]));
        }
    }

    let image_of = |g: usize| -> &PolyZp {
        if g < n {
            &p1_x[g]
        } else {
            &p1_y[g - n]
        }
    };
    let mut ideal = CheckResult::pass();
    'masks: for &mask in &ring.nonface_masks {
        let support: Vec<usize> = (0..ring.n_gens()).filter(|&i| mask >> i & 1 == 1).collect();
        let mut total = PolyZp::zero(&free, p);
        for &v in &support {
            let mut e = vec![0u16; ring.n_gens()];
            for &u in &support {
                if u != v {
                    e[u] = 1;
                }
            }
            let rest = PolyZp::from_terms(&free, p, [(e, 1)]);
            total = total.add(&rest.mul(image_of(v)));
        }
        if !total.into_ring(&ring).is_zero() {
            let exps: Vec<u16> =
                (0..ring.n_gens()).map(|i| u16::from(mask >> i & 1 == 1)).collect();
            ideal = CheckResult::fail(format!(
                "P^1({}) does not reduce to 0 in the quotient",
                mono_name(&free, &exps)
            ));
            break 'masks;
        }
    }

    Ok(ModpReport { p, trunc, p1_x, p1_y, degrees, ideal })
}

// ---------------------------------------------------------------------------
// realizability classifiers

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoXReport {
    pub realizable: bool,
    /// 1: degree-6 one-skeleton not 2-colourable; 2: some y annihilated by
    /// both x's; 3: a product x1 x2 y_i y_j vanishes while y_i y_j does not.
    pub failed_condition: Option<u8>,
}

/// Realizability test for complexes with exactly two degree-4 vertices.
pub fn classify_two_x(k: &SimplicialComplex) -> Result<TwoXReport, SteenrodError> {
    if let Some(&d) = k.degrees().iter().find(|&&d| d != 4 && d != 6) {
        return Err(SteenrodError::WrongShape(format!("degree {d} outside {{4, 6}}")));
    }
    let xs: Vec<usize> = (0..k.n_vertices()).filter(|&v| k.degrees()[v] == 4).collect();
    if xs.len() != 2 {
        return Err(SteenrodError::WrongShape(format!(
            "expected exactly 2 degree-4 vertices, found {}",
            xs.len()
        )));
    }
    let ys: Vec<usize> = (0..k.n_vertices()).filter(|&v| k.degrees()[v] == 6).collect();
    let edges: Vec<(usize, usize)> = (0..ys.len())
        .flat_map(|a| (a + 1..ys.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| k.is_face(&[ys[a], ys[b]]))
        .collect();
    let yg = crate::graph::graph_from_edges(ys.len(), &edges).expect("indices in range");

    if chromatic_number(&yg) > 2 {
        return Ok(TwoXReport { realizable: false, failed_condition: Some(1) });
    }
    for &y in &ys {
        if !k.is_face(&[xs[0], y]) && !k.is_face(&[xs[1], y]) {
            return Ok(TwoXReport { realizable: false, failed_condition: Some(2) });
        }
    }
    for &(a, b) in &edges {
        if !k.is_face(&[xs[0], xs[1], ys[a], ys[b]]) {
            return Ok(TwoXReport { realizable: false, failed_condition: Some(3) });
        }
    }
    Ok(TwoXReport { realizable: true, failed_condition: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub pass: bool,
    pub witness: Option<String>,
}

/// Checks that within every facet intersection each block meets it in
/// degree multiset {4,6}, {4}, or nothing.
pub fn decomposition_check(
    k: &SimplicialComplex,
    partition: &[Vec<usize>],
) -> Result<DecompositionReport, SteenrodError> {
    let mut seen = vec![false; k.n_vertices()];
    for block in partition {
        for &v in block {
            if v >= k.n_vertices() {
                return Err(SteenrodError::NotAPartition(format!("vertex {v} out of range")));
            }
            if seen[v] {
                return Err(SteenrodError::NotAPartition(format!("vertex {v} repeated")));
            }
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(SteenrodError::NotAPartition(format!("vertex {v} uncovered")));
    }
    for sigma in &p_max(k).elements {
        for (bi, block) in partition.iter().enumerate() {
            let mut degs: Vec<u32> = sigma
                .iter()
                .filter(|v| block.contains(v))
                .map(|&v| k.degrees()[v])
                .collect();
            degs.sort_unstable();
            if !(degs.is_empty() || degs == [4] || degs == [4, 6]) {
                return Ok(DecompositionReport {
                    pass: false,
                    witness: Some(format!(
                        "block {bi} meets {sigma:?} in degree multiset {degs:?}"
                    )),
                });
            }
        }
    }
    Ok(DecompositionReport { pass: true, witness: None })
}

/// The block partition induced by a proper colouring of the degree-6
/// vertices with fewer colours than there are degree-4 vertices: block i
/// holds the i-th degree-4 vertex and the colour class i.
pub fn decomposition_from_colouring(
    k: &SimplicialComplex,
    colours: &[usize],
) -> Result<Vec<Vec<usize>>, SteenrodError> {
    let xs: Vec<usize> = (0..k.n_vertices()).filter(|&v| k.degrees()[v] == 4).collect();
    let ys: Vec<usize> = (0..k.n_vertices()).filter(|&v| k.degrees()[v] == 6).collect();
    if colours.len() != ys.len() {
        return Err(SteenrodError::DimensionMismatch(format!(
            "{} colours for {} degree-6 vertices",
            colours.len(),
            ys.len()
        )));
    }
    if let Some(&c) = colours.iter().find(|&&c| c >= xs.len()) {
        return Err(SteenrodError::WrongShape(format!(
            "colour {c} exceeds the {} degree-4 vertices",
            xs.len()
        )));
    }
    let mut blocks: Vec<Vec<usize>> = xs.iter().map(|&x| vec![x]).collect();
    for (i, &c) in colours.iter().enumerate() {
        blocks[c].push(ys[i]);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    Ok(blocks)
}

/// Both computable ends of the topological chromatic number bracket
/// s_2χ(G) <= χ_Top(G) <= χ(G); the middle is left open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bracket {
    pub lower: usize,
    pub upper: usize,
}

pub fn chi_top_bracket(g: &Graph) -> Result<Bracket, SteenrodError> {
    let gf2 = gf::make_field(2, 1)?;
    let (lower, _) = span_chromatic_number(g, gf2)?;
    Ok(Bracket { lower, upper: chromatic_number(g) })
}

// ---------------------------------------------------------------------------
// serialization

pub fn action_to_json(action: &SteenrodAction) -> Result<Value, SteenrodError> {
    let complex = action
        .ring
        .complex()
        .ok_or_else(|| SteenrodError::Malformed("action ring has no complex".into()))?;
    let mut sq2 = Map::new();
    let mut sq4 = Map::new();
    for i in 0..action.ring.n_gens() {
        sq2.insert(action.ring.names[i].clone(), poly_to_json(&action.sq2[i]));
        if action.ring.degrees[i] == 6 {
            sq4.insert(action.ring.names[i].clone(), poly_to_json(&action.sq4[i]));
        }
    }
    Ok(json!({
        "ring": complex_to_json(complex),
        "D": action.ring.trunc,
        "sq2": Value::Object(sq2),
        "sq4": Value::Object(sq4),
    }))
}

pub fn action_from_json(v: &Value) -> Result<SteenrodAction, SteenrodError> {
    let obj = v.as_object().ok_or_else(|| SteenrodError::Json("expected an object".into()))?;
    let complex = complex_from_json(
        obj.get("ring").ok_or_else(|| SteenrodError::Json("missing \"ring\"".into()))?,
    )?;
    let trunc = obj
        .get("D")
        .and_then(Value::as_u64)
        .ok_or_else(|| SteenrodError::Json("missing integer \"D\"".into()))? as u32;
    let ring = ring_of_complex(&complex, trunc);
    let free = free_ring(ring.names.clone(), ring.degrees.clone(), trunc)?;
    let get_map = |key: &str| -> Result<&Map<String, Value>, SteenrodError> {
        obj.get(key)
            .and_then(Value::as_object)
            .ok_or_else(|| SteenrodError::Json(format!("missing object {key:?}")))
    };
    let sq2_map = get_map("sq2")?;
    let sq4_map = get_map("sq4")?;
    let mut sq2 = Vec::new();
    let mut sq4 = Vec::new();
    for i in 0..ring.n_gens() {
        let name = &ring.names[i];
        sq2.push(match sq2_map.get(name) {
            Some(p) => poly_from_json(&free, p)?,
            None => PolyZ2::zero(&free),
        });
        if ring.degrees[i] == 6 {
            let p = sq4_map
                .get(name)
                .ok_or_else(|| SteenrodError::Json(format!("missing sq4 image for {name}")))?;
            sq4.push(Some(poly_from_json(&free, p)?));
        } else {
            sq4.push(None);
        }
    }
    SteenrodAction::new(ring, sq2, sq4)
}

/// Terms as {"coeff": c, "monomial": {generator: exponent}}, in the
/// deterministic term order of the underlying map.
pub fn polyzp_to_json(p: &PolyZp) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(exps, coeff)| {
            let mut mono = Map::new();
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    mono.insert(p.ring.names[i].clone(), json!(e));
                }
            }
            json!({ "coeff": coeff, "monomial": Value::Object(mono) })
        })
        .collect();
    Value::Array(terms)
}

fn check_to_json(c: &CheckResult) -> Value {
    json!({ "pass": c.pass, "witness": c.witness })
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    json!({
        "D": c.trunc,
        "all_pass": c.all_pass(),
        "checks": {
            "unstable": check_to_json(&c.unstable),
            "ideal": check_to_json(&c.ideal),
            "adem": check_to_json(&c.adem),
            "pmax": check_to_json(&c.pmax),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sr::{graph_complex, DEFAULT_TRUNC};

    fn gf2() -> Field {
        gf::make_field(2, 1).unwrap()
    }

    fn vecs(field: Field, coords: &[&[u8]]) -> Vec<FVector> {
        coords.iter().map(|c| FVector::new(field, c.to_vec())).collect()
    }

    fn weak(field: Field, n: usize, coords: &[&[u8]]) -> SpanColouring {
        SpanColouring { field, n, data: Assignments::Weak(vecs(field, coords)) }
    }

    fn poly(ring: &Ring, terms: &[&[(usize, u16)]]) -> PolyZ2 {
        PolyZ2::from_exps(
            ring,
            terms.iter().map(|t| {
                let mut e = vec![0u16; ring.n_gens()];
                for &(i, x) in *t {
                    e[i] = x;
                }
                e
            }),
        )
    }

    #[test]
    fn su3_squares() {
        let a = su3_generator_action(1, 1, DEFAULT_TRUNC).unwrap();
        let r = a.ring().clone();
        let x = PolyZ2::generator(&r, 0);
        let y = PolyZ2::generator(&r, 1);
        assert_eq!(sq(&a, &x, 0).unwrap(), x);
        assert_eq!(sq(&a, &x, 2).unwrap(), y);
        assert_eq!(sq(&a, &x, 4).unwrap(), x.pow(2));
        assert_eq!(sq(&a, &x, 3).unwrap(), PolyZ2::zero(&r));
        assert_eq!(sq(&a, &x, 6).unwrap(), PolyZ2::zero(&r));
        assert_eq!(sq(&a, &y, 2).unwrap(), PolyZ2::zero(&r));
        assert_eq!(sq(&a, &y, 4).unwrap(), y.mul(&x).unwrap());
        assert_eq!(sq(&a, &y, 6).unwrap(), y.pow(2));
        // the instance Sq^2 Sq^4 = Sq^6 + Sq^5 Sq^1 on y
        let inner = sq(&a, &y, 4).unwrap();
        assert_eq!(sq(&a, &inner, 2).unwrap(), y.pow(2));
    }

    #[test]
    fn su3_verifies_with_surplus_generator() {
        for (n, m) in [(1, 1), (2, 1), (3, 2)] {
            let a = su3_generator_action(n, m, DEFAULT_TRUNC).unwrap();
            let cert = verify_action(&a);
            assert!(cert.all_pass(), "({n},{m}): {cert:?}");
            assert_eq!(cert.ideal.pass, cert.pmax.pass);
        }
        assert!(su3_generator_action(1, 2, DEFAULT_TRUNC).is_err());
    }

    #[test]
    fn lucas_matches_pascal() {
        let mut pascal = vec![vec![0u64; 34]; 34];
        for n in 0..34 {
            pascal[n][0] = 1;
            for k in 1..=n {
                pascal[n][k] = (pascal[n - 1][k - 1] + pascal[n - 1][k]) % 2;
            }
        }
        for n in 0..=32u64 {
            for k in 0..=32u64 {
                let expect = if k <= n { pascal[n as usize][k as usize] } else { 0 };
                assert_eq!(binom_mod2(n, k), expect, "binom({n},{k})");
            }
        }
    }

    #[test]
    fn cartan_bilinearity() {
        let action = su3_generator_action(2, 2, DEFAULT_TRUNC).unwrap();
        let r = action.ring().clone();
        let a = poly(&r, &[&[(0, 2)], &[(2, 1)], &[(1, 1), (3, 1)]]);
        let b = poly(&r, &[&[(0, 1), (2, 1)], &[(1, 1)]]);
        let ab = a.mul(&b).unwrap();
        for k in 0..=DEFAULT_TRUNC {
            let lhs = sq(&action, &ab, k).unwrap();
            let mut rhs = PolyZ2::zero(&r);
            for i in 0..=k {
                let l = sq(&action, &a, i).unwrap();
                let rgt = sq(&action, &b, k - i).unwrap();
                rhs = rhs.add(&l.mul(&rgt).unwrap()).unwrap();
            }
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    fn three_gen_images(ring: &Ring) -> (Vec<PolyZ2>, Vec<Option<PolyZ2>>) {
        // x1 x2 x3 y1 y2 y3 at indices 0..6
        let sq2 = vec![
            poly(ring, &[&[(3, 1)]]),
            poly(ring, &[&[(4, 1)]]),
            poly(ring, &[&[(3, 1)], &[(5, 1)]]),
            PolyZ2::zero(ring),
            PolyZ2::zero(ring),
            PolyZ2::zero(ring),
        ];
        let sq4 = vec![
            None,
            None,
            None,
            Some(poly(ring, &[&[(3, 1), (0, 1)]])),
            Some(poly(ring, &[&[(4, 1), (1, 1)]])),
            Some(poly(ring, &[&[(3, 1), (0, 1)], &[(3, 1), (2, 1)], &[(5, 1), (2, 1)]])),
        ];
        (sq2, sq4)
    }

    #[test]
    fn disguised_triple_product_verifies_freely() {
        let names: Vec<String> =
            ["x1", "x2", "x3", "y1", "y2", "y3"].iter().map(|s| s.to_string()).collect();
        let ring = free_ring(names, vec![4, 4, 4, 6, 6, 6], DEFAULT_TRUNC).unwrap();
        let (sq2, sq4) = three_gen_images(&ring);
        let action = SteenrodAction::new(ring.clone(), sq2, sq4).unwrap();
        let cert = verify_action(&action);
        assert!(cert.all_pass(), "{cert:?}");
        // yet the Sq^4 image of y3 escapes the principal ideal (y3)
        assert!(action.sq4_image(5).terms().any(|e| e[5] == 0));
    }

    #[test]
    fn triple_product_images_break_on_quotient() {
        // edges y1y2 and y1y3; the non-face y2 y3 has a surviving square
        let g = crate::graph::graph_from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let ring = ring_of_complex(&a_n_graph(3, &g), DEFAULT_TRUNC);
        let (sq2, sq4) = three_gen_images(&ring);
        let action = SteenrodAction::new(ring, sq2, sq4).unwrap();
        let cert = verify_action(&action);
        assert!(cert.unstable.pass);
        assert!(!cert.ideal.pass, "{cert:?}");
        assert!(!cert.pmax.pass, "{cert:?}");
        assert_eq!(cert.ideal.pass, cert.pmax.pass);
        assert!(!cert.all_pass());
    }

    #[test]
    fn pendant_counterexample_verifies_freely() {
        let names: Vec<String> = ["x1", "x2", "y1", "y2"].iter().map(|s| s.to_string()).collect();
        let ring = free_ring(names, vec![4, 4, 6, 6], DEFAULT_TRUNC).unwrap();
        let sq2 = vec![
            poly(&ring, &[&[(2, 1)]]),
            poly(&ring, &[&[(2, 1)], &[(3, 1)]]),
            PolyZ2::zero(&ring),
            PolyZ2::zero(&ring),
        ];
        let sq4 = vec![
            None,
            None,
            Some(poly(&ring, &[&[(2, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(2, 1), (0, 1)], &[(2, 1), (1, 1)], &[(3, 1), (1, 1)]])),
        ];
        let action = SteenrodAction::new(ring, sq2, sq4).unwrap();
        let cert = verify_action(&action);
        assert!(cert.all_pass(), "{cert:?}");
        assert_eq!(cert.ideal.pass, cert.pmax.pass);
        assert!(action.sq4_image(3).terms().any(|e| e[3] == 0));
    }

    #[test]
    fn colouring_gives_su3_shape() {
        let point = graph_complex(&Graph::empty(1));
        let c = weak(gf2(), 1, &[&[1]]);
        let a = action_from_colouring(&point, 1, &c, DEFAULT_TRUNC).unwrap();
        // generators x1, y1
        assert_eq!(a.sq2_image(0), &poly(a.free(), &[&[(1, 1)]]));
        assert_eq!(a.sq4_image(1), &poly(a.free(), &[&[(1, 1), (0, 1)]]));
        assert!(verify_action(&a).all_pass());

        let two = graph_complex(&Graph::empty(2));
        let c = weak(gf2(), 1, &[&[1], &[1]]);
        let a = action_from_colouring(&two, 1, &c, DEFAULT_TRUNC).unwrap();
        assert_eq!(a.sq2_image(0), &poly(a.free(), &[&[(1, 1)], &[(2, 1)]]));
    }

    #[test]
    fn colouring_round_trip_on_c4() {
        let g = Graph::cycle(4);
        let c = weak(gf2(), 2, &[&[1, 0], &[0, 1], &[1, 0], &[0, 1]]);
        let l = graph_complex(&g);
        let action = action_from_colouring(&l, 2, &c, DEFAULT_TRUNC).unwrap();
        let cert = verify_action(&action);
        assert!(cert.all_pass(), "{cert:?}");
        assert_eq!(cert.ideal.pass, cert.pmax.pass);
        let (extracted, report) = extract_colouring(&action, &g).unwrap();
        assert_eq!(report.n, 2);
        assert!(report.removed.is_empty());
        assert!(validate_colouring(&g, &extracted).unwrap().is_none());
        // C4 is a 2-core, so the decoded colouring is the one we started from
        assert_eq!(extracted, c);
    }

    #[test]
    fn extraction_extends_over_trees() {
        // two disjoint edges: every vertex is deleted on the way to the
        // 2-core, so the values come from the extension rules
        let g = crate::graph::graph_from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let ring = ring_of_complex(&a_n_graph(2, &g), DEFAULT_TRUNC);
        let sq2 = vec![
            poly(&ring, &[&[(2, 1)], &[(4, 1)]]),
            poly(&ring, &[&[(3, 1)], &[(5, 1)]]),
            PolyZ2::zero(&ring),
            PolyZ2::zero(&ring),
            PolyZ2::zero(&ring),
            PolyZ2::zero(&ring),
        ];
        let sq4 = vec![
            None,
            None,
            Some(poly(&ring, &[&[(2, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(3, 1), (1, 1)]])),
            Some(poly(&ring, &[&[(4, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(5, 1), (1, 1)]])),
        ];
        let action = SteenrodAction::new(ring, sq2, sq4).unwrap();
        let (c, report) = extract_colouring(&action, &g).unwrap();
        assert_eq!(report.core_vertices, Vec::<usize>::new());
        assert!(validate_colouring(&g, &c).unwrap().is_none());
        let vs = match &c.data {
            Assignments::Weak(vs) => vs.clone(),
            _ => unreachable!(),
        };
        for (u, v) in [(0usize, 1usize), (2, 3)] {
            let sp = gf::span(gf2(), 2, &[vs[u].clone(), vs[v].clone()]).unwrap();
            assert_eq!(sp.dim(), 2, "edge ({u},{v})");
        }
    }

    #[test]
    fn extraction_error_paths() {
        let g = Graph::cycle(4);
        let ring = ring_of_complex(&a_n_graph(2, &g), DEFAULT_TRUNC);
        let zeros = vec![PolyZ2::zero(&ring); 6];
        // Sq^4(y1) lands outside (y1)
        let mut sq4: Vec<Option<PolyZ2>> = vec![
            None,
            None,
            Some(poly(&ring, &[&[(3, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(3, 1), (1, 1)]])),
            Some(poly(&ring, &[&[(4, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(5, 1), (1, 1)]])),
        ];
        let bad = SteenrodAction::new(ring.clone(), zeros.clone(), sq4.clone()).unwrap();
        assert!(matches!(
            extract_colouring(&bad, &g),
            Err(SteenrodError::Sq4NotInPrincipalIdeal(0))
        ));

        // constant f: decodes but fails validation
        sq4 = vec![
            None,
            None,
            Some(poly(&ring, &[&[(2, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(3, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(4, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(5, 1), (0, 1)]])),
        ];
        let constant = SteenrodAction::new(ring, zeros, sq4).unwrap();
        assert!(matches!(
            extract_colouring(&constant, &g),
            Err(SteenrodError::ExtractionInvalid(_))
        ));

        // not an A(n, G) ring: a solid triangle on the degree-6 side
        let solid = SimplicialComplex::new(
            vec!["y1".into(), "y2".into(), "y3".into()],
            vec![6, 6, 6],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let k = join_with_simplex(2, &solid).unwrap();
        let r = ring_of_complex(&k, DEFAULT_TRUNC);
        let z = vec![PolyZ2::zero(&r); 5];
        let s4 = vec![None, None, Some(PolyZ2::zero(&r)), Some(PolyZ2::zero(&r)), Some(PolyZ2::zero(&r))];
        let a = SteenrodAction::new(r, z, s4).unwrap();
        assert!(matches!(
            extract_colouring(&a, &Graph::complete(3)),
            Err(SteenrodError::NotAnG)
        ));
    }

    #[test]
    fn extraction_low_dimensions() {
        // n = 1: only edgeless graphs support an action
        let g = Graph::empty(3);
        let ring = ring_of_complex(&a_n_graph(1, &g), DEFAULT_TRUNC);
        let zeros = vec![PolyZ2::zero(&ring); 4];
        let sq4 = vec![
            None,
            Some(poly(&ring, &[&[(1, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(2, 1), (0, 1)]])),
            Some(poly(&ring, &[&[(3, 1), (0, 1)]])),
        ];
        let a = SteenrodAction::new(ring, zeros, sq4).unwrap();
        let (c, _) = extract_colouring(&a, &g).unwrap();
        assert!(validate_colouring(&g, &c).unwrap().is_none());

        // n = 1 with an edge: the facet condition rules any action out
        let edge = crate::graph::graph_from_edges(2, &[(0, 1)]).unwrap();
        let ring = ring_of_complex(&a_n_graph(1, &edge), DEFAULT_TRUNC);
        let zeros = vec![PolyZ2::zero(&ring); 3];
        let sq4 = vec![None, Some(PolyZ2::zero(&ring)), Some(PolyZ2::zero(&ring))];
        let a = SteenrodAction::new(ring, zeros, sq4).unwrap();
        assert!(matches!(
            extract_colouring(&a, &edge),
            Err(SteenrodError::ExtractionInvalid(_))
        ));
    }

    #[test]
    fn forced_search_matches_span_chromatic() {
        let c5 = Graph::cycle(5);
        let (total, valid) = forced_sq4_search(&c5, 2).unwrap();
        assert_eq!(total, 1024);
        assert_eq!(valid, 0);
        let (_, valid3) = forced_sq4_search(&c5, 3).unwrap();
        assert!(valid3 > 0);
    }

    #[test]
    fn modp_su3_pair() {
        let point = graph_complex(&Graph::empty(1));
        let field = gf::make_field(5, 1).unwrap();
        let c = SpanColouring {
            field,
            n: 1,
            data: Assignments::Weak(vec![FVector::new(field, vec![1])]),
        };
        let report = modp_p1_action(5, &point, 1, &c, DEFAULT_TRUNC).unwrap();
        assert!(report.all_pass());
        // P^1(y) = 2 x^2 y, P^1(x) = 2 x^3 + 2 y^2
        let free = report.p1_y[0].ring.clone();
        assert_eq!(
            report.p1_y[0],
            PolyZp::from_terms(&free, 5, [(vec![2, 1], 2)])
        );
        assert_eq!(
            report.p1_x[0],
            PolyZp::from_terms(&free, 5, [(vec![3, 0], 2), (vec![0, 2], 2)])
        );
        assert!(matches!(
            modp_p1_action(7, &point, 1, &c, DEFAULT_TRUNC),
            Err(SteenrodError::BadPrime(7))
        ));
        assert!(matches!(
            modp_p1_action(3, &point, 1, &c, DEFAULT_TRUNC),
            Err(SteenrodError::BadPrime(3))
        ));

        let empty = SimplicialComplex::empty();
        let c0 = SpanColouring { field, n: 1, data: Assignments::Weak(vec![]) };
        let vac = modp_p1_action(5, &empty, 1, &c0, DEFAULT_TRUNC).unwrap();
        assert!(vac.all_pass());
        assert!(vac.p1_x[0].is_zero());
    }

    #[test]
    fn modp_on_an_edge() {
        let field = gf::make_field(5, 1).unwrap();
        let l = graph_complex(&crate::graph::graph_from_edges(2, &[(0, 1)]).unwrap());
        let c = SpanColouring {
            field,
            n: 2,
            data: Assignments::Weak(vec![
                FVector::new(field, vec![1, 0]),
                FVector::new(field, vec![0, 1]),
            ]),
        };
        let report = modp_p1_action(5, &l, 2, &c, 40).unwrap();
        assert!(report.all_pass(), "{:?} {:?}", report.degrees, report.ideal);
        assert_eq!(report.p1_y[0].homogeneous_degree(), Some(14));
        assert_eq!(report.p1_x[0].homogeneous_degree(), Some(12));
    }

    #[test]
    fn two_x_classifier() {
        // path y1 - y2 - y3 is bipartite; A(2, path) realizable
        let path = crate::graph::graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let k = a_n_graph(2, &path);
        assert_eq!(
            classify_two_x(&k).unwrap(),
            TwoXReport { realizable: true, failed_condition: None }
        );

        let k3 = a_n_graph(2, &Graph::complete(3));
        assert_eq!(classify_two_x(&k3).unwrap().failed_condition, Some(1));

        // y1 in no face with either x
        let orphan = SimplicialComplex::new(
            vec!["x1".into(), "x2".into(), "y1".into()],
            vec![4, 4, 6],
            vec![vec![0, 1], vec![2]],
        )
        .unwrap();
        assert_eq!(classify_two_x(&orphan).unwrap().failed_condition, Some(2));

        // edge y1y2 whose product with x1 x2 dies
        let torn = SimplicialComplex::new(
            vec!["x1".into(), "x2".into(), "y1".into(), "y2".into()],
            vec![4, 4, 6, 6],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![2, 3]],
        )
        .unwrap();
        assert_eq!(classify_two_x(&torn).unwrap().failed_condition, Some(3));

        assert!(matches!(
            classify_two_x(&a_n_graph(3, &path)),
            Err(SteenrodError::WrongShape(_))
        ));
    }

    #[test]
    fn decompositions() {
        let edge = crate::graph::graph_from_edges(2, &[(0, 1)]).unwrap();
        let k = a_n_graph(2, &edge);
        let blocks = decomposition_from_colouring(&k, &[0, 1]).unwrap();
        assert_eq!(blocks, vec![vec![0, 2], vec![1, 3]]);
        assert!(decomposition_check(&k, &blocks).unwrap().pass);

        let point = a_n_graph(1, &Graph::empty(1));
        assert!(decomposition_check(&point, &[vec![0, 1]]).unwrap().pass);

        // one block holding a degree multiset {4, 6, 6}
        let free = SimplicialComplex::new(
            vec!["x1".into(), "y1".into(), "y2".into()],
            vec![4, 6, 6],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let verdict = decomposition_check(&free, &[vec![0, 1, 2]]).unwrap();
        assert!(!verdict.pass);
        assert!(verdict.witness.is_some());

        assert!(matches!(
            decomposition_check(&k, &[vec![0, 1], vec![1, 2, 3]]),
            Err(SteenrodError::NotAPartition(_))
        ));
        assert!(matches!(
            decomposition_check(&k, &[vec![0, 1]]),
            Err(SteenrodError::NotAPartition(_))
        ));
    }

    #[test]
    fn brackets() {
        assert_eq!(chi_top_bracket(&Graph::cycle(5)).unwrap(), Bracket { lower: 3, upper: 3 });
        assert_eq!(chi_top_bracket(&Graph::complete(4)).unwrap(), Bracket { lower: 4, upper: 4 });
        assert_eq!(chi_top_bracket(&Graph::empty(0)).unwrap(), Bracket { lower: 0, upper: 0 });
    }

    #[test]
    fn action_json_round_trip() {
        let g = Graph::cycle(4);
        let c = weak(gf2(), 2, &[&[1, 0], &[0, 1], &[1, 0], &[0, 1]]);
        let action = action_from_colouring(&graph_complex(&g), 2, &c, DEFAULT_TRUNC).unwrap();
        let v = action_to_json(&action).unwrap();
        let back = action_from_json(&v).unwrap();
        assert_eq!(back, action);
        assert_eq!(serde_json::to_string(&v).unwrap(), {
            let again = action_to_json(&back).unwrap();
            serde_json::to_string(&again).unwrap()
        });
    }
}
