//! Exact linear algebra over small finite fields GF(q), q = p^e <= 16.
//!
//! Field elements are represented by indices `0..q`, with index 0 the zero
//! element and index 1 the unit. An element with polynomial coefficients
//! `(c_0, .., c_{e-1})` over GF(p) gets index `sum c_i p^i`, so for prime
//! fields the index is just the residue. Addition and multiplication are
//! table lookups.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

/// Vectors with `q^n` beyond this are refused by the subspace enumerators.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the supported maximum of 16")]
    OrderTooLarge(u64),
    #[error("vectors come from different fields or ambient dimensions")]
    MixedAmbient,
    #[error("enumeration of {0} vectors exceeds the cap of {1}")]
    CapExceeded(u64, u64),
}

/// A finite field GF(p^e) given by its arithmetic tables.
#[derive(Debug)]
pub struct FieldDesc {
    pub p: u8,
    pub e: u8,
    pub q: u8,
    add_table: Vec<u8>,
    mul_table: Vec<u8>,
    neg_table: Vec<u8>,
    inv_table: Vec<u8>,
}

/// Fields are interned; all handles to GF(p^e) alias the same tables.
pub type Field = &'static FieldDesc;

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e
    }
}
impl Eq for FieldDesc {}

impl std::hash::Hash for FieldDesc {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.p, self.e).hash(state);
    }
}

impl PartialOrd for FieldDesc {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldDesc {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.p, self.e).cmp(&(other.p, other.e))
    }
}

impl FieldDesc {
    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add_table[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul_table[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg_table[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `inv(0)` is undefined and returns 0.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv_table[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).all(|d| n % d != 0)
}

/// Reduction rules `x^e = sum r_i x^i` for the fixed irreducible polynomials:
/// GF(4): x^2+x+1, GF(8): x^3+x+1, GF(9): x^2+1, GF(16): x^4+x+1.
fn reduction_coeffs(p: u8, e: u8) -> Vec<u8> {
    match (p, e) {
        (2, 2) => vec![1, 1],
        (2, 3) => vec![1, 1, 0],
        (3, 2) => vec![2, 0],
        (2, 4) => vec![1, 1, 0, 0],
        _ => unreachable!("no irreducible polynomial configured for GF({}^{})", p, e),
    }
}

fn index_to_coeffs(idx: u8, p: u8, e: u8) -> Vec<u8> {
    let mut c = vec![0u8; e as usize];
    let mut v = idx;
    for ci in c.iter_mut() {
        *ci = v % p;
        v /= p;
    }
    c
}

fn coeffs_to_index(c: &[u8], p: u8) -> u8 {
    c.iter().rev().fold(0u8, |acc, &ci| acc * p + ci)
}

fn build_field(p: u8, e: u8) -> FieldDesc {
    let q = p.pow(e as u32);
    let qs = q as usize;
    let mut add_table = vec![0u8; qs * qs];
    let mut mul_table = vec![0u8; qs * qs];
    let red = if e > 1 { reduction_coeffs(p, e) } else { Vec::new() };
    for a in 0..q {
        let ca = index_to_coeffs(a, p, e);
        for b in 0..q {
            let cb = index_to_coeffs(b, p, e);
            let sum: Vec<u8> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) % p).collect();
            add_table[a as usize * qs + b as usize] = coeffs_to_index(&sum, p);

            // polynomial product, reduced by x^e = red.
            let mut prod = vec![0u8; 2 * e as usize];
            for (i, &x) in ca.iter().enumerate() {
                for (j, &y) in cb.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            for d in (e as usize..2 * e as usize).rev() {
                let c = prod[d];
                if c != 0 {
                    prod[d] = 0;
                    for (i, &r) in red.iter().enumerate() {
                        prod[d - e as usize + i] = (prod[d - e as usize + i] + c * r) % p;
                    }
                }
            }
            mul_table[a as usize * qs + b as usize] = coeffs_to_index(&prod[..e as usize], p);
        }
    }
    let mut neg_table = vec![0u8; qs];
    let mut inv_table = vec![0u8; qs];
    for a in 0..q {
        for b in 0..q {
            if add_table[a as usize * qs + b as usize] == 0 {
                neg_table[a as usize] = b;
            }
            if a != 0 && mul_table[a as usize * qs + b as usize] == 1 {
                inv_table[a as usize] = b;
            }
        }
    }
    FieldDesc { p, e, q, add_table, mul_table, neg_table, inv_table }
}

/// Constructs (or retrieves) GF(p^e). Fields are interned for the lifetime
/// of the process so handles are cheap to copy and compare.
pub fn make_field(p: u64, e: u32) -> Result<Field, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    let q = p.checked_pow(e).ok_or(GfError::OrderTooLarge(u64::MAX))?;
    if q > 16 || e == 0 {
        return Err(GfError::OrderTooLarge(q));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u8, u8), Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    Ok(guard
        .entry((p as u8, e as u8))
        .or_insert_with(|| Box::leak(Box::new(build_field(p as u8, e as u8)))))
}

/// A vector in `k^n`, stored as element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVector {
    pub field: Field,
    pub coords: Vec<u8>,
}

impl FVector {
    pub fn new(field: Field, coords: Vec<u8>) -> Self {
        assert!(coords.iter().all(|&c| c < field.q), "coordinate index out of field range");
        FVector { field, coords }
    }

    pub fn zero(field: Field, n: usize) -> Self {
        FVector { field, coords: vec![0; n] }
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(field: Field, n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        FVector { field, coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FVector) -> FVector {
        let f = self.field;
        FVector {
            field: f,
            coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: u8) -> FVector {
        let f = self.field;
        FVector { field: f, coords: self.coords.iter().map(|&a| f.mul(c, a)).collect() }
    }
}

/// Enumerates all `q^n` vectors of `k^n` in lexicographic coordinate order.
pub fn all_vectors(field: Field, n: usize) -> Vec<FVector> {
    let q = field.q as usize;
    let total = q.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    let mut coords = vec![0u8; n];
    loop {
        out.push(FVector { field, coords: coords.clone() });
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            coords[i] += 1;
            if (coords[i] as usize) < q {
                break;
            }
            coords[i] = 0;
        }
    }
}

/// A linear subspace of `k^n` in canonical reduced-row-echelon form.
///
/// Two subspaces are equal iff their basis matrices are identical, which
/// holds iff they are the same subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub field: Field,
    pub ambient: usize,
    basis: Vec<Vec<u8>>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { field, ambient, basis: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut row = vec![0u8; ambient];
                row[i] = 1;
                row
            })
            .collect();
        Subspace { field, ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<FVector> {
        self.basis.iter().map(|r| FVector { field: self.field, coords: r.clone() }).collect()
    }

    /// Residual of `v` after elimination against the RREF basis.
    fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let f = self.field;
        let mut v = v.to_vec();
        for row in &self.basis {
            let pivot = row.iter().position(|&c| c != 0).unwrap();
            let c = v[pivot];
            if c != 0 {
                // row has pivot coefficient 1
                for (vi, &ri) in v.iter_mut().zip(row) {
                    *vi = f.sub(*vi, f.mul(c, ri));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &FVector) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        self.reduce(&v.coords).iter().all(|&c| c == 0)
    }

    /// All `q^dim` vectors of the subspace.
    pub fn elements(&self) -> Vec<FVector> {
        let f = self.field;
        let mut out = vec![FVector::zero(f, self.ambient)];
        for row in &self.basis {
            let rv = FVector { field: f, coords: row.clone() };
            let mut next = Vec::with_capacity(out.len() * f.q as usize);
            for c in f.elements() {
                let scaled = rv.scale(c);
                for v in &out {
                    next.push(v.add(&scaled));
                }
            }
            out = next;
        }
        out
    }

    /// Flattened basis rows, the sort key for deterministic enumeration.
    pub fn flat_key(&self) -> Vec<u8> {
        self.basis.iter().flatten().copied().collect()
    }
}

/// Incremental RREF accumulator.
#[derive(Clone)]
pub struct RrefBuilder {
    field: Field,
    ambient: usize,
    rows: Vec<Vec<u8>>, // sorted by pivot column, fully reduced
}

impl RrefBuilder {
    pub fn new(field: Field, ambient: usize) -> Self {
        RrefBuilder { field, ambient, rows: Vec::new() }
    }

    /// Adds a vector to the spanning set. Returns true if it enlarged the span.
    pub fn push(&mut self, v: &[u8]) -> bool {
        let f = self.field;
        let mut v = v.to_vec();
        for row in &self.rows {
            let pivot = row.iter().position(|&c| c != 0).unwrap();
            let c = v[pivot];
            if c != 0 {
                for (vi, &ri) in v.iter_mut().zip(row) {
                    *vi = f.sub(*vi, f.mul(c, ri));
                }
            }
        }
        let Some(pivot) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let lead_inv = f.inv(v[pivot]);
        for vi in v.iter_mut() {
            *vi = f.mul(lead_inv, *vi);
        }
        // clear the new pivot column in existing rows
        for row in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (ri, &vi) in row.iter_mut().zip(&v) {
                    *ri = f.sub(*ri, f.mul(c, vi));
                }
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|row| row.iter().position(|&c| c != 0).unwrap() > pivot)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, v);
        true
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn finish(self) -> Subspace {
        Subspace { field: self.field, ambient: self.ambient, basis: self.rows }
    }
}

/// Canonical span of a set of vectors; `span` of the empty list is the zero
/// subspace of the stated ambient space.
pub fn span(field: Field, ambient: usize, vectors: &[FVector]) -> Result<Subspace, GfError> {
    let mut b = RrefBuilder::new(field, ambient);
    for v in vectors {
        if v.field != field || v.len() != ambient {
            return Err(GfError::MixedAmbient);
        }
        b.push(&v.coords);
    }
    Ok(b.finish())
}

/// Whether `a` is a subspace of `b`.
pub fn subspace_leq(a: &Subspace, b: &Subspace) -> Result<bool, GfError> {
    if a.field != b.field || a.ambient != b.ambient {
        return Err(GfError::MixedAmbient);
    }
    Ok(a.basis.iter().all(|row| b.reduce(row).iter().all(|&c| c == 0)))
}

/// Sum of two subspaces (span of the union of their bases).
pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace, GfError> {
    if a.field != b.field || a.ambient != b.ambient {
        return Err(GfError::MixedAmbient);
    }
    let mut builder = RrefBuilder::new(a.field, a.ambient);
    for row in a.basis.iter().chain(&b.basis) {
        builder.push(row);
    }
    Ok(builder.finish())
}

fn combinations(n: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..l).collect();
    if l > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance
        let mut i = l;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (l - i) {
                cur[i] += 1;
                for j in i + 1..l {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All `l`-dimensional subspaces of `k^n`, each exactly once in canonical
/// RREF form, ordered lexicographically on the flattened basis matrices.
pub fn enumerate_subspaces(field: Field, n: usize, l: usize) -> Result<Vec<Subspace>, GfError> {
    enumerate_subspaces_capped(field, n, l, DEFAULT_ENUM_CAP)
}

pub fn enumerate_subspaces_capped(
    field: Field,
    n: usize,
    l: usize,
    cap: u64,
) -> Result<Vec<Subspace>, GfError> {
    let total = (field.q as u64)
        .checked_pow(n as u32)
        .ok_or(GfError::CapExceeded(u64::MAX, cap))?;
    if total > cap {
        return Err(GfError::CapExceeded(total, cap));
    }
    assert!(l <= n, "target dimension exceeds ambient dimension");
    let mut out = Vec::new();
    for pivots in combinations(n, l) {
        // free entries: (i, j) with j > pivots[i] and j not a pivot column
        let mut free = Vec::new();
        for (i, &pi) in pivots.iter().enumerate() {
            for j in pi + 1..n {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let mut vals = vec![0u8; free.len()];
        'fill: loop {
            let mut basis = vec![vec![0u8; n]; l];
            for (i, &pi) in pivots.iter().enumerate() {
                basis[i][pi] = 1;
            }
            for (k, &(i, j)) in free.iter().enumerate() {
                basis[i][j] = vals[k];
            }
            out.push(Subspace { field, ambient: n, basis });
            // advance mixed-radix counter; stop when it wraps
            let mut k = free.len();
            loop {
                if k == 0 {
                    break 'fill;
                }
                k -= 1;
                vals[k] += 1;
                if vals[k] < field.q {
                    break;
                }
                vals[k] = 0;
            }
        }
    }
    out.sort_by(|a, b| a.flat_key().cmp(&b.flat_key()));
    Ok(out)
}

/// Gaussian binomial coefficient: the number of `l`-dimensional subspaces
/// of an `n`-dimensional space over GF(q).
pub fn gaussian_binomial(q: u64, n: u64, l: u64) -> u128 {
    if l > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..l {
        num *= (q as u128).pow((n - i) as u32) - 1;
        den *= (q as u128).pow((l - i) as u32) - 1;
    }
    num / den
}

/// Exhaustive field-axiom check; feasible for all supported q <= 16.
pub fn check_field_axioms(f: &FieldDesc) -> Result<(), String> {
    let q = f.q;
    for a in 0..q {
        if f.add(a, 0) != a {
            return Err(format!("additive identity fails at {a}"));
        }
        if f.mul(a, 1) != a {
            return Err(format!("multiplicative identity fails at {a}"));
        }
        if f.add(a, f.neg(a)) != 0 {
            return Err(format!("additive inverse fails at {a}"));
        }
        if a != 0 && f.mul(a, f.inv(a)) != 1 {
            return Err(format!("multiplicative inverse fails at {a}"));
        }
        for b in 0..q {
            if f.add(a, b) != f.add(b, a) {
                return Err(format!("addition not commutative at ({a},{b})"));
            }
            if f.mul(a, b) != f.mul(b, a) {
                return Err(format!("multiplication not commutative at ({a},{b})"));
            }
            if a != 0 && b != 0 && f.mul(a, b) == 0 {
                return Err(format!("zero divisors at ({a},{b})"));
            }
            for c in 0..q {
                if f.add(f.add(a, b), c) != f.add(a, f.add(b, c)) {
                    return Err(format!("addition not associative at ({a},{b},{c})"));
                }
                if f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c)) {
                    return Err(format!("multiplication not associative at ({a},{b},{c})"));
                }
                if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                    return Err(format!("distributivity fails at ({a},{b},{c})"));
                }
            }
        }
    }
    Ok(())
}
