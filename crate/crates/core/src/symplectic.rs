//! Vectors of `F_d^{2n}` under the symplectic form, and the subspace algebra
//! needed to build stabilizer codes: span, dual, isotropy, syndromes, uniform
//! sampling and exhaustive enumeration of self-orthogonal subspaces.
//!
//! Coordinates are interleaved as `(u₁, v₁, …, u_n, v_n)`; position `i`
//! carries the Weyl index `(u_i, v_i)` of `X^{u_i} Z^{v_i}`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::field::{FieldElem, PrimeField};

/// Upper bound on `d^{2n}` for anything that walks the whole space.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// A Weyl index `(i, j)` naming the operator `X^i Z^j`.
///
/// Symbols are numbered `i + d·j`, so for `d = 2` the order is
/// `(0,0), (1,0), (0,1), (1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex {
    pub i: u32,
    pub j: u32,
}

impl PauliIndex {
    pub fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    #[inline]
    pub fn symbol(self, d: u32) -> usize {
        (self.i + d * self.j) as usize
    }

    #[inline]
    pub fn from_symbol(symbol: usize, d: u32) -> Self {
        let s = symbol as u32;
        Self { i: s % d, j: s / d }
    }
}

/// `d^{2n}` if it fits under [`ENUMERATION_LIMIT`].
pub fn space_size(field: PrimeField, n: usize) -> Result<u64> {
    let d = field.modulus() as u128;
    let size = (0..2 * n).try_fold(1u128, |acc, _| acc.checked_mul(d));
    match size {
        Some(s) if s <= ENUMERATION_LIMIT as u128 => Ok(s as u64),
        other => Err(Error::ResourceLimit {
            what: "vectors in F_d^{2n}",
            required: other.unwrap_or(u128::MAX),
            limit: ENUMERATION_LIMIT as u128,
        }),
    }
}

/// An element of `F_d^{2n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SympVector {
    field: PrimeField,
    coords: Vec<u32>,
}

impl SympVector {
    pub fn new(field: PrimeField, coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return invalid(format!(
                "symplectic vector needs a positive even length, got {}",
                coords.len()
            ));
        }
        let d = field.modulus();
        let coords = coords.into_iter().map(|c| c % d).collect();
        Ok(Self { field, coords })
    }

    pub fn zero(field: PrimeField, n: usize) -> Self {
        Self {
            field,
            coords: vec![0; 2 * n],
        }
    }

    /// Decodes an index in `[0, d^{2n})`, first coordinate most significant.
    /// Index order is the lexicographic order on coordinates.
    pub fn from_index(field: PrimeField, n: usize, mut index: u64) -> Self {
        let d = field.modulus() as u64;
        let mut coords = vec![0; 2 * n];
        for c in coords.iter_mut().rev() {
            *c = (index % d) as u32;
            index /= d;
        }
        Self { field, coords }
    }

    pub fn index(&self) -> u64 {
        let d = self.field.modulus() as u64;
        self.coords.iter().fold(0, |acc, &c| acc * d + c as u64)
    }

    /// Builds the vector whose position `i` carries `symbols[i]`.
    pub fn from_symbols(field: PrimeField, symbols: &[usize]) -> Result<Self> {
        let d = field.modulus();
        let m = (d * d) as usize;
        let mut coords = Vec::with_capacity(2 * symbols.len());
        for (pos, &s) in symbols.iter().enumerate() {
            if s >= m {
                return invalid(format!("symbol {s} at position {pos} outside alphabet of size {m}"));
            }
            let p = PauliIndex::from_symbol(s, d);
            coords.push(p.i);
            coords.push(p.j);
        }
        Self::new(field, coords)
    }

    /// The symbol sequence in `X^n` this vector names.
    pub fn symbols(&self) -> Vec<usize> {
        let d = self.field.modulus();
        self.coords
            .chunks_exact(2)
            .map(|p| PauliIndex::new(p[0], p[1]).symbol(d))
            .collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> FieldElem {
        self.field.elem(self.coords[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = self.field;
        Ok(Self {
            field: f,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = self.field;
        Ok(Self {
            field: f,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self {
            field: f,
            coords: self.coords.iter().map(|&a| f.mul(a, c % f.modulus())).collect(),
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return invalid(format!(
                "modulus mismatch: {} vs {}",
                self.field.modulus(),
                other.field.modulus()
            ));
        }
        if self.coords.len() != other.coords.len() {
            return invalid(format!(
                "length mismatch: {} vs {}",
                self.coords.len(),
                other.coords.len()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for SympVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `⟨x, y⟩ = Σᵢ uᵢv′ᵢ − vᵢu′ᵢ (mod d)`.
pub fn symplectic_form(x: &SympVector, y: &SympVector) -> Result<FieldElem> {
    x.compatible(y)?;
    Ok(x.field.elem(form_raw(x.field, &x.coords, &y.coords)))
}

#[inline]
fn form_raw(f: PrimeField, x: &[u32], y: &[u32]) -> u32 {
    let d = f.modulus();
    let mut acc = 0u32;
    for (a, b) in x.chunks_exact(2).zip(y.chunks_exact(2)) {
        acc = (acc + a[0] * b[1] + (d - a[1]) * b[0]) % d;
    }
    acc
}

/// Row-reduces `rows` in place to reduced row-echelon form and drops zero rows.
/// Pivots are leading ones, ordered by increasing column.
fn rref(f: PrimeField, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][col]);
        for v in rows[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            let c = row[col];
            if i != r && c != 0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = f.sub(*v, f.mul(c, pv));
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A linear subspace of `F_d^{2n}` held as its reduced row-echelon basis.
///
/// The echelon form is canonical, so two `Subspace`s compare equal exactly
/// when they are the same subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    field: PrimeField,
    n: usize,
    basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Self {
            field,
            n,
            basis: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, n: usize) -> Self {
        let basis = (0..2 * n)
            .map(|i| {
                let mut row = vec![0; 2 * n];
                row[i] = 1;
                row
            })
            .collect();
        Self { field, n, basis }
    }

    /// The span of `vectors` (which may be dependent or empty).
    pub fn span(field: PrimeField, n: usize, vectors: &[SympVector]) -> Result<Self> {
        for v in vectors {
            if v.field != field || v.n() != n {
                return invalid(format!(
                    "vector {v} does not live in F_{}^{}",
                    field.modulus(),
                    2 * n
                ));
            }
        }
        Ok(Self::from_rows(
            field,
            n,
            vectors.iter().map(|v| v.coords.clone()).collect(),
        ))
    }

    fn from_rows(field: PrimeField, n: usize, mut rows: Vec<Vec<u32>>) -> Self {
        rref(field, &mut rows);
        Self {
            field,
            n,
            basis: rows,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn basis(&self) -> Vec<SympVector> {
        self.basis
            .iter()
            .map(|row| SympVector {
                field: self.field,
                coords: row.clone(),
            })
            .collect()
    }

    pub fn contains(&self, x: &SympVector) -> bool {
        if x.field != self.field || x.n() != self.n {
            return false;
        }
        // Reduce against the pivots of the echelon basis.
        let f = self.field;
        let mut r = x.coords.clone();
        for row in &self.basis {
            let pivot = row.iter().position(|&c| c != 0).expect("nonzero basis row");
            let c = r[pivot];
            if c != 0 {
                for (v, &b) in r.iter_mut().zip(row) {
                    *v = f.sub(*v, f.mul(c, b));
                }
            }
        }
        r.iter().all(|&c| c == 0)
    }

    /// The subspace spanned by `self` and `x`.
    pub fn extend(&self, x: &SympVector) -> Result<Self> {
        if x.field != self.field || x.n() != self.n {
            return invalid("vector does not live in the ambient space");
        }
        let mut rows = self.basis.clone();
        rows.push(x.coords.clone());
        Ok(Self::from_rows(self.field, self.n, rows))
    }

    /// `L⊥ = { x | ⟨x, y⟩ = 0 for all y ∈ L }`.
    pub fn dual(&self) -> Self {
        let f = self.field;
        let width = 2 * self.n;
        if self.basis.is_empty() {
            return Self::full(f, self.n);
        }
        // ⟨x, b⟩ = x · Jb with Jb = (v′₁, −u′₁, …).
        let mut rows: Vec<Vec<u32>> = self
            .basis
            .iter()
            .map(|b| {
                let mut jb = vec![0; width];
                for p in 0..self.n {
                    jb[2 * p] = b[2 * p + 1];
                    jb[2 * p + 1] = f.neg(b[2 * p]);
                }
                jb
            })
            .collect();
        let pivots = rref(f, &mut rows);
        let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
        let null: Vec<Vec<u32>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0; width];
                v[fc] = 1;
                for (row, &pc) in rows.iter().zip(&pivots) {
                    v[pc] = f.neg(row[fc]);
                }
                v
            })
            .collect();
        Self::from_rows(f, self.n, null)
    }

    /// True iff `L ⊆ L⊥`.
    pub fn is_self_orthogonal(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| form_raw(self.field, a, b) == 0)
        })
    }

    /// `(⟨x, b₁⟩, …, ⟨x, b_r⟩)` over the canonical basis. Two vectors share a
    /// syndrome iff their difference lies in `L⊥`.
    pub fn syndrome(&self, x: &SympVector) -> Result<Vec<FieldElem>> {
        if x.field != self.field || x.n() != self.n {
            return invalid(format!(
                "vector of length {} against subspace of F_{}^{}",
                x.coords.len(),
                self.field.modulus(),
                2 * self.n
            ));
        }
        Ok(self
            .basis
            .iter()
            .map(|b| self.field.elem(form_raw(self.field, &x.coords, b)))
            .collect())
    }

    /// Coefficients of the syndrome functionals: row `j` holds `w` with
    /// `⟨x, b_j⟩ = Σᵢ wᵢ xᵢ`.
    pub fn syndrome_functionals(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        self.basis
            .iter()
            .map(|b| {
                let mut w = vec![0; 2 * self.n];
                for p in 0..self.n {
                    w[2 * p] = b[2 * p + 1];
                    w[2 * p + 1] = f.neg(b[2 * p]);
                }
                w
            })
            .collect()
    }

    /// Every vector of the subspace (`d^{dim}` of them).
    pub fn elements(&self) -> Vec<SympVector> {
        let f = self.field;
        let d = f.modulus() as u64;
        let count = d.pow(self.dim() as u32);
        (0..count)
            .map(|mut c| {
                let mut v = vec![0; 2 * self.n];
                for row in &self.basis {
                    let coef = (c % d) as u32;
                    c /= d;
                    if coef != 0 {
                        for (a, &b) in v.iter_mut().zip(row) {
                            *a = f.add(*a, f.mul(coef, b));
                        }
                    }
                }
                SympVector { field: f, coords: v }
            })
            .collect()
    }

    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> SympVector {
        let f = self.field;
        let mut v = vec![0; 2 * self.n];
        for row in &self.basis {
            let coef = rng.gen_range(0..f.modulus());
            if coef != 0 {
                for (a, &b) in v.iter_mut().zip(row) {
                    *a = f.add(*a, f.mul(coef, b));
                }
            }
        }
        SympVector { field: f, coords: v }
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return invalid("n must be positive");
    }
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    Ok(())
}

/// Draws a self-orthogonal subspace of dimension `n − k` uniformly.
///
/// Builds an ordered basis one vector at a time, each chosen uniformly from
/// `(span so far)⊥ ∖ (span so far)`. The number of choices at every step does
/// not depend on the earlier choices, and each subspace has the same number of
/// ordered isotropic bases, so the result is uniform over the ensemble.
pub fn sample_isotropic<R: Rng + ?Sized>(
    field: PrimeField,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Subspace> {
    check_nk(n, k)?;
    let mut current = Subspace::zero(field, n);
    for _ in 0..n - k {
        let perp = current.dual();
        let v = loop {
            let v = perp.random_element(rng);
            if !current.contains(&v) {
                break v;
            }
        };
        current = current.extend(&v)?;
    }
    debug_assert!(current.is_self_orthogonal());
    Ok(current)
}

/// All self-orthogonal subspaces of dimension `n − k`, in canonical order.
pub fn enumerate_isotropic(field: PrimeField, n: usize, k: usize) -> Result<Vec<Subspace>> {
    check_nk(n, k)?;
    space_size(field, n)?;
    let mut level: BTreeSet<Subspace> = BTreeSet::from([Subspace::zero(field, n)]);
    for _ in 0..n - k {
        let mut next = BTreeSet::new();
        for l in &level {
            for v in l.dual().elements() {
                if !l.contains(&v) {
                    next.insert(l.extend(&v)?);
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

/// Iterates over every vector of `F_d^{2n}` in index order.
pub fn all_vectors(field: PrimeField, n: usize) -> Result<impl Iterator<Item = SympVector>> {
    let size = space_size(field, n)?;
    Ok((0..size).map(move |i| SympVector::from_index(field, n, i)))
}
