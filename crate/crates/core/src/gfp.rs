//! Dense linear algebra over a prime field GF(p).
//!
//! Everything downstream reduces to three objects defined here: the field
//! itself, dense row-major matrices, and subspaces of `K^d` kept in reduced
//! row-echelon form. Because the echelon basis is unique, two [`Subspace`]
//! values are equal exactly when they describe the same subspace.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = (1 << 31) - 1;

/// The prime field `Z/pZ`, `2 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Residue of an arbitrary signed integer.
    #[inline]
    pub fn reduce(self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u64) -> u64 {
        assert!(
            !a.is_multiple_of(self.p),
            "zero has no inverse in GF({})",
            self.p
        );
        self.pow(a, self.p - 2)
    }

    /// All residues `0..p`, in increasing order.
    pub fn elements(self) -> impl Iterator<Item = u64> {
        0..self.p
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense matrix over GF(p), row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over GF({})",
            self.rows, self.cols, self.field.p
        )?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Rref {
    pub echelon: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows; entries are reduced mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Matrix::from_rows_with_cols(field, rows, cols)
    }

    /// Like [`Matrix::from_rows`], but with an explicit column count so that
    /// matrices with zero rows keep their width.
    pub fn from_rows_with_cols<R: AsRef<[i64]>>(
        field: PrimeField,
        rows: &[R],
        cols: usize,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| field.reduce(x)));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from rows that are already residues.
    pub fn from_residue_rows(field: PrimeField, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r.iter().map(|&x| x % field.p));
        }
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_signed_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&x| x as i64).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                let src = other.row(k);
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d = (*d + a * b) % f.p;
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| dot(self.field, self.row(r), v))
            .collect())
    }

    /// Row vector times matrix: `v * self`.
    pub fn vec_mul(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let f = self.field;
        let mut out = vec![0; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(r)) {
                *o = (*o + a * b) % f.p;
            }
        }
        Ok(out)
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.data[(r0 + r) * self.cols + c0 + c] = block.get(r, c);
            }
        }
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(pr, lead);
            let inv = f.inv(m.get(lead, c));
            m.scale_row(lead, inv);
            for r in 0..m.rows {
                if r != lead {
                    let factor = m.get(r, c);
                    if factor != 0 {
                        m.sub_row_multiple(r, lead, factor);
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Rref {
            echelon: m,
            rank: lead,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Null space `{v : self * v = 0}` as a subspace of `K^cols`.
    pub fn kernel(&self) -> Subspace {
        let Rref {
            echelon,
            rank,
            pivots,
        } = self.rref();
        let f = self.field;
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(n - rank);
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; n];
            v[free] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(echelon.get(i, free));
            }
            basis.push(v);
        }
        Subspace::span(f, n, &basis)
    }

    /// Row space as a subspace of `K^cols`.
    pub fn row_space(&self) -> Subspace {
        Subspace::from_rref(self.rref(), self.cols)
    }

    /// Column space as a subspace of `K^rows`.
    pub fn column_space(&self) -> Subspace {
        self.transpose().row_space()
    }

    /// Some solution `x` of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[u64]) -> Result<Option<Vec<u64>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let f = self.field;
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.data[r * (self.cols + 1) + c] = self.get(r, c);
            }
            aug.data[r * (self.cols + 1) + self.cols] = b[r] % f.p;
        }
        let Rref {
            echelon,
            rank,
            pivots,
        } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &p) in pivots.iter().enumerate().take(rank) {
            x[p] = echelon.get(i, self.cols);
        }
        Ok(Some(x))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, k: u64) {
        let f = self.field;
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = f.mul(*x, k);
        }
    }

    /// row[target] -= k * row[src]
    fn sub_row_multiple(&mut self, target: usize, src: usize, k: u64) {
        let f = self.field;
        let cols = self.cols;
        for c in 0..cols {
            let s = self.data[src * cols + c];
            if s != 0 {
                let t = &mut self.data[target * cols + c];
                *t = f.sub(*t, f.mul(k, s));
            }
        }
    }
}

#[inline]
pub fn dot(f: PrimeField, a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| (acc + x * y) % f.p)
}

/// A subspace of `K^d`, stored as its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in K^{}: ", self.dim(), self.ambient)?;
        f.debug_list().entries(self.basis.row_vecs()).finish()?;
        write!(f, ")")
    }
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Matrix::identity(field, ambient),
        }
    }

    /// Span of the given vectors (entries taken mod p).
    pub fn span(field: PrimeField, ambient: usize, vectors: &[Vec<u64>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(field, ambient);
        }
        Subspace::from_rref(
            Matrix::from_residue_rows(field, ambient, vectors).rref(),
            ambient,
        )
    }

    fn from_rref(r: Rref, ambient: usize) -> Self {
        let f = r.echelon.field;
        let mut basis = Matrix::zeros(f, r.rank, ambient);
        basis
            .data
            .copy_from_slice(&r.echelon.data[..r.rank * ambient]);
        Subspace {
            field: f,
            ambient,
            basis,
        }
    }

    /// Wraps an already reduced echelon basis. Used by enumerators that build
    /// canonical bases directly.
    pub(crate) fn from_echelon_unchecked(basis: Matrix) -> Self {
        Subspace {
            field: basis.field,
            ambient: basis.cols,
            basis,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    #[inline]
    pub fn codim(&self) -> usize {
        self.ambient - self.basis.rows
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<u64>> {
        self.basis.row_vecs()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let f = self.field;
        let mut w: Vec<u64> = v.iter().map(|&x| x % f.p).collect();
        for r in 0..self.basis.rows {
            let row = self.basis.row(r);
            let pivot = row
                .iter()
                .position(|&x| x != 0)
                .expect("echelon rows are nonzero");
            let k = w[pivot];
            if k != 0 {
                for (x, &b) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(k, b));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient == self.ambient && (0..other.dim()).all(|r| self.contains(other.basis.row(r)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::from_rref(
            self.basis.vstack(&other.basis)?.rref(),
            self.ambient,
        ))
    }

    /// Orthogonal complement under the standard dot product; `dim = d - dim(self)`.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let a = self.annihilator();
        let b = other.annihilator();
        Ok(a.basis.vstack(&b.basis)?.kernel())
    }

    /// `m * self`, a subspace of `K^{m.rows}`.
    pub fn image(&self, m: &Matrix) -> Result<Subspace> {
        if m.cols != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: m.cols,
            });
        }
        let img = m.mul(&self.basis.transpose())?.transpose();
        Ok(Subspace::from_rref(img.rref(), m.rows))
    }
}

/// `{v : m v ∈ s}`.
pub fn preimage(m: &Matrix, s: &Subspace) -> Result<Subspace> {
    if s.ambient != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: s.ambient,
        });
    }
    let ann = s.annihilator();
    Ok(ann.basis.mul(m)?.kernel())
}

/// `dim(ambient) - dim(sub)`, after checking `sub ⊆ ambient`.
pub fn quotient_dim(ambient: &Subspace, sub: &Subspace) -> Result<usize> {
    ambient.check_ambient(sub)?;
    if !ambient.contains_subspace(sub) {
        return Err(Error::NotContained);
    }
    Ok(ambient.dim() - sub.dim())
}

/// Incremental echelon basis over vectors of varying length; missing
/// trailing entries count as zero. Used to measure growing spans.
#[derive(Clone, Debug)]
pub struct EchelonBuilder {
    field: PrimeField,
    rows: Vec<(usize, Vec<u64>)>,
}

impl EchelonBuilder {
    pub fn new(field: PrimeField) -> Self {
        EchelonBuilder {
            field,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current basis; returns the remainder.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut w: Vec<u64> = v.iter().map(|&x| x % f.p).collect();
        for (pivot, row) in &self.rows {
            if *pivot < w.len() && w[*pivot] != 0 {
                let k = w[*pivot];
                if w.len() < row.len() {
                    w.resize(row.len(), 0);
                }
                for (x, &b) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(k, b));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Inserts `v`; returns `true` if it raised the rank.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[pivot]);
        for x in &mut w {
            *x = f.mul(*x, inv);
        }
        for (_, row) in &mut self.rows {
            if pivot < row.len() && row[pivot] != 0 {
                let k = row[pivot];
                if row.len() < w.len() {
                    row.resize(w.len(), 0);
                }
                for (x, &b) in row.iter_mut().zip(&w) {
                    *x = f.sub(*x, f.mul(k, b));
                }
            }
        }
        self.rows.push((pivot, w));
        true
    }

    /// Basis vectors, padded to a common length.
    pub fn basis(&self) -> Vec<Vec<u64>> {
        let len = self.rows.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
        self.rows
            .iter()
            .map(|(_, r)| {
                let mut v = r.clone();
                v.resize(len, 0);
                v
            })
            .collect()
    }
}
