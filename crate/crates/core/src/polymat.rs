//! Polynomials over GF(p), matrices over GF(p)[t], and finitely presented
//! GF(p)[t]-modules.
//!
//! A module is presented as `K[t]^g / R` where `R` is the column span of a
//! relation matrix with `g` rows. Smith form gives rank and torsion; column
//! Hermite form gives unique coset representatives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::gfp::PrimeField;

/// Polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(field: PrimeField) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Poly::constant(field, 1)
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Poly::from_residues(field, vec![c])
    }

    /// `c * t^deg`
    pub fn monomial(field: PrimeField, c: u64, deg: usize) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c;
        Poly::from_residues(field, coeffs)
    }

    pub fn t(field: PrimeField) -> Self {
        Poly::monomial(field, 1, 1)
    }

    pub fn from_coeffs(field: PrimeField, coeffs: &[i64]) -> Self {
        Poly::from_residues(field, coeffs.iter().map(|&c| field.reduce(c)).collect())
    }

    pub fn from_residues(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c %= field.modulus();
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn scale(&self, c: u64) -> Poly {
        let f = self.field;
        Poly::from_residues(f, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            field: self.field,
            coeffs,
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()))
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let f = self.field;
        let dd = d.degree().unwrap();
        let inv = f.inv(d.leading());
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let mut q = vec![0; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = f.mul(r[i], inv);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] = f.sub(r[idx], f.mul(c, dc));
            }
        }
        r.truncate(dd);
        (Poly::from_residues(f, q), Poly::from_residues(f, r))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let f = self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_residues(
            f,
            (0..n).map(|i| f.add(self.coeff(i), rhs.coeff(i))).collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let f = self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_residues(
            f,
            (0..n).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = self.field;
        Poly::from_residues(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let f = self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % f.modulus();
            }
        }
        Poly::from_residues(f, out)
    }
}

/// Monic gcd.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroGcd);
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.div_rem(&y).1;
        x = y;
        y = r;
    }
    Ok(x.monic())
}

/// A vector of polynomials, one entry per generator.
pub type PolyVec = Vec<Poly>;

/// Matrix over GF(p)[t], row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl PolyMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            field,
            rows,
            cols,
            entries: vec![Poly::zero(field); rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = PolyMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Poly::one(field));
        }
        m
    }

    pub fn from_fn(
        field: PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Poly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        PolyMatrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    /// Rows of entries, each entry an ascending coefficient list.
    pub fn from_coeff_rows(field: PrimeField, rows: &[Vec<Vec<i64>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        PolyMatrix::from_coeff_rows_with_cols(field, rows, cols)
    }

    pub fn from_coeff_rows_with_cols(
        field: PrimeField,
        rows: &[Vec<Vec<i64>>],
        cols: usize,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().map(|c| Poly::from_coeffs(field, c)));
        }
        Ok(PolyMatrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[PolyVec]) -> Result<Self> {
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        Ok(PolyMatrix::from_fn(field, rows, columns.len(), |r, c| {
            columns[c][r].clone()
        }))
    }

    pub fn diagonal(field: PrimeField, rows: usize, cols: usize, diag: &[Poly]) -> Self {
        PolyMatrix::from_fn(field, rows, cols, |r, c| {
            if r == c && r < diag.len() {
                diag[r].clone()
            } else {
                Poly::zero(field)
            }
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Poly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> PolyVec {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<PolyVec> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn max_degree(&self) -> usize {
        self.entries
            .iter()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.field, self.cols, self.rows, |r, c| {
            self.get(c, r).clone()
        })
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        Ok(PolyMatrix::from_fn(
            self.field,
            self.rows,
            other.cols,
            |r, c| {
                (0..self.cols).fold(Poly::zero(self.field), |acc, k| {
                    &acc + &(self.get(r, k) * other.get(k, c))
                })
            },
        ))
    }

    pub fn mul_vec(&self, v: &[Poly]) -> Result<PolyVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                (0..self.cols).fold(Poly::zero(self.field), |acc, k| {
                    &acc + &(self.get(r, k) * &v[k])
                })
            })
            .collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        Ok(PolyMatrix::from_fn(
            self.field,
            self.rows,
            self.cols + other.cols,
            |r, c| {
                if c < self.cols {
                    self.get(r, c).clone()
                } else {
                    other.get(r, c - self.cols).clone()
                }
            },
        ))
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.entries.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &Poly) {
        for r in 0..self.rows {
            let s = self.get(r, src);
            if !s.is_zero() {
                let v = self.get(r, dst) + &(q * s);
                self.set(r, dst, v);
            }
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &Poly) {
        for c in 0..self.cols {
            let s = self.get(src, c);
            if !s.is_zero() {
                let v = self.get(dst, c) + &(q * s);
                self.set(dst, c, v);
            }
        }
    }

    fn scale_col(&mut self, c: usize, k: u64) {
        for r in 0..self.rows {
            let v = self.get(r, c).scale(k);
            self.set(r, c, v);
        }
    }

    fn scale_row(&mut self, r: usize, k: u64) {
        for c in 0..self.cols {
            let v = self.get(r, c).scale(k);
            self.set(r, c, v);
        }
    }
}

/// Column Hermite form `h = a * transform`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: PolyMatrix,
    pub transform: PolyMatrix,
    /// `(row, col)` of each pivot; rows and columns both strictly increase.
    pub pivots: Vec<(usize, usize)>,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns of the transform that map to zero columns of `h`; they span
    /// the kernel `{x : a x = 0}`.
    pub fn kernel_basis(&self) -> Vec<PolyVec> {
        (self.pivots.len()..self.h.cols())
            .map(|c| self.transform.column(c))
            .collect()
    }

    /// Unique representative of `v` modulo the column span.
    pub fn reduce(&self, v: &[Poly]) -> PolyVec {
        let mut v = v.to_vec();
        for &(r, c) in &self.pivots {
            let piv = self.h.get(r, c);
            let q = v[r].div_rem(piv).0;
            if q.is_zero() {
                continue;
            }
            for (i, x) in v.iter_mut().enumerate() {
                let e = self.h.get(i, c);
                if !e.is_zero() {
                    *x = &*x - &(&q * e);
                }
            }
        }
        v
    }
}

pub fn hermite_form(a: &PolyMatrix) -> HermiteForm {
    let f = a.field;
    let mut h = a.clone();
    let mut t = PolyMatrix::identity(f, a.cols);
    let mut pivots = Vec::new();
    let mut k = 0;
    for r in 0..h.rows {
        if k == h.cols {
            break;
        }
        loop {
            let best = (k..h.cols)
                .filter(|&c| !h.get(r, c).is_zero())
                .min_by_key(|&c| h.get(r, c).degree());
            let Some(c0) = best else { break };
            h.swap_cols(c0, k);
            t.swap_cols(c0, k);
            let mut leftover = false;
            for c in k + 1..h.cols {
                if h.get(r, c).is_zero() {
                    continue;
                }
                let q = -&h.get(r, c).div_rem(h.get(r, k)).0;
                h.add_col_multiple(c, k, &q);
                t.add_col_multiple(c, k, &q);
                leftover |= !h.get(r, c).is_zero();
            }
            if !leftover {
                break;
            }
        }
        if h.get(r, k).is_zero() {
            continue;
        }
        let inv = f.inv(h.get(r, k).leading());
        h.scale_col(k, inv);
        t.scale_col(k, inv);
        for c in 0..k {
            let q = -&h.get(r, c).div_rem(h.get(r, k)).0;
            if !q.is_zero() {
                h.add_col_multiple(c, k, &q);
                t.add_col_multiple(c, k, &q);
            }
        }
        pivots.push((r, k));
        k += 1;
    }
    HermiteForm {
        h,
        transform: t,
        pivots,
    }
}

/// `u * a * v = diagonal`, with monic invariant factors `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: PolyMatrix,
    /// Nonzero diagonal entries, in order.
    pub factors: Vec<Poly>,
    /// `rows - factors.len()`.
    pub free_rank: usize,
    pub u: PolyMatrix,
    pub u_inv: PolyMatrix,
    pub v: PolyMatrix,
}

pub fn smith_form(a: &PolyMatrix) -> SmithForm {
    let f = a.field;
    let (g, m) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = PolyMatrix::identity(f, g);
    let mut u_inv = PolyMatrix::identity(f, g);
    let mut v = PolyMatrix::identity(f, m);

    let mut t = 0;
    while t < g.min(m) {
        let mut found = true;
        loop {
            let best = (t..g)
                .flat_map(|i| (t..m).map(move |j| (i, j)))
                .filter(|&(i, j)| !d.get(i, j).is_zero())
                .min_by_key(|&(i, j)| d.get(i, j).degree());
            let Some((i0, j0)) = best else {
                found = false;
                break;
            };
            d.swap_rows(i0, t);
            u.swap_rows(i0, t);
            u_inv.swap_cols(i0, t);
            d.swap_cols(j0, t);
            v.swap_cols(j0, t);

            let mut dirty = false;
            for i in t + 1..g {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_rem(d.get(t, t)).0;
                let neg_q = -&q;
                d.add_row_multiple(i, t, &neg_q);
                u.add_row_multiple(i, t, &neg_q);
                u_inv.add_col_multiple(t, i, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..m {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -&d.get(t, j).div_rem(d.get(t, t)).0;
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..g)
                .flat_map(|i| (t + 1..m).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(t, t).divides(d.get(i, j)));
            match bad {
                Some((i, _)) => {
                    let one = Poly::one(f);
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                    u_inv.add_col_multiple(i, t, &-&one);
                }
                None => break,
            }
        }
        if !found {
            break;
        }
        let lead = d.get(t, t).leading();
        if lead != 1 {
            let inv = f.inv(lead);
            d.scale_row(t, inv);
            u.scale_row(t, inv);
            u_inv.scale_col(t, lead);
        }
        t += 1;
    }
    let factors: Vec<Poly> = (0..g.min(m))
        .map(|i| d.get(i, i).clone())
        .take_while(|p| !p.is_zero())
        .collect();
    SmithForm {
        free_rank: g - factors.len(),
        diagonal: d,
        factors,
        u,
        u_inv,
        v,
    }
}

/// A finitely presented GF(p)[t]-module `K[t]^g / R`, `R` = column span of
/// `relations`. Multiplication by `t` is the flow endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    field: PrimeField,
    generators: usize,
    relations: PolyMatrix,
}

impl ModulePresentation {
    pub fn new(field: PrimeField, generators: usize, relations: PolyMatrix) -> Result<Self> {
        if relations.rows != generators {
            return Err(Error::DimensionMismatch {
                expected: generators,
                found: relations.rows,
            });
        }
        if relations.field != field {
            return Err(Error::FieldMismatch(
                field.modulus(),
                relations.field.modulus(),
            ));
        }
        Ok(ModulePresentation {
            field,
            generators,
            relations,
        })
    }

    /// `K[t]^g` with no relations.
    pub fn free(field: PrimeField, g: usize) -> Self {
        ModulePresentation {
            field,
            generators: g,
            relations: PolyMatrix::zeros(field, g, 0),
        }
    }

    /// `K[t]/(d_1) ⊕ ... ⊕ K[t]/(d_r) ⊕ K[t]^free`.
    pub fn from_factors(field: PrimeField, factors: &[Poly], free: usize) -> Self {
        let g = factors.len() + free;
        ModulePresentation {
            field,
            generators: g,
            relations: PolyMatrix::diagonal(field, g, factors.len(), factors),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &PolyMatrix {
        &self.relations
    }

    pub fn smith(&self) -> SmithForm {
        smith_form(&self.relations)
    }

    pub fn reducer(&self) -> Reducer {
        Reducer {
            generators: self.generators,
            hermite: hermite_form(&self.relations),
        }
    }

    /// `e_i`, the i-th generator.
    pub fn generator(&self, i: usize) -> PolyVec {
        (0..self.generators)
            .map(|j| {
                if i == j {
                    Poly::one(self.field)
                } else {
                    Poly::zero(self.field)
                }
            })
            .collect()
    }

    pub fn zero_element(&self) -> PolyVec {
        vec![Poly::zero(self.field); self.generators]
    }
}

/// Cached Hermite form for repeated canonical-form reductions.
#[derive(Clone, Debug)]
pub struct Reducer {
    generators: usize,
    hermite: HermiteForm,
}

impl Reducer {
    pub fn canonical(&self, v: &[Poly]) -> Result<PolyVec> {
        if v.len() != self.generators {
            return Err(Error::DimensionMismatch {
                expected: self.generators,
                found: v.len(),
            });
        }
        Ok(self.hermite.reduce(v))
    }

    pub fn hermite(&self) -> &HermiteForm {
        &self.hermite
    }

    /// Maximal exclusive degree bound for each coordinate of a canonical
    /// element; `None` where the coordinate is unbounded.
    pub fn degree_bounds(&self) -> Vec<Option<usize>> {
        let mut b = vec![None; self.generators];
        for &(r, c) in &self.hermite.pivots {
            b[r] = self.hermite.h.get(r, c).degree();
        }
        b
    }
}

/// Unique representative of `v` modulo the relations of `w`.
pub fn canonical_form(v: &[Poly], w: &ModulePresentation) -> Result<PolyVec> {
    w.reducer().canonical(v)
}

/// Torsion-free rank over `K[t]`.
pub fn module_rank(w: &ModulePresentation) -> usize {
    w.generators - hermite_form(&w.relations).rank()
}

/// Rank of a polynomial matrix over the fraction field `K(t)`.
pub fn poly_rank(a: &PolyMatrix) -> usize {
    hermite_form(a).rank()
}

/// Torsion submodule of a presented module.
#[derive(Clone, Debug)]
pub struct TorsionPart {
    /// `⊕ K[t]/(d_i)` over the non-unit invariant factors.
    pub presentation: ModulePresentation,
    /// Generators of the torsion part, as canonical elements of the ambient module.
    pub embedding: Vec<PolyVec>,
    /// Non-unit invariant factors.
    pub factors: Vec<Poly>,
}

impl TorsionPart {
    /// Dimension over K: sum of factor degrees.
    pub fn k_dim(&self) -> usize {
        self.factors.iter().map(|d| d.degree().unwrap()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }
}

pub fn torsion_submodule(w: &ModulePresentation) -> TorsionPart {
    let f = w.field;
    let smith = w.smith();
    let reducer = w.reducer();
    let mut factors = Vec::new();
    let mut embedding = Vec::new();
    for (i, d) in smith.factors.iter().enumerate() {
        if d.is_unit() {
            continue;
        }
        factors.push(d.clone());
        let gen = smith.u_inv.column(i);
        embedding.push(reducer.canonical(&gen).expect("generator count matches"));
    }
    TorsionPart {
        presentation: ModulePresentation::from_factors(f, &factors, 0),
        embedding,
        factors,
    }
}

/// Presentation of the submodule generated by `gens` (elements of `w`), with
/// the given elements as its generators.
pub fn submodule_presentation(
    w: &ModulePresentation,
    gens: &[PolyVec],
) -> Result<ModulePresentation> {
    let f = w.field;
    let g = PolyMatrix::from_columns(f, w.generators, gens)?;
    let stacked = g.hconcat(&w.relations)?;
    let kernel = hermite_form(&stacked).kernel_basis();
    let k = gens.len();
    let rel: Vec<PolyVec> = kernel.into_iter().map(|col| col[..k].to_vec()).collect();
    let relations = if rel.is_empty() {
        PolyMatrix::zeros(f, k, 0)
    } else {
        PolyMatrix::from_columns(f, k, &rel)?
    };
    ModulePresentation::new(f, k, relations)
}

/// Presentation of `w / <gens>`.
pub fn quotient_presentation(
    w: &ModulePresentation,
    gens: &[PolyVec],
) -> Result<ModulePresentation> {
    let g = PolyMatrix::from_columns(w.field, w.generators, gens)?;
    ModulePresentation::new(w.field, w.generators, w.relations.hconcat(&g)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn p(f: PrimeField, c: &[i64]) -> Poly {
        Poly::from_coeffs(f, c)
    }

    #[test]
    fn gcd_examples() {
        let f = gf(2);
        assert_eq!(
            poly_gcd(&p(f, &[0, 1]), &p(f, &[0, 0, 1])).unwrap(),
            p(f, &[0, 1])
        );
        // t^2 + 1 = (t + 1)^2 over GF(2)
        assert_eq!(&p(f, &[1, 1]) * &p(f, &[1, 1]), p(f, &[1, 0, 1]));
        assert_eq!(
            poly_gcd(&p(f, &[1, 1]), &p(f, &[1, 0, 1])).unwrap(),
            p(f, &[1, 1])
        );
        assert!(poly_gcd(&p(f, &[1]), &p(f, &[1, 1, 0, 1]))
            .unwrap()
            .is_one());
        assert_eq!(
            poly_gcd(&Poly::zero(f), &Poly::zero(f)),
            Err(Error::ZeroGcd)
        );
    }

    #[test]
    fn div_rem_reconstructs() {
        let f = gf(5);
        let a = p(f, &[3, 0, 4, 1, 2]);
        let d = p(f, &[1, 3]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn hermite_examples() {
        let f = gf(2);
        let a = PolyMatrix::from_coeff_rows(f, &[vec![vec![0, 1], vec![1]]]).unwrap();
        let h = hermite_form(&a);
        assert_eq!(h.pivots, vec![(0, 0)]);
        assert!(h.h.get(0, 0).is_one());
        assert!(h.h.get(0, 1).is_zero());
        assert_eq!(a.mul(&h.transform).unwrap(), h.h);

        let diag =
            PolyMatrix::from_coeff_rows(f, &[vec![vec![0, 1], vec![]], vec![vec![], vec![0, 1]]])
                .unwrap();
        assert_eq!(hermite_form(&diag).h, diag);

        let z = PolyMatrix::zeros(f, 2, 3);
        let hz = hermite_form(&z);
        assert!(hz.h.is_zero());
        assert_eq!(hz.rank(), 0);
    }

    #[test]
    fn smith_examples() {
        let f = gf(2);
        let a = PolyMatrix::from_coeff_rows(
            f,
            &[vec![vec![0, 1], vec![]], vec![vec![], vec![0, 0, 1]]],
        )
        .unwrap();
        assert_eq!(
            smith_form(&a).factors,
            vec![p(f, &[0, 1]), p(f, &[0, 0, 1])]
        );

        let b =
            PolyMatrix::from_coeff_rows(f, &[vec![vec![0, 1], vec![1]], vec![vec![], vec![0, 1]]])
                .unwrap();
        let s = smith_form(&b);
        assert_eq!(s.factors, vec![p(f, &[1]), p(f, &[0, 0, 1])]);
        assert_eq!(s.u.mul(&b).unwrap().mul(&s.v).unwrap(), s.diagonal);

        let c = PolyMatrix::from_coeff_rows(f, &[vec![vec![-1, 1]]]).unwrap();
        assert_eq!(smith_form(&c).factors, vec![p(f, &[1, 1])]);
    }

    #[test]
    fn smith_inverse_transform_is_inverse() {
        let f = gf(3);
        let a = PolyMatrix::from_coeff_rows(
            f,
            &[
                vec![vec![1, 2], vec![0, 1, 1], vec![2]],
                vec![vec![0, 0, 1], vec![1], vec![1, 1]],
            ],
        )
        .unwrap();
        let s = smith_form(&a);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), PolyMatrix::identity(f, 2));
    }

    #[test]
    fn module_rank_examples() {
        let f = gf(2);
        assert_eq!(module_rank(&ModulePresentation::free(f, 1)), 1);
        let tors = ModulePresentation::from_factors(f, &[p(f, &[0, 0, 1])], 0);
        assert_eq!(module_rank(&tors), 0);
        let rel = PolyMatrix::from_coeff_rows(f, &[vec![vec![0, 1]], vec![vec![]]]).unwrap();
        let w = ModulePresentation::new(f, 2, rel).unwrap();
        assert_eq!(module_rank(&w), 1);
        assert_eq!(w.smith().factors, vec![p(f, &[0, 1])]);
        assert_eq!(w.smith().free_rank, 1);
    }

    #[test]
    fn torsion_examples() {
        let f = gf(2);
        let w = ModulePresentation::from_factors(f, &[p(f, &[0, 1])], 1);
        let t = torsion_submodule(&w);
        assert_eq!(t.k_dim(), 1);
        assert_eq!(t.embedding.len(), 1);
        // the torsion generator is killed by t
        let killed: PolyVec = t.embedding[0].iter().map(|x| x.shift(1)).collect();
        assert!(canonical_form(&killed, &w)
            .unwrap()
            .iter()
            .all(Poly::is_zero));

        assert!(torsion_submodule(&ModulePresentation::free(f, 3)).is_zero());
        let w2 = ModulePresentation::from_factors(f, &[p(f, &[0, 0, 1])], 0);
        assert_eq!(torsion_submodule(&w2).k_dim(), 2);
    }

    #[test]
    fn canonical_form_examples() {
        let f = gf(2);
        let w = ModulePresentation::from_factors(f, &[p(f, &[0, 0, 1])], 0);
        assert!(canonical_form(&[p(f, &[0, 0, 0, 1])], &w).unwrap()[0].is_zero());
        assert_eq!(
            canonical_form(&[p(f, &[1, 1, 1])], &w).unwrap()[0],
            p(f, &[1, 1])
        );
        assert!(canonical_form(&[p(f, &[1]), p(f, &[1])], &w).is_err());
    }

    #[test]
    fn sub_and_quotient_presentations() {
        let f = gf(2);
        // W = K[t]/(t^2) ⊕ K[t]; S generated by (1, 0) is K[t]/(t^2)
        let w = ModulePresentation::from_factors(f, &[p(f, &[0, 0, 1])], 1);
        let s = submodule_presentation(&w, &[vec![p(f, &[1]), Poly::zero(f)]]).unwrap();
        assert_eq!(module_rank(&s), 0);
        assert_eq!(torsion_submodule(&s).k_dim(), 2);
        let q = quotient_presentation(&w, &[vec![p(f, &[1]), Poly::zero(f)]]).unwrap();
        assert_eq!(module_rank(&q), 1);
        assert!(torsion_submodule(&q).is_zero());
    }
}
