//! Linearly compact flows presented as inverse limits of finite levels.
//!
//! Level `k` is a finite space `V_k = K^{d_k}`. Every built-in rule orders
//! coordinates so that `π_k : V_{k+1} → V_k` drops trailing coordinates.
//! `M_k : V_{k+s} → V_k` is the level-`k` avatar of `φ`.
//!
//! An open subspace `U = p_k^{-1}(s)` is stored by the constraint functionals
//! cutting out `s`, so lifting to a higher level is zero padding and
//! `φ^{-1}` is `λ ↦ λ M_k`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfp::{dot, Matrix, PrimeField, Subspace};
use crate::polymat::Poly;
use crate::report::{EntropyReport, EntropyValue, Status, Witness};

/// Per-level output rows of a periodic rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub dim: usize,
    /// `dim` rows; width is the total dimension of the input blocks it reads.
    pub action: Matrix,
}

#[derive(Clone, Debug)]
pub enum Descriptor {
    Bernoulli {
        copies: usize,
    },
    FinDim {
        action: Matrix,
    },
    /// Dual of `⊕ K[t]/(d_i) ⊕ K[t]^free`, factors monic of positive degree.
    DualOfModule {
        factors: Vec<Poly>,
        free: usize,
    },
    /// Blocks `b_0, b_1, …`: the preperiod, then the period repeated.
    /// Level `k` is the first `k` blocks. A preperiod block `n` reads input
    /// blocks `0..=n+s`; a period block reads `n..=n+s`.
    Periodic {
        preperiod: Vec<Block>,
        period: Vec<Block>,
    },
    /// `φ^k` of a base flow.
    Power {
        base: ProfiniteFlow,
        k: usize,
    },
}

/// K-dimension of the torsion part and rank of the free part of the dual module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Structure {
    pub torsion_dim: usize,
    pub free_rank: usize,
}

#[derive(Clone, Debug)]
pub struct Level {
    pub dim: usize,
    /// `d_k × d_{k+1}`
    pub proj: Matrix,
    /// `d_k × d_{k+s}`
    pub action: Matrix,
}

#[derive(Debug)]
struct Inner {
    field: PrimeField,
    window: usize,
    descriptor: Descriptor,
    levels: Mutex<HashMap<usize, Arc<Level>>>,
}

#[derive(Clone, Debug)]
pub struct ProfiniteFlow {
    inner: Arc<Inner>,
}

/// `U = p_level^{-1}(s)`, stored as the annihilator of `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenSubspace {
    level: usize,
    constraints: Subspace,
}

impl OpenSubspace {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn codim(&self) -> usize {
        self.constraints.dim()
    }

    /// Functionals on `V_level` whose common kernel is `s`.
    pub fn constraints(&self) -> &Subspace {
        &self.constraints
    }

    /// `s ⊆ V_level`.
    pub fn subspace(&self) -> Subspace {
        self.constraints.annihilator()
    }

    pub fn witness(&self) -> Witness {
        Witness {
            kind: "constraints".into(),
            level: Some(self.level),
            rows: self.constraints.basis_vectors(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cotrajectory {
    pub base: OpenSubspace,
    /// `C_1 = U, C_2, …`; `C_n` lives at level `k + (n-1)s`.
    pub chain: Vec<OpenSubspace>,
    /// 1-based `n` with `C_n = C_{n+1}`.
    pub stationary_at: Option<usize>,
    /// Non-stationarity proved from the structural torsion bound.
    pub nonstationary_certified: bool,
    pub horizon: usize,
}

impl Cotrajectory {
    /// `C_n`, 1-based; stages past stationarity repeat the last member.
    pub fn stage(&self, n: usize) -> &OpenSubspace {
        &self.chain[n.clamp(1, self.chain.len()) - 1]
    }

    /// `dim(C_n / C_{n+1})` for the computed stages.
    pub fn increments(&self) -> Vec<usize> {
        let mut inc: Vec<usize> = self
            .chain
            .windows(2)
            .map(|w| w[1].codim() - w[0].codim())
            .collect();
        if self.stationary_at.is_some() {
            inc.push(0);
        }
        inc
    }

    /// `dim(U / C_n)` for `n = 1..=len`.
    pub fn quotient_dims(&self) -> Vec<usize> {
        let c0 = self.base.codim();
        self.chain.iter().map(|c| c.codim() - c0).collect()
    }

    pub fn is_cocyclic(&self) -> bool {
        self.base.codim() == 1
    }

    /// `Some(false)` when stationary, `Some(true)` when certified
    /// non-stationary, `None` when only checked up to the horizon.
    pub fn nonstationary(&self) -> Option<bool> {
        if self.stationary_at.is_some() {
            Some(false)
        } else if self.nonstationary_certified {
            Some(true)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyWitness {
    /// Level of the vectors `e_n`.
    pub level: usize,
    /// `λ_n` with `φ^{-n}U = ker λ_n`, zero-padded to `level`.
    pub functionals: Vec<Vec<u64>>,
    /// `e_n` with `λ_m(e_n) = δ_{mn}`.
    pub basis: Vec<Vec<u64>>,
    pub codim_one: bool,
    pub theta_isomorphism: bool,
    pub shift_commutes: bool,
}

impl ConjugacyWitness {
    pub fn verified(&self) -> bool {
        self.codim_one && self.theta_isomorphism && self.shift_commutes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoindependenceVerdict {
    pub holds: bool,
    /// Last stage checked.
    pub checked_up_to: usize,
    /// `(member, stage)` of the first failure.
    pub failure: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub max_level: usize,
    pub horizon: usize,
    pub k_max: usize,
    pub stop_at_structural: bool,
    /// Hyperplanes examined per level.
    pub cap: usize,
    /// Sample hyperplanes with this seed when a level exceeds the cap.
    pub seed: Option<u64>,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_level: 4,
            horizon: 10,
            k_max: 8,
            stop_at_structural: false,
            cap: 4096,
            seed: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TheoremA {
    pub witnesses: Vec<OpenSubspace>,
    pub cotrajectories: Vec<Cotrajectory>,
    /// Entropy of the flow restricted to the intersection of the witnesses.
    pub remainder: Option<EntropyReport>,
    pub count: EntropyReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Structural,
    Witness,
    Both,
}

#[derive(Clone, Debug)]
pub struct EntStar {
    pub structural: Option<EntropyReport>,
    pub witness: Option<EntropyReport>,
}

/// `D₊` as level-wise coordinate data plus the restricted flow.
#[derive(Clone, Debug)]
pub struct DPlus {
    pub flow: ProfiniteFlow,
    parent: ProfiniteFlow,
}

impl DPlus {
    /// `p_k(D₊) ⊆ V_k`.
    pub fn level_subspace(&self, k: usize) -> Subspace {
        let f = self.parent.field();
        let emb = self.embedding(k);
        Subspace::span(f, emb.rows(), &emb.transpose().row_vecs())
    }

    /// Inclusion `V'_k → V_k` of the restricted flow's level into the parent's.
    pub fn embedding(&self, k: usize) -> Matrix {
        let f = self.parent.field();
        let d = self.parent.dim(k);
        let free: Vec<usize> = match &self.parent.inner.descriptor {
            Descriptor::DualOfModule { factors, free } => {
                let degs = component_degrees(factors, *free);
                dual_coords(&degs, k)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, (c, _))| degs[*c].is_none())
                    .map(|(i, _)| i)
                    .collect()
            }
            Descriptor::Bernoulli { .. } => (0..d).collect(),
            _ => Vec::new(),
        };
        let mut m = Matrix::zeros(f, d, free.len());
        for (j, &i) in free.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }
}

fn component_degrees(factors: &[Poly], free: usize) -> Vec<Option<usize>> {
    factors
        .iter()
        .map(|d| d.degree())
        .chain(std::iter::repeat_n(None, free))
        .collect()
}

/// Degree-major coordinates `(component, degree)` of level `k`.
fn dual_coords(degs: &[Option<usize>], k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..k {
        for (c, m) in degs.iter().enumerate() {
            if m.is_none_or(|m| j < m) {
                out.push((c, j));
            }
        }
    }
    out
}

fn pad(v: &[u64], len: usize) -> Vec<u64> {
    let mut w = v.to_vec();
    w.resize(len, 0);
    w
}

impl ProfiniteFlow {
    fn from_descriptor(field: PrimeField, window: usize, descriptor: Descriptor) -> Self {
        ProfiniteFlow {
            inner: Arc::new(Inner {
                field,
                window,
                descriptor,
                levels: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn bernoulli(field: PrimeField, copies: usize) -> Self {
        ProfiniteFlow::from_descriptor(field, 1, Descriptor::Bernoulli { copies })
    }

    pub fn findim(action: Matrix) -> Result<Self> {
        if action.rows() != action.cols() {
            return Err(Error::DimensionMismatch {
                expected: action.rows(),
                found: action.cols(),
            });
        }
        Ok(ProfiniteFlow::from_descriptor(
            action.field(),
            0,
            Descriptor::FinDim { action },
        ))
    }

    /// Dual of `⊕ K[t]/(d_i) ⊕ K[t]^free`; unit factors are dropped.
    pub fn dual_of_module(field: PrimeField, factors: &[Poly], free: usize) -> Result<Self> {
        let mut fs = Vec::new();
        for d in factors {
            if d.is_zero() {
                return Err(Error::Malformed("zero invariant factor".into()));
            }
            if d.field() != field {
                return Err(Error::FieldMismatch(field.modulus(), d.field().modulus()));
            }
            if !d.is_unit() {
                fs.push(d.monic());
            }
        }
        Ok(ProfiniteFlow::from_descriptor(
            field,
            1,
            Descriptor::DualOfModule { factors: fs, free },
        ))
    }

    pub fn periodic(
        field: PrimeField,
        window: usize,
        preperiod: Vec<Block>,
        period: Vec<Block>,
    ) -> Result<Self> {
        let flow = ProfiniteFlow::from_descriptor(
            field,
            window,
            Descriptor::Periodic { preperiod, period },
        );
        flow.validate_blocks()?;
        Ok(flow)
    }

    /// `φ^k`, `k ≥ 1`.
    pub fn power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("power must be positive".into()));
        }
        Ok(ProfiniteFlow::from_descriptor(
            self.field(),
            self.window() * k,
            Descriptor::Power {
                base: self.clone(),
                k,
            },
        ))
    }

    pub fn field(&self) -> PrimeField {
        self.inner.field
    }

    pub fn window(&self) -> usize {
        self.inner.window
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.inner.descriptor
    }

    pub fn structure(&self) -> Option<Structure> {
        match &self.inner.descriptor {
            Descriptor::Bernoulli { copies } => Some(Structure {
                torsion_dim: 0,
                free_rank: *copies,
            }),
            Descriptor::FinDim { action } => Some(Structure {
                torsion_dim: action.rows(),
                free_rank: 0,
            }),
            Descriptor::DualOfModule { factors, free } => Some(Structure {
                torsion_dim: factors.iter().map(|d| d.degree().unwrap()).sum(),
                free_rank: *free,
            }),
            Descriptor::Power { base, k } => base.structure().map(|s| Structure {
                torsion_dim: s.torsion_dim,
                free_rank: s.free_rank * k,
            }),
            Descriptor::Periodic { .. } => None,
        }
    }

    fn block(&self, n: usize) -> Option<&Block> {
        match &self.inner.descriptor {
            Descriptor::Periodic { preperiod, period } => {
                if n < preperiod.len() {
                    Some(&preperiod[n])
                } else if period.is_empty() {
                    None
                } else {
                    Some(&period[(n - preperiod.len()) % period.len()])
                }
            }
            _ => None,
        }
    }

    fn block_dim(&self, n: usize) -> usize {
        self.block(n).map_or(0, |b| b.dim)
    }

    fn block_offset(&self, n: usize) -> usize {
        (0..n).map(|i| self.block_dim(i)).sum()
    }

    fn block_input(&self, n: usize) -> (usize, usize) {
        let Descriptor::Periodic { preperiod, .. } = &self.inner.descriptor else {
            unreachable!()
        };
        let s = self.window();
        let start = if n < preperiod.len() { 0 } else { n };
        let lo = self.block_offset(start);
        (lo, self.block_offset(n + s + 1) - lo)
    }

    fn validate_blocks(&self) -> Result<()> {
        let Descriptor::Periodic { preperiod, period } = &self.inner.descriptor else {
            return Ok(());
        };
        for n in 0..preperiod.len() + period.len() {
            let b = self.block(n).unwrap();
            let (_, width) = self.block_input(n);
            if b.action.rows() != b.dim || b.action.cols() != width {
                return Err(Error::Malformed(format!(
                    "block {n}: action must be {}x{width}, got {}x{}",
                    b.dim,
                    b.action.rows(),
                    b.action.cols()
                )));
            }
            if b.action.field() != self.field() {
                return Err(Error::FieldMismatch(
                    self.field().modulus(),
                    b.action.field().modulus(),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self, k: usize) -> usize {
        match &self.inner.descriptor {
            Descriptor::Bernoulli { copies } => k * copies,
            Descriptor::FinDim { action } => action.rows(),
            Descriptor::DualOfModule { factors, free } => {
                factors
                    .iter()
                    .map(|d| d.degree().unwrap().min(k))
                    .sum::<usize>()
                    + free * k
            }
            Descriptor::Periodic { .. } => self.block_offset(k),
            Descriptor::Power { base, .. } => base.dim(k),
        }
    }

    /// `(d_k, π_k, M_k)`, memoized.
    pub fn level(&self, k: usize) -> Arc<Level> {
        if let Some(l) = self.inner.levels.lock().unwrap().get(&k) {
            return Arc::clone(l);
        }
        let l = Arc::new(self.compute_level(k));
        self.inner
            .levels
            .lock()
            .unwrap()
            .entry(k)
            .or_insert(l)
            .clone()
    }

    fn truncation(&self, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field(), rows, cols);
        for i in 0..rows {
            m.set(i, i, 1);
        }
        m
    }

    fn compute_level(&self, k: usize) -> Level {
        let f = self.field();
        let s = self.window();
        let d = self.dim(k);
        let proj = self.truncation(d, self.dim(k + 1));
        let action = match &self.inner.descriptor {
            Descriptor::FinDim { action } => action.clone(),
            Descriptor::Bernoulli { copies } => {
                let degs = vec![None; *copies];
                dual_action(f, &[], &degs, k)
            }
            Descriptor::DualOfModule { factors, free } => {
                dual_action(f, factors, &component_degrees(factors, *free), k)
            }
            Descriptor::Periodic { .. } => {
                let mut m = Matrix::zeros(f, d, self.dim(k + s));
                for n in 0..k {
                    let b = self.block(n).unwrap();
                    let (c0, _) = self.block_input(n);
                    m.set_block(self.block_offset(n), c0, &b.action);
                }
                m
            }
            Descriptor::Power { base, k: p } => {
                let bs = base.window();
                let mut m = base.level(k).action.clone();
                for i in 1..*p {
                    m = m
                        .mul(&base.level(k + i * bs).action)
                        .expect("level shapes agree");
                }
                m
            }
        };
        Level {
            dim: d,
            proj,
            action,
        }
    }

    /// Composite projection `V_k → V_l`, `l ≤ k`.
    pub fn projection(&self, l: usize, k: usize) -> Matrix {
        assert!(l <= k, "projection goes down");
        let mut m = Matrix::identity(self.field(), self.dim(k));
        for j in (l..k).rev() {
            m = self.level(j).proj.mul(&m).expect("level shapes agree");
        }
        m
    }

    pub fn full(&self) -> OpenSubspace {
        OpenSubspace {
            level: 0,
            constraints: Subspace::zero(self.field(), self.dim(0)),
        }
    }

    /// `p_k^{-1}(s)`.
    pub fn open_subspace(&self, k: usize, s: &Subspace) -> Result<OpenSubspace> {
        if s.ambient_dim() != self.dim(k) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(k),
                found: s.ambient_dim(),
            });
        }
        Ok(OpenSubspace {
            level: k,
            constraints: s.annihilator(),
        })
    }

    /// Common kernel of the given functionals on `V_k`.
    pub fn from_constraints(&self, k: usize, rows: &[Vec<u64>]) -> Result<OpenSubspace> {
        let d = self.dim(k);
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
        Ok(OpenSubspace {
            level: k,
            constraints: Subspace::span(self.field(), d, rows),
        })
    }

    fn constraint_rows(&self, u: &OpenSubspace, k: usize) -> Vec<Vec<u64>> {
        let d = self.dim(k);
        u.constraints
            .basis_vectors()
            .iter()
            .map(|r| pad(r, d))
            .collect()
    }

    /// Same open subspace, represented at level `k ≥ u.level`.
    pub fn lift(&self, u: &OpenSubspace, k: usize) -> OpenSubspace {
        assert!(k >= u.level, "cannot lift to a lower level");
        if k == u.level {
            return u.clone();
        }
        OpenSubspace {
            level: k,
            constraints: Subspace::span(self.field(), self.dim(k), &self.constraint_rows(u, k)),
        }
    }

    /// `p_l(U) ⊆ V_l` for any level `l`.
    pub fn image_at(&self, u: &OpenSubspace, l: usize) -> Subspace {
        if l >= u.level {
            self.lift(u, l).subspace()
        } else {
            u.subspace()
                .image(&self.projection(l, u.level))
                .expect("projection shape")
        }
    }

    /// `φ^{-1}U`, at level `k + s`.
    pub fn preimage_endo(&self, u: &OpenSubspace) -> OpenSubspace {
        let lvl = self.level(u.level);
        let k = u.level + self.window();
        let rows: Vec<Vec<u64>> = u
            .constraints
            .basis_vectors()
            .iter()
            .map(|r| lvl.action.vec_mul(r).expect("constraint length"))
            .collect();
        OpenSubspace {
            level: k,
            constraints: Subspace::span(self.field(), self.dim(k), &rows),
        }
    }

    pub fn intersect(&self, family: &[OpenSubspace]) -> OpenSubspace {
        let k = family.iter().map(|u| u.level).max().unwrap_or(0);
        let rows: Vec<Vec<u64>> = family
            .iter()
            .flat_map(|u| self.constraint_rows(u, k))
            .collect();
        OpenSubspace {
            level: k,
            constraints: Subspace::span(self.field(), self.dim(k), &rows),
        }
    }

    pub fn sum(&self, a: &OpenSubspace, b: &OpenSubspace) -> OpenSubspace {
        let k = a.level.max(b.level);
        let (la, lb) = (self.lift(a, k), self.lift(b, k));
        OpenSubspace {
            level: k,
            constraints: la
                .constraints
                .intersect(&lb.constraints)
                .expect("same level"),
        }
    }

    /// `inner ⊆ outer`.
    pub fn contains(&self, outer: &OpenSubspace, inner: &OpenSubspace) -> bool {
        let k = outer.level.max(inner.level);
        self.lift(inner, k)
            .constraints
            .contains_subspace(&self.lift(outer, k).constraints)
    }

    pub fn same(&self, a: &OpenSubspace, b: &OpenSubspace) -> bool {
        let k = a.level.max(b.level);
        self.lift(a, k) == self.lift(b, k)
    }

    /// Stage by which `H*` increments are final for open subspaces defined
    /// at `level`: `dim T_n ≤ τ + f(level + n - 1)` on the dual side forces
    /// the increment to its limit by then. For `φ^k` the dual filtration
    /// degree is measured in `t^k`.
    pub fn certified_stage(&self, level: usize) -> Option<usize> {
        let depth = match &self.inner.descriptor {
            Descriptor::Power { k, .. } => level.div_ceil(*k),
            _ => level,
        };
        self.structure()
            .map(|s| s.torsion_dim + s.free_rank * (depth + 1) + 2)
    }

    /// `C_1 = U, C_{n+1} = U ∩ φ^{-1} C_n`. With structural data the chain
    /// is extended until stationarity is decided.
    pub fn cotrajectory(&self, u: &OpenSubspace, horizon: usize) -> Cotrajectory {
        let tau = self.structure().map(|s| s.torsion_dim);
        let target = match tau {
            Some(t) => horizon.max(t + 2),
            None => horizon,
        }
        .max(1);
        let mut chain = vec![u.clone()];
        let mut stationary_at = None;
        let mut certified = false;
        while chain.len() < target {
            let last = chain.last().unwrap();
            if tau.is_some_and(|t| last.codim() > t) {
                certified = true;
                if chain.len() >= horizon {
                    break;
                }
            }
            let next = self.intersect(&[u.clone(), self.preimage_endo(last)]);
            if next.codim() == last.codim() {
                stationary_at = Some(chain.len());
                break;
            }
            chain.push(next);
        }
        if stationary_at.is_none() && tau.is_some_and(|t| chain.last().unwrap().codim() > t) {
            certified = true;
        }
        Cotrajectory {
            base: u.clone(),
            chain,
            stationary_at,
            nonstationary_certified: certified,
            horizon,
        }
    }

    /// `H*(φ, U)`: the limit of `dim(C_n / C_{n+1})`.
    pub fn h_star(&self, u: &OpenSubspace, horizon: usize) -> EntropyReport {
        let need = self.certified_stage(u.level);
        let stages = need.map_or(horizon, |n| n.max(horizon));
        let c = self.cotrajectory(u, stages + 1);
        let inc = c.increments();
        let witness = vec![u.witness()];
        if c.stationary_at.is_some() {
            return EntropyReport::exact(0, "cotrajectory")
                .with_increments(inc)
                .with_witnesses(witness);
        }
        let value = inc.last().copied().unwrap_or(0);
        let status = if need.is_some() {
            Status::Exact
        } else {
            Status::HorizonLimited
        };
        EntropyReport::new(value, status, "cotrajectory")
            .with_increments(inc)
            .with_witnesses(witness)
    }

    /// Normal vectors of level-`k` hyperplanes not defined at level `k - 1`,
    /// first nonzero entry 1, in lexicographic order.
    pub fn hyperplane_normals(&self, k: usize, cap: usize, seed: Option<u64>) -> Vec<Vec<u64>> {
        let d = self.dim(k);
        let prev = if k == 0 { 0 } else { self.dim(k - 1) };
        if d == prev {
            return Vec::new();
        }
        let q = self.field().modulus();
        let total = (q as u128)
            .checked_pow(d as u32)
            .map(|a| (a - (q as u128).pow(prev as u32)) / (q as u128 - 1));
        let over = total.is_none_or(|t| t > cap as u128);
        if over {
            if let Some(seed) = seed {
                return self.sample_normals(k, d, prev, cap, seed);
            }
        }
        let mut out = Vec::new();
        for lead in (0..d).rev() {
            let mut tail = vec![0u64; d - lead - 1];
            loop {
                if lead >= prev || tail[prev - lead - 1..].iter().any(|&x| x != 0) {
                    let mut v = vec![0; lead + 1];
                    v[lead] = 1;
                    v.extend_from_slice(&tail);
                    out.push(v);
                    if out.len() >= cap {
                        return out;
                    }
                }
                if !increment_digits(&mut tail, q) {
                    break;
                }
            }
        }
        out
    }

    fn sample_normals(
        &self,
        k: usize,
        d: usize,
        prev: usize,
        cap: usize,
        seed: u64,
    ) -> Vec<Vec<u64>> {
        let f = self.field();
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut set = BTreeSet::new();
        let mut attempts = 0;
        while set.len() < cap && attempts < cap * 16 {
            attempts += 1;
            let mut v: Vec<u64> = (0..d).map(|_| rng.gen_range(0..f.modulus())).collect();
            if v[prev..].iter().all(|&x| x == 0) {
                continue;
            }
            let lead = v.iter().position(|&x| x != 0).unwrap();
            let inv = f.inv(v[lead]);
            for x in &mut v {
                *x = f.mul(*x, inv);
            }
            set.insert(v);
        }
        set.into_iter().collect()
    }

    /// Codimension-1 open subspaces at levels `≤ max_level` whose cotrajectory
    /// is non-stationary (certified, or up to the horizon without structure).
    pub fn find_cocyclic_cotrajectories(&self, bounds: &SearchBounds) -> Vec<OpenSubspace> {
        let mut out = Vec::new();
        for k in 0..=bounds.max_level {
            let normals = self.hyperplane_normals(k, bounds.cap, bounds.seed);
            let found: Vec<Option<OpenSubspace>> = normals
                .par_iter()
                .map(|n| {
                    let u = self.from_constraints(k, std::slice::from_ref(n)).unwrap();
                    let c = self.cotrajectory(&u, bounds.horizon);
                    (c.stationary_at.is_none()).then_some(u)
                })
                .collect();
            out.extend(found.into_iter().flatten());
        }
        out
    }

    /// `λ_0 = λ`, `λ_{n+1} = λ_n M`: `φ^{-n}U = ker λ_n` at level `k + ns`.
    pub fn preimage_functionals(&self, u: &OpenSubspace, count: usize) -> Result<Vec<Vec<u64>>> {
        if u.codim() != 1 {
            return Err(Error::Precondition(format!(
                "open subspace has codimension {}, expected 1",
                u.codim()
            )));
        }
        let s = self.window();
        let mut cur = u.constraints.basis_vectors().remove(0);
        let mut out = Vec::with_capacity(count);
        for n in 0..count {
            out.push(cur.clone());
            if n + 1 < count {
                cur = self.level(u.level + n * s).action.vec_mul(&cur)?;
            }
        }
        Ok(out)
    }

    /// Finite-stage conjugacy of `V / C(φ,U)` with the left Bernoulli shift.
    pub fn bernoulli_conjugacy(
        &self,
        u: &OpenSubspace,
        horizon: usize,
    ) -> Result<ConjugacyWitness> {
        if u.codim() != 1 {
            return Err(Error::Precondition("open subspace is not cocyclic".into()));
        }
        let c = self.cotrajectory(u, horizon);
        if c.stationary_at.is_some() {
            return Err(Error::Precondition("cotrajectory is stationary".into()));
        }
        let n = horizon.max(1);
        let s = self.window();
        let level = u.level + (n - 1) * s;
        let d = self.dim(level);
        let f = self.field();
        let lambdas: Vec<Vec<u64>> = self
            .preimage_functionals(u, n)?
            .iter()
            .map(|l| pad(l, d))
            .collect();
        let codim_one = lambdas.iter().all(|l| l.iter().any(|&x| x != 0));
        let lam = Matrix::from_residue_rows(f, d, &lambdas);
        let theta_isomorphism = lam.rank() == n;
        if !theta_isomorphism {
            return Err(Error::Precondition("cotrajectory is stationary".into()));
        }
        let mut basis = Vec::with_capacity(n);
        for i in 0..n {
            let mut rhs = vec![0; n];
            rhs[i] = 1;
            basis.push(lam.solve(&rhs)?.expect("functionals are independent"));
        }
        let mut shift_commutes = true;
        if n > 1 {
            let below = level - s;
            let act = &self.level(below).action;
            let db = self.dim(below);
            for (i, e) in basis.iter().enumerate() {
                let img = act.mul_vec(e)?;
                for (m, l) in lambdas.iter().take(n - 1).enumerate() {
                    let want = u64::from(m + 1 == i);
                    if dot(f, &l[..db], &img) != want {
                        shift_commutes = false;
                    }
                }
            }
        }
        Ok(ConjugacyWitness {
            level,
            functionals: lambdas,
            basis,
            codim_one,
            theta_isomorphism,
            shift_commutes,
        })
    }

    /// Stage-wise test of `C_i + ⋂_{j≠i} C_j = V`: at each stage `N ≤
    /// stage_bound` the annihilator of `C_{i,N}` must meet the span of the
    /// others' trivially. A failure is conclusive.
    pub fn coindependent_check(
        &self,
        family: &[Cotrajectory],
        stage_bound: usize,
    ) -> CoindependenceVerdict {
        let mut checked = 0;
        if family.len() > 1 {
            for n in 1..=stage_bound {
                let stages: Vec<&OpenSubspace> = family.iter().map(|c| c.stage(n)).collect();
                let k = stages.iter().map(|u| u.level).max().unwrap();
                let lifted: Vec<OpenSubspace> = stages.iter().map(|u| self.lift(u, k)).collect();
                for i in 0..lifted.len() {
                    let others: Vec<OpenSubspace> = lifted
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, u)| u.clone())
                        .collect();
                    let rest = self.intersect(&others);
                    let both = self.intersect(&[lifted[i].clone(), rest.clone()]);
                    if both.codim() != lifted[i].codim() + rest.codim() {
                        return CoindependenceVerdict {
                            holds: false,
                            checked_up_to: n,
                            failure: Some((i, n)),
                        };
                    }
                }
                checked = n;
            }
        } else {
            checked = stage_bound;
        }
        CoindependenceVerdict {
            holds: true,
            checked_up_to: checked,
            failure: None,
        }
    }

    /// A finite family of open subspaces is coindependent iff the constraint
    /// spaces are independent.
    pub fn open_family_coindependent(&self, family: &[OpenSubspace]) -> bool {
        let all = self.intersect(family);
        let total: usize = family.iter().map(OpenSubspace::codim).sum();
        all.codim() == total
    }

    fn remainder_entropy(&self, witnesses: &[OpenSubspace]) -> Option<EntropyReport> {
        match &self.inner.descriptor {
            Descriptor::DualOfModule { factors, free } => Some(crate::duality::remainder_entropy(
                self.field(),
                factors,
                *free,
                self,
                witnesses,
            )),
            Descriptor::Bernoulli { copies } => Some(crate::duality::remainder_entropy(
                self.field(),
                &[],
                *copies,
                self,
                witnesses,
            )),
            Descriptor::FinDim { .. } => Some(EntropyReport::exact(0, "finite_dimensional")),
            Descriptor::Power { .. } => {
                let f = self.structure().unwrap().free_rank;
                Some(EntropyReport::exact(
                    f.saturating_sub(witnesses.len()),
                    "structural_remainder",
                ))
            }
            Descriptor::Periodic { .. } => None,
        }
    }

    /// Greedy search for coindependent non-stationary cocyclic cotrajectories.
    pub fn theorem_a_witnesses(&self, bounds: &SearchBounds) -> TheoremA {
        let structural = self.structure().map(|s| s.free_rank);
        let mut witnesses: Vec<OpenSubspace> = Vec::new();
        let mut cotrajectories: Vec<Cotrajectory> = Vec::new();
        let mut remainder = self.remainder_entropy(&witnesses);
        let done = |rem: &Option<EntropyReport>, m: usize| {
            rem.as_ref()
                .is_some_and(|r| r.is_exact() && r.value.is_zero())
                || m >= bounds.k_max
                || (bounds.stop_at_structural && structural == Some(m))
        };
        'levels: for k in 0..=bounds.max_level {
            if done(&remainder, witnesses.len()) {
                break;
            }
            let normals = self.hyperplane_normals(k, bounds.cap, bounds.seed);
            let candidates: Vec<Option<(OpenSubspace, Cotrajectory)>> = normals
                .par_iter()
                .map(|n| {
                    let u = self.from_constraints(k, std::slice::from_ref(n)).unwrap();
                    let c = self.cotrajectory(&u, bounds.horizon);
                    c.stationary_at.is_none().then_some((u, c))
                })
                .collect();
            for (u, c) in candidates.into_iter().flatten() {
                if self.extends_family(&witnesses, &cotrajectories, &u, &c, bounds) {
                    witnesses.push(u);
                    cotrajectories.push(c);
                    remainder = self.remainder_entropy(&witnesses);
                    if done(&remainder, witnesses.len()) {
                        break 'levels;
                    }
                }
            }
        }
        let m = witnesses.len();
        let certified = remainder
            .as_ref()
            .is_some_and(|r| r.is_exact() && r.value.is_zero());
        let mut count = if certified || structural == Some(m) {
            EntropyReport::exact(m, "theorem_a_witnesses")
        } else if m >= bounds.k_max {
            EntropyReport::new(
                EntropyValue::Infinite,
                Status::LowerBound,
                "theorem_a_witnesses",
            )
        } else {
            EntropyReport::new(m, Status::LowerBound, "theorem_a_witnesses")
        };
        count.witnesses = witnesses.iter().map(OpenSubspace::witness).collect();
        TheoremA {
            witnesses,
            cotrajectories,
            remainder,
            count,
        }
    }

    fn extends_family(
        &self,
        family: &[OpenSubspace],
        cots: &[Cotrajectory],
        u: &OpenSubspace,
        c: &Cotrajectory,
        bounds: &SearchBounds,
    ) -> bool {
        let mut all = family.to_vec();
        all.push(u.clone());
        if self.structure().is_some() {
            // the submodules generated by the annihilators are independent
            // iff the joint cotrajectory grows by the family size
            let joint = self.intersect(&all);
            self.h_star(&joint, bounds.horizon).value == EntropyValue::from(all.len())
        } else {
            let mut cs = cots.to_vec();
            cs.push(c.clone());
            self.coindependent_check(&cs, bounds.horizon).holds
        }
    }

    pub fn ent_star(&self, strategy: Strategy, bounds: &SearchBounds) -> Result<EntStar> {
        let structural = match strategy {
            Strategy::Witness => None,
            _ => match self.structure() {
                Some(s) => Some(EntropyReport::exact(s.free_rank, "module_rank")),
                None if strategy == Strategy::Structural => {
                    return Err(Error::Unsupported(
                        "no structural data for a periodic flow".into(),
                    ))
                }
                None => None,
            },
        };
        let witness = match strategy {
            Strategy::Structural => None,
            _ => Some(self.theorem_a_witnesses(bounds).count),
        };
        Ok(EntStar {
            structural,
            witness,
        })
    }

    /// Largest closed invariant subspace with completely positive entropy.
    pub fn d_plus(&self) -> Result<DPlus> {
        let f = self.field();
        let restricted = match &self.inner.descriptor {
            Descriptor::Bernoulli { .. } => self.clone(),
            Descriptor::DualOfModule { free, .. } => ProfiniteFlow::bernoulli(f, *free),
            Descriptor::FinDim { .. } => ProfiniteFlow::findim(Matrix::zeros(f, 0, 0))?,
            _ => {
                return Err(Error::Unsupported(
                    "D+ needs a module-dual descriptor".into(),
                ))
            }
        };
        Ok(DPlus {
            flow: restricted,
            parent: self.clone(),
        })
    }

    /// `V / D₊`, the dual of the torsion part.
    pub fn pinsker_factor(&self) -> Result<ProfiniteFlow> {
        let f = self.field();
        match &self.inner.descriptor {
            Descriptor::Bernoulli { .. } => ProfiniteFlow::findim(Matrix::zeros(f, 0, 0)),
            Descriptor::FinDim { .. } => Ok(self.clone()),
            Descriptor::DualOfModule { factors, .. } => {
                let tors = ProfiniteFlow::dual_of_module(f, factors, 0)?;
                let top = factors.iter().filter_map(Poly::degree).max().unwrap_or(0);
                let action = tors.level(top).action.clone();
                let d = tors.dim(top);
                ProfiniteFlow::findim(Matrix::from_residue_rows(
                    f,
                    d,
                    &action
                        .row_vecs()
                        .iter()
                        .map(|r| r[..d].to_vec())
                        .collect::<Vec<_>>(),
                ))
            }
            _ => Err(Error::Unsupported(
                "Pinsker factor needs a module-dual descriptor".into(),
            )),
        }
    }

    /// Index of the dual coordinate `χ(t^j e_c)` at level `k`.
    pub fn dual_coordinate(&self, k: usize, c: usize, j: usize) -> Option<usize> {
        let degs = match &self.inner.descriptor {
            Descriptor::DualOfModule { factors, free } => component_degrees(factors, *free),
            Descriptor::Bernoulli { copies } => vec![None; *copies],
            _ => return None,
        };
        dual_coords(&degs, k).iter().position(|&x| x == (c, j))
    }

    /// `(component, degree)` of each coordinate of `V_k` for module duals.
    pub fn dual_coordinates(&self, k: usize) -> Option<Vec<(usize, usize)>> {
        match &self.inner.descriptor {
            Descriptor::DualOfModule { factors, free } => {
                Some(dual_coords(&component_degrees(factors, *free), k))
            }
            Descriptor::Bernoulli { copies } => Some(dual_coords(&vec![None; *copies], k)),
            _ => None,
        }
    }
}

/// Big-endian counter step; `false` on wrap-around.
fn increment_digits(digits: &mut [u64], q: u64) -> bool {
    for x in digits.iter_mut().rev() {
        *x += 1;
        if *x < q {
            return true;
        }
        *x = 0;
    }
    false
}

/// `(φχ)(t^j e_c) = χ(t^{j+1} e_c)`, reducing `t^m e_c` by the monic factor.
fn dual_action(f: PrimeField, factors: &[Poly], degs: &[Option<usize>], k: usize) -> Matrix {
    let rows = dual_coords(degs, k);
    let cols = dual_coords(degs, k + 1);
    let index: HashMap<(usize, usize), usize> =
        cols.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut m = Matrix::zeros(f, rows.len(), cols.len());
    for (r, &(c, j)) in rows.iter().enumerate() {
        match degs[c] {
            Some(deg) if j + 1 == deg => {
                let d = &factors[c];
                for i in 0..deg {
                    m.set(r, index[&(c, i)], f.neg(d.coeff(i)));
                }
            }
            _ => m.set(r, index[&(c, j + 1)], 1),
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    fn poly(c: &[i64]) -> Poly {
        Poly::from_coeffs(gf2(), c)
    }

    fn hyper(flow: &ProfiniteFlow, k: usize, coord: usize) -> OpenSubspace {
        let mut v = vec![0; flow.dim(k)];
        v[coord] = 1;
        flow.from_constraints(k, &[v]).unwrap()
    }

    #[test]
    fn level_examples() {
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        let l = b.level(3);
        assert_eq!(l.dim, 3);
        assert_eq!(
            l.proj,
            Matrix::from_rows(gf2(), &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]).unwrap()
        );
        assert_eq!(
            l.action,
            Matrix::from_rows(gf2(), &[[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).unwrap()
        );
        assert_eq!(ProfiniteFlow::bernoulli(gf2(), 2).dim(2), 4);
        let a = Matrix::from_rows(gf2(), &[[0, 1], [1, 1]]).unwrap();
        let fd = ProfiniteFlow::findim(a.clone()).unwrap();
        for k in 0..3 {
            let l = fd.level(k);
            assert_eq!(
                (l.dim, &l.proj, &l.action),
                (2, &Matrix::identity(gf2(), 2), &a)
            );
        }
    }

    #[test]
    fn compatibility_holds_for_every_descriptor() {
        let f = gf2();
        let flows = vec![
            ProfiniteFlow::bernoulli(f, 2),
            ProfiniteFlow::dual_of_module(f, &[poly(&[1, 1, 1]), poly(&[0, 0, 1])], 2).unwrap(),
            ProfiniteFlow::findim(Matrix::from_rows(f, &[[1, 1], [0, 1]]).unwrap()).unwrap(),
            ProfiniteFlow::bernoulli(f, 1).power(3).unwrap(),
        ];
        for flow in flows {
            let s = flow.window();
            for k in 0..6 {
                let lhs = flow.level(k).proj.mul(&flow.level(k + 1).action).unwrap();
                let rhs = flow
                    .level(k)
                    .action
                    .mul(&flow.projection(k + s, k + 1 + s))
                    .unwrap();
                assert_eq!(lhs, rhs, "level {k}");
            }
        }
    }

    #[test]
    fn dual_dimensions() {
        let f = gf2();
        let w = ProfiniteFlow::dual_of_module(f, &[poly(&[0, 1])], 2).unwrap();
        for k in 0..6 {
            assert_eq!(w.dim(k), usize::from(k > 0) + 2 * k);
        }
        let t2 = ProfiniteFlow::dual_of_module(f, &[poly(&[0, 0, 1])], 0).unwrap();
        assert_eq!(
            t2.level(2).action,
            Matrix::from_rows(f, &[[0, 1], [0, 0]]).unwrap()
        );
    }

    #[test]
    fn periodic_bernoulli_matches_builtin() {
        let f = gf2();
        let blk = Block {
            dim: 1,
            action: Matrix::from_rows(f, &[[0, 1]]).unwrap(),
        };
        let p = ProfiniteFlow::periodic(f, 1, vec![], vec![blk]).unwrap();
        let b = ProfiniteFlow::bernoulli(f, 1);
        for k in 0..5 {
            assert_eq!(p.level(k).action, b.level(k).action);
        }
        let bad = Block {
            dim: 1,
            action: Matrix::from_rows(f, &[[1]]).unwrap(),
        };
        assert!(ProfiniteFlow::periodic(f, 1, vec![], vec![bad]).is_err());
    }

    #[test]
    fn preimage_endo_examples() {
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        let u = hyper(&b, 1, 0);
        let pre = b.preimage_endo(&u);
        assert_eq!(pre.level(), 2);
        assert!(b.same(&pre, &hyper(&b, 2, 1)));
        let full = b.full();
        assert!(b.same(&b.preimage_endo(&full), &full));
        let id = ProfiniteFlow::findim(Matrix::identity(gf2(), 3)).unwrap();
        let u = id.from_constraints(0, &[vec![1, 1, 0]]).unwrap();
        assert!(id.same(&id.preimage_endo(&u), &u));
    }

    #[test]
    fn cotrajectory_examples() {
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        let c = b.cotrajectory(&hyper(&b, 1, 0), 6);
        assert_eq!(c.quotient_dims(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(c.nonstationary(), Some(true));
        for (n, cn) in c.chain.iter().enumerate() {
            let expect: Vec<Vec<u64>> = (0..=n)
                .map(|i| {
                    let mut v = vec![0; n + 1];
                    v[i] = 1;
                    v
                })
                .collect();
            assert!(b.same(cn, &b.from_constraints(n + 1, &expect).unwrap()));
        }

        let a = Matrix::from_rows(gf2(), &[[0, 1, 0], [0, 0, 1], [1, 0, 0]]).unwrap();
        let fd = ProfiniteFlow::findim(a).unwrap();
        let c = fd.cotrajectory(&fd.from_constraints(0, &[vec![1, 0, 0]]).unwrap(), 10);
        assert!(c.stationary_at.unwrap() <= 4);

        let t2 = ProfiniteFlow::dual_of_module(gf2(), &[poly(&[0, 0, 1])], 0).unwrap();
        let c = t2.cotrajectory(&hyper(&t2, 2, 1), 10);
        assert!(c.stationary_at.unwrap() <= 3);
    }

    #[test]
    fn h_star_examples() {
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        let r = b.h_star(&hyper(&b, 1, 0), 4);
        assert_eq!((r.value, r.status), (1.into(), Status::Exact));
        assert_eq!(b.h_star(&b.full(), 4).value, 0.into());
        let w = ProfiniteFlow::dual_of_module(gf2(), &[], 2).unwrap();
        let u = w.intersect(&[hyper(&w, 1, 0), hyper(&w, 1, 1)]);
        assert_eq!(w.h_star(&u, 4).value, 2.into());
    }

    #[test]
    fn hyperplane_enumeration_is_lexicographic() {
        let b = ProfiniteFlow::bernoulli(gf2(), 2);
        let n = b.hyperplane_normals(1, 100, None);
        assert_eq!(n, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        // level 2 skips the 3 lifted normals out of 15
        let n2 = b.hyperplane_normals(2, 100, None);
        assert_eq!(n2.len(), 12);
        assert!(n2.windows(2).all(|w| w[0] < w[1]));
        assert!(n2.iter().all(|v| v[2..].iter().any(|&x| x != 0)));
        let gf3 = PrimeField::new(3).unwrap();
        assert_eq!(
            ProfiniteFlow::bernoulli(gf3, 2)
                .hyperplane_normals(1, 100, None)
                .len(),
            4
        );
        assert_eq!(b.hyperplane_normals(2, 5, None).len(), 5);
        let s1 = b.hyperplane_normals(3, 7, Some(1));
        assert_eq!(s1, b.hyperplane_normals(3, 7, Some(1)));
        assert!(s1.len() <= 7);
    }

    #[test]
    fn cocyclic_search_examples() {
        let bounds = SearchBounds {
            max_level: 2,
            ..Default::default()
        };
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        let found = b.find_cocyclic_cotrajectories(&bounds);
        assert!(b.same(&found[0], &hyper(&b, 1, 0)));
        let fd = ProfiniteFlow::findim(Matrix::identity(gf2(), 2)).unwrap();
        assert!(fd.find_cocyclic_cotrajectories(&bounds).is_empty());
        let mixed = ProfiniteFlow::dual_of_module(gf2(), &[poly(&[0, 1])], 1).unwrap();
        let found = mixed.find_cocyclic_cotrajectories(&bounds);
        assert!(!found.is_empty());
        // every find involves the free coordinate
        let free0 = mixed.dual_coordinate(1, 1, 0).unwrap();
        assert!(found
            .iter()
            .filter(|u| u.level() == 1)
            .all(|u| u.constraints().basis_vectors()[0][free0] != 0));
    }

    #[test]
    fn conjugacy_examples() {
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        let w = b.bernoulli_conjugacy(&hyper(&b, 1, 0), 5).unwrap();
        assert!(w.verified());
        for (n, e) in w.basis.iter().enumerate() {
            let mut want = vec![0; 5];
            want[n] = 1;
            assert_eq!(e, &want);
        }
        let fd = ProfiniteFlow::findim(Matrix::identity(gf2(), 2)).unwrap();
        let u = fd.from_constraints(0, &[vec![1, 0]]).unwrap();
        assert!(fd.bernoulli_conjugacy(&u, 4).is_err());
        let b2 = ProfiniteFlow::bernoulli(gf2(), 2);
        assert!(b2
            .bernoulli_conjugacy(&hyper(&b2, 1, 0), 6)
            .unwrap()
            .verified());
        assert!(b2
            .bernoulli_conjugacy(&b2.intersect(&[hyper(&b2, 1, 0), hyper(&b2, 1, 1)]), 3)
            .is_err());
    }

    #[test]
    fn coindependence_examples() {
        let b2 = ProfiniteFlow::bernoulli(gf2(), 2);
        let c1 = b2.cotrajectory(&hyper(&b2, 1, 0), 6);
        let c2 = b2.cotrajectory(&hyper(&b2, 1, 1), 6);
        assert!(b2.coindependent_check(&[c1.clone(), c2], 6).holds);
        let dup = b2.coindependent_check(&[c1.clone(), c1.clone()], 6);
        assert!(!dup.holds);
        assert_eq!(dup.failure, Some((0, 1)));
        assert!(b2.coindependent_check(&[c1], 6).holds);
    }

    #[test]
    fn theorem_a_examples() {
        let bounds = SearchBounds::default();
        let b2 = ProfiniteFlow::bernoulli(gf2(), 2);
        let a = b2.theorem_a_witnesses(&bounds);
        assert_eq!(a.witnesses.len(), 2);
        assert_eq!(a.remainder.unwrap().value, 0.into());
        assert!(a.count.is_exact());

        let fd = ProfiniteFlow::findim(Matrix::identity(gf2(), 2)).unwrap();
        assert!(fd.theorem_a_witnesses(&bounds).witnesses.is_empty());

        let mixed = ProfiniteFlow::dual_of_module(gf2(), &[poly(&[0, 0, 1])], 1).unwrap();
        let a = mixed.theorem_a_witnesses(&bounds);
        assert_eq!(a.witnesses.len(), 1);
        assert_eq!(a.count.value, 1.into());
    }

    #[test]
    fn k_max_gives_infinite_lower_bound() {
        let b3 = ProfiniteFlow::bernoulli(gf2(), 3);
        let a = b3.theorem_a_witnesses(&SearchBounds {
            k_max: 2,
            ..Default::default()
        });
        assert_eq!(a.witnesses.len(), 2);
        assert_eq!(
            (a.count.value, a.count.status),
            (EntropyValue::Infinite, Status::LowerBound)
        );
    }

    #[test]
    fn ent_star_examples() {
        let bounds = SearchBounds::default();
        let b = ProfiniteFlow::bernoulli(gf2(), 1)
            .ent_star(Strategy::Both, &bounds)
            .unwrap();
        assert_eq!(b.structural.unwrap().value, 1.into());
        assert_eq!(b.witness.unwrap().value, 1.into());
        let fd = ProfiniteFlow::findim(Matrix::identity(gf2(), 3)).unwrap();
        assert_eq!(
            fd.ent_star(Strategy::Both, &bounds)
                .unwrap()
                .witness
                .unwrap()
                .value,
            0.into()
        );
        let w = ProfiniteFlow::dual_of_module(gf2(), &[poly(&[0, 0, 0, 0, 1])], 3).unwrap();
        let e = w.ent_star(Strategy::Both, &bounds).unwrap();
        assert_eq!(e.structural.unwrap().value, 3.into());
        assert_eq!(e.witness.unwrap().value, 3.into());
    }

    #[test]
    fn d_plus_and_pinsker_examples() {
        let f = gf2();
        let w = ProfiniteFlow::dual_of_module(f, &[poly(&[0, 0, 1])], 1).unwrap();
        let dp = w.d_plus().unwrap();
        for k in 0..5 {
            assert_eq!(dp.flow.dim(k), k);
            assert_eq!(dp.level_subspace(k).dim(), k);
        }
        assert_eq!(w.pinsker_factor().unwrap().dim(0), 2);

        let fd = ProfiniteFlow::findim(Matrix::identity(f, 2)).unwrap();
        assert_eq!(fd.d_plus().unwrap().level_subspace(3).dim(), 0);
        assert_eq!(fd.pinsker_factor().unwrap().dim(0), 2);

        let b = ProfiniteFlow::bernoulli(f, 1);
        assert!(b.d_plus().unwrap().level_subspace(4).is_full());
        assert_eq!(b.pinsker_factor().unwrap().dim(5), 0);
    }

    #[test]
    fn power_flow_scales_entropy() {
        let b = ProfiniteFlow::bernoulli(gf2(), 1);
        for k in 1..=3 {
            let p = b.power(k).unwrap();
            assert_eq!(p.window(), k);
            let a = p.theorem_a_witnesses(&SearchBounds::default());
            assert_eq!(a.count.value, k.into());
        }
    }
}
