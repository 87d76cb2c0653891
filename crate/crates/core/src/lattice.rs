//! Finite modular lattices of invariant subspaces, coindependence, and the
//! (dual) Goldie dimension.

use std::collections::HashMap;

use crate::algflow::AlgebraicFlow;
use crate::error::{Error, Result};
use crate::gfp::{Matrix, PrimeField, Subspace};
use crate::polymat::{module_rank, ModulePresentation};
use crate::report::{EntropyReport, EntropyValue, Status, Witness};
use crate::topflow::{Descriptor, ProfiniteFlow, SearchBounds};

/// Largest ambient dimension for exhaustive enumeration.
pub const MAX_ENUM_DIM: usize = 6;

/// Element indices with join, meet, order, and a rank function.
pub trait ModularLattice {
    fn size(&self) -> usize;
    fn top(&self) -> usize;
    fn bottom(&self) -> usize;
    fn join(&self, a: usize, b: usize) -> usize;
    fn meet(&self, a: usize, b: usize) -> usize;
    fn leq(&self, a: usize, b: usize) -> bool;
    fn rank(&self, a: usize) -> usize;
}

#[derive(Clone, Debug)]
pub struct FiniteLattice {
    field: PrimeField,
    ambient: usize,
    elements: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

impl FiniteLattice {
    /// Checks closure under sum and intersection.
    pub fn from_elements(
        field: PrimeField,
        ambient: usize,
        mut elements: Vec<Subspace>,
    ) -> Result<Self> {
        elements.sort_by_key(|a| (a.dim(), a.basis_vectors()));
        elements.dedup();
        let index: HashMap<Subspace, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let l = FiniteLattice {
            field,
            ambient,
            elements,
            index,
        };
        if !l.index.contains_key(&Subspace::zero(field, ambient))
            || !l.index.contains_key(&Subspace::full(field, ambient))
        {
            return Err(Error::Malformed(
                "lattice must contain 0 and the whole space".into(),
            ));
        }
        for a in &l.elements {
            for b in &l.elements {
                if !l.index.contains_key(&a.sum(b)?) || !l.index.contains_key(&a.intersect(b)?) {
                    return Err(Error::Malformed(
                        "element set is not closed under sum and intersection".into(),
                    ));
                }
            }
        }
        Ok(l)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Subspace {
        &self.elements[i]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }
}

impl ModularLattice for FiniteLattice {
    fn size(&self) -> usize {
        self.elements.len()
    }

    fn top(&self) -> usize {
        self.elements.len() - 1
    }

    fn bottom(&self) -> usize {
        0
    }

    fn join(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].sum(&self.elements[b]).unwrap()]
    }

    fn meet(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].intersect(&self.elements[b]).unwrap()]
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.elements[b].contains_subspace(&self.elements[a])
    }

    fn rank(&self, a: usize) -> usize {
        self.elements[a].dim()
    }
}

/// The order-reversed lattice.
pub struct Opposite<'a, L>(pub &'a L);

impl<L: ModularLattice> ModularLattice for Opposite<'_, L> {
    fn size(&self) -> usize {
        self.0.size()
    }

    fn top(&self) -> usize {
        self.0.bottom()
    }

    fn bottom(&self) -> usize {
        self.0.top()
    }

    fn join(&self, a: usize, b: usize) -> usize {
        self.0.meet(a, b)
    }

    fn meet(&self, a: usize, b: usize) -> usize {
        self.0.join(a, b)
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.0.leq(b, a)
    }

    fn rank(&self, a: usize) -> usize {
        self.0.rank(self.0.top()) - self.0.rank(a)
    }
}

/// Every subspace of `K^d`, by reduced echelon pattern.
fn all_subspaces(field: PrimeField, d: usize) -> Vec<Subspace> {
    let q = field.modulus();
    let mut out = Vec::new();
    for mask in 0u32..(1 << d) {
        let pivots: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                (p + 1..d)
                    .filter(|c| mask & (1 << c) == 0)
                    .map(move |c| (r, c))
            })
            .collect();
        let mut digits = vec![0u64; free.len()];
        loop {
            let mut m = Matrix::zeros(field, pivots.len(), d);
            for (r, &p) in pivots.iter().enumerate() {
                m.set(r, p, 1);
            }
            for (&(r, c), &x) in free.iter().zip(&digits) {
                m.set(r, c, x);
            }
            out.push(Subspace::from_echelon_unchecked(m));
            let mut carry = true;
            for x in digits.iter_mut().rev() {
                *x += 1;
                if *x < q {
                    carry = false;
                    break;
                }
                *x = 0;
            }
            if carry {
                break;
            }
        }
    }
    out
}

/// All subspaces `S` with `A S ⊆ S`.
pub fn invariant_subspaces_of(action: &Matrix) -> Result<FiniteLattice> {
    let f = action.field();
    let d = action.rows();
    if action.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: action.cols(),
        });
    }
    if f.modulus() > 3 || d > MAX_ENUM_DIM {
        return Err(Error::CapExceeded(format!(
            "exhaustive enumeration needs GF(2) or GF(3) and dimension <= {MAX_ENUM_DIM}, got GF({}) and {d}",
            f.modulus()
        )));
    }
    let mut elements: Vec<Subspace> = all_subspaces(f, d)
        .into_iter()
        .filter(|s| s.contains_subspace(&s.image(action).unwrap()))
        .collect();
    elements.sort_by_key(|a| (a.dim(), a.basis_vectors()));
    let index = elements
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    Ok(FiniteLattice {
        field: f,
        ambient: d,
        elements,
        index,
    })
}

pub fn invariant_subspaces(flow: &AlgebraicFlow) -> Result<FiniteLattice> {
    match flow {
        AlgebraicFlow::FinDim(a) => invariant_subspaces_of(a),
        AlgebraicFlow::Module(_) => Err(Error::Unsupported(
            "lattice enumeration needs a finite-dimensional flow".into(),
        )),
    }
}

fn meet_all<L: ModularLattice>(l: &L, items: impl IntoIterator<Item = usize>) -> usize {
    items.into_iter().fold(l.top(), |m, a| l.meet(m, a))
}

/// `a_i ∨ ⋀_{j≠i} a_j = 1` for every `i`.
pub fn is_coindependent<L: ModularLattice>(l: &L, family: &[usize]) -> Result<bool> {
    if family.contains(&l.top()) {
        return Err(Error::Precondition(
            "coindependent families consist of proper elements".into(),
        ));
    }
    Ok((0..family.len()).all(|i| {
        let rest = meet_all(
            l,
            family
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &a)| a),
        );
        l.join(family[i], rest) == l.top()
    }))
}

/// `a ∨ b ≠ 1` for every `b ≠ 1`.
pub fn is_superfluous<L: ModularLattice>(l: &L, a: usize) -> bool {
    (0..l.size()).all(|b| b == l.top() || l.join(a, b) != l.top())
}

/// Every element of `[a, 1)` is superfluous in `[a, 1]`; false when `a = 1`.
pub fn is_couniform<L: ModularLattice>(l: &L, a: usize) -> bool {
    if a == l.top() {
        return false;
    }
    let interval: Vec<usize> = (0..l.size())
        .filter(|&b| l.leq(a, b) && b != l.top())
        .collect();
    interval
        .iter()
        .all(|&b| interval.iter().all(|&c| l.join(b, c) != l.top()))
}

pub fn couniform_elements<L: ModularLattice>(l: &L) -> Vec<usize> {
    (0..l.size()).filter(|&a| is_couniform(l, a)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldieResult {
    pub value: usize,
    pub family: Vec<usize>,
}

/// Maximal coindependent family, by depth-first search over proper elements
/// ordered by corank. Families extend one element at a time through
/// `b ∨ ⋀F = 1`; the corank of the running meet bounds the remaining depth.
pub fn dual_goldie_dim<L: ModularLattice>(l: &L) -> GoldieResult {
    let top = l.top();
    let mut cands: Vec<usize> = (0..l.size()).filter(|&a| a != top).collect();
    cands.sort_by_key(|&a| (l.rank(top) - l.rank(a), a));
    let mut best = GoldieResult {
        value: 0,
        family: Vec::new(),
    };
    let mut family = Vec::new();
    dfs(l, &cands, 0, top, &mut family, &mut best);
    best
}

fn dfs<L: ModularLattice>(
    l: &L,
    cands: &[usize],
    from: usize,
    meet: usize,
    family: &mut Vec<usize>,
    best: &mut GoldieResult,
) {
    if family.len() > best.value {
        *best = GoldieResult {
            value: family.len(),
            family: family.clone(),
        };
    }
    let room = l.rank(meet) - l.rank(l.bottom());
    if family.len() + room <= best.value {
        return;
    }
    for i in from..cands.len() {
        let b = cands[i];
        if l.join(b, meet) != l.top() {
            continue;
        }
        family.push(b);
        dfs(l, cands, i + 1, l.meet(meet, b), family, best);
        family.pop();
    }
}

pub fn goldie_dim<L: ModularLattice>(l: &L) -> GoldieResult {
    dual_goldie_dim(&Opposite(l))
}

/// A coindependent family of couniform elements whose meet is superfluous;
/// its size equals the dual Goldie dimension.
pub fn couniform_certificate<L: ModularLattice>(l: &L) -> Option<Vec<usize>> {
    let cands = couniform_elements(l);
    let mut family = Vec::new();
    search_certificate(l, &cands, 0, l.top(), &mut family)
}

fn search_certificate<L: ModularLattice>(
    l: &L,
    cands: &[usize],
    from: usize,
    meet: usize,
    family: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if is_superfluous(l, meet) {
        return Some(family.clone());
    }
    for i in from..cands.len() {
        let b = cands[i];
        if l.join(b, meet) != l.top() {
            continue;
        }
        family.push(b);
        if let Some(found) = search_certificate(l, cands, i + 1, l.meet(meet, b), family) {
            return Some(found);
        }
        family.pop();
    }
    None
}

#[derive(Clone, Debug)]
pub struct CorankReport {
    pub value: EntropyValue,
    pub status: Status,
    /// Route that produced `value`: exhaustive, dual_rank or witness_search.
    pub method: String,
    pub witness: Vec<Witness>,
    pub dual_rank: Option<EntropyReport>,
    pub witness_search: Option<EntropyReport>,
    pub exhaustive: Option<EntropyReport>,
}

impl CorankReport {
    /// Exact routes agree with each other and no route exceeds an exact value.
    pub fn consistent(&self) -> bool {
        let routes = [&self.dual_rank, &self.witness_search, &self.exhaustive];
        let exact: Vec<EntropyValue> = routes
            .iter()
            .filter_map(|r| r.as_ref())
            .filter(|r| r.is_exact())
            .map(|r| r.value)
            .collect();
        let agree = exact.windows(2).all(|w| w[0] == w[1]);
        let bounded = match exact.first() {
            Some(&v) => routes
                .iter()
                .filter_map(|r| r.as_ref())
                .all(|r| match r.value {
                    EntropyValue::Infinite => false,
                    x => x <= v,
                }),
            None => true,
        };
        agree && bounded
    }
}

/// `cork(V, φ)`: dual Goldie dimension of the invariant lattice of `D₊`.
pub fn cork(flow: &ProfiniteFlow, bounds: &SearchBounds) -> Result<CorankReport> {
    let dp = flow.d_plus()?;
    let dual_rank = match flow.descriptor() {
        Descriptor::DualOfModule { free, .. } => {
            let torsion_free = ModulePresentation::free(flow.field(), *free);
            Some(EntropyReport::exact(
                module_rank(&torsion_free),
                "dual_rank",
            ))
        }
        Descriptor::Bernoulli { copies } => Some(EntropyReport::exact(*copies, "dual_rank")),
        Descriptor::FinDim { .. } => Some(EntropyReport::exact(0, "dual_rank")),
        _ => None,
    };
    let a = dp.flow.theorem_a_witnesses(bounds);
    let witness = a.count.witnesses.clone();
    let witness_search = Some(EntropyReport {
        provenance: "witness_search".into(),
        ..a.count
    });
    let exhaustive = match dp.flow.descriptor() {
        Descriptor::FinDim { action } => {
            let l = invariant_subspaces_of(action)?;
            Some(EntropyReport::exact(
                dual_goldie_dim(&l).value,
                "exhaustive",
            ))
        }
        _ => None,
    };
    let primary = exhaustive
        .clone()
        .or_else(|| dual_rank.clone())
        .or_else(|| witness_search.clone())
        .unwrap();
    Ok(CorankReport {
        value: primary.value,
        status: primary.status,
        method: primary.provenance.clone(),
        witness,
        dual_rank,
        witness_search,
        exhaustive,
    })
}
