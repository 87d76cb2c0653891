//! Algebraic flows: a discrete K-space with an endomorphism, either as a
//! finite-dimensional matrix action or as a K[t]-module with `t` acting.

use crate::error::{Error, Result};
use crate::gfp::{EchelonBuilder, Matrix, PrimeField};
use crate::polymat::{
    module_rank, poly_rank, quotient_presentation, torsion_submodule, ModulePresentation, Poly,
    PolyMatrix, PolyVec, Reducer,
};
use crate::report::{EntropyReport, Status};

#[derive(Clone, Debug)]
pub struct ModuleFlow {
    presentation: ModulePresentation,
    reducer: Reducer,
}

impl ModuleFlow {
    pub fn presentation(&self) -> &ModulePresentation {
        &self.presentation
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }
}

#[derive(Clone, Debug)]
pub enum AlgebraicFlow {
    FinDim(Matrix),
    Module(ModuleFlow),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Vector(Vec<u64>),
    PolyVector(PolyVec),
}

/// A finite-dimensional subspace of W, given by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSubspace {
    pub generators: Vec<Element>,
}

impl FiniteSubspace {
    pub fn new(generators: Vec<Element>) -> Self {
        FiniteSubspace { generators }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// K-basis of `T_n`.
    pub basis: Vec<Element>,
    /// `dim(T_i / T_1)` for `i = 1..=n`.
    pub dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HalgOptions {
    pub horizon: Option<usize>,
    pub patience: Option<usize>,
    /// Evaluate with `ψ^power` in place of `ψ`; `0` is treated as `1`.
    pub power: usize,
}

#[derive(Clone, Debug)]
pub struct PinskerSubflow {
    pub flow: AlgebraicFlow,
    /// Images of the subflow's generators (or basis vectors) in W.
    pub embedding: Vec<Element>,
}

impl AlgebraicFlow {
    pub fn findim(action: Matrix) -> Result<Self> {
        if action.rows() != action.cols() {
            return Err(Error::DimensionMismatch {
                expected: action.rows(),
                found: action.cols(),
            });
        }
        Ok(AlgebraicFlow::FinDim(action))
    }

    pub fn module(presentation: ModulePresentation) -> Self {
        let reducer = presentation.reducer();
        AlgebraicFlow::Module(ModuleFlow {
            presentation,
            reducer,
        })
    }

    pub fn field(&self) -> PrimeField {
        match self {
            AlgebraicFlow::FinDim(m) => m.field(),
            AlgebraicFlow::Module(m) => m.presentation.field(),
        }
    }

    /// Vector length (FinDim) or generator count (Module).
    pub fn width(&self) -> usize {
        match self {
            AlgebraicFlow::FinDim(m) => m.rows(),
            AlgebraicFlow::Module(m) => m.presentation.generators(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AlgebraicFlow::FinDim(m) => m.rows() == 0,
            AlgebraicFlow::Module(m) => {
                let s = m.presentation.smith();
                s.free_rank == 0 && s.factors.iter().all(Poly::is_unit)
            }
        }
    }

    /// The canonical generators: standard basis vectors or module generators.
    pub fn generators(&self) -> Vec<Element> {
        match self {
            AlgebraicFlow::FinDim(m) => (0..m.rows())
                .map(|i| {
                    let mut v = vec![0; m.rows()];
                    v[i] = 1;
                    Element::Vector(v)
                })
                .collect(),
            AlgebraicFlow::Module(m) => (0..m.presentation.generators())
                .map(|i| {
                    Element::PolyVector(m.reducer.canonical(&m.presentation.generator(i)).unwrap())
                })
                .collect(),
        }
    }

    pub fn canonical(&self, e: &Element) -> Result<Element> {
        match (self, e) {
            (AlgebraicFlow::FinDim(m), Element::Vector(v)) => {
                if v.len() != m.rows() {
                    return Err(Error::DimensionMismatch {
                        expected: m.rows(),
                        found: v.len(),
                    });
                }
                let f = m.field();
                Ok(Element::Vector(
                    v.iter().map(|&x| x % f.modulus()).collect(),
                ))
            }
            (AlgebraicFlow::Module(m), Element::PolyVector(v)) => {
                Ok(Element::PolyVector(m.reducer.canonical(v)?))
            }
            _ => Err(Error::Malformed(
                "element kind does not match the flow".into(),
            )),
        }
    }

    pub fn act(&self, e: &Element) -> Result<Element> {
        match (self, e) {
            (AlgebraicFlow::FinDim(m), Element::Vector(v)) => Ok(Element::Vector(m.mul_vec(v)?)),
            (AlgebraicFlow::Module(m), Element::PolyVector(v)) => {
                let shifted: PolyVec = v.iter().map(|p| p.shift(1)).collect();
                Ok(Element::PolyVector(m.reducer.canonical(&shifted)?))
            }
            _ => Err(Error::Malformed(
                "element kind does not match the flow".into(),
            )),
        }
    }

    fn act_pow(&self, e: &Element, k: usize) -> Result<Element> {
        let mut x = e.clone();
        for _ in 0..k {
            x = self.act(&x)?;
        }
        Ok(x)
    }

    /// Coordinates of an element over K; module elements are laid out
    /// degree-major, so lengths vary.
    fn flatten(&self, e: &Element) -> Vec<u64> {
        match e {
            Element::Vector(v) => v.clone(),
            Element::PolyVector(v) => {
                let g = v.len();
                let deg = v.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
                let mut out = vec![0; deg * g];
                for (c, p) in v.iter().enumerate() {
                    for (d, &x) in p.coeffs().iter().enumerate() {
                        out[d * g + c] = x;
                    }
                }
                out
            }
        }
    }

    pub fn trajectory(&self, f: &FiniteSubspace, n: usize) -> Result<Trajectory> {
        self.trajectory_pow(f, n, 1)
    }

    fn trajectory_pow(&self, f: &FiniteSubspace, n: usize, power: usize) -> Result<Trajectory> {
        if n == 0 {
            return Err(Error::Precondition(
                "trajectory length must be positive".into(),
            ));
        }
        let mut builder = EchelonBuilder::new(self.field());
        let mut basis = Vec::new();
        let mut cur: Vec<Element> = f
            .generators
            .iter()
            .map(|e| self.canonical(e))
            .collect::<Result<_>>()?;
        for e in &cur {
            if builder.insert(&self.flatten(e)) {
                basis.push(e.clone());
            }
        }
        let base = builder.rank();
        let mut dims = vec![0];
        for _ in 1..n {
            cur = cur
                .iter()
                .map(|e| self.act_pow(e, power))
                .collect::<Result<_>>()?;
            for e in &cur {
                if builder.insert(&self.flatten(e)) {
                    basis.push(e.clone());
                }
            }
            dims.push(builder.rank() - base);
        }
        Ok(Trajectory { basis, dims })
    }

    /// Upper bound for the stabilized increment: the `K[t]`-rank of the
    /// submodule generated by `f`, times the power.
    fn increment_bound(&self, f: &FiniteSubspace, power: usize) -> Result<usize> {
        match self {
            AlgebraicFlow::FinDim(_) => Ok(0),
            AlgebraicFlow::Module(m) => {
                let field = self.field();
                let g = m.presentation.generators();
                let mut cols = Vec::new();
                for e in &f.generators {
                    match self.canonical(e)? {
                        Element::PolyVector(v) => cols.push(v),
                        Element::Vector(_) => unreachable!(),
                    }
                }
                let gens = PolyMatrix::from_columns(field, g, &cols)?;
                let rel = m.presentation.relations();
                let joint = rel.hconcat(&gens)?;
                Ok(power * (poly_rank(&joint) - poly_rank(rel)))
            }
        }
    }

    fn default_horizon(&self) -> usize {
        match self {
            AlgebraicFlow::FinDim(m) => 4 * (m.rows() + 1),
            AlgebraicFlow::Module(m) => {
                let g = m.presentation.generators().max(1);
                4 * g * (1 + m.presentation.relations().max_degree())
            }
        }
    }

    /// `H(ψ, f)`: the stabilized increment `dim(T_{n+1}/T_n)`.
    pub fn h_alg(&self, f: &FiniteSubspace, opts: HalgOptions) -> Result<EntropyReport> {
        let power = opts.power.max(1);
        let bound = self.increment_bound(f, power)?;
        let first = self.trajectory_pow(f, 2, power)?.dims[1];
        // The limit is `bound`, so a plateau above it is never final; an
        // explicit patience still cuts the run short.
        let patience = opts.patience.map_or(usize::MAX, |p| p.max(2));
        let horizon = opts
            .horizon
            .unwrap_or_else(|| self.default_horizon().max(first + 2))
            .max(opts.patience.unwrap_or(0));
        let traj = self.trajectory_pow(f, horizon + 1, power)?;
        let inc: Vec<usize> = traj.dims.windows(2).map(|w| w[1] - w[0]).collect();

        let mut run = 0;
        for (i, &d) in inc.iter().enumerate() {
            if d == 0 || d == bound {
                return Ok(
                    EntropyReport::exact(d, "trajectory_limit").with_increments(inc[..=i].to_vec())
                );
            }
            run = if i > 0 && inc[i - 1] == d { run + 1 } else { 1 };
            if run >= patience {
                return Ok(
                    EntropyReport::new(d, Status::HorizonLimited, "trajectory_limit")
                        .with_increments(inc[..=i].to_vec()),
                );
            }
        }
        let last = *inc.last().unwrap();
        Ok(
            EntropyReport::new(last, Status::HorizonLimited, "trajectory_limit")
                .with_increments(inc),
        )
    }

    /// `ent(W, ψ)` via the rank formula.
    pub fn ent_alg(&self) -> EntropyReport {
        match self {
            AlgebraicFlow::FinDim(_) => EntropyReport::exact(0, "finite_dimensional"),
            AlgebraicFlow::Module(m) => {
                EntropyReport::exact(module_rank(&m.presentation), "module_rank")
            }
        }
    }

    pub fn pinsker_subflow(&self) -> PinskerSubflow {
        match self {
            AlgebraicFlow::FinDim(_) => PinskerSubflow {
                flow: self.clone(),
                embedding: self.generators(),
            },
            AlgebraicFlow::Module(m) => {
                let t = torsion_submodule(&m.presentation);
                PinskerSubflow {
                    flow: AlgebraicFlow::module(t.presentation),
                    embedding: t.embedding.into_iter().map(Element::PolyVector).collect(),
                }
            }
        }
    }

    /// `F₊ = W / P_alg`.
    pub fn cpa_factor(&self) -> Result<AlgebraicFlow> {
        match self {
            AlgebraicFlow::FinDim(m) => Ok(AlgebraicFlow::FinDim(Matrix::zeros(m.field(), 0, 0))),
            AlgebraicFlow::Module(m) => {
                let t = torsion_submodule(&m.presentation);
                Ok(AlgebraicFlow::module(quotient_presentation(
                    &m.presentation,
                    &t.embedding,
                )?))
            }
        }
    }

    /// Completely positive entropy: the torsion part vanishes.
    pub fn is_cpa(&self) -> bool {
        match self {
            AlgebraicFlow::FinDim(m) => m.rows() == 0,
            AlgebraicFlow::Module(m) => torsion_submodule(&m.presentation).is_zero(),
        }
    }
}
