//! Duality between module flows and their profinite duals, at finite levels.
//!
//! The dual of `W = K[t]^g / R` is built in Smith coordinates: components
//! are the non-unit invariant factors followed by the free generators, and
//! coordinate `(c, j)` of `V_k` is `χ(t^j e_c)`. With this choice the pairing
//! matrix at each level is the identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algflow::{AlgebraicFlow, Element, FiniteSubspace};
use crate::error::{Error, Result};
use crate::gfp::PrimeField;
use crate::polymat::{
    module_rank, quotient_presentation, torsion_submodule, ModulePresentation, Poly, PolyVec,
    SmithForm,
};
use crate::report::EntropyReport;
use crate::topflow::{OpenSubspace, ProfiniteFlow, SearchBounds, Strategy};

#[derive(Clone, Debug)]
pub struct DualityContext {
    original: ModulePresentation,
    smith: SmithForm,
    /// Smith diagonal index of each component.
    components: Vec<usize>,
    factors: Vec<Poly>,
    free: usize,
    module: ModulePresentation,
    flow: ProfiniteFlow,
}

pub fn dual_of_module(w: &ModulePresentation) -> Result<DualityContext> {
    let field = w.field();
    let smith = w.smith();
    let mut components = Vec::new();
    let mut factors = Vec::new();
    for (i, d) in smith.factors.iter().enumerate() {
        if !d.is_unit() {
            components.push(i);
            factors.push(d.clone());
        }
    }
    let free = smith.free_rank;
    components.extend(smith.factors.len()..w.generators());
    let flow = ProfiniteFlow::dual_of_module(field, &factors, free)?;
    Ok(DualityContext {
        original: w.clone(),
        module: ModulePresentation::from_factors(field, &factors, free),
        smith,
        components,
        factors,
        free,
        flow,
    })
}

impl DualityContext {
    pub fn field(&self) -> PrimeField {
        self.original.field()
    }

    pub fn original(&self) -> &ModulePresentation {
        &self.original
    }

    /// `⊕ K[t]/(d_i) ⊕ K[t]^free` in Smith coordinates.
    pub fn module(&self) -> &ModulePresentation {
        &self.module
    }

    pub fn flow(&self) -> &ProfiniteFlow {
        &self.flow
    }

    pub fn factors(&self) -> &[Poly] {
        &self.factors
    }

    pub fn free_rank(&self) -> usize {
        self.free
    }

    pub fn torsion_dim(&self) -> usize {
        self.factors.iter().map(|d| d.degree().unwrap()).sum()
    }

    /// Original generator coordinates to canonical Smith coordinates.
    pub fn to_smith(&self, x: &[Poly]) -> Result<PolyVec> {
        let y = self.smith.u.mul_vec(x)?;
        let comp: PolyVec = self.components.iter().map(|&i| y[i].clone()).collect();
        self.module.reducer().canonical(&comp)
    }

    /// Canonical Smith coordinates back to canonical original coordinates.
    pub fn from_smith(&self, y: &[Poly]) -> Result<PolyVec> {
        let f = self.field();
        let mut full = vec![Poly::zero(f); self.original.generators()];
        for (c, &i) in self.components.iter().enumerate() {
            full[i] = y[c].clone();
        }
        let x = self.smith.u_inv.mul_vec(&full)?;
        self.original.reducer().canonical(&x)
    }

    /// A level-`k` functional as an element of `W` (Smith coordinates).
    pub fn functional_to_element(&self, k: usize, lambda: &[u64]) -> Result<PolyVec> {
        let coords = self.flow.dual_coordinates(k).expect("module dual");
        if lambda.len() != coords.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                found: lambda.len(),
            });
        }
        let mut comps = vec![vec![0u64; k]; self.components.len()];
        for (&(c, j), &x) in coords.iter().zip(lambda) {
            comps[c][j] = x;
        }
        Ok(comps
            .into_iter()
            .map(|v| Poly::from_residues(self.field(), v))
            .collect())
    }

    /// Inverse of [`functional_to_element`]; `None` if the element does not
    /// fit in level `k`.
    ///
    /// [`functional_to_element`]: DualityContext::functional_to_element
    pub fn element_to_functional(&self, k: usize, y: &[Poly]) -> Option<Vec<u64>> {
        let coords = self.flow.dual_coordinates(k).expect("module dual");
        let fits = y.iter().enumerate().all(|(c, p)| {
            p.coeffs().len() <= k
                && self
                    .factors
                    .get(c)
                    .is_none_or(|d| p.coeffs().len() <= d.degree().unwrap())
        });
        fits.then(|| coords.iter().map(|&(c, j)| y[c].coeff(j)).collect())
    }

    /// Smallest level at which every element fits.
    pub fn level_for(&self, elems: &[PolyVec]) -> usize {
        elems
            .iter()
            .flat_map(|y| y.iter().map(|p| p.coeffs().len()))
            .max()
            .unwrap_or(0)
    }

    /// `U^⊥ ⊆ W`, in Smith coordinates.
    pub fn annihilator(&self, u: &OpenSubspace) -> Result<FiniteSubspace> {
        let gens = u
            .constraints()
            .basis_vectors()
            .iter()
            .map(|l| {
                self.functional_to_element(u.level(), l)
                    .map(Element::PolyVector)
            })
            .collect::<Result<_>>()?;
        Ok(FiniteSubspace::new(gens))
    }

    /// `F^⊥ ⊆ V` for `F` in Smith coordinates.
    pub fn co_annihilator(&self, f: &FiniteSubspace) -> Result<OpenSubspace> {
        let reducer = self.module.reducer();
        let mut elems = Vec::new();
        for e in &f.generators {
            match e {
                Element::PolyVector(v) => elems.push(reducer.canonical(v)?),
                Element::Vector(_) => {
                    return Err(Error::Malformed("expected a module element".into()))
                }
            }
        }
        let k = self.level_for(&elems);
        let rows: Vec<Vec<u64>> = elems
            .iter()
            .map(|y| self.element_to_functional(k, y).expect("level fits"))
            .collect();
        self.flow.from_constraints(k, &rows)
    }
}

/// Entropy of `V` restricted to the intersection of the witnesses' cotrajectories:
/// the rank of `W` modulo the submodule generated by their annihilators.
pub fn remainder_entropy(
    field: PrimeField,
    factors: &[Poly],
    free: usize,
    flow: &ProfiniteFlow,
    witnesses: &[OpenSubspace],
) -> EntropyReport {
    let module = ModulePresentation::from_factors(field, factors, free);
    let comps = factors.len() + free;
    let mut gens = Vec::new();
    for u in witnesses {
        let coords = flow.dual_coordinates(u.level()).expect("module dual");
        for l in u.constraints().basis_vectors() {
            let mut c = vec![vec![0u64; u.level()]; comps];
            for (&(ci, j), &x) in coords.iter().zip(&l) {
                c[ci][j] = x;
            }
            gens.push(
                c.into_iter()
                    .map(|v| Poly::from_residues(field, v))
                    .collect::<PolyVec>(),
            );
        }
    }
    let q = quotient_presentation(&module, &gens).expect("generator lengths match");
    EntropyReport::exact(module_rank(&q), "dual_module_rank")
}

#[derive(Clone, Copy, Debug)]
pub struct BridgeBounds {
    /// Sampled open subspaces per flow.
    pub samples: usize,
    /// Stages `n` of the per-U identity.
    pub stages: usize,
    pub seed: u64,
    pub search: SearchBounds,
}

impl Default for BridgeBounds {
    fn default() -> Self {
        BridgeBounds {
            samples: 3,
            stages: 8,
            seed: 0,
            search: SearchBounds {
                stop_at_structural: false,
                ..SearchBounds::default()
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct PerUEvidence {
    pub level: usize,
    pub constraints: Vec<Vec<u64>>,
    /// `dim(U / C_n)`
    pub topological: Vec<usize>,
    /// `dim(T_n(ψ, U^⊥) / U^⊥)`
    pub algebraic: Vec<usize>,
}

impl PerUEvidence {
    pub fn agrees(&self) -> bool {
        self.topological == self.algebraic
    }
}

#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub ent_alg: EntropyReport,
    pub structural: EntropyReport,
    pub witness: EntropyReport,
    pub evidence: Vec<PerUEvidence>,
}

impl BridgeReport {
    pub fn values_equal(&self) -> bool {
        self.ent_alg.value == self.structural.value && self.structural.value == self.witness.value
    }

    pub fn evidence_agrees(&self) -> bool {
        self.evidence.iter().all(PerUEvidence::agrees)
    }

    pub fn holds(&self) -> bool {
        self.values_equal() && self.evidence_agrees()
    }
}

/// Random open subspaces of codimension 1..=3 at levels 1..=2.
pub fn sample_open_subspaces(flow: &ProfiniteFlow, count: usize, seed: u64) -> Vec<OpenSubspace> {
    let f = flow.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 64 * count.max(1) {
        attempts += 1;
        let k = rng.gen_range(1..=2);
        let d = flow.dim(k);
        if d == 0 {
            out.push(flow.full());
            continue;
        }
        let m = rng.gen_range(1..=d.min(3));
        let rows: Vec<Vec<u64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.gen_range(0..f.modulus())).collect())
            .collect();
        let u = flow.from_constraints(k, &rows).expect("row length");
        if u.codim() > 0 {
            out.push(u);
        }
    }
    out
}

/// `dim(U/C_n) = dim(T_n(ψ,U^⊥)/U^⊥)` with the algebraic side computed in
/// the original presentation.
pub fn per_u_evidence(
    ctx: &DualityContext,
    u: &OpenSubspace,
    stages: usize,
) -> Result<PerUEvidence> {
    let flow = ctx.flow();
    let c = flow.cotrajectory(u, stages);
    let mut topological: Vec<usize> = c.quotient_dims();
    let last = *topological.last().unwrap();
    topological.resize(stages, last);
    topological.truncate(stages);

    let ann = ctx.annihilator(u)?;
    let gens = ann
        .generators
        .iter()
        .map(|e| match e {
            Element::PolyVector(y) => ctx.from_smith(y).map(Element::PolyVector),
            Element::Vector(_) => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    let w = AlgebraicFlow::module(ctx.original().clone());
    let algebraic = if gens.is_empty() {
        vec![0; stages]
    } else {
        w.trajectory(&FiniteSubspace::new(gens), stages)?.dims
    };
    Ok(PerUEvidence {
        level: u.level(),
        constraints: u.constraints().basis_vectors(),
        topological,
        algebraic,
    })
}

pub fn bridge_check(w: &ModulePresentation, bounds: &BridgeBounds) -> Result<BridgeReport> {
    let ctx = dual_of_module(w)?;
    let ent_alg = AlgebraicFlow::module(w.clone()).ent_alg();
    let star = ctx.flow().ent_star(Strategy::Both, &bounds.search)?;
    let evidence = sample_open_subspaces(ctx.flow(), bounds.samples, bounds.seed)
        .iter()
        .map(|u| per_u_evidence(&ctx, u, bounds.stages))
        .collect::<Result<_>>()?;
    Ok(BridgeReport {
        ent_alg,
        structural: star.structural.expect("module duals carry structure"),
        witness: star.witness.expect("witness pipeline requested"),
        evidence,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelComparison {
    pub level: usize,
    pub d_plus_dim: usize,
    pub annihilator_dim: usize,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct TheoremBReport {
    pub levels: Vec<LevelComparison>,
    pub pinsker_dim: usize,
    pub torsion_dim: usize,
    pub is_cpa: bool,
    pub d_plus_is_whole: bool,
}

impl TheoremBReport {
    pub fn levels_match(&self) -> bool {
        self.levels.iter().all(|l| l.equal)
    }

    pub fn holds(&self) -> bool {
        self.levels_match()
            && self.pinsker_dim == self.torsion_dim
            && self.is_cpa == self.d_plus_is_whole
    }
}

/// `D₊` against the annihilator of the torsion submodule, level by level.
pub fn theorem_b_check(w: &ModulePresentation, level_bound: usize) -> Result<TheoremBReport> {
    let ctx = dual_of_module(w)?;
    let flow = ctx.flow();
    let alg = AlgebraicFlow::module(w.clone());
    let tors = torsion_submodule(w);
    let torsion_dim = tors.k_dim();

    // K-basis of the torsion submodule, mapped into Smith coordinates
    let gens: Vec<Element> = tors
        .embedding
        .iter()
        .cloned()
        .map(Element::PolyVector)
        .collect();
    let basis = if gens.is_empty() {
        Vec::new()
    } else {
        alg.trajectory(&FiniteSubspace::new(gens), torsion_dim + 1)?
            .basis
    };
    let smith_basis = basis
        .iter()
        .map(|e| match e {
            Element::PolyVector(x) => ctx.to_smith(x).map(Element::PolyVector),
            Element::Vector(_) => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    let ann = ctx.co_annihilator(&FiniteSubspace::new(smith_basis))?;

    let dp = flow.d_plus()?;
    let levels = (0..=level_bound)
        .map(|k| {
            let a = dp.level_subspace(k);
            let b = flow.image_at(&ann, k);
            LevelComparison {
                level: k,
                d_plus_dim: a.dim(),
                annihilator_dim: b.dim(),
                equal: a == b,
            }
        })
        .collect();
    let pinsker_dim = flow.pinsker_factor()?.dim(0);
    let top = level_bound.max(1);
    Ok(TheoremBReport {
        levels,
        pinsker_dim,
        torsion_dim,
        is_cpa: alg.is_cpa(),
        d_plus_is_whole: dp.level_subspace(top).is_full(),
    })
}

#[derive(Clone, Debug)]
pub struct ZeroEntropyReport {
    pub ent_alg: EntropyReport,
    pub ent_star: EntropyReport,
}

impl ZeroEntropyReport {
    pub fn consistent(&self) -> bool {
        self.ent_alg.value.is_zero() == self.ent_star.value.is_zero()
    }
}

pub fn zero_entropy_duality_check(
    w: &ModulePresentation,
    bounds: &SearchBounds,
) -> Result<ZeroEntropyReport> {
    let ctx = dual_of_module(w)?;
    let star = ctx.flow().ent_star(Strategy::Witness, bounds)?;
    Ok(ZeroEntropyReport {
        ent_alg: AlgebraicFlow::module(w.clone()).ent_alg(),
        ent_star: star.witness.expect("witness pipeline requested"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::Matrix;
    use crate::polymat::PolyMatrix;

    fn gf2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    fn poly(c: &[i64]) -> Poly {
        Poly::from_coeffs(gf2(), c)
    }

    fn factors(fs: &[&[i64]], free: usize) -> ModulePresentation {
        let p: Vec<Poly> = fs.iter().map(|c| poly(c)).collect();
        ModulePresentation::from_factors(gf2(), &p, free)
    }

    #[test]
    fn dual_construction_examples() {
        let kt = dual_of_module(&factors(&[], 1)).unwrap();
        assert_eq!(
            (0..5).map(|k| kt.flow().dim(k)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4]
        );
        let t2 = dual_of_module(&factors(&[&[0, 0, 1]], 0)).unwrap();
        assert_eq!(
            t2.flow().level(2).action,
            Matrix::from_rows(gf2(), &[[0, 1], [0, 0]]).unwrap()
        );
        let mixed = dual_of_module(&factors(&[&[0, 1]], 2)).unwrap();
        for k in 1..5 {
            assert_eq!(mixed.flow().dim(k), 1 + 2 * k);
        }
    }

    #[test]
    fn level_maps_are_transposed_module_actions() {
        let w = factors(&[&[1, 1, 1], &[0, 1]], 1);
        let ctx = dual_of_module(&w).unwrap();
        let alg = AlgebraicFlow::module(ctx.module().clone());
        for k in 0..5 {
            let d = ctx.flow().dim(k);
            let m = &ctx.flow().level(k).action;
            for i in 0..d {
                let mut e = vec![0; d];
                e[i] = 1;
                let Element::PolyVector(y) = alg
                    .act(&Element::PolyVector(
                        ctx.functional_to_element(k, &e).unwrap(),
                    ))
                    .unwrap()
                else {
                    unreachable!()
                };
                let col = ctx.element_to_functional(k + 1, &y).unwrap();
                let want: Vec<u64> = (0..ctx.flow().dim(k + 1))
                    .map(|r| m.transpose().get(r, i))
                    .collect();
                assert_eq!(col, want, "level {k} coordinate {i}");
            }
        }
    }

    #[test]
    fn pairing_round_trip() {
        let ctx = dual_of_module(&factors(&[&[0, 0, 1]], 2)).unwrap();
        for k in 0..4 {
            let d = ctx.flow().dim(k);
            for i in 0..d {
                let mut e = vec![0; d];
                e[i] = 1;
                let y = ctx.functional_to_element(k, &e).unwrap();
                assert_eq!(ctx.element_to_functional(k, &y).unwrap(), e);
            }
        }
    }

    #[test]
    fn annihilator_examples() {
        let ctx = dual_of_module(&factors(&[], 1)).unwrap();
        let u = ctx.flow().from_constraints(1, &[vec![1]]).unwrap();
        let f = ctx.annihilator(&u).unwrap();
        assert_eq!(f.generators, vec![Element::PolyVector(vec![poly(&[1])])]);
        assert!(ctx.flow().same(&ctx.co_annihilator(&f).unwrap(), &u));
        assert!(ctx
            .annihilator(&ctx.flow().full())
            .unwrap()
            .generators
            .is_empty());
        let ctx2 = dual_of_module(&factors(&[], 2)).unwrap();
        let u2 = ctx2
            .flow()
            .from_constraints(1, &[vec![1, 0], vec![0, 1]])
            .unwrap();
        assert_eq!(ctx2.annihilator(&u2).unwrap().generators.len(), 2);
    }

    #[test]
    fn annihilator_reverses_inclusion() {
        let ctx = dual_of_module(&factors(&[&[0, 1]], 1)).unwrap();
        let flow = ctx.flow();
        let a = flow.from_constraints(2, &[vec![1, 1, 0]]).unwrap();
        let b = flow
            .from_constraints(2, &[vec![1, 1, 0], vec![0, 0, 1]])
            .unwrap();
        assert!(flow.contains(&a, &b));
        let fa = ctx.annihilator(&a).unwrap().generators.len();
        let fb = ctx.annihilator(&b).unwrap().generators.len();
        assert!(fa < fb);
        assert!(flow.same(
            &ctx.co_annihilator(&ctx.annihilator(&b).unwrap()).unwrap(),
            &b
        ));
    }

    #[test]
    fn smith_coordinate_round_trip() {
        let f = gf2();
        let rel =
            PolyMatrix::from_coeff_rows(f, &[vec![vec![0, 1], vec![1]], vec![vec![], vec![0, 1]]])
                .unwrap();
        let w = ModulePresentation::new(f, 2, rel).unwrap();
        let ctx = dual_of_module(&w).unwrap();
        let x = vec![poly(&[1, 1]), poly(&[0, 1])];
        let y = ctx.to_smith(&x).unwrap();
        let back = ctx.from_smith(&y).unwrap();
        assert_eq!(back, w.reducer().canonical(&x).unwrap());
    }

    #[test]
    fn bridge_examples() {
        let f = gf2();
        let rel = PolyMatrix::from_coeff_rows(f, &[vec![vec![0, 1]], vec![vec![]]]).unwrap();
        let w = ModulePresentation::new(f, 2, rel).unwrap();
        let r = bridge_check(&w, &BridgeBounds::default()).unwrap();
        assert_eq!(r.ent_alg.value, 1.into());
        assert!(r.holds(), "{r:?}");
        let zero = ModulePresentation::free(f, 0);
        let r = bridge_check(&zero, &BridgeBounds::default()).unwrap();
        assert!(r.holds());
        assert_eq!(r.witness.value, 0.into());
        let r = bridge_check(&ModulePresentation::free(f, 3), &BridgeBounds::default()).unwrap();
        assert_eq!(r.structural.value, 3.into());
        assert!(r.holds());
    }

    #[test]
    fn theorem_b_examples() {
        let r = theorem_b_check(&factors(&[&[0, 0, 1]], 1), 8).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.pinsker_dim, 2);
        let r = theorem_b_check(&factors(&[&[0, 0, 1]], 0), 8).unwrap();
        assert!(r.holds());
        assert!(r.levels.iter().all(|l| l.d_plus_dim == 0));
        let r = theorem_b_check(&factors(&[], 2), 8).unwrap();
        assert!(r.holds());
        assert!(r.d_plus_is_whole);
        assert_eq!(r.pinsker_dim, 0);
    }

    #[test]
    fn zero_entropy_examples() {
        let b = SearchBounds::default();
        let r = zero_entropy_duality_check(&factors(&[&[0, 0, 0, 1]], 0), &b).unwrap();
        assert!(r.consistent() && r.ent_alg.value.is_zero());
        let r = zero_entropy_duality_check(&factors(&[], 1), &b).unwrap();
        assert!(r.consistent() && r.ent_star.value == 1.into());
    }
}
