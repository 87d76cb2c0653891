use linflow::algflow::{AlgebraicFlow, Element, FiniteSubspace, HalgOptions};
use linflow::corpus::{self, CorpusParams};
use linflow::duality;
use linflow::gfp::{preimage, Matrix, PrimeField, Subspace};
use linflow::lattice::{self, ModularLattice};
use linflow::polymat::{
    canonical_form, hermite_form, module_rank, poly_rank, smith_form, torsion_submodule,
    ModulePresentation, Poly, PolyMatrix,
};
use linflow::topflow::{OpenSubspace, ProfiniteFlow, SearchBounds};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn field() -> impl Strategy<Value = PrimeField> {
    prop_oneof![Just(gf(2)), Just(gf(3)), Just(gf(5))]
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    field().prop_flat_map(move |f| {
        prop::collection::vec(prop::collection::vec(0..f.modulus(), cols), rows)
            .prop_map(move |r| Matrix::from_residue_rows(f, cols, &r))
    })
}

fn subspace_in(f: PrimeField, d: usize) -> impl Strategy<Value = Subspace> {
    prop::collection::vec(prop::collection::vec(0..f.modulus(), d), 0..=d)
        .prop_map(move |r| Subspace::span(f, d, &r))
}

/// A presentation drawn from the seeded corpus generator.
fn presentation() -> impl Strategy<Value = ModulePresentation> {
    (any::<u64>(), prop::bool::ANY).prop_map(|(seed, two)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        corpus::random_presentation(
            &mut rng,
            gf(if two { 2 } else { 3 }),
            &CorpusParams::default(),
        )
    })
}

fn poly_matrix(max_dim: usize, max_deg: usize) -> impl Strategy<Value = PolyMatrix> {
    (any::<u64>(), 1..=max_dim, 1..=max_dim, prop::bool::ANY).prop_map(move |(seed, r, c, two)| {
        let f = gf(if two { 2 } else { 3 });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PolyMatrix::from_fn(f, r, c, |_, _| corpus::random_poly(&mut rng, f, max_deg))
    })
}

fn dual_flow(w: &ModulePresentation) -> ProfiniteFlow {
    duality::dual_of_module(w).unwrap().flow().clone()
}

fn random_hyperplane(
    flow: &ProfiniteFlow,
    rng: &mut ChaCha8Rng,
    max_level: usize,
) -> Option<OpenSubspace> {
    let k = rng.gen_range(1..=max_level);
    let d = flow.dim(k);
    let p = flow.field().modulus();
    let row: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
    if row.iter().all(|&x| x == 0) {
        return None;
    }
    flow.from_constraints(k, &[row]).ok()
}

// gfp

proptest! {
    #[test]
    fn rref_is_idempotent(m in matrix(4, 5)) {
        let once = m.rref().echelon;
        prop_assert_eq!(once.rref().echelon, once.clone());
    }

    #[test]
    fn preimage_maps_into_target(m in matrix(4, 4), seed in any::<u64>()) {
        let f = m.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u64>> = (0..rng.gen_range(0..=4))
            .map(|_| (0..4).map(|_| rng.gen_range(0..f.modulus())).collect())
            .collect();
        let s = Subspace::span(f, 4, &rows);
        let pre = preimage(&m, &s).unwrap();
        for v in pre.basis_vectors() {
            prop_assert!(s.contains(&m.mul_vec(&v).unwrap()));
        }
        // dim m^{-1}(s) = dim ker m + dim(s ∩ im m)
        let image = m.column_space();
        prop_assert_eq!(pre.dim(), m.kernel().dim() + s.intersect(&image).unwrap().dim());
    }

    #[test]
    fn modular_law_and_dimension_formula(
        (x, a, b) in field().prop_flat_map(|f| (subspace_in(f, 5), subspace_in(f, 5), subspace_in(f, 5)))
    ) {
        let x = x.intersect(&b).unwrap();
        let lhs = x.sum(&a.intersect(&b).unwrap()).unwrap();
        let rhs = x.sum(&a).unwrap().intersect(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
        let s = a.sum(&b).unwrap();
        let m = a.intersect(&b).unwrap();
        prop_assert_eq!(a.dim() + b.dim(), s.dim() + m.dim());
    }
}

// polymat

proptest! {
    #[test]
    fn hermite_preserves_column_span(a in poly_matrix(3, 3)) {
        let hf = hermite_form(&a);
        prop_assert_eq!(a.mul(&hf.transform).unwrap(), hf.h.clone());
        for col in a.columns() {
            prop_assert!(hf.reduce(&col).iter().all(Poly::is_zero));
        }
        for col in hf.h.columns() {
            prop_assert!(hf.reduce(&col).iter().all(Poly::is_zero));
        }
        for k in hf.kernel_basis() {
            prop_assert!(a.mul_vec(&k).unwrap().iter().all(Poly::is_zero));
        }
    }

    #[test]
    fn smith_contracts(a in poly_matrix(4, 2)) {
        let s = smith_form(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.diagonal.clone());
        for w in s.factors.windows(2) {
            prop_assert!(w[0].divides(&w[1]));
        }
        for d in &s.factors {
            prop_assert_eq!(d.leading(), 1);
        }
        prop_assert_eq!(s.free_rank, a.rows() - s.factors.len());
        prop_assert_eq!(s.u.mul(&s.u_inv).unwrap(), PolyMatrix::identity(a.field(), a.rows()));
    }

    #[test]
    fn rank_plus_torsion_count_is_generator_count(w in presentation()) {
        let s = w.smith();
        prop_assert_eq!(module_rank(&w) + s.factors.len(), w.generators());
        prop_assert_eq!(s.factors.len(), poly_rank(w.relations()));
        let t = torsion_submodule(&w);
        prop_assert_eq!(t.factors.len(), s.factors.iter().filter(|d| !d.is_unit()).count());
    }

    #[test]
    fn canonical_form_is_idempotent(w in presentation(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = corpus::random_element(&mut rng, w.field(), w.generators(), 6);
        let c = canonical_form(&v, &w).unwrap();
        prop_assert_eq!(canonical_form(&c, &w).unwrap(), c);
    }
}

// algflow

proptest! {
    #[test]
    fn trajectory_increments_do_not_increase(w in presentation(), seed in any::<u64>()) {
        let f = w.field();
        let flow = AlgebraicFlow::module(w.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = (0..rng.gen_range(1..=2))
            .map(|_| Element::PolyVector(corpus::random_element(&mut rng, f, w.generators(), 2)))
            .collect();
        let tr = flow.trajectory(&FiniteSubspace::new(gens), 10).unwrap();
        let deltas: Vec<usize> = tr.dims.windows(2).map(|d| d[1] - d[0]).collect();
        prop_assert!(deltas.windows(2).all(|d| d[1] <= d[0]), "{:?}", deltas);
    }

    #[test]
    fn findim_trajectory_increments_do_not_increase(a in matrix(5, 5), seed in any::<u64>()) {
        let f = a.field();
        let flow = AlgebraicFlow::findim(a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<u64> = (0..5).map(|_| rng.gen_range(0..f.modulus())).collect();
        let tr = flow.trajectory(&FiniteSubspace::new(vec![Element::Vector(v)]), 8).unwrap();
        let deltas: Vec<usize> = tr.dims.windows(2).map(|d| d[1] - d[0]).collect();
        prop_assert!(deltas.windows(2).all(|d| d[1] <= d[0]));
        prop_assert!(tr.dims.last().copied().unwrap_or(0) <= 5);
    }

    #[test]
    fn generator_span_h_alg_matches_rank(w in presentation()) {
        let flow = AlgebraicFlow::module(w.clone());
        let r = flow.h_alg(&FiniteSubspace::new(flow.generators()), HalgOptions::default()).unwrap();
        prop_assert_eq!(r.value, flow.ent_alg().value);
    }

    #[test]
    fn pinsker_is_idempotent(w in presentation()) {
        let p = AlgebraicFlow::module(w).pinsker_subflow();
        let pp = p.flow.pinsker_subflow();
        match (&p.flow, &pp.flow) {
            (AlgebraicFlow::Module(a), AlgebraicFlow::Module(b)) => {
                prop_assert_eq!(a.presentation(), b.presentation());
                prop_assert!(torsion_submodule(b.presentation()).k_dim() == torsion_submodule(a.presentation()).k_dim());
            }
            _ => prop_assert!(false, "module flows expected"),
        }
        prop_assert!(p.flow.ent_alg().value.is_zero());
    }
}

// topflow

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cotrajectory_increments_do_not_increase(w in presentation(), seed in any::<u64>()) {
        let flow = dual_flow(&w);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..3 {
            let k = rng.gen_range(1..=3);
            let d = flow.dim(k);
            let rows: Vec<Vec<u64>> = (0..rng.gen_range(1..=2))
                .map(|_| (0..d).map(|_| rng.gen_range(0..flow.field().modulus())).collect())
                .collect();
            let Ok(u) = flow.from_constraints(k, &rows) else { continue };
            let c = flow.cotrajectory(&u, 10);
            let inc = c.increments();
            prop_assert!(inc.windows(2).all(|x| x[1] <= x[0]), "{:?}", inc);
            for pair in c.chain.windows(2) {
                prop_assert!(flow.contains(&pair[0], &pair[1]));
            }
        }
    }

    #[test]
    fn lemma_package_and_theta_isomorphism(w in presentation()) {
        let flow = dual_flow(&w);
        let a = flow.theorem_a_witnesses(&SearchBounds::default());
        for u in &a.witnesses {
            let c = flow.cotrajectory(u, 10);
            for (n, stage) in c.chain.iter().enumerate() {
                prop_assert_eq!(stage.codim(), n + 1);
            }
            let pre = flow.preimage_functionals(u, 10).unwrap();
            let opens: Vec<OpenSubspace> = pre
                .iter()
                .enumerate()
                .map(|(n, l)| flow.from_constraints(u.level() + n, std::slice::from_ref(l)).unwrap())
                .collect();
            prop_assert!(opens.iter().all(|o| o.codim() == 1));
            prop_assert!(flow.open_family_coindependent(&opens));
            prop_assert_eq!(flow.h_star(u, 10).value, 1.into());
        }
    }

    #[test]
    fn coindependent_families_are_bounded_by_entropy(w in presentation(), seed in any::<u64>()) {
        let flow = dual_flow(&w);
        let ent = module_rank(&w);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // codim C_N >= N, while level-(k + N - 1) dims are tau + ent (k + N - 1):
        // ent + 1 cotrajectories from level <= 3 run out of room by stage tau + 2 ent + 1
        let tau = torsion_submodule(&w).k_dim();
        let stages = tau + 2 * ent + 2;
        let mut family = Vec::new();
        for _ in 0..12 {
            let Some(u) = random_hyperplane(&flow, &mut rng, 3) else { continue };
            let c = flow.cotrajectory(&u, stages);
            if c.nonstationary() != Some(true) {
                continue;
            }
            family.push(c);
            if !flow.coindependent_check(&family, stages).holds {
                family.pop();
            }
        }
        prop_assert!(family.len() <= ent, "{} > {}", family.len(), ent);
    }

    #[test]
    fn d_plus_is_extremal(w in presentation(), seed in any::<u64>()) {
        let ctx = duality::dual_of_module(&w).unwrap();
        let flow = ctx.flow();
        let dp = flow.d_plus().unwrap();
        // completely positive side: the restricted flow has no torsion and full entropy
        let s = dp.flow.structure().unwrap();
        prop_assert_eq!(s.torsion_dim, 0);
        prop_assert_eq!(s.free_rank, module_rank(&w));
        // zero-entropy side: the kernel of every quotient dual to a torsion submodule contains D₊
        let module = ctx.module().clone();
        let alg = AlgebraicFlow::module(module.clone());
        let tau = ctx.factors().len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = ctx.field();
        let gens: Vec<Element> = (0..2)
            .map(|_| {
                let v = (0..module.generators())
                    .map(|c| if c < tau { corpus::random_poly(&mut rng, f, 3) } else { Poly::zero(f) })
                    .collect();
                Element::PolyVector(v)
            })
            .collect();
        let closed = alg.trajectory(&FiniteSubspace::new(gens), ctx.torsion_dim() + 1).unwrap();
        let x = ctx.co_annihilator(&FiniteSubspace::new(closed.basis)).unwrap();
        prop_assert!(flow.contains(&flow.preimage_endo(&x), &x), "kernel not invariant");
        for k in 0..=8 {
            let xk = flow.image_at(&x, k);
            prop_assert!(xk.contains_subspace(&dp.level_subspace(k)), "level {}", k);
        }
    }
}

#[test]
fn d_plus_flows_have_no_open_invariant_subspaces() {
    // exhaustive over hyperplanes at levels <= 4 over GF(2)
    let f = gf(2);
    let flows = [
        ProfiniteFlow::bernoulli(f, 1),
        ProfiniteFlow::bernoulli(f, 2),
        ProfiniteFlow::dual_of_module(f, &[Poly::from_coeffs(f, &[1, 1])], 1).unwrap(),
    ];
    for flow in &flows {
        let dp = flow.d_plus().unwrap().flow;
        for k in 1..=4 {
            if dp.dim(k) > 8 {
                continue;
            }
            for normal in dp.hyperplane_normals(k, usize::MAX, None) {
                let u = dp.from_constraints(k, &[normal]).unwrap();
                assert_eq!(dp.cotrajectory(&u, 6).nonstationary(), Some(true));
            }
        }
    }
}

// duality

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn annihilator_is_an_inclusion_reversing_bijection(w in presentation(), seed in any::<u64>()) {
        let ctx = duality::dual_of_module(&w).unwrap();
        let flow = ctx.flow();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(a) = random_hyperplane(flow, &mut rng, 3) else { return Ok(()) };
        let Some(b) = random_hyperplane(flow, &mut rng, 3) else { return Ok(()) };
        let ab = flow.intersect(&[a.clone(), b.clone()]);
        for u in [&a, &ab] {
            let back = ctx.co_annihilator(&ctx.annihilator(u).unwrap()).unwrap();
            prop_assert!(flow.same(u, &back));
        }
        // ab ⊆ a, so ann(a) ⊆ ann(ab)
        let ann_a = ctx.annihilator(&a).unwrap();
        let ann_ab = ctx.annihilator(&ab).unwrap();
        let k = ab.level().max(a.level());
        let span = |fs: &FiniteSubspace| {
            let rows: Vec<Vec<u64>> = fs
                .generators
                .iter()
                .map(|e| match e {
                    Element::PolyVector(y) => ctx.element_to_functional(k, y).unwrap(),
                    Element::Vector(_) => unreachable!(),
                })
                .collect();
            Subspace::span(ctx.field(), flow.dim(k), &rows)
        };
        prop_assert!(span(&ann_ab).contains_subspace(&span(&ann_a)));
    }
}

// lattice

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codi_one_iff_couniform(bits in 0u32..(1 << 9)) {
        let rows: Vec<Vec<u64>> = (0..3).map(|r| (0..3).map(|c| u64::from(bits >> (3 * r + c) & 1)).collect()).collect();
        let a = Matrix::from_residue_rows(gf(2), 3, &rows);
        let l = lattice::invariant_subspaces_of(&a).unwrap();
        let codi = lattice::dual_goldie_dim(&l).value;
        let couniform = l.size() > 1 && lattice::is_couniform(&l, l.bottom());
        prop_assert_eq!(codi == 1, couniform);
        for x in 0..l.size() {
            for y in 0..l.size() {
                if !l.leq(x, y) {
                    continue;
                }
                for z in 0..l.size() {
                    prop_assert_eq!(l.join(x, l.meet(z, y)), l.meet(l.join(x, z), y));
                }
            }
        }
        let g = lattice::dual_goldie_dim(&l);
        if l.size() > 1 {
            prop_assert!(lattice::is_coindependent(&l, &g.family).unwrap());
        }
    }
}
