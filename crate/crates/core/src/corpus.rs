//! Seeded random presentations for cross-pipeline checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gfp::PrimeField;
use crate::polymat::{ModulePresentation, Poly, PolyMatrix, PolyVec};

#[derive(Clone, Copy, Debug)]
pub struct CorpusParams {
    pub max_generators: usize,
    pub max_degree: usize,
    /// Probability that an entry is nonzero.
    pub density: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_generators: 4,
            max_degree: 3,
            density: 0.45,
        }
    }
}

pub fn random_poly(rng: &mut impl Rng, field: PrimeField, max_degree: usize) -> Poly {
    let deg = rng.gen_range(0..=max_degree);
    Poly::from_residues(
        field,
        (0..=deg)
            .map(|_| rng.gen_range(0..field.modulus()))
            .collect(),
    )
}

pub fn random_element(
    rng: &mut impl Rng,
    field: PrimeField,
    g: usize,
    max_degree: usize,
) -> PolyVec {
    (0..g)
        .map(|_| random_poly(rng, field, max_degree))
        .collect()
}

pub fn random_presentation(
    rng: &mut impl Rng,
    field: PrimeField,
    params: &CorpusParams,
) -> ModulePresentation {
    let g = rng.gen_range(1..=params.max_generators);
    let m = rng.gen_range(0..=g);
    let rel = PolyMatrix::from_fn(field, g, m, |_, _| {
        if rng.gen_bool(params.density) {
            random_poly(rng, field, params.max_degree)
        } else {
            Poly::zero(field)
        }
    });
    ModulePresentation::new(field, g, rel).expect("shape is consistent")
}

/// `count` presentations alternating between GF(2) and GF(3).
pub fn generate(seed: u64, count: usize, params: &CorpusParams) -> Vec<ModulePresentation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = [PrimeField::new(2).unwrap(), PrimeField::new(3).unwrap()];
    (0..count)
        .map(|i| random_presentation(&mut rng, fields[i % 2], params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_bounded() {
        let p = CorpusParams::default();
        let a = generate(7, 20, &p);
        let b = generate(7, 20, &p);
        assert_eq!(a, b);
        for w in &a {
            assert!(w.generators() <= 4);
            assert!(w.relations().max_degree() <= 3);
        }
        assert_eq!(a[0].field().modulus(), 2);
        assert_eq!(a[1].field().modulus(), 3);
    }
}
