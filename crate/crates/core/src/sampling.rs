//! Seeded random instances for cross-checks and invariance tests.

use num_traits::Zero;
use rand::Rng;

use crate::algebra::{Algebra, Element};
use crate::classifier::exp_ad;
use crate::rational::{rat, ratio, Rat};

pub const DEFAULT_SEED: u64 = 42;

/// `p/q` with `p ∈ [-5, 5]`, `q ∈ [1, 4]`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rat {
    ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// Random element supported in `grades`, each coefficient zero with
/// probability `sparsity`.
pub fn random_element<R: Rng>(
    algebra: &Algebra,
    grades: std::ops::RangeInclusive<i32>,
    sparsity: f64,
    rng: &mut R,
) -> Element {
    let coeffs = (0..algebra.dim())
        .map(|i| {
            if grades.contains(&algebra.grade_of(i)) && !rng.gen_bool(sparsity) {
                small_rational(rng)
            } else {
                Rat::zero()
            }
        })
        .collect();
    algebra.element(coeffs).expect("dimension matches")
}

/// Element of `p_+` with integer coordinates in `[-radius, radius]`.
pub fn lattice_plus<R: Rng>(algebra: &Algebra, radius: i64, rng: &mut R) -> Element {
    let coeffs = (0..algebra.dim())
        .map(|i| if algebra.grade_of(i) > 0 { rat(rng.gen_range(-radius..=radius)) } else { Rat::zero() })
        .collect();
    algebra.element(coeffs).expect("dimension matches")
}

/// A random element of `p` for a depth-one algebra.
///
/// Half the instances plant the positive part in the image of `ad(X_0)`,
/// so all three verdicts occur with useful frequency.
pub fn random_depth_one<R: Rng>(algebra: &Algebra, rng: &mut R) -> Element {
    let mut x0 = random_element(algebra, 0..=0, 0.5, rng);
    if rng.gen_bool(0.3) {
        // drop the scale direction so λ' can vanish
        let e = algebra.grading_element();
        let i = e.coeffs().iter().position(|c| !c.is_zero()).expect("grading element is non-zero");
        let c = &x0.coeffs()[i] / &e.coeffs()[i];
        x0 = &x0 - &e.scale(&c);
    }
    let x1 = if rng.gen_bool(0.5) {
        let z = random_element(algebra, 1..=1, 0.0, rng);
        x0.bracket(&z).expect("same algebra")
    } else {
        random_element(algebra, 1..=1, 1.0 / 3.0, rng)
    };
    &x0 + &x1
}

/// A random element of `p` for a depth-two algebra, mixing three shapes:
/// lattice conjugates of grade-0 elements, positive parts with no grade-0
/// part, and unconstrained elements.
pub fn random_depth_two<R: Rng>(algebra: &Algebra, lattice_radius: i64, rng: &mut R) -> Element {
    let k = algebra.depth();
    match rng.gen_range(0..3) {
        0 => {
            let x0 = random_element(algebra, 0..=0, 0.3, rng);
            let z = lattice_plus(algebra, lattice_radius, rng);
            exp_ad(&-&z, &x0).expect("p_+ acts nilpotently")
        }
        1 => random_element(algebra, 1..=k, 0.3, rng),
        _ => random_element(algebra, 0..=k, 0.3, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_conformal, build_cr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_deterministic() {
        let a = build_conformal(3, 0).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10).map(|_| random_depth_one(&a, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn samples_lie_in_p() {
        let a = build_cr(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        for _ in 0..50 {
            assert!(random_depth_two(&a, 2, &mut rng).supported_in(0..=2));
        }
    }
}
