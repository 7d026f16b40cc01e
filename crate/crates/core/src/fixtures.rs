//! Named example forms and seeded generators of generic positive forms.
//!
//! Generic positive forms are built as `m^T G m` with
//! `G = L L^T + P P^T / 10`, `L` a random integer `N x 3` matrix and `P` a
//! random integer `N x N` matrix; `G` is then positive definite, so `f` lies
//! in the interior of the cone of sums of squares. Scroll forms are
//! resampled until the genericity check passes.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::binary_form::BinaryForm;
use crate::biform::{biform_from_ints, Biform};
use crate::poly::Poly;
use crate::scalar::{rat, Rational, Scalar};
use crate::surface::{genericity_check, monomial_basis, SurfaceSpec};

/// `x^2 (t^2 + s^2) + y^2 (2t^2 + 2st + 2s^2)` on Scroll(1,1).
pub fn genus_one_form() -> Biform<Rational> {
    biform_from_ints(&[
        (0, 2, 2, 0, 1),
        (2, 0, 2, 0, 1),
        (0, 2, 0, 2, 2),
        (1, 1, 0, 2, 2),
        (2, 0, 0, 2, 2),
    ])
}

/// `t^2 (t^2 + s^2) x^2 + (t^4 + t^2 s^2 + s^4) y^2` on Scroll(2,1).
pub fn genus_two_form() -> Biform<Rational> {
    biform_from_ints(&[
        (0, 4, 2, 0, 1),
        (2, 2, 2, 0, 1),
        (0, 4, 0, 2, 1),
        (2, 2, 0, 2, 1),
        (4, 0, 0, 2, 1),
    ])
}

/// `(x - y)(s^2 - t^2)(x + y)(s^2 - 9t^2) + x^2 (s^2 - 4t^2)^2` on
/// Scroll(2,2): a smooth curve with only 60 rank-three Gram matrices.
pub fn nongeneric_form() -> Biform<Rational> {
    biform_from_ints(&[
        (4, 0, 2, 0, 2),
        (2, 2, 2, 0, -18),
        (0, 4, 2, 0, 25),
        (4, 0, 0, 2, -1),
        (2, 2, 0, 2, 10),
        (0, 4, 0, 2, -9),
    ])
}

fn random_pd_gram<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Rational> {
    let l = DMatrix::from_fn(n, 3, |_, _| rng.gen_range(-3i64..=3));
    let p = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-2i64..=2));
    let tenth = rat(1, 10);
    DMatrix::from_fn(n, n, |i, j| {
        let ll: i64 = (0..3).map(|k| l[(i, k)] * l[(j, k)]).sum();
        let pp: i64 = (0..n).map(|k| p[(i, k)] * p[(j, k)]).sum();
        // keep the perturbation definite even when P is singular
        let eye = if i == j { 1 } else { 0 };
        Rational::from_i64(ll) + tenth.clone() * Rational::from_i64(pp + eye)
    })
}

/// `m^T G m` for a random positive definite rational `G` on `spec`.
pub fn random_positive_form<R: Rng>(spec: &SurfaceSpec, rng: &mut R) -> Poly<Rational> {
    let basis = monomial_basis(spec, 1).expect("valid surface");
    let g = random_pd_gram(basis.len(), rng);
    let mut f = Poly::zero(basis.nvars());
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let e = basis.exps()[i]
                .iter()
                .zip(&basis.exps()[j])
                .map(|(a, b)| a + b)
                .collect();
            f.add_term(e, g[(i, j)].clone());
        }
    }
    f
}

pub fn random_positive_scroll_form<R: Rng>(d: u32, e: u32, rng: &mut R) -> Biform<Rational> {
    let f = random_positive_form(&SurfaceSpec::Scroll { d, e }, rng);
    Biform::from_poly(2 * d, 2, f).expect("scroll forms have bidegree (2d, 2)")
}

/// A seeded positive scroll form passing the genericity check.
pub fn generic_scroll_form(d: u32, e: u32, seed: u64) -> Biform<Rational> {
    let spec = SurfaceSpec::Scroll { d, e };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let f = random_positive_scroll_form(d, e, &mut rng);
        if genericity_check(&f, &spec).is_ok_and(|g| g.looks_generic() && g.curve_smooth) {
            return f;
        }
    }
}

/// A seeded positive form on any supported surface (scrolls are checked for
/// genericity).
pub fn generic_form(spec: &SurfaceSpec, seed: u64) -> Poly<Rational> {
    match *spec {
        SurfaceSpec::Scroll { d, e } => generic_scroll_form(d, e, seed).into_poly(),
        _ => random_positive_form(spec, &mut ChaCha8Rng::seed_from_u64(seed)),
    }
}

/// `p^2 + q^2` for random integer binary forms of degree `d`.
pub fn random_nonnegative_binary_form<R: Rng>(d: usize, rng: &mut R) -> BinaryForm<Rational> {
    loop {
        let p = BinaryForm::<Rational>::from_ints(&(0..=d).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>());
        let q = BinaryForm::<Rational>::from_ints(&(0..=d).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>());
        let f = p.mul(&p).add(&q.mul(&q)).expect("same degree");
        if f.is_squarefree() {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::build_for_surface;

    #[test]
    fn named_forms_have_expected_bidegrees() {
        assert_eq!(genus_one_form().bidegree(), (2, 2));
        assert_eq!(genus_two_form().bidegree(), (4, 2));
        assert_eq!(nongeneric_form().bidegree(), (4, 2));
    }

    #[test]
    fn nongeneric_form_expands_from_its_factored_shape() {
        // evaluate both shapes at a few rational points
        for (s, t, x, y) in [(1, 2, 3, -1), (-2, 5, 1, 1), (3, 1, -4, 7)] {
            let (s, t, x, y) = (s as i64, t as i64, x as i64, y as i64);
            let direct = (x - y) * (s * s - t * t) * (x + y) * (s * s - 9 * t * t) + x * x * (s * s - 4 * t * t).pow(2);
            let p = [rat(s, 1), rat(t, 1), rat(x, 1), rat(y, 1)];
            assert_eq!(nongeneric_form().eval_exact(&p), rat(direct, 1));
        }
    }

    #[test]
    fn generators_are_seeded_and_live_on_the_surface() {
        for spec in [
            SurfaceSpec::Scroll { d: 2, e: 1 },
            SurfaceSpec::Veronese,
            SurfaceSpec::ConeOverRnc { d: 4 },
        ] {
            let a = generic_form(&spec, 9);
            assert_eq!(a, generic_form(&spec, 9));
            assert_ne!(a, generic_form(&spec, 10));
            build_for_surface(&a, &spec).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_nonnegative_binary_form(3, &mut rng);
        assert_eq!(f.deg(), 6);
        assert!(f.is_squarefree());
    }
}
