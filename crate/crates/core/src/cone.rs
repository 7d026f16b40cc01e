//! Gram matrices on a cone versus Gram matrices on its base.
//!
//! With the apex coordinate `w` first, `f = a w^2 + 2 b w + c` and a Gram
//! matrix of `f` is `[[a, b^T], [b, C]]`. Its Schur complement `C - b b^T / a`
//! is a Gram matrix of `c - b^2 / a` of rank one less, and every Gram matrix
//! `G'` of the reduced form lifts back as `[[a, b^T], [b, G' + b b^T / a]]`.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::gram::Representation;
use crate::poly::Poly;
use crate::scalar::{rational_sqrt, Rational, Scalar};
use crate::surface::{rnc_basis, MonomialBasis};

/// `f = a w^2 + 2 b w + c` on the cone over the rational normal curve of
/// degree `d`, in the variables `(s, t, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSplit {
    pub degree: u32,
    pub a: Rational,
    /// Coefficients of `b` in the basis `s^i t^(d-i)`.
    pub b: Vec<Rational>,
    /// `c` as a binary form of degree `2d` in `(s, t)`.
    pub c: Poly<Rational>,
}

pub fn split(f: &Poly<Rational>, d: u32) -> Result<ConeSplit> {
    if f.nvars() != 3 {
        return Err(Error::NotAQuadraticForm("cone forms use the variables (s, t, w)".into()));
    }
    let two = Rational::from_i64(2);
    let mut a = Rational::zero();
    let mut b = vec![Rational::zero(); d as usize + 1];
    let mut c = Poly::zero(2);
    for (e, coeff) in f.terms() {
        match e[2] {
            2 if e[0] == 0 && e[1] == 0 => a = coeff.clone(),
            1 if e[0] + e[1] == d => b[e[0] as usize] = coeff.clone() / two.clone(),
            0 if e[0] + e[1] == 2 * d => c.add_term(vec![e[0], e[1]], coeff.clone()),
            _ => {
                return Err(Error::NotAQuadraticForm(format!(
                    "monomial {e:?} is not quadratic on the cone over the curve of degree {d}"
                )))
            }
        }
    }
    if !a.is_positive() {
        return Err(Error::ApexCoefficientNotPositive(a.to_string()));
    }
    Ok(ConeSplit { degree: d, a, b, c })
}

impl ConeSplit {
    fn b_form(&self) -> Poly<Rational> {
        rnc_basis(self.degree).form(&self.b)
    }

    /// `c - b^2 / a`.
    pub fn reduce(&self) -> Poly<Rational> {
        self.c.sub(&self.b_form().square().scale(&(Rational::from_i64(1) / self.a.clone())))
    }

    /// Reassembles `a w^2 + 2 b w + c`.
    pub fn join(&self) -> Poly<Rational> {
        let mut f = Poly::zero(3);
        f.add_term(vec![0, 0, 2], self.a.clone());
        for (e, c) in self.b_form().terms() {
            f.add_term(vec![e[0], e[1], 1], c.clone() * Rational::from_i64(2));
        }
        for (e, c) in self.c.terms() {
            f.add_term(vec![e[0], e[1], 0], c.clone());
        }
        f
    }

    /// Gram matrix on the cone from a Gram matrix of the reduced form.
    pub fn lift_gram<C: Scalar>(&self, g: &DMatrix<C>, to: impl Fn(&Rational) -> C) -> DMatrix<C> {
        let n = g.nrows();
        let a = to(&self.a);
        let b: Vec<C> = self.b.iter().map(&to).collect();
        let inv_a = to(&(Rational::from_i64(1) / self.a.clone()));
        DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => a.clone(),
            (0, j) => b[j - 1].clone(),
            (i, 0) => b[i - 1].clone(),
            (i, j) => g[(i - 1, j - 1)].clone() + b[i - 1].clone() * b[j - 1].clone() * inv_a.clone(),
        })
    }

    pub fn lift_gram_exact(&self, g: &DMatrix<Rational>) -> DMatrix<Rational> {
        self.lift_gram(g, |x| x.clone())
    }
}

/// Schur complement `C - B B^T / a` of a cone Gram matrix `[[a, B^T], [B, C]]`.
pub fn schur<C: Scalar + std::ops::Div<Output = C>>(g: &DMatrix<C>) -> DMatrix<C> {
    let n = g.nrows() - 1;
    let a = g[(0, 0)].clone();
    DMatrix::from_fn(n, n, |i, j| g[(i + 1, j + 1)].clone() - g[(i + 1, 0)].clone() * g[(0, j + 1)].clone() / a.clone())
}

/// Prepends `(sqrt(a) w + b / sqrt(a))^2` to a representation of the reduced
/// form, giving a representation of `f` on the cone basis `(w, s^i t^(d-i))`.
pub fn lift(rep: &Representation<f64>, split: &ConeSplit, cone_basis: &MonomialBasis) -> Representation<f64> {
    let ra = crate::scalar::rat_to_f64(&split.a).sqrt();
    let mut first = vec![ra];
    first.extend(split.b.iter().map(|x| crate::scalar::rat_to_f64(x) / ra));
    let mut forms = vec![first];
    forms.extend(rep.forms.iter().map(|v| {
        let mut w = vec![0.0];
        w.extend_from_slice(v);
        w
    }));
    let mut signs = vec![1];
    signs.extend_from_slice(&rep.signs);
    Representation {
        basis: cone_basis.clone(),
        forms,
        signs,
    }
}

/// Exact lift when `a` is a perfect square.
pub fn lift_exact(
    rep: &Representation<Rational>,
    split: &ConeSplit,
    cone_basis: &MonomialBasis,
) -> Option<Representation<Rational>> {
    let ra = rational_sqrt(&split.a)?;
    let mut first = vec![ra.clone()];
    first.extend(split.b.iter().map(|x| x.clone() / ra.clone()));
    let mut forms = vec![first];
    forms.extend(rep.forms.iter().map(|v| {
        let mut w = vec![Rational::zero()];
        w.extend_from_slice(v);
        w
    }));
    let mut signs = vec![1];
    signs.extend_from_slice(&rep.signs);
    Some(Representation {
        basis: cone_basis.clone(),
        forms,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::random_positive_form;
    use crate::gram::{build_for_surface, build_gram_space, inertia, verify_representation, PSD_TOL};
    use crate::scalar::{rat, rat_to_f64};
    use crate::surface::{monomial_basis, SurfaceSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(terms: &[([u32; 3], i64)]) -> Poly<Rational> {
        Poly::from_terms(3, terms.iter().map(|(e, c)| (e.to_vec(), rat(*c, 1))))
    }

    #[test]
    fn split_reads_coefficients() {
        // w^2 + s^2 + t^2 on the cone over a line
        let f = poly(&[([0, 0, 2], 1), ([2, 0, 0], 1), ([0, 2, 0], 1)]);
        let sp = split(&f, 1).unwrap();
        assert_eq!(sp.a, rat(1, 1));
        assert!(sp.b.iter().all(|x| x.is_zero()));
        assert_eq!(sp.reduce(), sp.c);
        // 2w^2 + 2w s + s^2 + t^2  ->  (2, s, s^2 + t^2), reduced s^2/2 + t^2
        let f = poly(&[([0, 0, 2], 2), ([1, 0, 1], 2), ([2, 0, 0], 1), ([0, 2, 0], 1)]);
        let sp = split(&f, 1).unwrap();
        assert_eq!(sp.a, rat(2, 1));
        assert_eq!(sp.b, vec![rat(0, 1), rat(1, 1)]);
        let g = Poly::from_terms(2, vec![(vec![2, 0], rat(1, 2)), (vec![0, 2], rat(1, 1))]);
        assert_eq!(sp.reduce(), g);
        assert_eq!(sp.join(), f);
    }

    #[test]
    fn apex_coefficient_must_be_positive() {
        let f = poly(&[([0, 0, 2], -1), ([2, 0, 0], 1), ([0, 2, 0], 1)]);
        assert!(matches!(split(&f, 1), Err(Error::ApexCoefficientNotPositive(_))));
        let g = poly(&[([2, 0, 0], 1), ([0, 2, 0], 1)]);
        assert!(matches!(split(&g, 1), Err(Error::ApexCoefficientNotPositive(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let f = random_positive_form(&SurfaceSpec::ConeOverRnc { d: 4 }, &mut rng);
            assert!(split(&f, 4).unwrap().a.is_positive());
        }
    }

    #[test]
    fn schur_and_lift_are_inverse_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let spec = SurfaceSpec::ConeOverRnc { d: 4 };
        for _ in 0..20 {
            let f = random_positive_form(&spec, &mut rng);
            let sp = split(&f, 4).unwrap();
            let base = build_gram_space(&sp.reduce(), &rnc_basis(4)).unwrap();
            let cone = build_for_surface(&f, &spec).unwrap();
            let theta: Vec<Rational> = (0..base.dim()).map(|_| rat(rng.gen_range(-20..20), rng.gen_range(1..5))).collect();
            let g = base.gram_at_exact(&theta).unwrap();
            let lifted = sp.lift_gram_exact(&g);
            // the lift is a Gram matrix of f and the Schur complement undoes it
            assert_eq!(&cone.quadratic_form_of(&lifted), cone.form());
            assert_eq!(schur(&lifted), g);
            // reduce o lift on the cone side: lift(schur(G)) = G for cone Gram matrices
            let back = cone.gram_at_exact(&cone.coords_of(&lifted)).unwrap();
            assert_eq!(back, lifted);
        }
    }

    #[test]
    fn lift_raises_rank_by_one_and_keeps_inertia_type() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = SurfaceSpec::ConeOverRnc { d: 4 };
        let f = random_positive_form(&spec, &mut rng);
        let sp = split(&f, 4).unwrap();
        let base = build_gram_space(&sp.reduce(), &rnc_basis(4)).unwrap();
        for _ in 0..10 {
            let theta: Vec<f64> = (0..base.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let g = base.gram_at_real(&theta).unwrap();
            let lifted = sp.lift_gram(&g, rat_to_f64);
            let (i0, i1) = (inertia(&g, PSD_TOL).unwrap(), inertia(&lifted, PSD_TOL).unwrap());
            assert_eq!(i1.positive, i0.positive + 1);
            assert_eq!(i1.negative, i0.negative);
            assert_eq!(i1.rank(), i0.rank() + 1);
        }
    }

    #[test]
    fn lifted_representations_verify() {
        // f = (w + s^2)^2 + (s t)^2 ... on the cone over the conic, with a = 1
        let f = poly(&[
            ([0, 0, 2], 1),
            ([2, 0, 1], 2),
            ([4, 0, 0], 1),
            ([2, 2, 0], 1),
            ([0, 4, 0], 1),
        ]);
        let sp = split(&f, 2).unwrap();
        // reduced form s^2 t^2 + t^4 = (st)^2 + (t^2)^2
        let rep = Representation {
            basis: rnc_basis(2),
            forms: vec![vec![rat(0, 1), rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1), rat(0, 1)]],
            signs: vec![1, 1],
        };
        assert_eq!(verify_representation(&sp.reduce(), &rep), 0.0);
        let cone_basis = monomial_basis(&SurfaceSpec::ConeOverRnc { d: 2 }, 1).unwrap();
        let lifted = lift_exact(&rep, &sp, &cone_basis).unwrap();
        assert_eq!(lifted.len(), 3);
        assert_eq!(verify_representation(&f, &lifted), 0.0);
        // b = 0, a = 1 adds the square w^2
        let g = poly(&[([0, 0, 2], 1), ([4, 0, 0], 1), ([0, 4, 0], 1)]);
        let sg = split(&g, 2).unwrap();
        let l = lift_exact(&rep, &sg, &cone_basis).unwrap();
        assert_eq!(l.forms[0], vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
    }
}
