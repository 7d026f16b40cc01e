//! Surfaces of minimal degree as combinatorial objects.
//!
//! Each surface is a toric variety given by monomials: the linear basis spans
//! the forms of degree one on the surface and its pairwise products span the
//! quadratic forms. Scrolls live in the `(s, t; x, y)` variables of
//! [`crate::biform::Biform`]; the Veronese surface uses `(x0, x1, x2)` and the
//! cone over a rational normal curve uses `(s, t, w)` with `w` the apex
//! coordinate.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::binary_form::BinaryForm;
use crate::binary_sos::roots;
use crate::biform::Biform;
use crate::error::{Error, Result};
use crate::poly::{Exponents, Poly};
use crate::scalar::{rat, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    /// Rational normal scroll of the trapezoid with parallel edges `d >= e >= 1`.
    Scroll { d: u32, e: u32 },
    /// Quadratic Veronese surface in P^5.
    Veronese,
    /// Cone over the rational normal curve of degree `d >= 2`.
    #[serde(rename = "cone_rnc")]
    ConeOverRnc { d: u32 },
}

impl SurfaceSpec {
    pub fn scroll(d: u32, e: u32) -> Result<Self> {
        if e < 1 || d < e {
            return Err(Error::Input(format!("scroll needs d >= e >= 1, got ({d}, {e})")));
        }
        Ok(SurfaceSpec::Scroll { d, e })
    }

    pub fn cone_rnc(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Input(format!("cone needs d >= 2, got {d}")));
        }
        Ok(SurfaceSpec::ConeOverRnc { d })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SurfaceSpec::Scroll { d, e } => Self::scroll(d, e).map(|_| ()),
            SurfaceSpec::ConeOverRnc { d } => Self::cone_rnc(d).map(|_| ()),
            SurfaceSpec::Veronese => Ok(()),
        }
    }

    /// Dimension `n` of the ambient projective space.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            SurfaceSpec::Scroll { d, e } => (d + e + 1) as usize,
            SurfaceSpec::Veronese => 5,
            SurfaceSpec::ConeOverRnc { d } => (d + 1) as usize,
        }
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    /// Degree of the embedded surface.
    pub fn degree(&self) -> usize {
        match *self {
            SurfaceSpec::Scroll { d, e } => (d + e) as usize,
            SurfaceSpec::Veronese => 4,
            SurfaceSpec::ConeOverRnc { d } => d as usize,
        }
    }

    pub fn genus(&self) -> Option<u32> {
        match *self {
            SurfaceSpec::Scroll { d, e } => Some(d + e - 1),
            _ => None,
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            SurfaceSpec::Scroll { .. } => 4,
            SurfaceSpec::Veronese => 3,
            SurfaceSpec::ConeOverRnc { .. } => 3,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SurfaceSpec::Scroll { d, e } => format!("scroll({d},{e})"),
            SurfaceSpec::Veronese => "veronese".into(),
            SurfaceSpec::ConeOverRnc { d } => format!("cone_rnc({d})"),
        }
    }
}

impl std::str::FromStr for SurfaceSpec {
    type Err = Error;

    /// Accepts `scroll(2,1)`, `veronese`, `cone_rnc(4)` or the JSON form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let spec: SurfaceSpec = serde_json::from_str(s)?;
            spec.validate()?;
            return Ok(spec);
        }
        let lower = s.to_ascii_lowercase().replace(' ', "");
        let args = |prefix: &str| -> Option<Vec<u32>> {
            let rest = lower.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            rest.split(',').map(|x| x.parse().ok()).collect()
        };
        if lower == "veronese" {
            return Ok(SurfaceSpec::Veronese);
        }
        if let Some(v) = args("scroll") {
            if v.len() == 2 {
                return SurfaceSpec::scroll(v[0], v[1]);
            }
        }
        if let Some(v) = args("cone_rnc") {
            if v.len() == 1 {
                return SurfaceSpec::cone_rnc(v[0]);
            }
        }
        Err(Error::Input(format!("unrecognized surface {s:?}")))
    }
}

/// Ordered list of distinct monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    nvars: usize,
    exps: Vec<Exponents>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, exps: Vec<Exponents>) -> Self {
        debug_assert!(exps.iter().all(|e| e.len() == nvars));
        debug_assert_eq!(exps.iter().collect::<BTreeSet<_>>().len(), exps.len());
        Self { nvars, exps }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[Exponents] {
        &self.exps
    }

    pub fn position(&self, e: &[u32]) -> Option<usize> {
        self.exps.iter().position(|x| x.as_slice() == e)
    }

    /// Distinct pairwise products, sorted.
    pub fn products(&self) -> MonomialBasis {
        let set: BTreeSet<Exponents> = self
            .exps
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                self.exps[i..]
                    .iter()
                    .map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect())
            })
            .collect();
        MonomialBasis::new(self.nvars, set.into_iter().collect())
    }

    /// The linear form with coefficient vector `coeffs`.
    pub fn form<C: Scalar>(&self, coeffs: &[C]) -> Poly<C> {
        Poly::from_terms(
            self.nvars,
            self.exps.iter().cloned().zip(coeffs.iter().cloned()),
        )
    }

    /// Coefficient vector of a form supported on this basis.
    pub fn coords<C: Scalar>(&self, form: &Poly<C>) -> Result<Vec<C>> {
        let mut v = vec![C::zero(); self.len()];
        for (e, c) in form.terms() {
            let i = self.position(e).ok_or_else(|| {
                Error::NotAQuadraticForm(format!("monomial {e:?} is not in the basis"))
            })?;
            v[i] = c.clone();
        }
        Ok(v)
    }
}

/// Basis `s^i t^(d-i)`, `i = 0..=d`, of the rational normal curve of degree `d`.
pub fn rnc_basis(d: u32) -> MonomialBasis {
    MonomialBasis::new(2, (0..=d).map(|i| vec![i, d - i]).collect())
}

/// Monomials spanning the forms of degree `k` on `spec`.
pub fn monomial_basis(spec: &SurfaceSpec, k: u32) -> Result<MonomialBasis> {
    spec.validate()?;
    let linear = match *spec {
        SurfaceSpec::Scroll { d, e } => {
            let mut v: Vec<Exponents> = (0..=d).map(|i| vec![i, d - i, 0, 1]).collect();
            v.extend((0..=e).map(|i| vec![i, d - i, 1, 0]));
            MonomialBasis::new(4, v)
        }
        SurfaceSpec::Veronese => {
            let mut v = Vec::new();
            for a in (0..=2u32).rev() {
                for b in (0..=2 - a).rev() {
                    v.push(vec![a, b, 2 - a - b]);
                }
            }
            MonomialBasis::new(3, v)
        }
        SurfaceSpec::ConeOverRnc { d } => {
            let mut v: Vec<Exponents> = vec![vec![0, 0, 1]];
            v.extend((0..=d).map(|i| vec![i, d - i, 0]));
            MonomialBasis::new(3, v)
        }
    };
    match k {
        1 => Ok(linear),
        2 => Ok(linear.products()),
        other => Err(Error::UnsupportedDegree(other)),
    }
}

/// Number of lattice points of `k * P_{d,e}`.
pub fn scroll_lattice_points(d: u32, e: u32, k: u32) -> usize {
    (0..=k)
        .map(|b| (k * d - b * (d - e) + 1) as usize)
        .sum()
}

/// Lattice points of `2 P_{d,e}` written as bidegree `(2d, 2)` monomials.
pub fn scroll_quadratic_lattice(d: u32, e: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for b in 0..=2u32 {
        // b = power of x
        for a in 0..=(2 * d - b * (d - e)) {
            out.push(vec![a, 2 * d - a, b, 2 - b]);
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertData {
    pub genus: u32,
    pub curve_degree: u32,
    /// Coefficients of `t^2`, `t`, `1` in the Ehrhart polynomial of `P_{d,e}`.
    pub ehrhart: [Rational; 3],
}

impl HilbertData {
    pub fn ehrhart_at(&self, t: i64) -> Rational {
        let t = Rational::from_i64(t);
        self.ehrhart[0].clone() * t.clone() * t.clone() + self.ehrhart[1].clone() * t + self.ehrhart[2].clone()
    }
}

pub fn hilbert_data(spec: &SurfaceSpec) -> Result<HilbertData> {
    let SurfaceSpec::Scroll { d, e } = *spec else {
        return Err(Error::NotAScroll);
    };
    let s = (d + e) as i64;
    Ok(HilbertData {
        genus: d + e - 1,
        curve_degree: 2 * (d + e),
        ehrhart: [rat(s, 2), rat(s + 2, 2), rat(1, 1)],
    })
}

/// The binary forms `(a, b, c)` with `f = a x^2 + 2 b x y + c y^2`.
pub fn biform_abc(f: &Biform<Rational>) -> Result<[BinaryForm<Rational>; 3]> {
    let (_, dxy) = f.bidegree();
    if dxy != 2 {
        return Err(Error::DegreeMismatch(format!("x,y-degree is {dxy}, expected 2")));
    }
    let a = f.xy_coefficient(2);
    let b = f.xy_coefficient(1).scale(&rat(1, 2));
    let c = f.xy_coefficient(0);
    Ok([a, b, c])
}

/// `b^2 - a c` with the forced factor `t^(2(d-e))` removed.
pub fn discriminant(f: &Biform<Rational>, spec: &SurfaceSpec) -> Result<BinaryForm<Rational>> {
    let SurfaceSpec::Scroll { d, e } = *spec else {
        return Err(Error::NotAScroll);
    };
    if f.bidegree() != (2 * d, 2) {
        return Err(Error::DegreeMismatch(format!(
            "bidegree {:?}, expected ({}, 2)",
            f.bidegree(),
            2 * d
        )));
    }
    let [a, b, c] = biform_abc(f)?;
    let shift = (d - e) as usize;
    if a.t_order() < 2 * shift {
        return Err(Error::DegreeMismatch(format!("a is not divisible by t^{}", 2 * shift)));
    }
    if b.t_order() < shift {
        return Err(Error::DegreeMismatch(format!("b is not divisible by t^{shift}")));
    }
    let full = b.mul(&b).sub(&a.mul(&c))?;
    Ok(full
        .div_t_power(2 * shift)
        .expect("b^2 - ac inherits the t-divisibility"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityDiagnostics {
    pub discriminant_squarefree: bool,
    pub curve_smooth: bool,
    /// Filled by the enumerator when fewer representations than expected are
    /// found.
    pub count_warning: Option<String>,
}

impl GenericityDiagnostics {
    pub fn looks_generic(&self) -> bool {
        self.discriminant_squarefree && self.count_warning.is_none()
    }
}

/// Squarefreeness of the discriminant and smoothness of `V(f)` in P^1 x P^1.
pub fn genericity_check(f: &Biform<Rational>, spec: &SurfaceSpec) -> Result<GenericityDiagnostics> {
    let delta = discriminant(f, spec)?;
    let discriminant_squarefree = delta.is_squarefree();
    let curve_smooth = curve_is_smooth(f, spec)?;
    Ok(GenericityDiagnostics {
        discriminant_squarefree,
        curve_smooth,
        count_warning: None,
    })
}

/// Singular points of the curve lie over roots of the discriminant where
/// the 2x2 coefficient matrix has a kernel vector `v` annihilating the
/// derivative along the base as well. On Scroll(d, e) the fibre coordinate
/// is `X = t^(d-e) x`, so the check uses `a / t^(2(d-e))` and `b / t^(d-e)`.
fn curve_is_smooth(f: &Biform<Rational>, spec: &SurfaceSpec) -> Result<bool> {
    let SurfaceSpec::Scroll { d, e } = *spec else {
        return Err(Error::NotAScroll);
    };
    let shift = (d - e) as usize;
    let [a, b, c] = biform_abc(f)?;
    let delta = discriminant(f, spec)?;
    if delta.is_zero() {
        return Ok(false);
    }
    let a = a.div_t_power(2 * shift).expect("checked by discriminant");
    let b = b.div_t_power(shift).expect("checked by discriminant");
    let rm = roots(&delta.to_f64());
    let scale = [&a, &b, &c]
        .iter()
        .map(|p| p.max_abs_coeff())
        .fold(0.0, f64::max)
        .max(1e-300);
    let (af, bf, cf) = (a.to_complex(), b.to_complex(), c.to_complex());
    let one = Complex64::new(1.0, 0.0);
    // (point, derivative along the base in the affine chart containing it)
    let mut points: Vec<(Complex64, Complex64, bool)> = rm.finite.iter().map(|(z, _)| (*z, one, true)).collect();
    if rm.infinity > 0 {
        points.push((one, Complex64::zero(), false));
    }
    for (s, t, finite) in points {
        let m = [af.eval(s, t), bf.eval(s, t), cf.eval(s, t)];
        let pscale = scale * s.norm().max(1.0).powi(c.deg() as i32);
        let mnorm = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if mnorm <= 1e-9 * pscale {
            // the whole fibre lies on the curve
            return Ok(false);
        }
        // kernel of [[a, b], [b, c]]
        let v = if m[0].norm() >= m[2].norm() {
            [-m[1], m[0]]
        } else {
            [m[2], -m[1]]
        };
        let vn = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let v = [v[0] / vn, v[1] / vn];
        let (da, db, dc) = if finite {
            (af.d_s(), bf.d_s(), cf.d_s())
        } else {
            (af.d_t(), bf.d_t(), cf.d_t())
        };
        let g = da.eval(s, t) * v[0] * v[0] + db.eval(s, t) * v[0] * v[1] * 2.0 + dc.eval(s, t) * v[1] * v[1];
        if g.norm() <= 1e-7 * pscale * (c.deg().max(1) as f64) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn linear_basis_small_scrolls() {
        let b = monomial_basis(&SurfaceSpec::Scroll { d: 1, e: 1 }, 1).unwrap();
        // (yt, ys, xt, xs)
        assert_eq!(
            b.exps(),
            &[vec![0, 1, 0, 1], vec![1, 0, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 1, 0]]
        );
        let b = monomial_basis(&SurfaceSpec::Scroll { d: 2, e: 1 }, 1).unwrap();
        // (y t^2, y t s, y s^2, x t^2, x t s)  ~  (1, s, s^2, x, xs)
        let chart: Vec<(u32, u32)> = b.exps().iter().map(|e| (e[0], e[2])).collect();
        assert_eq!(chart, vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn quadratic_basis_matches_lattice_count() {
        for d in 1..=7u32 {
            for e in 1..=d {
                if d + e > 8 {
                    continue;
                }
                let spec = SurfaceSpec::Scroll { d, e };
                let q = monomial_basis(&spec, 2).unwrap();
                let n = spec.ambient_dim();
                let (m, np1) = (2usize, n + 1);
                assert_eq!(q.len(), (m + 1) * np1 - 3, "({d},{e})");
                assert_eq!(q.exps(), scroll_quadratic_lattice(d, e).as_slice());
                assert_eq!(q.len(), scroll_lattice_points(d, e, 2));
            }
        }
        assert_eq!(monomial_basis(&SurfaceSpec::Scroll { d: 2, e: 2 }, 2).unwrap().len(), 15);
    }

    #[test]
    fn other_surfaces_have_expected_sizes() {
        let v = monomial_basis(&SurfaceSpec::Veronese, 1).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v.products().len(), 15);
        let c = monomial_basis(&SurfaceSpec::ConeOverRnc { d: 4 }, 1).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.products().len(), 1 + 5 + 9);
        assert!(matches!(
            monomial_basis(&SurfaceSpec::Veronese, 3),
            Err(Error::UnsupportedDegree(3))
        ));
    }

    #[test]
    fn minimal_degree_everywhere() {
        let mut specs = vec![SurfaceSpec::Veronese];
        for d in 1..6 {
            for e in 1..=d {
                specs.push(SurfaceSpec::Scroll { d, e });
            }
            if d >= 2 {
                specs.push(SurfaceSpec::ConeOverRnc { d });
            }
        }
        for s in specs {
            assert_eq!(s.degree(), s.codim() + 1, "{}", s.label());
            if let Some(g) = s.genus() {
                assert_eq!(g as usize, s.ambient_dim() - 2);
            }
        }
    }

    #[test]
    fn hilbert_data_examples() {
        let h = hilbert_data(&SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap();
        assert_eq!((h.genus, h.curve_degree), (1, 4));
        assert_eq!(h.ehrhart, [rat(1, 1), rat(2, 1), rat(1, 1)]);
        let h = hilbert_data(&SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap();
        assert_eq!((h.genus, h.curve_degree), (2, 6));
        assert_eq!(h.ehrhart, [rat(3, 2), rat(5, 2), rat(1, 1)]);
        assert!(matches!(hilbert_data(&SurfaceSpec::Veronese), Err(Error::NotAScroll)));
    }

    #[test]
    fn ehrhart_fits_lattice_counts() {
        // Fit a quadratic through the counts at k = 0, 1, 2 and compare.
        for (d, e) in [(3u32, 1u32), (2, 2), (4, 1), (3, 3)] {
            let c: Vec<i64> = (0..3).map(|k| scroll_lattice_points(d, e, k) as i64).collect();
            let a2 = rat(c[2] - 2 * c[1] + c[0], 2);
            let a1 = rat(c[1] - c[0], 1) - a2.clone();
            let a0 = rat(c[0], 1);
            let h = hilbert_data(&SurfaceSpec::Scroll { d, e }).unwrap();
            assert_eq!(h.ehrhart, [a2, a1, a0], "({d},{e})");
            for k in 3..6 {
                assert_eq!(h.ehrhart_at(k), rat(scroll_lattice_points(d, e, k as u32) as i64, 1));
            }
            // curve Hilbert polynomial p(t) - p(t-2) = 2(d+e) t + (2 - d - e)
            for t in 0..5i64 {
                let diff = h.ehrhart_at(t) - h.ehrhart_at(t - 2);
                let s = (d + e) as i64;
                assert_eq!(diff, rat(2 * s * t + 2 - s, 1));
            }
        }
        let h = hilbert_data(&SurfaceSpec::Scroll { d: 3, e: 1 }).unwrap();
        assert_eq!((h.genus, h.curve_degree), (3, 8));
        assert_eq!(h.ehrhart, [rat(2, 1), rat(3, 1), rat(1, 1)]);
    }

    #[test]
    fn discriminant_examples() {
        let f = fixtures::genus_one_form();
        let delta = discriminant(&f, &SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap();
        let expected = BinaryForm::from_ints(&[1, 0, 1])
            .mul(&BinaryForm::from_ints(&[2, 2, 2]))
            .scale(&rat(-1, 1));
        assert_eq!(delta, expected);
        assert_eq!(delta.deg(), 4);

        let f = fixtures::genus_two_form();
        let delta = discriminant(&f, &SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap();
        let expected = BinaryForm::from_ints(&[1, 0, 1])
            .mul(&BinaryForm::from_ints(&[1, 0, 1, 0, 1]))
            .scale(&rat(-1, 1));
        assert_eq!(delta, expected);
        assert_eq!(delta.deg(), 6);
    }

    #[test]
    fn discriminant_rejects_bad_divisibility() {
        // a = s^4 is not divisible by t^2 on Scroll(2,1)
        let f = crate::biform::biform_from_ints(&[(4, 0, 2, 0, 1), (0, 4, 0, 2, 1)]);
        assert!(matches!(
            discriminant(&f, &SurfaceSpec::Scroll { d: 2, e: 1 }),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn discriminant_nonpositive_for_nonnegative_forms() {
        let f = fixtures::genus_two_form();
        let delta = discriminant(&f, &SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap().to_f64();
        for k in 0..50 {
            let th = k as f64 * 0.13;
            assert!(delta.eval_real(th.cos(), th.sin()) <= 1e-12);
        }
    }

    #[test]
    fn genericity_flags() {
        let g1 = genericity_check(&fixtures::genus_one_form(), &SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap();
        assert!(g1.discriminant_squarefree);
        assert!(g1.curve_smooth);
        let ng = genericity_check(&fixtures::nongeneric_form(), &SurfaceSpec::Scroll { d: 2, e: 2 }).unwrap();
        assert!(ng.curve_smooth);
        // a = c = s^2 + t^2, b = 0: discriminant -(s^2+t^2)^2 has double roots
        let f = crate::biform::biform_from_ints(&[
            (2, 0, 2, 0, 1),
            (0, 2, 2, 0, 1),
            (2, 0, 0, 2, 1),
            (0, 2, 0, 2, 1),
        ]);
        let d = genericity_check(&f, &SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap();
        assert!(!d.discriminant_squarefree);
    }

    #[test]
    fn parses_surface_specs() {
        assert_eq!("scroll(2,1)".parse::<SurfaceSpec>().unwrap(), SurfaceSpec::Scroll { d: 2, e: 1 });
        assert_eq!("veronese".parse::<SurfaceSpec>().unwrap(), SurfaceSpec::Veronese);
        assert_eq!(
            r#"{"kind":"cone_rnc","d":4}"#.parse::<SurfaceSpec>().unwrap(),
            SurfaceSpec::ConeOverRnc { d: 4 }
        );
        assert_eq!(
            serde_json::to_string(&SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap(),
            r#"{"kind":"scroll","d":2,"e":1}"#
        );
        assert!("scroll(1,2)".parse::<SurfaceSpec>().is_err());
    }
}
