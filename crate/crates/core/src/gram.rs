//! Gram matrices of quadratic forms on a toric surface.
//!
//! For a linear monomial basis `m = (m_0, ..., m_{N-1})` every quadratic
//! monomial `mu` is hit by a set of index pairs `(i, j)` with `m_i m_j = mu`.
//! The Gram fiber of `f` is the affine space of symmetric `G` with
//! `m^T G m = f`; it is `G0 + span(K_1, ..., K_k)`. Because the pair sets of
//! different monomials are disjoint, `G0` and the kernel basis can be written
//! down exactly, one monomial at a time:
//!
//! * `G0` places the coefficient of `mu` on the diagonal pair of `mu` when
//!   there is one and on the first off-diagonal pair otherwise;
//! * with a diagonal anchor `(a, a)`, every off-diagonal pair `p` of the
//!   group contributes `K = sym(p) - 2 E_aa`;
//! * without one, the first pair `a` is the anchor and every other pair `p`
//!   contributes `K = sym(a) - sym(p)`.
//!
//! Kernel matrices are ordered by their first pair.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::biform::{Biform, BiformJson};
use crate::error::{Error, Result};
use crate::json::{CoeffJson, JsonCoeff, MatrixJson};
use crate::poly::{Exponents, Poly};
use crate::scalar::{rat_to_f64, Rational, Scalar};
use crate::surface::{monomial_basis, MonomialBasis, SurfaceSpec};

/// Relative eigenvalue cut for rank decisions.
pub const RANK_TOL: f64 = 1e-8;
/// Relative eigenvalue cut below which a matrix is not psd.
pub const PSD_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GramSpace {
    basis: MonomialBasis,
    quad_basis: MonomialBasis,
    form: Poly<Rational>,
    g0: DMatrix<Rational>,
    kernel: Vec<DMatrix<Rational>>,
    /// Index pairs `(i, j)`, `i <= j`, for each quadratic monomial.
    groups: Vec<Vec<(usize, usize)>>,
    /// For each kernel matrix: `(pair, anchor, diagonal_anchor)`.
    kernel_pairs: Vec<((usize, usize), (usize, usize), bool)>,
}

fn sym_unit(n: usize, (i, j): (usize, usize), v: Rational) -> DMatrix<Rational> {
    let mut m = DMatrix::from_element(n, n, Rational::zero());
    m[(i, j)] = v.clone();
    m[(j, i)] = v;
    m
}

pub fn build_gram_space(form: &Poly<Rational>, basis: &MonomialBasis) -> Result<GramSpace> {
    if form.nvars() != basis.nvars() {
        return Err(Error::NotAQuadraticForm(format!(
            "form has {} variables, surface has {}",
            form.nvars(),
            basis.nvars()
        )));
    }
    let n = basis.len();
    let mut by_monomial: BTreeMap<Exponents, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let e: Exponents = basis.exps()[i]
                .iter()
                .zip(&basis.exps()[j])
                .map(|(a, b)| a + b)
                .collect();
            by_monomial.entry(e).or_default().push((i, j));
        }
    }
    for e in form.terms().keys() {
        if !by_monomial.contains_key(e) {
            return Err(Error::NotAQuadraticForm(format!(
                "monomial {e:?} lies outside the quadratic span of the surface"
            )));
        }
    }
    let quad_basis = MonomialBasis::new(basis.nvars(), by_monomial.keys().cloned().collect());
    let two = Rational::from_i64(2);
    let mut g0 = DMatrix::from_element(n, n, Rational::zero());
    let mut kernel_entries = Vec::new();
    let mut groups = Vec::with_capacity(by_monomial.len());
    for (e, pairs) in by_monomial {
        let c = form.coeff(&e);
        let diag = pairs.iter().copied().find(|(i, j)| i == j);
        match diag {
            Some(a) => {
                g0[a] = c;
                for &p in pairs.iter().filter(|&&p| p != a) {
                    kernel_entries.push((p, a, true));
                }
            }
            None => {
                let a = pairs[0];
                let half = c / two.clone();
                g0[(a.0, a.1)] = half.clone();
                g0[(a.1, a.0)] = half;
                for &p in &pairs[1..] {
                    kernel_entries.push((p, a, false));
                }
            }
        }
        groups.push(pairs);
    }
    // order kernel directions by the first pair they touch
    kernel_entries.sort_by_key(|&(p, a, _)| std::cmp::min(p, a));
    let kernel = kernel_entries
        .iter()
        .map(|&(p, a, diag)| {
            if diag {
                let mut k = sym_unit(n, p, Rational::one());
                k[a] = -two.clone();
                k
            } else {
                let mut k = sym_unit(n, a, Rational::one());
                k[(p.0, p.1)] = -Rational::one();
                k[(p.1, p.0)] = -Rational::one();
                k
            }
        })
        .collect();
    Ok(GramSpace {
        basis: basis.clone(),
        quad_basis,
        form: form.clone(),
        g0,
        kernel,
        groups,
        kernel_pairs: kernel_entries,
    })
}

/// Gram space of a biform on a scroll (or any form on another surface given
/// in that surface's variables).
pub fn build_for_surface(form: &Poly<Rational>, spec: &SurfaceSpec) -> Result<GramSpace> {
    if let SurfaceSpec::Scroll { d, .. } = *spec {
        let f = Biform::from_poly(2 * d, 2, form.clone())
            .map_err(|e| Error::NotAQuadraticForm(e.to_string()))?;
        return build_gram_space(f.poly(), &monomial_basis(spec, 1)?);
    }
    build_gram_space(form, &monomial_basis(spec, 1)?)
}

pub fn build_for_biform(f: &Biform<Rational>, spec: &SurfaceSpec) -> Result<GramSpace> {
    if let SurfaceSpec::Scroll { d, .. } = *spec {
        if f.bidegree() != (2 * d, 2) {
            return Err(Error::NotAQuadraticForm(format!(
                "bidegree {:?}, expected ({}, 2)",
                f.bidegree(),
                2 * d
            )));
        }
    } else {
        return Err(Error::NotAScroll);
    }
    build_gram_space(f.poly(), &monomial_basis(spec, 1)?)
}

impl GramSpace {
    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn quadratic_basis(&self) -> &MonomialBasis {
        &self.quad_basis
    }

    pub fn form(&self) -> &Poly<Rational> {
        &self.form
    }

    pub fn g0(&self) -> &DMatrix<Rational> {
        &self.g0
    }

    pub fn kernel(&self) -> &[DMatrix<Rational>] {
        &self.kernel
    }

    /// Matrix size `N`.
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Number of free parameters `k`.
    pub fn dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn g0_f64(&self) -> DMatrix<f64> {
        self.g0.map(|x| rat_to_f64(&x))
    }

    pub fn kernel_f64(&self) -> Vec<DMatrix<f64>> {
        self.kernel.iter().map(|k| k.map(|x| rat_to_f64(&x))).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    pub fn gram_at(&self, theta: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check_len(theta.len())?;
        let mut g = self.g0.map(|x| Complex64::new(rat_to_f64(&x), 0.0));
        for (k, &t) in self.kernel.iter().zip(theta) {
            g += k.map(|x| Complex64::new(rat_to_f64(&x), 0.0)) * t;
        }
        Ok(g)
    }

    pub fn gram_at_real(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(theta.len())?;
        let mut g = self.g0_f64();
        for (k, &t) in self.kernel.iter().zip(theta) {
            g += k.map(|x| rat_to_f64(&x)) * t;
        }
        Ok(g)
    }

    pub fn gram_at_exact(&self, theta: &[Rational]) -> Result<DMatrix<Rational>> {
        self.check_len(theta.len())?;
        let mut g = self.g0.clone();
        for (k, t) in self.kernel.iter().zip(theta) {
            for (gi, ki) in g.iter_mut().zip(k.iter()) {
                if !ki.is_zero() {
                    *gi = gi.clone() + ki.clone() * t.clone();
                }
            }
        }
        Ok(g)
    }

    /// Parameters of a matrix in the fiber, read off its entries.
    pub fn coords_of<T: Scalar>(&self, g: &DMatrix<T>) -> Vec<T> {
        self.kernel_pairs
            .iter()
            .map(|&(p, _, diag)| {
                let v = g[(p.0, p.1)].clone();
                if diag {
                    v
                } else {
                    -v
                }
            })
            .collect()
    }

    /// `m^T G m` as a polynomial.
    pub fn quadratic_form_of<T: Scalar>(&self, g: &DMatrix<T>) -> Poly<T> {
        let n = self.size();
        let mut p = Poly::zero(self.basis.nvars());
        for i in 0..n {
            for j in 0..n {
                let e: Exponents = self.basis.exps()[i]
                    .iter()
                    .zip(&self.basis.exps()[j])
                    .map(|(a, b)| a + b)
                    .collect();
                p.add_term(e, g[(i, j)].clone());
            }
        }
        p
    }

    /// Largest coefficient of `m^T G m - f`, for real symmetric `G`.
    pub fn fiber_residual(&self, g: &DMatrix<f64>) -> f64 {
        self.fiber_defects(g)
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }

    pub fn fiber_residual_complex(&self, g: &DMatrix<Complex64>) -> f64 {
        let f = self.form.to_complex();
        self.quadratic_form_of(g).sub(&f).max_abs_coeff()
    }

    fn fiber_defects(&self, g: &DMatrix<f64>) -> Vec<f64> {
        self.groups
            .iter()
            .zip(self.quad_basis.exps())
            .map(|(pairs, e)| {
                let s: f64 = pairs
                    .iter()
                    .map(|&(i, j)| if i == j { g[(i, i)] } else { g[(i, j)] + g[(j, i)] })
                    .sum();
                s - rat_to_f64(&self.form.coeff(e))
            })
            .collect()
    }

    /// Orthogonal projection (Frobenius norm) onto the fiber.
    pub fn project_to_fiber(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = (g + g.transpose()) * 0.5;
        let defects = self.fiber_defects(&out);
        for (pairs, defect) in self.groups.iter().zip(defects) {
            // weight 1 on the diagonal, 2 off it; each entry moves by defect / sum(weights)
            let total: f64 = pairs.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).sum();
            let step = defect / total;
            for &(i, j) in pairs {
                out[(i, j)] -= step;
                if i != j {
                    out[(j, i)] -= step;
                }
            }
        }
        out
    }

    /// Scale of the form, used to make tolerances relative.
    pub fn form_scale(&self) -> f64 {
        self.form.max_abs_coeff().max(f64::MIN_POSITIVE)
    }

    /// Linear map `W -> m^T (V W V^T) m`, acting on the upper triangle of
    /// symmetric `W` (one column per `(p, q)`, `p <= q`).
    pub(crate) fn restricted_constraints(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let r = v.ncols();
        let mut a = DMatrix::zeros(self.groups.len(), r * (r + 1) / 2);
        let mut col = 0;
        for p in 0..r {
            for q in p..r {
                // entry (i, j) of V (E_pq + E_qp) V^T, or V E_pp V^T
                let entry = |i: usize, j: usize| {
                    if p == q {
                        v[(i, p)] * v[(j, p)]
                    } else {
                        v[(i, p)] * v[(j, q)] + v[(i, q)] * v[(j, p)]
                    }
                };
                for (row, pairs) in self.groups.iter().enumerate() {
                    a[(row, col)] = pairs
                        .iter()
                        .map(|&(i, j)| if i == j { entry(i, i) } else { 2.0 * entry(i, j) })
                        .sum();
                }
                col += 1;
            }
        }
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }

    pub fn is_psd(&self) -> bool {
        self.negative == 0
    }
}

pub fn check_symmetric(g: &DMatrix<f64>) -> Result<()> {
    if !g.is_square() {
        return Err(Error::NonSymmetric(f64::INFINITY));
    }
    let scale = g.amax().max(f64::MIN_POSITIVE);
    let asym = (g - g.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NonSymmetric(asym));
    }
    Ok(())
}

/// Symmetric eigendecomposition of `(g + g^T) / 2`.
///
/// The implicit QR of `SymmetricEigen` occasionally returns eigenvectors that
/// do not reconstruct the matrix (block-structured Gram matrices with exact
/// zeros trigger it), so the result is checked and cyclic Jacobi is used as a
/// fallback.
pub fn sym_eigen(g: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let a = (g + g.transpose()) * 0.5;
    let scale = a.amax().max(1e-300);
    if let Some(eig) = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 1000 * a.nrows().max(1)) {
        if (eig.recompose() - &a).amax() <= 1e-10 * scale {
            return eig;
        }
    }
    jacobi_eigen(a)
}

fn jacobi_eigen(mut a: DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * a.norm().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricEigen {
        eigenvalues: a.diagonal(),
        eigenvectors: v,
    }
}

/// Counts of eigenvalues above `tol * sigma_max`, below `-tol * sigma_max`,
/// and in between.
pub fn inertia(g: &DMatrix<f64>, tol: f64) -> Result<Inertia> {
    check_symmetric(g)?;
    let n = g.nrows();
    if n == 0 {
        return Ok(Inertia {
            positive: 0,
            negative: 0,
            zero: 0,
        });
    }
    let eig = sym_eigen(g);
    let smax = eig.eigenvalues.amax();
    let cut = tol * smax;
    let positive = eig.eigenvalues.iter().filter(|&&l| l > cut).count();
    let negative = eig.eigenvalues.iter().filter(|&&l| l < -cut).count();
    Ok(Inertia {
        positive,
        negative,
        zero: n - positive - negative,
    })
}

/// A tuple of signed squares `sum_i sign_i * l_i^2` over a linear basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<C> {
    pub basis: MonomialBasis,
    /// Coefficient vectors of the linear forms in `basis`.
    pub forms: Vec<Vec<C>>,
    pub signs: Vec<i8>,
}

impl<C: Scalar> Representation<C> {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn form(&self, i: usize) -> Poly<C> {
        self.basis.form(&self.forms[i])
    }

    pub fn is_psd(&self) -> bool {
        self.signs.iter().all(|&s| s > 0)
    }

    /// `sum_i sign_i * l_i^2`.
    pub fn expand(&self) -> Poly<C> {
        let mut out = Poly::zero(self.basis.nvars());
        for (i, &s) in self.signs.iter().enumerate() {
            let sq = self.form(i).square();
            out = if s > 0 { out.add(&sq) } else { out.sub(&sq) };
        }
        out
    }

    /// Canonical Gram matrix `sum_i sign_i v_i v_i^T`.
    pub fn gram(&self) -> DMatrix<C> {
        let n = self.basis.len();
        let mut g = DMatrix::from_element(n, n, C::zero());
        for (v, &s) in self.forms.iter().zip(&self.signs) {
            for i in 0..n {
                if v[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let term = v[i].clone() * v[j].clone();
                    g[(i, j)] = if s > 0 {
                        g[(i, j)].clone() + term
                    } else {
                        g[(i, j)].clone() - term
                    };
                }
            }
        }
        g
    }
}

impl Representation<f64> {
    /// Rank of the canonical Gram matrix (number of independent forms).
    pub fn rank(&self) -> usize {
        let g = self.gram();
        inertia(&g, RANK_TOL).map(|i| i.rank()).unwrap_or(0)
    }
}

/// Max coefficient of `f - sum_i sign_i l_i^2`.
pub fn verify_representation<C: Scalar>(f: &Poly<C>, rep: &Representation<C>) -> f64 {
    f.sub(&rep.expand()).max_abs_coeff()
}

/// Float residual of a float representation against an exact form.
pub fn verify_against_exact(f: &Poly<Rational>, rep: &Representation<f64>) -> f64 {
    verify_representation(&f.map(rat_to_f64), rep)
}

/// Representations are equivalent iff their canonical Gram matrices agree.
pub fn equivalent(a: &Representation<f64>, b: &Representation<f64>, tol: f64) -> bool {
    if a.basis != b.basis {
        return false;
    }
    let (ga, gb) = (a.gram(), b.gram());
    let scale = ga.amax().max(gb.amax()).max(1.0);
    (ga - gb).amax() <= tol * scale
}

pub fn equivalent_exact(a: &Representation<Rational>, b: &Representation<Rational>) -> bool {
    a.basis == b.basis && a.gram() == b.gram()
}

/// Signed squares from the eigendecomposition of a real fiber matrix.
///
/// Forms are `sqrt(|lambda|) * v` ordered by decreasing `|lambda|`, with the
/// first nonzero coefficient of each made positive.
pub fn extract_representation(space: &GramSpace, g: &DMatrix<f64>) -> Result<Representation<f64>> {
    check_symmetric(g)?;
    if g.nrows() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: g.nrows(),
        });
    }
    let res = space.fiber_residual(g);
    if res > 1e-8 * space.form_scale().max(g.amax()) {
        return Err(Error::NotInFiber(res));
    }
    Ok(signed_squares(space.basis(), g, RANK_TOL))
}

/// Eigen-decomposition of any real symmetric matrix into signed squares.
pub fn signed_squares(basis: &MonomialBasis, g: &DMatrix<f64>, tol: f64) -> Representation<f64> {
    let eig = sym_eigen(g);
    let smax = eig.eigenvalues.amax();
    let mut idx: Vec<usize> = (0..g.nrows())
        .filter(|&i| eig.eigenvalues[i].abs() > tol * smax)
        .collect();
    idx.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .partial_cmp(&eig.eigenvalues[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut forms = Vec::new();
    let mut signs = Vec::new();
    for i in idx {
        let lam = eig.eigenvalues[i];
        let v: DVector<f64> = eig.eigenvectors.column(i) * lam.abs().sqrt();
        forms.push(normalize_sign(v.as_slice().to_vec()));
        signs.push(if lam > 0.0 { 1 } else { -1 });
    }
    Representation {
        basis: basis.clone(),
        forms,
        signs,
    }
}

/// Flips `v` so that its first non-negligible coefficient is positive.
pub fn normalize_sign(mut v: Vec<f64>) -> Vec<f64> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Exact certificate `f = sum_i w_i l_i^2` with rational forms and weights,
/// obtained from an `L D L^T` factorization of a rational Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSquares {
    pub basis: MonomialBasis,
    pub forms: Vec<Vec<Rational>>,
    pub weights: Vec<Rational>,
}

impl WeightedSquares {
    pub fn expand(&self) -> Poly<Rational> {
        let mut out = Poly::zero(self.basis.nvars());
        for (v, w) in self.forms.iter().zip(&self.weights) {
            out = out.add(&self.basis.form(v).square().scale(w));
        }
        out
    }

    pub fn is_psd(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative())
    }
}

/// Symmetric Gaussian elimination with diagonal pivoting. Returns `None` if a
/// zero pivot meets a nonzero row (the matrix is then not psd, or needs
/// off-diagonal pivoting which the psd case never does).
pub fn ldl_exact(basis: &MonomialBasis, g: &DMatrix<Rational>) -> Option<WeightedSquares> {
    let n = g.nrows();
    let mut a = g.clone();
    let mut forms = Vec::new();
    let mut weights = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    while let Some(pos) = remaining.iter().position(|&i| !a[(i, i)].is_zero()) {
        let k = remaining.remove(pos);
        let d = a[(k, k)].clone();
        let mut l = vec![Rational::zero(); n];
        for &j in remaining.iter().chain(std::iter::once(&k)) {
            l[j] = a[(k, j)].clone() / d.clone();
        }
        for &i in &remaining {
            for &j in &remaining {
                let upd = l[i].clone() * l[j].clone() * d.clone();
                a[(i, j)] = a[(i, j)].clone() - upd;
            }
        }
        forms.push(l);
        weights.push(d);
    }
    for &i in &remaining {
        for &j in &remaining {
            if !a[(i, j)].is_zero() {
                return None;
            }
        }
    }
    Some(WeightedSquares {
        basis: basis.clone(),
        forms,
        weights,
    })
}

/// Polynomial in JSON: biforms use the biform wire format, forms on other
/// surfaces list exponent vectors.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FormJson {
    Biform(BiformJson),
    Poly { nvars: usize, terms: Vec<PolyTermJson> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyTermJson {
    pub exps: Vec<u32>,
    #[serde(flatten)]
    pub coeff: CoeffJson,
}

impl FormJson {
    pub fn from_poly<C: Scalar + JsonCoeff>(p: &Poly<C>, spec: Option<&SurfaceSpec>) -> Self {
        if let Some(SurfaceSpec::Scroll { .. }) = spec {
            if p.nvars() == 4 {
                let (ds, dx) = p
                    .terms()
                    .keys()
                    .next()
                    .map(|e| (e[0] + e[1], e[2] + e[3]))
                    .unwrap_or((0, 0));
                if let Ok(b) = Biform::from_poly(ds, dx, p.clone()) {
                    return FormJson::Biform(b.to_json());
                }
            }
        }
        FormJson::Poly {
            nvars: p.nvars(),
            terms: p
                .terms()
                .iter()
                .map(|(e, c)| PolyTermJson {
                    exps: e.clone(),
                    coeff: c.to_json(),
                })
                .collect(),
        }
    }

    pub fn to_poly<C: Scalar + JsonCoeff>(&self) -> Result<Poly<C>> {
        match self {
            FormJson::Biform(b) => Ok(Biform::<C>::from_json(b)?.into_poly()),
            FormJson::Poly { nvars, terms } => {
                let mut p = Poly::zero(*nvars);
                for t in terms {
                    if t.exps.len() != *nvars {
                        return Err(Error::Input("exponent vector of wrong length".into()));
                    }
                    p.add_term(t.exps.clone(), C::from_json(&t.coeff)?);
                }
                Ok(p)
            }
        }
    }
}

/// Serialized representation together with the data needed to re-check it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Certificate {
    pub form: FormJson,
    pub surface: SurfaceSpec,
    pub gram: MatrixJson,
    pub forms: Vec<FormJson>,
    pub signs: Vec<i8>,
    pub residual: f64,
}

impl Certificate {
    pub fn new(f: &Poly<Rational>, spec: &SurfaceSpec, rep: &Representation<f64>) -> Self {
        let residual = verify_against_exact(f, rep);
        Certificate {
            form: FormJson::from_poly(f, Some(spec)),
            surface: *spec,
            gram: MatrixJson::from_f64(&rep.gram()),
            forms: (0..rep.len())
                .map(|i| FormJson::from_poly(&rep.form(i), Some(spec)))
                .collect(),
            signs: rep.signs.clone(),
            residual,
        }
    }

    /// Re-expands the stored forms and returns the residual against the
    /// stored form.
    pub fn recheck(&self) -> Result<f64> {
        let f: Poly<f64> = match &self.form {
            FormJson::Biform(b) => Biform::<Rational>::from_json(b)?.into_poly().map(rat_to_f64),
            other => other.to_poly::<f64>()?,
        };
        if self.forms.len() != self.signs.len() {
            return Err(Error::Input("forms and signs differ in length".into()));
        }
        let mut sum = Poly::zero(f.nvars());
        for (fj, &s) in self.forms.iter().zip(&self.signs) {
            let l = fj.to_poly::<f64>()?;
            let sq = l.square();
            sum = if s > 0 { sum.add(&sq) } else { sum.sub(&sq) };
        }
        Ok(f.sub(&sum).max_abs_coeff())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g1_space() -> GramSpace {
        build_for_biform(&fixtures::genus_one_form(), &SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap()
    }

    fn ints(rows: &[&[i64]]) -> DMatrix<Rational> {
        DMatrix::from_fn(rows.len(), rows.len(), |i, j| rat(rows[i][j], 1))
    }

    #[test]
    fn eigen_fallback_reconstructs() {
        let g = DMatrix::from_row_slice(6, 6, &[
            -9.0, 0.0, -3.0, 0.0, 12.0, 0.0,
            0.0, 16.0, 0.0, -12.0, 0.0, -4.0,
            -3.0, 0.0, -1.0, 0.0, 4.0, 0.0,
            0.0, -12.0, 0.0, 25.0, 0.0, -1.0,
            12.0, 0.0, 4.0, 0.0, -16.0, 0.0,
            0.0, -4.0, 0.0, -1.0, 0.0, 2.0,
        ]);
        for a in [g.clone(), g.map(|x| x * (1.0 + 1e-14))] {
            let e = sym_eigen(&a);
            assert!((e.recompose() - &a).amax() < 1e-10);
            let j = jacobi_eigen(a.clone());
            assert!((j.recompose() - &a).amax() < 1e-10);
        }
    }

    #[test]
    fn genus_one_family_matches_displayed_matrix() {
        let sp = g1_space();
        assert_eq!(sp.dim(), 1);
        let a = rat(5, 3);
        let g = sp.gram_at_exact(&[a.clone()]).unwrap();
        let expected = DMatrix::from_fn(4, 4, |i, j| {
            let rows = [[2, 1, 0, 9], [1, 2, -9, 0], [0, -9, 1, 0], [9, 0, 0, 1]];
            match rows[i][j] {
                9 => a.clone(),
                -9 => -a.clone(),
                v => rat(v, 1),
            }
        });
        assert_eq!(g, expected);
    }

    #[test]
    fn genus_two_family_matches_displayed_matrix() {
        let sp = build_for_biform(&fixtures::genus_two_form(), &SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap();
        assert_eq!(sp.dim(), 3);
        let (al, be, ga) = (rat(2, 7), rat(-3, 5), rat(11, 2));
        let g = sp.gram_at_exact(&[al.clone(), be.clone(), ga.clone()]).unwrap();
        let o = Rational::one();
        let z = Rational::zero();
        let expected = [
            [o.clone(), z.clone(), al.clone(), z.clone(), be.clone()],
            [z.clone(), o.clone() - rat(2, 1) * al.clone(), z.clone(), -be.clone(), ga.clone()],
            [al.clone(), z.clone(), o.clone(), -ga.clone(), z.clone()],
            [z.clone(), -be.clone(), -ga.clone(), o.clone(), z.clone()],
            [be.clone(), ga.clone(), z.clone(), z.clone(), o.clone()],
        ];
        assert_eq!(g, DMatrix::from_fn(5, 5, |i, j| expected[i][j].clone()));
    }

    #[test]
    fn single_monomial_form() {
        let f = crate::biform::biform_from_ints(&[(0, 2, 0, 2, 1)]);
        let sp = build_for_biform(&f, &SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap();
        let mut e = DMatrix::from_element(4, 4, Rational::zero());
        e[(0, 0)] = Rational::one();
        assert_eq!(sp.g0(), &e);
        assert_eq!(sp.kernel(), g1_space().kernel());
    }

    #[test]
    fn kernel_counts_for_scrolls() {
        for d in 1..=7u32 {
            for e in 1..=d {
                if d + e > 8 {
                    continue;
                }
                let spec = SurfaceSpec::Scroll { d, e };
                let f = Biform::monomial(0, 2 * d, 0, 2, Rational::one());
                let sp = build_for_biform(&f, &spec).unwrap();
                let n = sp.size();
                let np = spec.ambient_dim();
                assert_eq!(sp.dim(), n * (n + 1) / 2 - (3 * (np + 1) - 3));
            }
        }
        let counts: Vec<usize> = [(1, 1), (2, 1), (2, 2), (3, 1)]
            .iter()
            .map(|&(d, e)| {
                let f = Biform::monomial(0, 2 * d, 0, 2, Rational::one());
                build_for_biform(&f, &SurfaceSpec::Scroll { d, e }).unwrap().dim()
            })
            .collect();
        assert_eq!(counts, vec![1, 3, 6, 6]);
    }

    #[test]
    fn fiber_identity_exact_on_random_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (d, e) in [(1u32, 1u32), (2, 1), (2, 2), (3, 1)] {
            let spec = SurfaceSpec::Scroll { d, e };
            let f = fixtures::random_positive_scroll_form(d, e, &mut rng);
            let sp = build_for_biform(&f, &spec).unwrap();
            for _ in 0..25 {
                let theta: Vec<Rational> = (0..sp.dim())
                    .map(|_| rat(rng.gen_range(-50..50), rng.gen_range(1..9)))
                    .collect();
                let g = sp.gram_at_exact(&theta).unwrap();
                assert_eq!(&sp.quadratic_form_of(&g), f.poly());
                assert_eq!(sp.coords_of(&g), theta);
            }
        }
    }

    #[test]
    fn rejects_forms_outside_the_surface() {
        let f = crate::biform::biform_from_ints(&[(4, 0, 2, 0, 1)]);
        assert!(matches!(
            build_for_biform(&f, &SurfaceSpec::Scroll { d: 2, e: 1 }),
            Err(Error::NotAQuadraticForm(_))
        ));
        let sp = g1_space();
        assert!(matches!(
            sp.gram_at(&[Complex64::zero(), Complex64::zero()]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn inertia_of_known_points() {
        let sp = g1_space();
        let at = |a: f64| sp.gram_at_real(&[a]).unwrap();
        let z = inertia(&DMatrix::zeros(4, 4), PSD_TOL).unwrap();
        assert_eq!((z.positive, z.negative, z.zero), (0, 0, 4));
        let i1 = inertia(&at(1.0), PSD_TOL).unwrap();
        assert_eq!((i1.positive, i1.negative, i1.zero), (3, 0, 1));
        let i3 = inertia(&at(3f64.sqrt()), PSD_TOL).unwrap();
        assert_eq!((i3.positive, i3.negative, i3.zero), (2, 1, 1));
        let mut ns = at(0.5);
        ns[(0, 1)] += 1.0;
        assert!(matches!(inertia(&ns, PSD_TOL), Err(Error::NonSymmetric(_))));
    }

    #[test]
    fn inertia_is_congruence_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sp = g1_space();
        for a in [1.0, 3f64.sqrt(), 0.3, 2.5] {
            let g = sp.gram_at_real(&[a]).unwrap();
            let q = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
            let h = &q * &g * q.transpose();
            let h = (&h + h.transpose()) * 0.5;
            assert_eq!(inertia(&g, PSD_TOL).unwrap(), inertia(&h, PSD_TOL).unwrap());
        }
    }

    fn signed_rep(forms: &[[i64; 4]], signs: &[i8]) -> Representation<Rational> {
        Representation {
            basis: g1_space().basis().clone(),
            forms: forms.iter().map(|v| v.iter().map(|&c| rat(c, 1)).collect()).collect(),
            signs: signs.to_vec(),
        }
    }

    #[test]
    fn known_identities_verify_exactly() {
        let f = fixtures::genus_one_form();
        // basis (yt, ys, xt, xs): (xt - sy), (xs + yt), (yt + ys)
        let rep = signed_rep(&[[0, -1, 1, 0], [1, 0, 0, 1], [1, 1, 0, 0]], &[1, 1, 1]);
        assert_eq!(verify_representation(f.poly(), &rep), 0.0);
        let flipped = signed_rep(&[[0, -1, 1, 0], [1, 0, 0, 1], [1, 1, 0, 0]], &[1, 1, -1]);
        assert!(verify_representation(f.poly(), &flipped) > 0.0);
        // the alpha = 1 matrix is the Gram matrix of this representation
        assert_eq!(rep.gram(), g1_space().gram_at_exact(&[rat(1, 1)]).unwrap());

        // (xt - sqrt3 sy)^2 + (xs + sqrt3 yt)^2 - (yt - ys)^2, checked in floats
        let r3 = 3f64.sqrt();
        let rep3 = Representation {
            basis: g1_space().basis().clone(),
            forms: vec![vec![0.0, -r3, 1.0, 0.0], vec![r3, 0.0, 0.0, 1.0], vec![1.0, -1.0, 0.0, 0.0]],
            signs: vec![1, 1, -1],
        };
        assert!(verify_against_exact(f.poly(), &rep3) < 1e-14);
        let g = g1_space().gram_at_real(&[r3]).unwrap();
        assert!((rep3.gram() - g).amax() < 1e-14);
    }

    #[test]
    fn extraction_reproduces_known_forms() {
        let sp = g1_space();
        let rep = extract_representation(&sp, &sp.gram_at_real(&[1.0]).unwrap()).unwrap();
        assert_eq!(rep.len(), 3);
        assert!(rep.is_psd());
        let known = signed_rep(&[[0, -1, 1, 0], [1, 0, 0, 1], [1, 1, 0, 0]], &[1, 1, 1]);
        let known_f = Representation {
            basis: known.basis.clone(),
            forms: known.forms.iter().map(|v| v.iter().map(rat_to_f64).collect()).collect(),
            signs: known.signs.clone(),
        };
        assert!(equivalent(&rep, &known_f, 1e-10));
        assert!(verify_against_exact(sp.form(), &rep) < 1e-12);
        let minus = extract_representation(&sp, &sp.gram_at_real(&[-1.0]).unwrap()).unwrap();
        assert!(!equivalent(&rep, &minus, 1e-8));
        let off = sp.gram_at_real(&[1.0]).unwrap() * 1.1;
        assert!(matches!(extract_representation(&sp, &off), Err(Error::NotInFiber(_))));
    }

    #[test]
    fn extraction_on_genus_two_example() {
        let sp = build_for_biform(&fixtures::genus_two_form(), &SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap();
        let g = sp.gram_at_real(&[0.0, 0.0, 1.0]).unwrap();
        let rep = extract_representation(&sp, &g).unwrap();
        assert_eq!(rep.len(), 3);
        assert!(rep.is_psd());
        // (1)^2 + (s + xs)^2 + (s^2 - x)^2 in the basis (yt^2, yts, ys^2, xt^2, xts)
        let known = Representation {
            basis: sp.basis().clone(),
            forms: vec![
                vec![1.0, 0.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 1.0, -1.0, 0.0],
            ],
            signs: vec![1, 1, 1],
        };
        assert!(verify_against_exact(sp.form(), &known) == 0.0);
        assert!(equivalent(&rep, &known, 1e-10));
    }

    #[test]
    fn single_square_extraction() {
        let f = crate::biform::biform_from_ints(&[(0, 2, 0, 2, 1)]);
        let sp = build_for_biform(&f, &SurfaceSpec::Scroll { d: 1, e: 1 }).unwrap();
        let rep = extract_representation(&sp, &sp.g0_f64()).unwrap();
        assert_eq!(rep.forms, vec![vec![1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(rep.signs, vec![1]);
    }

    #[test]
    fn equivalence_is_orthogonally_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sp = g1_space();
        let rep = extract_representation(&sp, &sp.gram_at_real(&[1.0]).unwrap()).unwrap();
        let q = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
        let l = DMatrix::from_fn(3, 4, |i, j| rep.forms[i][j]);
        let rotated = &q * l;
        let rep2 = Representation {
            basis: rep.basis.clone(),
            forms: (0..3).map(|i| rotated.row(i).iter().copied().collect()).collect(),
            signs: vec![1, 1, 1],
        };
        assert!(equivalent(&rep, &rep2, 1e-12));
    }

    #[test]
    fn extraction_round_trips_canonical_gram() {
        let sp = g1_space();
        for a in [0.4, 1.0, 3f64.sqrt(), -2.0] {
            let g = sp.gram_at_real(&[a]).unwrap();
            let rep = extract_representation(&sp, &g).unwrap();
            assert!((rep.gram() - &g).amax() < 1e-12);
            let again = extract_representation(&sp, &rep.gram()).unwrap();
            assert_eq!(again.signs, rep.signs);
            for (u, v) in again.forms.iter().zip(&rep.forms) {
                for (x, y) in u.iter().zip(v) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn exact_ldl_certificate() {
        let sp = g1_space();
        let g = sp.gram_at_exact(&[rat(1, 1)]).unwrap();
        let cert = ldl_exact(sp.basis(), &g).unwrap();
        assert!(cert.is_psd());
        assert_eq!(&cert.expand(), sp.form());
        let bad = ints(&[&[1, 2], &[2, 1]]);
        let b2 = MonomialBasis::new(2, vec![vec![1, 0], vec![0, 1]]);
        assert!(!ldl_exact(&b2, &bad).unwrap().is_psd());
    }

    #[test]
    fn projection_lands_in_fiber() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = fixtures::random_positive_scroll_form(2, 1, &mut rng);
        let sp = build_for_biform(&f, &SurfaceSpec::Scroll { d: 2, e: 1 }).unwrap();
        let x = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-3.0..3.0));
        let p = sp.project_to_fiber(&x);
        assert!(sp.fiber_residual(&p) < 1e-12);
        // idempotent
        assert!((sp.project_to_fiber(&p) - &p).amax() < 1e-12);
        // orthogonal: X - P(X) is orthogonal to every kernel direction
        let diff = (&x + x.transpose()) * 0.5 - &p;
        for k in sp.kernel_f64() {
            assert!(diff.component_mul(&k).sum().abs() < 1e-10);
        }
    }

    #[test]
    fn certificate_round_trip() {
        let sp = g1_space();
        let rep = extract_representation(&sp, &sp.gram_at_real(&[1.0]).unwrap()).unwrap();
        let cert = Certificate::new(sp.form(), &SurfaceSpec::Scroll { d: 1, e: 1 }, &rep);
        let s = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert!(back.recheck().unwrap() <= 1e-12);
        assert_eq!(back.signs, vec![1, 1, 1]);
    }
}
