//! Factorization `A = B B^T` of positive semidefinite symmetric matrices of
//! binary forms, with `B` of size `n x (n + 1)`.
//!
//! `A` is read as the quadratic form `sum a_ij(s, t) x_i x_j` on a rational
//! normal scroll of dimension `n` (a truncated prism over the simplex). A psd
//! Gram matrix is found by alternating projections, its rank is lowered by
//! moving to faces of the Gram spectrahedron, and a factor with `n + 1`
//! columns is then polished by Levenberg-Marquardt on the factor itself.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{FromPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binary_form::BinaryForm;
use crate::binary_sos::enumerate_two_squares;
use crate::error::{Error, Result};
use crate::gram::{build_gram_space, sym_eigen, GramSpace};
use crate::json::{CoeffJson, JsonCoeff};
use crate::poly::Poly;
use crate::scalar::{rat_to_f64, Rational};
use crate::surface::MonomialBasis;

/// Symmetric `n x n` matrix of binary forms; zero entries may have any degree.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrixPoly {
    n: usize,
    /// Row-major, symmetric.
    entries: Vec<BinaryForm<Rational>>,
}

impl SymMatrixPoly {
    /// Builds from the upper triangle; `upper(i, j)` is called for `i <= j`.
    pub fn from_fn(n: usize, mut upper: impl FnMut(usize, usize) -> BinaryForm<Rational>) -> Self {
        let mut entries = vec![BinaryForm::zero(0); n * n];
        for i in 0..n {
            for j in i..n {
                let e = upper(i, j);
                entries[j * n + i] = e.clone();
                entries[i * n + j] = e;
            }
        }
        SymMatrixPoly { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &BinaryForm<Rational> {
        &self.entries[i * self.n + j]
    }

    pub fn eval(&self, s: f64, t: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).to_f64().eval_real(s, t))
    }

    /// Largest coefficient over all entries.
    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs_coeff()).fold(0.0, f64::max)
    }

    /// `B B^T` for a float factor.
    pub fn from_factor(b: &[Vec<BinaryForm<f64>>]) -> Vec<Vec<BinaryForm<f64>>> {
        let n = b.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc: Option<BinaryForm<f64>> = None;
                        for (p, q) in b[i].iter().zip(&b[j]) {
                            let term = p.mul(q);
                            acc = Some(match acc {
                                None => term,
                                Some(a) => a.add(&term).expect("row degrees are fixed"),
                            });
                        }
                        acc.unwrap_or_else(|| BinaryForm::zero(0))
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SymMatrixJson {
    n: usize,
    /// Keys `"i,j"`; missing entries are zero, the lower triangle may be omitted.
    entries: BTreeMap<String, SparseFormJson>,
}

#[derive(Serialize, Deserialize)]
struct SparseFormJson {
    deg: usize,
    coeffs: Vec<CoeffJson>,
}

/// Rational coefficients pass through; floats are converted exactly.
fn coeff_from_json(c: &CoeffJson) -> Result<Rational> {
    match c {
        CoeffJson::Rational { .. } => Rational::from_json(c),
        CoeffJson::Complex { re, im } => {
            if *im != 0.0 {
                return Err(Error::Input("matrix entries must be real".into()));
            }
            <Rational as FromPrimitive>::from_f64(*re).ok_or_else(|| Error::Input(format!("coefficient {re} is not finite")))
        }
    }
}

impl Serialize for SymMatrixPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut entries = BTreeMap::new();
        for i in 0..self.n {
            for j in i..self.n {
                let e = self.entry(i, j);
                if !e.is_zero() {
                    entries.insert(
                        format!("{i},{j}"),
                        SparseFormJson {
                            deg: e.deg(),
                            coeffs: e.coeffs().iter().map(|c| c.to_json()).collect(),
                        },
                    );
                }
            }
        }
        SymMatrixJson { n: self.n, entries }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SymMatrixPoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SymMatrixJson::deserialize(de)?;
        let mut upper: BTreeMap<(usize, usize), BinaryForm<Rational>> = BTreeMap::new();
        for (key, form) in &j.entries {
            let idx: Vec<usize> = key
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| D::Error::custom(format!("bad entry key {key:?}")))?;
            let [i, k] = idx[..] else {
                return Err(D::Error::custom(format!("bad entry key {key:?}")));
            };
            if i >= j.n || k >= j.n {
                return Err(D::Error::custom(format!("entry {key:?} outside a {0}x{0} matrix", j.n)));
            }
            if form.coeffs.len() != form.deg + 1 {
                return Err(D::Error::custom(format!("entry {key:?}: degree {} needs {} coefficients", form.deg, form.deg + 1)));
            }
            let coeffs = form.coeffs.iter().map(coeff_from_json).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
            let f = BinaryForm::new(coeffs);
            let pos = (i.min(k), i.max(k));
            if let Some(prev) = upper.get(&pos) {
                if prev != &f {
                    return Err(D::Error::custom(format!("entries ({i},{k}) and ({k},{i}) differ")));
                }
            }
            upper.insert(pos, f);
        }
        Ok(SymMatrixPoly::from_fn(j.n, |i, k| upper.get(&(i, k)).cloned().unwrap_or_else(|| BinaryForm::zero(0))))
    }
}

/// Truncated prism over the `(n-1)`-simplex with heights `d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrismSpec {
    pub heights: Vec<u32>,
}

impl PrismSpec {
    /// Variables `(s, t, x_1, ..., x_n)`; monomials `s^k t^(d_i - k) x_i`.
    pub fn basis(&self) -> MonomialBasis {
        let n = self.heights.len();
        let mut exps = Vec::new();
        for (i, &d) in self.heights.iter().enumerate() {
            for k in 0..=d {
                let mut e = vec![0; n + 2];
                e[0] = k;
                e[1] = d - k;
                e[2 + i] = 1;
                exps.push(e);
            }
        }
        MonomialBasis::new(n + 2, exps)
    }

    pub fn ambient_dim(&self) -> usize {
        self.heights.iter().map(|&d| d as usize + 1).sum::<usize>() - 1
    }

    /// Position of `s^k t^(d_i - k) x_i` in the basis.
    fn index(&self, i: usize, k: usize) -> usize {
        self.heights[..i].iter().map(|&d| d as usize + 1).sum::<usize>() + k
    }
}

/// `d_i = deg(a_ii) / 2`, checked against every off-diagonal entry.
pub fn degree_pattern(a: &SymMatrixPoly) -> Result<Vec<u32>> {
    let mut d = Vec::with_capacity(a.n);
    for i in 0..a.n {
        let e = a.entry(i, i);
        if e.is_zero() {
            return Err(Error::Input(format!("diagonal entry {i} is zero")));
        }
        if e.deg() % 2 == 1 {
            return Err(Error::OddDiagonalDegree(i));
        }
        d.push((e.deg() / 2) as u32);
    }
    for i in 0..a.n {
        for j in i + 1..a.n {
            let e = a.entry(i, j);
            if !e.is_zero() && e.deg() as u32 != d[i] + d[j] {
                return Err(Error::OffDiagonalDegreeMismatch {
                    i,
                    j,
                    got: e.deg() as u32,
                    expected: d[i] + d[j],
                });
            }
        }
    }
    Ok(d)
}

/// The quadratic form `sum a_ij x_i x_j` on the prism of `A`.
pub fn embed(a: &SymMatrixPoly) -> Result<(PrismSpec, Poly<Rational>)> {
    let heights = degree_pattern(a)?;
    let n = a.n;
    let two = crate::scalar::rat(2, 1);
    let mut f = Poly::zero(n + 2);
    for i in 0..n {
        for j in i..n {
            let e = a.entry(i, j);
            for (k, c) in e.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut exps = vec![0; n + 2];
                exps[0] = k as u32;
                exps[1] = (e.deg() - k) as u32;
                exps[2 + i] += 1;
                exps[2 + j] += 1;
                f.add_term(exps, if i == j { c.clone() } else { c.clone() * two.clone() });
            }
        }
    }
    Ok((PrismSpec { heights }, f))
}

/// Eigenvalues clipped to `[floor, inf)`: the nearest matrix in
/// `{G : G >= floor I}`.
fn clip(g: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let eig = sym_eigen(g);
    let lam = eig.eigenvalues.map(|l| l.max(floor));
    &eig.eigenvectors * DMatrix::from_diagonal(&lam) * eig.eigenvectors.transpose()
}

fn min_eigenvalue(g: &DMatrix<f64>) -> (f64, f64) {
    let eig = sym_eigen(g);
    (eig.eigenvalues.min(), eig.eigenvalues.amax())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    /// Accept a fiber point with `lambda_min >= -tol * sigma_max`.
    pub tol: f64,
    pub budget: usize,
    /// Initial eigenvalue floor, relative to the form's scale; the floor is
    /// lowered when progress stalls.
    pub margin: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions {
            tol: 1e-12,
            budget: 100_000,
            margin: 1e-2,
        }
    }
}

/// Alternating projections between the fiber and `{G >= floor I}`.
#[derive(Clone, Debug)]
pub struct ProjectionRun {
    /// Last fiber point.
    pub gram: DMatrix<f64>,
    /// Distance from each fiber iterate to the cone.
    pub distances: Vec<f64>,
    pub converged: bool,
}

pub fn alternating_projections(space: &GramSpace, start: &DMatrix<f64>, floor: f64, tol: f64, budget: usize) -> ProjectionRun {
    let mut x = space.project_to_fiber(start);
    let mut distances = Vec::new();
    for _ in 0..budget {
        let (lmin, lmax) = min_eigenvalue(&x);
        if lmin >= -tol * lmax.max(f64::MIN_POSITIVE) {
            return ProjectionRun {
                gram: x,
                distances,
                converged: true,
            };
        }
        let p = clip(&x, floor);
        distances.push((&x - &p).norm());
        let next = space.project_to_fiber(&p);
        // stalled: the shrunken cone misses the fiber
        let n = distances.len();
        if n > 200 && distances[n - 1] > (1.0 - 1e-4) * distances[n - 101] {
            x = next;
            break;
        }
        x = next;
    }
    ProjectionRun {
        gram: x,
        distances,
        converged: false,
    }
}

/// A psd point of the fiber, or `IterationBudgetExceeded`.
pub fn psd_feasible(space: &GramSpace, opts: &FeasibilityOptions) -> Result<DMatrix<f64>> {
    let (g, converged) = feasible_point(space, opts);
    if converged {
        return Ok(g);
    }
    let (lmin, _) = min_eigenvalue(&g);
    Err(Error::IterationBudgetExceeded {
        fiber_gap: space.fiber_residual(&g),
        psd_gap: -lmin,
    })
}

/// Alternating projections with a shrinking eigenvalue floor; returns the
/// last fiber iterate and whether it is psd.
fn feasible_point(space: &GramSpace, opts: &FeasibilityOptions) -> (DMatrix<f64>, bool) {
    let n = space.size();
    let scale = space.form_scale();
    let mut start = DMatrix::<f64>::identity(n, n) * scale;
    let mut floor = opts.margin * scale;
    let mut used = 0;
    loop {
        let run = alternating_projections(space, &start, floor, opts.tol, opts.budget - used);
        used += run.distances.len().max(1);
        if run.converged || used >= opts.budget || floor == 0.0 {
            return (run.gram, run.converged);
        }
        floor = if floor < 1e-10 * scale { 0.0 } else { floor / 100.0 };
        start = run.gram;
    }
}

#[derive(Clone, Debug)]
pub struct RankReduction {
    pub gram: DMatrix<f64>,
    pub rank: usize,
    /// Rank after each move, starting with the input rank.
    pub history: Vec<usize>,
}

fn numerical_rank(g: &DMatrix<f64>, tol: f64) -> usize {
    let eig = sym_eigen(g);
    let cut = tol * eig.eigenvalues.amax();
    eig.eigenvalues.iter().filter(|&&l| l > cut).count()
}

/// Relative eigenvalue cut separating the range of a psd Gram matrix.
pub const RANK_CUT: f64 = 1e-9;

/// Moves a psd fiber point to a face of the spectrahedron of rank at most
/// `target`, or to an extreme point if the face structure stops it first.
pub fn reduce_rank(space: &GramSpace, g: &DMatrix<f64>, target: usize) -> RankReduction {
    let mut g = g.clone();
    let mut history = vec![numerical_rank(&g, RANK_CUT)];
    loop {
        let eig = sym_eigen(&g);
        let cut = RANK_CUT * eig.eigenvalues.amax();
        let idx: Vec<usize> = (0..g.nrows()).filter(|&i| eig.eigenvalues[i] > cut).collect();
        let r = idx.len();
        if r <= target {
            break;
        }
        let v = DMatrix::from_fn(g.nrows(), r, |i, c| eig.eigenvectors[(i, idx[c])]);
        let lam: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        // W with m^T V W V^T m = 0
        let a = space.restricted_constraints(&v);
        let ata = a.transpose() * &a;
        let e = sym_eigen(&ata);
        let (k, &smallest) = e
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .expect("nonempty");
        if smallest > 1e-12 * e.eigenvalues.amax().max(f64::MIN_POSITIVE) {
            break;
        }
        let w_vec = e.eigenvectors.column(k);
        let mut w = DMatrix::<f64>::zeros(r, r);
        let mut col = 0;
        for p in 0..r {
            for q in p..r {
                w[(p, q)] = w_vec[col];
                w[(q, p)] = w_vec[col];
                col += 1;
            }
        }
        // Lambda + tau W stays psd up to the first generalized eigenvalue
        let sq: Vec<f64> = lam.iter().map(|l| 1.0 / l.sqrt()).collect();
        let m = DMatrix::from_fn(r, r, |p, q| w[(p, q)] * sq[p] * sq[q]);
        let mu = sym_eigen(&m).eigenvalues;
        let (mu_min, mu_max) = (mu.min(), mu.max());
        let tau = if mu_max >= -mu_min { -1.0 / mu_max } else { -1.0 / mu_min };
        let inner = DMatrix::from_diagonal(&DVector::from_vec(lam.clone())) + w * tau;
        let next = space.project_to_fiber(&(&v * inner * v.transpose()));
        let rank = numerical_rank(&next, RANK_CUT);
        if rank >= r {
            break;
        }
        history.push(rank);
        g = next;
    }
    let rank = numerical_rank(&g, RANK_CUT);
    RankReduction { gram: g, rank, history }
}

/// `reduce_rank` that fails with `StuckAboveTarget` instead of stopping.
pub fn rank_reduce(space: &GramSpace, g: &DMatrix<f64>, target: usize) -> Result<RankReduction> {
    let red = reduce_rank(space, g, target);
    if red.rank > target {
        return Err(Error::StuckAboveTarget {
            achieved: red.rank,
            target,
        });
    }
    Ok(red)
}

/// `V` with `G = V V^T`, keeping the `cols` largest eigenvalues (zero
/// columns pad a smaller rank).
fn truncated_factor(g: &DMatrix<f64>, cols: usize) -> DMatrix<f64> {
    let eig = sym_eigen(g);
    let mut order: Vec<usize> = (0..g.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    DMatrix::from_fn(g.nrows(), cols, |i, c| match order.get(c) {
        Some(&k) if eig.eigenvalues[k] > 0.0 => eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt(),
        _ => 0.0,
    })
}

/// Coefficient defects of `m^T V V^T m - f`, one per quadratic monomial.
struct FactorResidual<'a> {
    space: &'a GramSpace,
    groups: Vec<Vec<(usize, usize)>>,
    target: Vec<f64>,
}

impl<'a> FactorResidual<'a> {
    fn new(space: &'a GramSpace) -> Self {
        let basis = space.basis();
        let quad = space.quadratic_basis();
        let mut groups = vec![Vec::new(); quad.len()];
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let e: Vec<u32> = basis.exps()[i].iter().zip(&basis.exps()[j]).map(|(a, b)| a + b).collect();
                groups[quad.position(&e).expect("products are in the quadratic basis")].push((i, j));
            }
        }
        let target = quad.exps().iter().map(|e| rat_to_f64(&space.form().coeff(e))).collect();
        FactorResidual { space, groups, target }
    }

    fn residual(&self, v: &DMatrix<f64>) -> DVector<f64> {
        let g = v * v.transpose();
        DVector::from_iterator(
            self.groups.len(),
            self.groups.iter().zip(&self.target).map(|(pairs, t)| {
                pairs.iter().map(|&(i, j)| if i == j { g[(i, i)] } else { 2.0 * g[(i, j)] }).sum::<f64>() - t
            }),
        )
    }

    fn jacobian(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let (n, c) = (v.nrows(), v.ncols());
        let mut jac = DMatrix::zeros(self.groups.len(), n * c);
        for (row, pairs) in self.groups.iter().enumerate() {
            for &(i, j) in pairs {
                for col in 0..c {
                    if i == j {
                        jac[(row, i * c + col)] += 2.0 * v[(i, col)];
                    } else {
                        jac[(row, i * c + col)] += 2.0 * v[(j, col)];
                        jac[(row, j * c + col)] += 2.0 * v[(i, col)];
                    }
                }
            }
        }
        jac
    }

    /// Levenberg-Marquardt on the entries of `V`.
    fn solve(&self, mut v: DMatrix<f64>, iters: usize) -> (DMatrix<f64>, f64) {
        let scale = self.space.form_scale();
        let mut r = self.residual(&v);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..iters {
            if r.amax() <= 1e-14 * scale {
                break;
            }
            let j = self.jacobian(&v);
            let jtj = j.transpose() * &j;
            let grad = j.transpose() * &r;
            let diag_scale = jtj.diagonal().amax().max(f64::MIN_POSITIVE);
            let mut improved = false;
            for _ in 0..30 {
                let mut m = jtj.clone();
                for k in 0..m.nrows() {
                    m[(k, k)] += lambda * diag_scale;
                }
                let Some(step) = m.cholesky().map(|c| c.solve(&(-&grad))) else {
                    lambda *= 10.0;
                    continue;
                };
                let cand = &v + DMatrix::from_row_slice(v.nrows(), v.ncols(), step.as_slice());
                let rc = self.residual(&cand);
                let cc = rc.norm_squared();
                if cc < cost {
                    v = cand;
                    r = rc;
                    cost = cc;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (v, r.amax())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorOptions {
    pub feasibility: FeasibilityOptions,
    /// Grid size per axis of the psd check on `[-1, 1]^2`.
    pub grid: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            feasibility: FeasibilityOptions::default(),
            grid: 101,
            seed: 0,
            restarts: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Factorization {
    /// `n` rows of `n + 1` forms; row `i` has degree `d_i`.
    pub b: Vec<Vec<BinaryForm<f64>>>,
    pub heights: Vec<u32>,
    /// `max |A - B B^T|` over coefficients, divided by `max |A|`.
    pub relative_residual: f64,
    /// Ranks visited by the face reduction.
    pub rank_history: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Psd on a `grid x grid` sample of `[-1, 1]^2` (each point is a direction
/// in P^1).
pub fn check_psd_on_grid(a: &SymMatrixPoly, grid: usize) -> Result<()> {
    let grid = grid.max(2);
    for p in 0..grid {
        for q in 0..grid {
            let s = -1.0 + 2.0 * p as f64 / (grid - 1) as f64;
            let t = -1.0 + 2.0 * q as f64 / (grid - 1) as f64;
            if s == 0.0 && t == 0.0 {
                continue;
            }
            let m = a.eval(s, t);
            let (lmin, lmax) = min_eigenvalue(&m);
            if lmin < -1e-9 * lmax - 1e-13 * a.max_abs_coeff() {
                return Err(Error::NotPsd { s, t, eigenvalue: lmin });
            }
        }
    }
    Ok(())
}

/// Coefficientwise `max |A - B B^T| / max |A|`.
pub fn factor_residual(a: &SymMatrixPoly, b: &[Vec<BinaryForm<f64>>]) -> f64 {
    let prod = SymMatrixPoly::from_factor(b);
    let mut worst = 0.0f64;
    for i in 0..a.n {
        for j in 0..a.n {
            let x = a.entry(i, j).to_f64();
            let y = &prod[i][j];
            for k in 0..=x.deg().max(y.deg()) {
                worst = worst.max((x.coeff(k) - y.coeff(k)).abs());
            }
        }
    }
    worst / a.max_abs_coeff().max(f64::MIN_POSITIVE)
}

pub fn factor(a: &SymMatrixPoly, opts: &FactorOptions) -> Result<Factorization> {
    check_psd_on_grid(a, opts.grid)?;
    let (prism, f) = embed(a)?;
    let n = a.n;
    if n == 1 {
        return factor_scalar(a, prism.heights);
    }
    let space = build_gram_space(&f, &prism.basis())?;
    let mut warnings = Vec::new();
    // Without interior points (e.g. A singular somewhere) the projections only
    // get close; the factor refinement below absorbs the remaining gap.
    let (g, converged) = feasible_point(&space, &opts.feasibility);
    let red = if converged {
        reduce_rank(&space, &g, n + 1)
    } else {
        let p = clip(&g, 0.0);
        RankReduction {
            rank: numerical_rank(&p, RANK_CUT),
            history: Vec::new(),
            gram: p,
        }
    };
    let solver = FactorResidual::new(&space);
    let scale = space.form_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // Factors of a lower-rank A are rank deficient, where the refinement only
    // converges sublinearly; fewer columns padded with zeros fix that.
    let mut found = None;
    let mut attempts = 0;
    for cols in (1..=n + 1).rev() {
        let face = truncated_factor(&red.gram, cols);
        let (mut v, mut res) = solver.solve(face.clone(), 200);
        let mut attempt = 0;
        while res > 1e-10 * scale && attempt < opts.restarts {
            // restart from a perturbed face point, or every other time from a random one
            attempt += 1;
            let size = face.amax().max(scale.sqrt()) * 0.5;
            let start = if attempt % 2 == 1 {
                face.map(|x| x + size * rng.gen_range(-1.0..1.0))
            } else {
                face.map(|_| size * rng.gen_range(-1.0..1.0))
            };
            let (cand, r) = solver.solve(start, 1000);
            if r < res {
                (v, res) = (cand, r);
            }
        }
        attempts += attempt;
        if res <= 1e-10 * scale {
            let mut padded = DMatrix::zeros(v.nrows(), n + 1);
            padded.columns_mut(0, cols).copy_from(&v);
            found = Some((padded, cols));
            break;
        }
    }
    let v = match found {
        Some((v, cols)) => {
            if cols <= n {
                warnings.push(format!("A has rank {cols}; {} columns of B are zero", n + 1 - cols));
            }
            if attempts > 0 {
                warnings.push(format!("needed {attempts} restarts of the factor refinement"));
            }
            v
        }
        None => {
            warnings.push(format!(
                "no factor with {} columns found; returning the rank-{} face point",
                n + 1,
                red.rank
            ));
            truncated_factor(&red.gram, red.rank.max(n + 1))
        }
    };
    let b: Vec<Vec<BinaryForm<f64>>> = (0..n)
        .map(|i| {
            (0..v.ncols())
                .map(|c| {
                    let d = prism.heights[i] as usize;
                    BinaryForm::new((0..=d).map(|k| v[(prism.index(i, k), c)]).collect())
                })
                .collect()
        })
        .collect();
    let relative_residual = factor_residual(a, &b);
    Ok(Factorization {
        b,
        heights: prism.heights,
        relative_residual,
        rank_history: red.history,
        warnings,
    })
}

/// `n = 1`: a nonnegative binary form as a sum of two squares.
fn factor_scalar(a: &SymMatrixPoly, heights: Vec<u32>) -> Result<Factorization> {
    let f = a.entry(0, 0).to_f64();
    let reps = enumerate_two_squares(&f)?;
    let rep = reps.first().ok_or(Error::NotNonnegative)?;
    let d = heights[0] as usize;
    let mut row: Vec<BinaryForm<f64>> = rep.forms.iter().map(|v| BinaryForm::new(v.clone())).collect();
    while row.len() < 2 {
        row.push(BinaryForm::zero(d));
    }
    let b = vec![row];
    let relative_residual = factor_residual(a, &b);
    Ok(Factorization {
        b,
        heights,
        relative_residual,
        rank_history: Vec::new(),
        warnings: Vec::new(),
    })
}

/// `B_0 B_0^T` for a random integer `n x k` matrix of forms with row degrees
/// `heights`.
pub fn random_psd_matrix<R: Rng>(heights: &[u32], k: usize, rng: &mut R) -> SymMatrixPoly {
    let b: Vec<Vec<BinaryForm<Rational>>> = heights
        .iter()
        .map(|&d| {
            (0..k)
                .map(|_| BinaryForm::from_ints(&(0..=d).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    SymMatrixPoly::from_fn(heights.len(), |i, j| {
        let mut acc = BinaryForm::zero((heights[i] + heights[j]) as usize);
        for c in 0..k {
            acc = acc.add(&b[i][c].mul(&b[j][c])).expect("same degree");
        }
        acc
    })
}
