//! Enumeration of the low-rank points of a Gram space.
//!
//! The rank-`r` locus of `G(theta) = G0 + sum theta_i K_i` is cut out by the
//! `(r+1)`-minors. For the square system we take, for each equation, random
//! complex `N x (r+1)` matrices `U`, `V` and use `det(U^T G(theta) V)`, which
//! by Cauchy-Binet is a random combination of all `(r+1)`-minors. Endpoints
//! are accepted against the full list of minors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{extract_representation, inertia, verify_against_exact, GramSpace, Inertia, Representation, PSD_TOL};
use crate::homotopy::{solve, HomogeneousSystem, PathStats, SolutionSet, SolveConfig};
use crate::scalar::rat_to_f64;
use crate::surface::SurfaceSpec;

type C64 = Complex64;

/// Determinant of a small row-major matrix.
pub(crate) fn det(m: &[C64], n: usize) -> C64 {
    match n {
        0 => C64::new(1.0, 0.0),
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            let mut a = m.to_vec();
            let mut d = C64::new(1.0, 0.0);
            for c in 0..n {
                let p = (c..n)
                    .max_by(|&i, &j| a[i * n + c].norm().partial_cmp(&a[j * n + c].norm()).unwrap())
                    .unwrap();
                if a[p * n + c].is_zero() {
                    return C64::zero();
                }
                if p != c {
                    for j in 0..n {
                        a.swap(c * n + j, p * n + j);
                    }
                    d = -d;
                }
                let piv = a[c * n + c];
                d *= piv;
                for i in c + 1..n {
                    let f = a[i * n + c] / piv;
                    for j in c..n {
                        let v = a[c * n + j];
                        a[i * n + j] -= f * v;
                    }
                }
            }
            d
        }
    }
}

/// Cofactor matrix (row-major), so that `d det / d m_ab = cof_ab`.
#[cfg(test)]
pub(crate) fn cofactors(m: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::zero(); n * n];
    cofactors_into(m, n, &mut out);
    out
}

fn cofactors_into(m: &[C64], n: usize, out: &mut [C64]) {
    if n == 1 {
        out[0] = C64::new(1.0, 0.0);
        return;
    }
    let mut sub = [C64::zero(); 64];
    for a in 0..n {
        for b in 0..n {
            let mut idx = 0;
            for i in (0..n).filter(|&i| i != a) {
                for j in (0..n).filter(|&j| j != b) {
                    sub[idx] = m[i * n + j];
                    idx += 1;
                }
            }
            let d = det(&sub[..idx], n - 1);
            out[a * n + b] = if (a + b) % 2 == 0 { d } else { -d };
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Largest `(r+1)`-minor of `g`, divided by `max|g_ij|^(r+1)`.
pub fn minor_residual(g: &DMatrix<C64>, minors: &[(Vec<usize>, Vec<usize>)], r: usize) -> f64 {
    let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let m = r + 1;
    let mut buf = vec![C64::zero(); m * m];
    let mut worst = 0.0f64;
    for (rows, cols) in minors {
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                buf[a * m + b] = g[(i, j)] / scale;
            }
        }
        worst = worst.max(det(&buf, m).norm());
    }
    worst
}

pub struct MinorSystem {
    size: usize,
    rank: usize,
    /// `G0, K_1, ..., K_k` as complex matrices.
    mats: Vec<DMatrix<C64>>,
    /// Index sets `(I, J)`, `I <= J`, of all `(r+1)`-minors.
    minors: Vec<(Vec<usize>, Vec<usize>)>,
    /// `U_l^T mats[i] V_l` for each equation `l` and matrix `i`, row-major,
    /// concatenated.
    pencils: Vec<C64>,
}

/// The rank-`r` minor system of a Gram space; the random square subsystem
/// is drawn from `seed`.
pub fn minor_system(space: &GramSpace, r: usize, seed: u64) -> Result<MinorSystem> {
    let n = space.size();
    if r >= n {
        return Err(Error::RankTooLarge { rank: r, size: n });
    }
    let to_c = |m: &DMatrix<crate::scalar::Rational>| m.map(|x| C64::new(rat_to_f64(&x), 0.0));
    let mut mats = vec![to_c(space.g0())];
    mats.extend(space.kernel().iter().map(to_c));
    let m = r + 1;
    let sets = subsets(n, m);
    let mut minors = Vec::new();
    for (a, i) in sets.iter().enumerate() {
        for j in &sets[a..] {
            minors.push((i.clone(), j.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d69_6e6f_7273);
    let mut gauss = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    if m > 9 {
        return Err(Error::RankTooLarge { rank: r, size: 9 });
    }
    let mut pencils = Vec::with_capacity(space.dim() * mats.len() * m * m);
    for _ in 0..space.dim() {
        let u = DMatrix::from_fn(n, m, |_, _| gauss());
        let v = DMatrix::from_fn(n, m, |_, _| gauss());
        let start = pencils.len();
        for g in &mats {
            let p = u.transpose() * g * &v;
            pencils.extend((0..m).flat_map(|a| (0..m).map(move |b| (a, b))).map(|(a, b)| p[(a, b)]));
        }
        // unit-size equations keep the homotopy well scaled against the start system
        let block = &mut pencils[start..];
        let big = block.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if big > 0.0 {
            block.iter_mut().for_each(|z| *z /= big);
        }
    }
    Ok(MinorSystem {
        size: n,
        rank: r,
        mats,
        minors,
        pencils,
    })
}

impl MinorSystem {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn minors(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.minors
    }

    pub fn gram(&self, theta: &[C64]) -> DMatrix<C64> {
        let mut g = self.mats[0].clone();
        for (k, t) in self.mats[1..].iter().zip(theta) {
            g += k * *t;
        }
        g
    }

    /// Value of one full minor at `theta`.
    pub fn minor(&self, idx: usize, theta: &[C64]) -> C64 {
        let g = self.gram(theta);
        let (rows, cols) = &self.minors[idx];
        let m = rows.len();
        let buf: Vec<C64> = rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).map(|(i, j)| g[(i, j)]).collect();
        det(&buf, m)
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

impl HomogeneousSystem for MinorSystem {
    fn nvars(&self) -> usize {
        self.mats.len() - 1
    }

    fn degrees(&self) -> Vec<usize> {
        vec![self.rank + 1; self.nvars()]
    }

    fn eval(&self, x: &[C64], f: &mut [C64], jac: &mut [C64]) {
        let m = self.rank + 1;
        let mm = m * m;
        let nx = x.len();
        let mut mat = [C64::zero(); 81];
        let mut cof = [C64::zero(); 81];
        for (l, pencil) in self.pencils.chunks_exact(nx * mm).enumerate() {
            mat[..mm].iter_mut().for_each(|z| *z = C64::zero());
            for (p, &xi) in pencil.chunks_exact(mm).zip(x) {
                for (a, b) in mat[..mm].iter_mut().zip(p) {
                    *a += b * xi;
                }
            }
            cofactors_into(&mat[..mm], m, &mut cof[..mm]);
            f[l] = (0..m).map(|b| mat[b] * cof[b]).sum();
            for (i, p) in pencil.chunks_exact(mm).enumerate() {
                jac[l * nx + i] = cof[..mm].iter().zip(p).map(|(c, q)| c * q).sum();
            }
        }
    }

    fn residual(&self, theta: &[C64]) -> f64 {
        minor_residual(&self.gram(theta), &self.minors, self.rank)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub complex: usize,
    pub real: usize,
    pub psd: usize,
    pub indefinite: usize,
}

/// Counts predicted for a generic positive form: `2^(2g)` complex, `2^g`
/// psd and, for odd `g`, another `2^g` real indefinite points.
pub fn expected_counts(spec: &SurfaceSpec) -> Option<Counts> {
    let g = spec.genus()?;
    let psd = 1usize << g;
    let indefinite = if g % 2 == 1 { psd } else { 0 };
    Some(Counts {
        complex: 1 << (2 * g),
        real: psd + indefinite,
        psd,
        indefinite,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    /// `[re, im]` per parameter.
    pub theta: Vec<[f64; 2]>,
    pub real: bool,
    pub inertia: Option<Inertia>,
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub surface: String,
    pub rank: usize,
    pub parameters: usize,
    pub counts: Counts,
    pub expected: Option<Counts>,
    pub warnings: Vec<String>,
    pub points: Vec<PointReport>,
    pub paths: PathStats,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub report: CountReport,
    /// Signed-square representations of the real points, in point order.
    pub representations: Vec<Representation<f64>>,
}

/// Inertia, representations and counts for a solution set of `space`.
pub fn classify(space: &GramSpace, sols: &SolutionSet, rank: usize, label: &str, expected: Option<Counts>) -> Classification {
    let mut counts = Counts {
        complex: sols.points.len(),
        real: 0,
        psd: 0,
        indefinite: 0,
    };
    let mut warnings = Vec::new();
    let mut points = Vec::new();
    let mut representations = Vec::new();
    let scale = space.form_scale();
    for p in &sols.points {
        let mut report = PointReport {
            theta: p.theta.iter().map(|z| [z.re, z.im]).collect(),
            real: p.real,
            inertia: None,
            residual: p.residual,
            multiplicity: p.multiplicity,
        };
        if p.real {
            counts.real += 1;
            let theta: Vec<f64> = p.theta.iter().map(|z| z.re).collect();
            let g = space.gram_at_real(&theta).expect("parameter count matches");
            let inr = inertia(&g, PSD_TOL).expect("Gram matrices are symmetric");
            if inr.is_psd() {
                counts.psd += 1;
            } else {
                counts.indefinite += 1;
            }
            if inr.rank() > rank {
                warnings.push(format!("real point {theta:?} has numerical rank {} > {rank}", inr.rank()));
            }
            report.inertia = Some(inr);
            match extract_representation(space, &g) {
                Ok(rep) => {
                    let res = verify_against_exact(space.form(), &rep);
                    if res > 1e-8 * scale {
                        warnings.push(format!("representation at {theta:?} verifies only to {res:e}"));
                    }
                    representations.push(rep);
                }
                Err(e) => warnings.push(format!("could not extract a representation at {theta:?}: {e}")),
            }
        }
        points.push(report);
    }
    if let Some(e) = expected {
        if counts.complex != e.complex {
            warnings.push(format!(
                "found {} complex points where a generic form has {}; the form is probably not generic",
                counts.complex, e.complex
            ));
        }
    }
    if sols.stats.failed > 0 {
        warnings.push(format!("{} paths failed before reaching the target system", sols.stats.failed));
    }
    Classification {
        report: CountReport {
            surface: label.to_string(),
            rank,
            parameters: space.dim(),
            counts,
            expected,
            warnings,
            points,
            paths: sols.stats.clone(),
        },
        representations,
    }
}

/// Solves the rank-`rank` system of `space`, retrying with fresh random
/// data when too many paths fail.
pub fn solve_rank_locus(space: &GramSpace, rank: usize, cfg: &SolveConfig) -> Result<SolutionSet> {
    if space.dim() == 0 {
        // the fiber is a single matrix
        let g = space.g0().map(|x| C64::new(rat_to_f64(&x), 0.0));
        let sys = minor_system(space, rank, cfg.tracker.seed)?;
        let residual = minor_residual(&g, sys.minors(), rank);
        let points = if residual <= cfg.residual_tol {
            vec![crate::homotopy::Solution {
                theta: Vec::new(),
                real: true,
                residual,
                multiplicity: 1,
            }]
        } else {
            Vec::new()
        };
        return Ok(SolutionSet {
            points,
            stats: PathStats::default(),
            failed_endpoints: Vec::new(),
        });
    }
    let mut last = None;
    for attempt in 0..3u64 {
        let mut c = cfg.clone();
        c.tracker.seed = cfg.tracker.seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9));
        let sys = minor_system(space, rank, c.tracker.seed)?;
        match solve(&sys, &c) {
            Ok(s) => return Ok(s),
            Err(e @ Error::PathFailureBudgetExceeded { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
