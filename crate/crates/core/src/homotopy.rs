//! Total-degree homotopy continuation in projective coordinates.
//!
//! A square system of `k` homogeneous polynomials in `x = (x_0, ..., x_k)`,
//! with `theta = x[1..] / x_0`, is connected to the start system
//! `x_i^(d_i) - x_0^(d_i)` by `H = (1 - tau) gamma g + tau F` and closed by a
//! random affine patch `a . x = 1`. Paths are tracked with a Runge-Kutta predictor
//! and a Newton corrector.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Relative size of a Newton update below which failure to contract is
/// attributed to rounding.
const STAGNATION: f64 = 1e-9;

/// Homogeneous square polynomial system.
pub trait HomogeneousSystem: Sync {
    /// Number of affine unknowns `k` (the projective space has `k + 1` coordinates).
    fn nvars(&self) -> usize;

    /// Degree of each of the `k` equations.
    fn degrees(&self) -> Vec<usize>;

    /// Values `f` (length `k`) and Jacobian `jac` (row-major `k x (k + 1)`).
    fn eval(&self, x: &[C64], f: &mut [C64], jac: &mut [C64]);

    /// Scale-free residual of an affine point, used to accept endpoints.
    /// Defaults to the square system itself.
    fn residual(&self, theta: &[C64]) -> f64 {
        let k = self.nvars();
        let mut x = vec![C64::new(1.0, 0.0)];
        x.extend_from_slice(theta);
        let mut f = vec![C64::zero(); k];
        let mut jac = vec![C64::zero(); k * (k + 1)];
        self.eval(&x, &mut f, &mut jac);
        f.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub seed: u64,
    /// Initial and maximal step in `tau`.
    pub max_step: f64,
    pub min_step: f64,
    /// Relative Newton tolerance of the corrector.
    pub corrector_tol: f64,
    pub corrector_iters: usize,
    /// Paths with `|theta| > divergence` are going to infinity.
    pub divergence: f64,
    /// Failed paths ending beyond this norm are also counted as divergent.
    pub divergence_heuristic: f64,
    pub max_steps: usize,
    pub parallel: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            seed: 0,
            max_step: 0.1,
            min_step: 1e-14,
            corrector_tol: 1e-12,
            corrector_iters: 3,
            divergence: 1e8,
            divergence_heuristic: 1e4,
            max_steps: 50_000,
            parallel: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Finite,
    Diverged,
    Failed,
}

#[derive(Clone, Debug)]
pub struct PathResult {
    pub status: PathStatus,
    /// Affine endpoint (or last point reached).
    pub theta: Vec<C64>,
    pub tau: f64,
    pub steps: usize,
    /// Whether the Jacobian at the endpoint looked nonsingular.
    pub nonsingular: bool,
    /// Smallest over largest LU pivot of the endpoint Jacobian.
    pub cond: f64,
}

/// Dense complex solve with partial pivoting; `a` is row-major `n x n` and
/// is destroyed. Returns the ratio of smallest to largest pivot.
pub(crate) fn lu_solve(a: &mut [C64], b: &mut [C64], n: usize) -> f64 {
    let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i * n + c].norm().partial_cmp(&a[j * n + c].norm()).unwrap())
            .unwrap();
        if p != c {
            for j in 0..n {
                a.swap(c * n + j, p * n + j);
            }
            b.swap(c, p);
        }
        let piv = a[c * n + c];
        pmin = pmin.min(piv.norm());
        pmax = pmax.max(piv.norm());
        if piv.norm() == 0.0 {
            return 0.0;
        }
        for i in c + 1..n {
            let m = a[i * n + c] / piv;
            if m.is_zero() {
                continue;
            }
            for j in c..n {
                let v = a[c * n + j];
                a[i * n + j] -= m * v;
            }
            let bc = b[c];
            b[i] -= m * bc;
        }
    }
    for c in (0..n).rev() {
        let mut s = b[c];
        for j in c + 1..n {
            s -= a[c * n + j] * b[j];
        }
        b[c] = s / a[c * n + c];
    }
    if pmax == 0.0 {
        0.0
    } else {
        pmin / pmax
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct Homotopy<'a, S: HomogeneousSystem + ?Sized> {
    sys: &'a S,
    k: usize,
    degrees: Vec<usize>,
    gamma: C64,
    patch: Vec<C64>,
}

struct Buffers {
    f: Vec<C64>,
    jf: Vec<C64>,
    h: Vec<C64>,
    jh: Vec<C64>,
    ht: Vec<C64>,
    rhs: Vec<C64>,
}

impl<S: HomogeneousSystem + ?Sized> Homotopy<'_, S> {
    fn buffers(&self) -> Buffers {
        let n = self.k + 1;
        Buffers {
            f: vec![C64::zero(); self.k],
            jf: vec![C64::zero(); self.k * n],
            h: vec![C64::zero(); n],
            jh: vec![C64::zero(); n * n],
            ht: vec![C64::zero(); n],
            rhs: vec![C64::zero(); n],
        }
    }

    /// Fills `H`, `dH/dx` and `dH/dtau` at `(x, tau)`.
    fn eval(&self, x: &[C64], tau: f64, b: &mut Buffers) {
        let k = self.k;
        let n = k + 1;
        self.sys.eval(x, &mut b.f, &mut b.jf);
        let s = self.gamma * (1.0 - tau);
        for l in 0..k {
            let d = self.degrees[l];
            let xl = x[l + 1];
            let x0 = x[0];
            let g = xl.powu(d as u32) - x0.powu(d as u32);
            b.h[l] = s * g + b.f[l] * tau;
            b.ht[l] = b.f[l] - self.gamma * g;
            for j in 0..n {
                b.jh[l * n + j] = b.jf[l * n + j] * tau;
            }
            let dd = d as f64;
            b.jh[l * n + l + 1] += s * xl.powu(d as u32 - 1) * dd;
            b.jh[l * n] -= s * x0.powu(d as u32 - 1) * dd;
        }
        let mut ax = C64::zero();
        for j in 0..n {
            b.jh[k * n + j] = self.patch[j];
            ax += self.patch[j] * x[j];
        }
        b.h[k] = ax - 1.0;
        b.ht[k] = C64::zero();
    }

    /// Newton iterations at fixed `tau`. Converged when the error left after
    /// the last update, estimated from the contraction of successive updates,
    /// is below the relative tolerance.
    fn correct(&self, x: &mut [C64], tau: f64, iters: usize, tol: f64, b: &mut Buffers) -> bool {
        let n = self.k + 1;
        let mut prev = f64::INFINITY;
        for _ in 0..iters {
            self.eval(x, tau, b);
            for (r, h) in b.rhs.iter_mut().zip(&b.h) {
                *r = -h;
            }
            if lu_solve(&mut b.jh, &mut b.rhs, n) == 0.0 {
                return false;
            }
            for (xi, d) in x.iter_mut().zip(&b.rhs) {
                *xi += d;
            }
            let step = norm(&b.rhs);
            let scale = norm(x).max(1e-300);
            let ratio = step / prev;
            if step <= tol * scale || (prev.is_finite() && ratio < 0.5 && step * ratio <= tol * scale) {
                return true;
            }
            if ratio >= 1.0 {
                // stagnation at rounding level counts as convergence
                return prev <= STAGNATION * scale;
            }
            prev = step;
        }
        false
    }

    /// `dx/dtau = -H_x^{-1} H_tau`.
    fn tangent(&self, x: &[C64], tau: f64, b: &mut Buffers) -> Option<Vec<C64>> {
        self.eval(x, tau, b);
        let mut dx: Vec<C64> = b.ht.iter().map(|z| -z).collect();
        (lu_solve(&mut b.jh, &mut dx, self.k + 1) > 0.0).then_some(dx)
    }

    /// Classical Runge-Kutta step of the tangent field.
    fn predict(&self, x: &[C64], tau: f64, h: f64, b: &mut Buffers) -> (bool, Vec<C64>) {
        let axpy = |a: f64, d: &[C64]| -> Vec<C64> { x.iter().zip(d).map(|(xi, di)| xi + di * a).collect() };
        let Some(k1) = self.tangent(x, tau, b) else { return (false, x.to_vec()) };
        let Some(k2) = self.tangent(&axpy(h / 2.0, &k1), tau + h / 2.0, b) else { return (false, x.to_vec()) };
        let Some(k3) = self.tangent(&axpy(h / 2.0, &k2), tau + h / 2.0, b) else { return (false, x.to_vec()) };
        let Some(k4) = self.tangent(&axpy(h, &k3), tau + h, b) else { return (false, x.to_vec()) };
        let xp = (0..x.len())
            .map(|i| x[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
            .collect();
        (true, xp)
    }

    fn affine(x: &[C64]) -> Vec<C64> {
        x[1..].iter().map(|z| z / x[0]).collect()
    }

    fn affine_norm(x: &[C64]) -> f64 {
        let x0 = x[0].norm();
        if x0 == 0.0 {
            f64::INFINITY
        } else {
            norm(&x[1..]) / x0
        }
    }

    fn track(&self, start: Vec<C64>, cfg: &TrackerConfig, max_step: f64) -> PathResult {
        let n = self.k + 1;
        let mut b = self.buffers();
        let mut x = start;
        let mut tau = 0.0;
        let mut h = max_step.min(0.01);
        let mut streak = 0;
        let mut steps = 0;
        let finish = |x: &[C64], tau: f64, steps: usize, status: PathStatus| PathResult {
            status,
            theta: if x[0].norm() == 0.0 { x[1..].to_vec() } else { Self::affine(x) },
            tau,
            steps,
            nonsingular: false,
            cond: 0.0,
        };
        while tau < 1.0 {
            steps += 1;
            if steps > cfg.max_steps {
                return finish(&x, tau, steps, PathStatus::Failed);
            }
            h = h.min(1.0 - tau);
            let t1 = if 1.0 - tau - h < 1e-15 { 1.0 } else { tau + h };
            let (ok, mut xp) = self.predict(&x, tau, t1 - tau, &mut b);
            if ok && self.correct(&mut xp, t1, cfg.corrector_iters, cfg.corrector_tol, &mut b) {
                x = xp;
                tau = t1;
                streak += 1;
                if streak >= 4 {
                    h = (2.0 * h).min(max_step);
                    streak = 0;
                }
                if Self::affine_norm(&x) > cfg.divergence {
                    return finish(&x, tau, steps, PathStatus::Diverged);
                }
            } else {
                h /= 2.0;
                streak = 0;
                if h < cfg.min_step {
                    let status = if Self::affine_norm(&x) > cfg.divergence_heuristic {
                        PathStatus::Diverged
                    } else {
                        PathStatus::Failed
                    };
                    return finish(&x, tau, steps, status);
                }
            }
        }
        // polish at tau = 1
        self.correct(&mut x, 1.0, 8, 1e-15, &mut b);
        self.eval(&x, 1.0, &mut b);
        let mut tmp = vec![C64::zero(); n];
        let cond = lu_solve(&mut b.jh, &mut tmp, n);
        if Self::affine_norm(&x) > cfg.divergence {
            return finish(&x, tau, steps, PathStatus::Diverged);
        }
        let mut r = finish(&x, tau, steps, PathStatus::Finite);
        r.nonsingular = cond > 1e-10;
        r.cond = cond;
        r
    }
}

/// Endpoints of all `prod d_i` paths, in start-point order.
pub fn track_all<S: HomogeneousSystem + ?Sized>(sys: &S, cfg: &TrackerConfig) -> Vec<PathResult> {
    let k = sys.nvars();
    let degrees = sys.degrees();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut unit = || C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let gamma = unit();
    let patch: Vec<C64> = (0..=k).map(|_| unit()).collect();
    let hom = Homotopy {
        sys,
        k,
        degrees: degrees.clone(),
        gamma,
        patch,
    };
    let total: usize = degrees.iter().product();
    let start = |idx: usize| -> Vec<C64> {
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut rest = idx;
        for &d in &degrees {
            let j = rest % d;
            rest /= d;
            y.push(C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / d as f64));
        }
        let ay: C64 = hom.patch.iter().zip(&y).map(|(a, b)| a * b).sum();
        y.iter().map(|z| z / ay).collect()
    };
    let run = |idx: usize, max_step: f64| hom.track(start(idx), cfg, max_step);
    let mut results: Vec<PathResult> = if cfg.parallel {
        (0..total).into_par_iter().map(|i| run(i, cfg.max_step)).collect()
    } else {
        (0..total).map(|i| run(i, cfg.max_step)).collect()
    };

    // path jumping: two paths reaching the same nonsingular solution of the
    // full system (the square system also has extraneous solutions, which
    // are ignored here)
    let mut max_step = cfg.max_step;
    for _ in 0..2 {
        let accepted: Vec<bool> = results
            .iter()
            .map(|r| r.status == PathStatus::Finite && r.nonsingular && sys.residual(&r.theta) <= 1e-6)
            .collect();
        let suspicious = jumped_paths(&results, &accepted);
        if suspicious.is_empty() {
            break;
        }
        max_step /= 8.0;
        let redo: Vec<(usize, PathResult)> = if cfg.parallel {
            suspicious.par_iter().map(|&i| (i, run(i, max_step))).collect()
        } else {
            suspicious.iter().map(|&i| (i, run(i, max_step))).collect()
        };
        for (i, r) in redo {
            results[i] = r;
        }
    }
    results
}

fn jumped_paths(results: &[PathResult], accepted: &[bool]) -> Vec<usize> {
    let finite: Vec<usize> = (0..results.len()).filter(|&i| accepted[i]).collect();
    let mut out = Vec::new();
    for (a, &i) in finite.iter().enumerate() {
        for &j in &finite[a + 1..] {
            let (u, v) = (&results[i].theta, &results[j].theta);
            let scale = norm(u).max(1.0);
            let dist = u.iter().zip(v).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
            if dist <= 1e-6 * scale {
                out.push(i);
                out.push(j);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub tracked: usize,
    pub finite: usize,
    pub diverged: usize,
    pub failed: usize,
    /// Finite endpoints rejected by the residual filter.
    pub rejected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub tracker: TrackerConfig,
    pub residual_tol: f64,
    pub cluster_radius: f64,
    pub real_tol: f64,
    /// Fraction of non-divergent failed paths tolerated.
    pub failure_budget: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tracker: TrackerConfig::default(),
            residual_tol: 1e-8,
            cluster_radius: 1e-6,
            real_tol: 1e-8,
            failure_budget: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub theta: Vec<C64>,
    pub real: bool,
    pub residual: f64,
    /// Number of paths that ended here.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub points: Vec<Solution>,
    pub stats: PathStats,
    /// Last points of failed paths, kept for diagnostics.
    pub failed_endpoints: Vec<Vec<C64>>,
}

/// Newton polish of an affine point on the square system.
pub fn polish<S: HomogeneousSystem + ?Sized>(sys: &S, theta: &[C64], iters: usize) -> Vec<C64> {
    let k = sys.nvars();
    let mut x = vec![C64::new(1.0, 0.0)];
    x.extend_from_slice(theta);
    let mut f = vec![C64::zero(); k];
    let mut jac = vec![C64::zero(); k * (k + 1)];
    let mut best = x.clone();
    let mut best_res = f64::INFINITY;
    for _ in 0..=iters {
        sys.eval(&x, &mut f, &mut jac);
        let res = norm(&f);
        if res < best_res {
            best_res = res;
            best = x.clone();
        } else {
            break;
        }
        // drop the x_0 column
        let mut a: Vec<C64> = (0..k).flat_map(|i| (1..=k).map(move |j| (i, j))).map(|(i, j)| jac[i * (k + 1) + j]).collect();
        let mut rhs: Vec<C64> = f.iter().map(|z| -z).collect();
        if lu_solve(&mut a, &mut rhs, k) == 0.0 {
            break;
        }
        for (xi, d) in x[1..].iter_mut().zip(&rhs) {
            *xi += d;
        }
    }
    best[1..].to_vec()
}

fn cmp_points(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p.re.partial_cmp(&q.re).unwrap().then(p.im.partial_cmp(&q.im).unwrap());
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Tracks all paths, filters endpoints by residual, clusters them and tags
/// real points.
pub fn solve<S: HomogeneousSystem + ?Sized>(sys: &S, cfg: &SolveConfig) -> Result<SolutionSet> {
    let results = track_all(sys, &cfg.tracker);
    let mut stats = PathStats {
        tracked: results.len(),
        ..Default::default()
    };
    let mut candidates = Vec::new();
    let mut failed_endpoints = Vec::new();
    for r in results {
        match r.status {
            PathStatus::Diverged => stats.diverged += 1,
            PathStatus::Failed => {
                stats.failed += 1;
                failed_endpoints.push(r.theta);
            }
            PathStatus::Finite => {
                stats.finite += 1;
                let theta = polish(sys, &r.theta, 5);
                let residual = sys.residual(&theta);
                if residual <= cfg.residual_tol {
                    candidates.push((theta, residual));
                } else {
                    stats.rejected += 1;
                }
            }
        }
    }
    if stats.failed as f64 > cfg.failure_budget * stats.tracked as f64 {
        return Err(Error::PathFailureBudgetExceeded {
            failed: stats.failed,
            total: stats.tracked,
        });
    }
    candidates.sort_by(|a, b| cmp_points(&a.0, &b.0));
    let mut points: Vec<Solution> = Vec::new();
    for (theta, residual) in candidates {
        let scale = norm(&theta).max(1.0);
        if let Some(p) = points.iter_mut().find(|p| {
            p.theta.iter().zip(&theta).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() <= cfg.cluster_radius * scale
        }) {
            p.multiplicity += 1;
            continue;
        }
        points.push(Solution {
            theta,
            real: false,
            residual,
            multiplicity: 1,
        });
    }
    for p in &mut points {
        let scale = norm(&p.theta).max(1.0);
        if p.theta.iter().all(|z| z.im.abs() <= cfg.real_tol * scale) {
            let re: Vec<C64> = p.theta.iter().map(|z| C64::new(z.re, 0.0)).collect();
            let polished: Vec<C64> = polish(sys, &re, 3).iter().map(|z| C64::new(z.re, 0.0)).collect();
            let res = sys.residual(&polished);
            let (theta, res) = if res <= sys.residual(&re) { (polished, res) } else { (re.clone(), sys.residual(&re)) };
            if res <= cfg.residual_tol {
                p.theta = theta;
                p.residual = res;
                p.real = true;
            }
        }
    }
    points.sort_by(|a, b| cmp_points(&a.theta, &b.theta));
    Ok(SolutionSet {
        points,
        stats,
        failed_endpoints,
    })
}
