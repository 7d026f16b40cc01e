//! Nonnegative binary forms as sums of two squares.
//!
//! A nonnegative real form factors as
//! `f = c * t^(2k) * prod (s - r t)^(2m) * prod ((s - z t)(s - conj(z) t))^m`.
//! Picking, for every conjugate pair, how many copies of `z` go into
//! `pi = sqrt(c) * t^k * prod (s - r t)^m * prod (chosen factors)` gives
//! `f = |pi|^2 = (Re pi)^2 + (Im pi)^2`.

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::binary_form::BinaryForm;
use crate::error::{Error, Result};
use crate::gram::{equivalent, normalize_sign, Representation};
use crate::surface::rnc_basis;

/// Roots whose relative distance is below this are merged into one root
/// with multiplicity.
pub const ROOT_CLUSTER: f64 = 1e-5;
/// Roots with relative imaginary part below this are real.
pub const REAL_TOL: f64 = 1e-8;

/// Projective roots `s/t` of a binary form.
#[derive(Clone, Debug, PartialEq)]
pub struct RootMultiset {
    /// Finite roots with multiplicities, sorted by real then imaginary part.
    pub finite: Vec<(Complex64, usize)>,
    /// Multiplicity of the root `t = 0`.
    pub infinity: usize,
}

impl RootMultiset {
    pub fn degree(&self) -> usize {
        self.finite.iter().map(|(_, m)| m).sum::<usize>() + self.infinity
    }

    pub fn real(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.finite.iter().filter(|(z, _)| z.im == 0.0).map(|(z, m)| (z.re, *m))
    }

    /// Roots with positive imaginary part, one per conjugate pair.
    pub fn upper(&self) -> impl Iterator<Item = (Complex64, usize)> + '_ {
        self.finite.iter().filter(|(z, _)| z.im > 0.0).copied()
    }

    pub fn all_complex_simple(&self) -> bool {
        self.upper().all(|(_, m)| m == 1)
    }
}

fn eval_upoly(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::zero(), |acc, &a| acc * z + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect()
}

/// Simultaneous Aberth-Ehrlich iteration for all roots of a monic `p`.
fn aberth(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let dp = derivative(p);
    let radius = 1.0 + p[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = eval_upoly(p, z[i]) / eval_upoly(&dp, z[i]);
            if !ratio.is_finite() {
                continue;
            }
            let repulse: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulse);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Newton on `p`, accepting steps only while they reduce `|p|`.
fn polish(p: &[f64], mut z: Complex64) -> Complex64 {
    let dp = derivative(p);
    let mut val = eval_upoly(p, z).norm();
    for _ in 0..20 {
        let d = eval_upoly(&dp, z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - eval_upoly(p, z) / d;
        let nval = eval_upoly(p, next).norm();
        if !(nval < val) {
            break;
        }
        z = next;
        val = nval;
    }
    z
}

pub fn roots(f: &BinaryForm<f64>) -> RootMultiset {
    let top = f.s_degree().expect("roots of the zero form");
    let infinity = f.deg() - top;
    if top == 0 {
        return RootMultiset {
            finite: Vec::new(),
            infinity,
        };
    }
    let lead = f.coeff(top);
    let monic: Vec<f64> = (0..=top).map(|i| f.coeff(i) / lead).collect();
    let companion = DMatrix::from_fn(top, top, |i, j| {
        if j == top - 1 {
            -monic[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let raw = match Schur::try_new(companion, f64::EPSILON, 500 * top) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        // the QR iteration can stall on highly symmetric companion matrices
        None => aberth(&monic),
    };

    // cluster nearby eigenvalues into multiple roots
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    let mut used = vec![false; raw.len()];
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![raw[i]];
        used[i] = true;
        for j in i + 1..raw.len() {
            if !used[j] && (raw[j] - raw[i]).norm() <= ROOT_CLUSTER * raw[i].norm().max(1.0) {
                used[j] = true;
                members.push(raw[j]);
            }
        }
        let m = members.len();
        let mean = members.iter().sum::<Complex64>() / m as f64;
        // a root of multiplicity m is a simple root of the (m-1)-th derivative
        let mut q = monic.clone();
        for _ in 1..m {
            q = derivative(&q);
        }
        clusters.push((polish(&q, mean), m));
    }

    let mut finite = Vec::new();
    for &(z, m) in &clusters {
        if z.im.abs() <= REAL_TOL * z.norm().max(1.0) {
            finite.push((Complex64::new(z.re, 0.0), m));
        } else if z.im > 0.0 {
            finite.push((z, m));
            finite.push((z.conj(), m));
        }
    }
    finite.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    RootMultiset { finite, infinity }
}

/// True iff every real root (including infinity) has even multiplicity and
/// the form is positive away from its roots.
pub fn is_nonnegative(f: &BinaryForm<f64>) -> bool {
    if f.is_zero() {
        return true;
    }
    let rm = roots(f);
    if rm.infinity % 2 == 1 || rm.real().any(|(_, m)| m % 2 == 1) {
        return false;
    }
    // sign at the sample point farthest from every root
    let sample = (0..64)
        .map(|k| {
            let th = std::f64::consts::PI * (k as f64 + 0.5) / 64.0;
            (th.cos(), th.sin())
        })
        .max_by(|a, b| {
            f.eval_real(a.0, a.1)
                .abs()
                .partial_cmp(&f.eval_real(b.0, b.1).abs())
                .unwrap()
        })
        .unwrap();
    f.eval_real(sample.0, sample.1) > 0.0
}

/// Number of inequivalent representations predicted by the root structure:
/// `2^(pairs - 1)` when every non-real root is simple.
pub fn expected_two_squares_count(rm: &RootMultiset) -> Option<usize> {
    if !rm.all_complex_simple() {
        return None;
    }
    let pairs = rm.upper().count();
    Some(if pairs == 0 { 1 } else { 1 << (pairs - 1) })
}

fn linear(root: Complex64) -> BinaryForm<Complex64> {
    // s - root * t
    BinaryForm::new(vec![-root, Complex64::new(1.0, 0.0)])
}

fn pow(f: &BinaryForm<Complex64>, k: usize) -> BinaryForm<Complex64> {
    (0..k).fold(BinaryForm::new(vec![Complex64::new(1.0, 0.0)]), |acc, _| acc.mul(f))
}

/// All inequivalent `(p, q)` with `f = p^2 + q^2`, each verified to
/// `1e-10 * max|f|`.
pub fn enumerate_two_squares(f: &BinaryForm<f64>) -> Result<Vec<Representation<f64>>> {
    if f.deg() % 2 == 1 || !is_nonnegative(f) {
        return Err(Error::NotNonnegative);
    }
    let d = f.deg() / 2;
    let basis = rnc_basis(d as u32);
    let scale = f.max_abs_coeff();
    if f.is_zero() {
        return Ok(vec![Representation {
            basis,
            forms: vec![vec![0.0; d + 1]; 2],
            signs: vec![1, 1],
        }]);
    }
    let rm = roots(f);
    let lead = f.coeff(f.s_degree().unwrap());
    let mut common = BinaryForm::new(vec![Complex64::new(lead.sqrt(), 0.0)]).mul_t_power(rm.infinity / 2);
    for (r, m) in rm.real() {
        common = common.mul(&pow(&linear(Complex64::new(r, 0.0)), m / 2));
    }
    let pairs: Vec<(Complex64, usize)> = rm.upper().collect();
    let mut reps: Vec<Representation<f64>> = Vec::new();
    let mut choice = vec![0usize; pairs.len()];
    loop {
        let mut pi = common.clone();
        for (&(z, m), &c) in pairs.iter().zip(&choice) {
            pi = pi.mul(&pow(&linear(z), c)).mul(&pow(&linear(z.conj()), m - c));
        }
        let clean = |v: Vec<f64>| -> Vec<f64> {
            let cut = 1e-14 * scale.sqrt();
            v.into_iter().map(|x| if x.abs() <= cut { 0.0 } else { x }).collect()
        };
        let p = clean(pi.coeffs().iter().map(|z| z.re).collect());
        let q = clean(pi.coeffs().iter().map(|z| z.im).collect());
        let rep = Representation {
            basis: basis.clone(),
            forms: vec![normalize_sign(p), normalize_sign(q)],
            signs: vec![1, 1],
        };
        let res = crate::gram::verify_representation(&f.to_poly(), &rep);
        if res > 1e-10 * scale {
            return Err(Error::VerificationFailed(res / scale));
        }
        if !reps.iter().any(|r| equivalent(r, &rep, 1e-8)) {
            reps.push(rep);
        }
        // next choice vector (mixed radix)
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(reps);
            }
            choice[i] += 1;
            if choice[i] <= pairs[i].1 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::random_nonnegative_binary_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bf(c: &[f64]) -> BinaryForm<f64> {
        BinaryForm::new(c.to_vec())
    }

    #[test]
    fn roots_of_s4_plus_t4() {
        let rm = roots(&bf(&[1.0, 0.0, 0.0, 0.0, 1.0]));
        assert_eq!(rm.infinity, 0);
        assert_eq!(rm.finite.len(), 4);
        for (z, m) in &rm.finite {
            assert_eq!(*m, 1);
            assert!((z.powu(4) + 1.0).norm() < 1e-14);
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn roots_with_multiplicity_and_infinity() {
        // s^2 t^2
        let rm = roots(&bf(&[0.0, 0.0, 1.0, 0.0, 0.0]));
        assert_eq!(rm.infinity, 2);
        assert_eq!(rm.finite, vec![(Complex64::new(0.0, 0.0), 2)]);
        // (s^2 + t^2)^2: double roots at +-i
        let rm = roots(&bf(&[1.0, 0.0, 2.0, 0.0, 1.0]));
        assert_eq!(rm.finite.len(), 2);
        for (z, m) in &rm.finite {
            assert_eq!(*m, 2);
            assert!((z.norm() - 1.0).abs() < 1e-10 && z.re.abs() < 1e-10);
        }
    }

    #[test]
    fn roots_of_genus_one_discriminant() {
        // (s^2 + t^2)(2t^2 + 2st + 2s^2), the discriminant up to sign
        let a = bf(&[1.0, 0.0, 1.0]);
        let c = bf(&[2.0, 2.0, 2.0]);
        let rm = roots(&a.mul(&c));
        assert_eq!(rm.finite.len(), 4);
        let mut expected = vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-0.5, 3f64.sqrt() / 2.0),
            Complex64::new(-0.5, -(3f64.sqrt()) / 2.0),
        ];
        for (z, _) in &rm.finite {
            let k = expected.iter().position(|w| (w - z).norm() < 1e-12).unwrap();
            expected.remove(k);
        }
        assert!(rm.upper().count() == 2);
    }

    #[test]
    fn nonnegativity() {
        assert!(is_nonnegative(&bf(&[1.0, 0.0, -2.0, 0.0, 1.0])));
        assert!(!is_nonnegative(&bf(&[0.0, 0.0, 0.0, 1.0, 0.0])));
        assert!(is_nonnegative(&bf(&[1.0, 0.0, 0.0, 0.0, 1.0])));
        assert!(!is_nonnegative(&bf(&[-1.0, 0.0, 0.0, 0.0, -1.0])));
        assert!(!is_nonnegative(&bf(&[1.0, 0.0, -3.0, 0.0, 1.0])));
    }

    #[test]
    fn s4_plus_t4_has_two_representations() {
        let f = bf(&[1.0, 0.0, 0.0, 0.0, 1.0]);
        let reps = enumerate_two_squares(&f).unwrap();
        assert_eq!(reps.len(), 2);
        let r2 = 2f64.sqrt();
        let known = [
            Representation {
                basis: rnc_basis(2),
                forms: vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
                signs: vec![1, 1],
            },
            Representation {
                basis: rnc_basis(2),
                forms: vec![vec![-1.0, 0.0, 1.0], vec![0.0, r2, 0.0]],
                signs: vec![1, 1],
            },
        ];
        for k in &known {
            assert!(reps.iter().any(|r| equivalent(r, k, 1e-10)));
        }
    }

    #[test]
    fn pythagorean_square() {
        let f = bf(&[1.0, 0.0, 2.0, 0.0, 1.0]);
        let reps = enumerate_two_squares(&f).unwrap();
        assert_eq!(reps.len(), 2);
        let pyth = Representation {
            basis: rnc_basis(2),
            forms: vec![vec![-1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0]],
            signs: vec![1, 1],
        };
        assert!(reps.iter().any(|r| equivalent(r, &pyth, 1e-10)));
        assert!(reps.iter().any(|r| r.forms[1].iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn rejects_forms_with_odd_real_roots() {
        assert!(matches!(
            enumerate_two_squares(&bf(&[0.0, 0.0, 0.0, 1.0, 0.0])),
            Err(Error::NotNonnegative)
        ));
        assert!(matches!(enumerate_two_squares(&bf(&[1.0, 0.0, 1.0, 0.0])), Err(Error::NotNonnegative)));
    }

    #[test]
    fn real_double_roots_are_shared() {
        // (s - t)^2 (s^2 + t^2)
        let f = bf(&[1.0, -2.0, 2.0, -2.0, 1.0]);
        let reps = enumerate_two_squares(&f).unwrap();
        assert_eq!(reps.len(), 1);
    }

    #[test]
    fn generic_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=6 {
            let f = random_nonnegative_binary_form(d, &mut rng).to_f64();
            let rm = roots(&f);
            assert_eq!(rm.degree(), 2 * d);
            let reps = enumerate_two_squares(&f).unwrap();
            assert_eq!(reps.len(), 1 << (d - 1));
            assert_eq!(expected_two_squares_count(&rm), Some(reps.len()));
        }
    }
}
