//! Binary forms `sum_i c_i s^i t^(deg - i)`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::biform::Biform;
use crate::error::{Error, Result};
use crate::json::{CoeffJson, JsonCoeff};
use crate::scalar::{Rational, Scalar};

/// `coeffs[i]` is the coefficient of `s^i t^(deg - i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> BinaryForm<C> {
    /// A form of degree `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(deg: usize) -> Self {
        Self::new(vec![C::zero(); deg + 1])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C::from_i64(c)).collect())
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.deg() != other.deg() {
            return Err(Error::DegreeMismatch(format!(
                "degrees {} and {} differ",
                self.deg(),
                other.deg()
            )));
        }
        Ok(Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![C::zero(); self.deg() + other.deg() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn eval(&self, s: Complex64, t: Complex64) -> Complex64 {
        let n = self.deg();
        let mut tp = vec![Complex64::new(1.0, 0.0); n + 1];
        for k in 1..=n {
            tp[k] = tp[k - 1] * t;
        }
        // Horner in s with explicit powers of t.
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(Complex64::zero(), |acc, (i, c)| acc * s + c.to_complex() * tp[n - i])
    }

    pub fn eval_real(&self, s: f64, t: f64) -> f64 {
        self.eval(Complex64::new(s, 0.0), Complex64::new(t, 0.0)).re
    }

    /// Partial derivative in `s` (degree drops by one).
    pub fn d_s(&self) -> Self {
        if self.deg() == 0 {
            return Self::zero(0);
        }
        Self::new(
            (1..=self.deg())
                .map(|i| self.coeffs[i].clone() * C::from_i64(i as i64))
                .collect(),
        )
    }

    /// Partial derivative in `t`.
    pub fn d_t(&self) -> Self {
        if self.deg() == 0 {
            return Self::zero(0);
        }
        let n = self.deg();
        Self::new(
            (0..n)
                .map(|i| self.coeffs[i].clone() * C::from_i64((n - i) as i64))
                .collect(),
        )
    }

    /// Largest `k` with `t^k` dividing the form (`deg + 1` for zero).
    pub fn t_order(&self) -> usize {
        // t^k divides iff coefficients of s^i with i > deg - k vanish.
        let n = self.deg();
        match self.coeffs.iter().rposition(|c| !c.is_zero()) {
            None => n + 1,
            Some(top) => n - top,
        }
    }

    /// Exact division by `t^k`, `None` when `t^k` does not divide.
    pub fn div_t_power(&self, k: usize) -> Option<Self> {
        if self.t_order() < k {
            return None;
        }
        if k > self.deg() {
            return Some(Self::zero(0));
        }
        Some(Self::new(self.coeffs[..=self.deg() - k].to_vec()))
    }

    pub fn mul_t_power(&self, k: usize) -> Self {
        let mut out = self.coeffs.clone();
        out.extend(std::iter::repeat(C::zero()).take(k));
        Self::new(out)
    }

    /// Actual degree in `s` (index of the top nonzero coefficient).
    pub fn s_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> BinaryForm<Complex64> {
        BinaryForm::new(self.coeffs.iter().map(|c| c.to_complex()).collect())
    }

    /// The form as a polynomial in `(s, t)`.
    pub fn to_poly(&self) -> crate::poly::Poly<C> {
        let n = self.deg() as u32;
        crate::poly::Poly::from_terms(
            2,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32, n - i as u32], c.clone())),
        )
    }

    pub fn to_biform(&self) -> Biform<C> {
        let n = self.deg() as u32;
        Biform::from_terms(
            n,
            0,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| ([i as u32, n - i as u32, 0, 0], c.clone())),
        )
        .expect("terms are consistent")
    }
}

impl BinaryForm<Rational> {
    pub fn to_f64(&self) -> BinaryForm<f64> {
        BinaryForm::new(self.coeffs.iter().map(crate::scalar::rat_to_f64).collect())
    }

    /// Squarefree over the algebraic closure, counting the point at infinity
    /// `t = 0` as a root of multiplicity `t_order`.
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.t_order() >= 2 {
            return false;
        }
        let p = upoly_trim(self.coeffs.clone());
        if p.len() <= 2 {
            return true;
        }
        let dp = upoly_derivative(&p);
        upoly_gcd(p, dp).len() <= 1
    }
}

impl BinaryForm<f64> {
    pub fn to_rational_lossy(&self, max_den: i64) -> BinaryForm<Rational> {
        BinaryForm::new(
            self.coeffs
                .iter()
                .map(|&c| crate::scalar::rationalize(c, max_den))
                .collect(),
        )
    }
}

fn upoly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn upoly_derivative(p: &[Rational]) -> Vec<Rational> {
    upoly_trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * Rational::from_i64(i as i64))
            .collect(),
    )
}

fn upoly_rem(mut a: Vec<Rational>, b: &[Rational]) -> Vec<Rational> {
    let lead = b.last().expect("nonzero divisor").clone();
    while a.len() >= b.len() {
        let q = a.last().unwrap().clone() / lead.clone();
        let shift = a.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            a[shift + i] = a[shift + i].clone() - q.clone() * c.clone();
        }
        a.pop();
        a = upoly_trim(a);
    }
    a
}

/// Monic-free Euclidean gcd of dense univariate polynomials.
fn upoly_gcd(mut a: Vec<Rational>, mut b: Vec<Rational>) -> Vec<Rational> {
    a = upoly_trim(a);
    b = upoly_trim(b);
    while !b.is_empty() {
        let r = upoly_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BinaryFormJson {
    pub deg: usize,
    pub coeffs: Vec<CoeffJson>,
}

impl<C: Scalar + JsonCoeff> Serialize for BinaryForm<C> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        BinaryFormJson {
            deg: self.deg(),
            coeffs: self.coeffs.iter().map(|c| c.to_json()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de, C: Scalar + JsonCoeff> Deserialize<'de> for BinaryForm<C> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = BinaryFormJson::deserialize(de)?;
        if j.coeffs.len() != j.deg + 1 {
            return Err(serde::de::Error::custom(format!(
                "degree {} needs {} coefficients, got {}",
                j.deg,
                j.deg + 1,
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(C::from_json)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(BinaryForm::new(coeffs))
    }
}
