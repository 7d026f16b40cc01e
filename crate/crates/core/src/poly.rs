//! Sparse multivariate polynomials keyed by exponent vectors.
//!
//! This is the ambient representation used by the Gram machinery: every
//! surface embeds its linear and quadratic monomials as exponent vectors of a
//! fixed length, and forms are sparse maps from those vectors to coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::scalar::{Rational, Scalar};

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Exponents, C>,
}

impl<C: Scalar> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: Exponents, coeff: C) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, coeff);
        p
    }

    /// Builds a polynomial, merging repeated exponents and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Exponents, C)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, exps: Exponents, coeff: C) {
        assert_eq!(exps.len(), self.nvars, "exponent length mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        self.map(|c| c.clone() * s.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Coefficientwise map; zero results are dropped.
    pub fn map<D: Scalar, F: Fn(&C) -> D>(&self, f: F) -> Poly<D> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn to_complex(&self) -> Poly<Complex64> {
        self.map(|c| c.to_complex())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Evaluation at a complex point, one power table per variable.
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        let maxdeg: Vec<u32> = (0..self.nvars)
            .map(|v| self.terms.keys().map(|e| e[v]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Complex64>> = point
            .iter()
            .zip(&maxdeg)
            .map(|(z, &d)| {
                let mut row = Vec::with_capacity(d as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=d {
                    row.push(acc);
                    acc *= z;
                }
                row
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(c.to_complex(), |acc, (v, &k)| acc * powers[v][k as usize])
            })
            .sum()
    }
}

impl Poly<Rational> {
    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut total = Rational::from_i64(0);
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (z, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * z.clone();
                }
            }
            total = total + term;
        }
        total
    }
}

/// Largest coefficient magnitude of `f - g`.
pub fn max_coeff_diff<C: Scalar>(f: &Poly<C>, g: &Poly<C>) -> f64 {
    f.sub(g).max_abs_coeff()
}

/// [`Poly`] printed with given variable names (see [`Poly::with_vars`]).
pub struct Named<'a, C> {
    poly: &'a Poly<C>,
    names: &'a [&'a str],
}

impl<C> Poly<C> {
    pub fn with_vars<'a>(&'a self, names: &'a [&'a str]) -> Named<'a, C> {
        Named { poly: self, names }
    }
}

impl<C: Scalar + std::fmt::Display> std::fmt::Display for Named<'_, C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.poly.terms.iter().rev().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (i, &p) in e.iter().enumerate() {
                let v = self.names.get(i).map(|n| n.to_string()).unwrap_or(format!("x{i}"));
                match p {
                    0 => {}
                    1 => factors.push(v),
                    _ => factors.push(format!("{v}^{p}")),
                }
            }
            let coeff = c.to_string();
            let (neg, abs) = match coeff.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, coeff),
            };
            if abs != "1" || factors.is_empty() {
                factors.insert(0, abs);
            }
            let sign = match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sign}{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// `(s, t)` for binary forms, `(s, t, x, y)` for biforms, else `x0, x1, ...`.
impl<C: Scalar + std::fmt::Display> std::fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: &[&str] = match self.nvars {
            2 => &["s", "t"],
            4 => &["s", "t", "x", "y"],
            _ => &[],
        };
        self.with_vars(names).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn p(terms: &[(&[u32], i64)]) -> Poly<Rational> {
        Poly::from_terms(
            terms[0].0.len(),
            terms.iter().map(|(e, c)| (e.to_vec(), rat(*c, 1))),
        )
    }

    #[test]
    fn cancellation_removes_terms() {
        let f = p(&[(&[1, 0], 1), (&[0, 1], 2)]);
        let g = p(&[(&[1, 0], -1)]);
        let s = f.add(&g);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&[0, 1]), rat(2, 1));
    }

    #[test]
    fn product_and_eval_agree() {
        let f = p(&[(&[1, 0], 1), (&[0, 1], -3)]);
        let g = p(&[(&[2, 0], 2), (&[0, 0], 5)]);
        let pt = [Complex64::new(0.3, -1.1), Complex64::new(2.0, 0.5)];
        let lhs = f.mul(&g).eval(&pt);
        let rhs = f.eval(&pt) * g.eval(&pt);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
