//! Bihomogeneous forms in the variable pairs `(s, t)` and `(x, y)`.
//!
//! A [`Biform`] of bidegree `(D, E)` is a sum of terms `c * s^i t^j x^k y^l`
//! with `i + j = D` and `k + l = E`. Coefficients are exact rationals unless
//! explicitly converted with [`Biform::to_complex`]. Terms are ordered
//! lexicographically on `(i, k)`; the exponents of `t` and `y` follow from the
//! bidegree.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{CoeffJson, JsonCoeff};
use crate::poly::Poly;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Biform<C> {
    deg_st: u32,
    deg_xy: u32,
    poly: Poly<C>,
}

impl<C: Scalar> Biform<C> {
    pub fn zero(deg_st: u32, deg_xy: u32) -> Self {
        Self {
            deg_st,
            deg_xy,
            poly: Poly::zero(4),
        }
    }

    /// `coeff * s^i t^j x^k y^l`; the bidegree is read off the exponents.
    pub fn monomial(i: u32, j: u32, k: u32, l: u32, coeff: C) -> Self {
        Self {
            deg_st: i + j,
            deg_xy: k + l,
            poly: Poly::monomial(vec![i, j, k, l], coeff),
        }
    }

    pub fn from_terms<I>(deg_st: u32, deg_xy: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ([u32; 4], C)>,
    {
        let mut poly = Poly::zero(4);
        for (e, c) in terms {
            if e[0] + e[1] != deg_st || e[2] + e[3] != deg_xy {
                return Err(Error::BidegreeViolation {
                    exponents: e.to_vec(),
                    deg_st,
                    deg_xy,
                });
            }
            poly.add_term(e.to_vec(), c);
        }
        Ok(Self {
            deg_st,
            deg_xy,
            poly,
        })
    }

    pub fn from_poly(deg_st: u32, deg_xy: u32, poly: Poly<C>) -> Result<Self> {
        if poly.nvars() != 4 {
            return Err(Error::Input("a biform has four variables".into()));
        }
        Self::from_terms(
            deg_st,
            deg_xy,
            poly.terms()
                .iter()
                .map(|(e, c)| ([e[0], e[1], e[2], e[3]], c.clone())),
        )
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (self.deg_st, self.deg_xy)
    }

    pub fn poly(&self) -> &Poly<C> {
        &self.poly
    }

    pub fn into_poly(self) -> Poly<C> {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.poly.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 4], &C)> {
        self.poly
            .terms()
            .iter()
            .map(|(e, c)| ([e[0], e[1], e[2], e[3]], c))
    }

    pub fn coeff(&self, i: u32, j: u32, k: u32, l: u32) -> C {
        self.poly.coeff(&[i, j, k, l])
    }

    fn same_bidegree(&self, other: &Self) -> Result<()> {
        if self.bidegree() != other.bidegree() {
            return Err(Error::DegreeMismatch(format!(
                "bidegrees {:?} and {:?} differ",
                self.bidegree(),
                other.bidegree()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_bidegree(other)?;
        Ok(Self {
            poly: self.poly.add(&other.poly),
            ..*self
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_bidegree(other)?;
        Ok(Self {
            poly: self.poly.sub(&other.poly),
            ..*self
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            deg_st: self.deg_st + other.deg_st,
            deg_xy: self.deg_xy + other.deg_xy,
            poly: self.poly.mul(&other.poly),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            poly: self.poly.scale(c),
            ..*self
        }
    }

    /// Evaluation at `(s, t, x, y)`.
    pub fn eval(&self, point: [Complex64; 4]) -> Complex64 {
        self.poly.eval(&point)
    }

    pub fn to_complex(&self) -> Biform<Complex64> {
        Biform {
            deg_st: self.deg_st,
            deg_xy: self.deg_xy,
            poly: self.poly.to_complex(),
        }
    }

    /// Homogenizes a polynomial in `(s, x)` with `t` and `y`.
    pub fn bihomogenize(affine: &BTreeMap<(u32, u32), C>, deg_st: u32, deg_xy: u32) -> Result<Self> {
        let mut poly = Poly::zero(4);
        for (&(i, k), c) in affine {
            if i > deg_st || k > deg_xy {
                return Err(Error::ExponentOverflow {
                    exponents: vec![i, k],
                    deg_st,
                    deg_xy,
                });
            }
            poly.add_term(vec![i, deg_st - i, k, deg_xy - k], c.clone());
        }
        Ok(Self {
            deg_st,
            deg_xy,
            poly,
        })
    }

    /// Sets `t = y = 1`.
    pub fn dehomogenize(&self) -> BTreeMap<(u32, u32), C> {
        self.terms().map(|(e, c)| ((e[0], e[2]), c.clone())).collect()
    }

    /// Coefficient of `x^k y^(E-k)` as a binary form in `(s, t)`.
    pub fn xy_coefficient(&self, k: u32) -> crate::binary_form::BinaryForm<C> {
        let mut coeffs = vec![C::zero(); self.deg_st as usize + 1];
        for (e, c) in self.terms() {
            if e[2] == k {
                coeffs[e[0] as usize] = c.clone();
            }
        }
        crate::binary_form::BinaryForm::new(coeffs)
    }
}

impl Biform<Rational> {
    pub fn eval_exact(&self, point: &[Rational; 4]) -> Rational {
        self.poly.eval_exact(point)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct TermJson {
    s: u32,
    t: u32,
    x: u32,
    y: u32,
    #[serde(flatten)]
    coeff: CoeffJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BiformJson {
    #[serde(rename = "degST")]
    deg_st: u32,
    #[serde(rename = "degXY")]
    deg_xy: u32,
    terms: Vec<TermJson>,
}

impl<C: Scalar + JsonCoeff> Biform<C> {
    pub fn to_json(&self) -> BiformJson {
        BiformJson {
            deg_st: self.deg_st,
            deg_xy: self.deg_xy,
            terms: self
                .terms()
                .map(|(e, c)| TermJson {
                    s: e[0],
                    t: e[1],
                    x: e[2],
                    y: e[3],
                    coeff: c.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &BiformJson) -> Result<Self> {
        let terms = j
            .terms
            .iter()
            .map(|t| Ok(([t.s, t.t, t.x, t.y], C::from_json(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(j.deg_st, j.deg_xy, terms)
    }
}

impl<C: Scalar + JsonCoeff> Serialize for Biform<C> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(ser)
    }
}

impl<'de, C: Scalar + JsonCoeff> Deserialize<'de> for Biform<C> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = BiformJson::deserialize(de)?;
        Biform::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Shorthand used by fixtures: builds a rational biform from integer terms
/// `(i, j, k, l, coeff)`.
pub fn biform_from_ints(terms: &[(u32, u32, u32, u32, i64)]) -> Biform<Rational> {
    let (i, j, k, l, _) = terms[0];
    Biform::from_terms(
        i + j,
        k + l,
        terms
            .iter()
            .map(|&(i, j, k, l, c)| ([i, j, k, l], Rational::from_i64(c))),
    )
    .expect("consistent bidegree")
}
