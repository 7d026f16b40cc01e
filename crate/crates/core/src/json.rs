//! Wire formats for coefficients and matrices.
//!
//! Rational coefficients travel as `{"num": p, "den": q}` where `p` and `q`
//! are JSON integers, or decimal strings when they do not fit in an `i64`.
//! Complex coefficients travel as `{"re": x, "im": y}`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rat_to_f64, Rational};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum IntJson {
    Small(i64),
    Big(String),
}

impl IntJson {
    pub fn from_bigint(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(x) => IntJson::Small(x),
            None => IntJson::Big(v.to_string()),
        }
    }

    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntJson::Small(x) => Ok(BigInt::from(*x)),
            IntJson::Big(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffJson {
    Rational { num: IntJson, den: IntJson },
    Complex { re: f64, im: f64 },
}

/// Coefficient types with a JSON encoding.
pub trait JsonCoeff: Sized {
    fn to_json(&self) -> CoeffJson;
    fn from_json(c: &CoeffJson) -> Result<Self>;
}

impl JsonCoeff for Rational {
    fn to_json(&self) -> CoeffJson {
        CoeffJson::Rational {
            num: IntJson::from_bigint(self.numer()),
            den: IntJson::from_bigint(self.denom()),
        }
    }
    fn from_json(c: &CoeffJson) -> Result<Self> {
        match c {
            CoeffJson::Rational { num, den } => {
                let den = den.to_bigint()?;
                if den.is_zero() {
                    return Err(Error::Input("zero denominator".into()));
                }
                Ok(Rational::new(num.to_bigint()?, den))
            }
            CoeffJson::Complex { .. } => Err(Error::Input(
                "complex coefficient where an exact rational was expected (use --float)".into(),
            )),
        }
    }
}

impl JsonCoeff for Complex64 {
    fn to_json(&self) -> CoeffJson {
        CoeffJson::Complex {
            re: self.re,
            im: self.im,
        }
    }
    fn from_json(c: &CoeffJson) -> Result<Self> {
        Ok(match c {
            CoeffJson::Rational { .. } => Complex64::new(rat_to_f64(&Rational::from_json(c)?), 0.0),
            CoeffJson::Complex { re, im } => Complex64::new(*re, *im),
        })
    }
}

impl JsonCoeff for f64 {
    fn to_json(&self) -> CoeffJson {
        CoeffJson::Complex { re: *self, im: 0.0 }
    }
    fn from_json(c: &CoeffJson) -> Result<Self> {
        let z = Complex64::from_json(c)?;
        if z.im != 0.0 {
            return Err(Error::Input("expected a real coefficient".into()));
        }
        Ok(z.re)
    }
}

/// Dense matrix as a list of rows, rational or float.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixJson {
    Float(Vec<Vec<f64>>),
    Exact(Vec<Vec<CoeffJson>>),
}

impl MatrixJson {
    pub fn from_f64(m: &DMatrix<f64>) -> Self {
        MatrixJson::Float(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect(),
        )
    }

    pub fn from_rational(m: &DMatrix<Rational>) -> Self {
        MatrixJson::Exact(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_json()).collect())
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Result<DMatrix<f64>> {
        let rows: Vec<Vec<f64>> = match self {
            MatrixJson::Float(r) => r.clone(),
            MatrixJson::Exact(r) => r
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| Complex64::from_json(c).map(|z| z.re))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?,
        };
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Input("ragged matrix".into()));
        }
        Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}
