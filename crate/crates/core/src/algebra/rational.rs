use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{Exponent, MultiPoly};
use crate::error::{Error, Result};

/// Quotient of two polynomials; used for Cauchy data with an explicit global
/// continuation such as `1/(1 - z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RationalRepr", into = "RationalRepr")]
pub struct RationalFn {
    num: MultiPoly,
    den: MultiPoly,
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: MultiPoly,
    den: MultiPoly,
}

impl TryFrom<RationalRepr> for RationalFn {
    type Error = Error;
    fn try_from(r: RationalRepr) -> Result<Self> {
        RationalFn::new(r.num, r.den)
    }
}

impl From<RationalFn> for RationalRepr {
    fn from(f: RationalFn) -> Self {
        RationalRepr { num: f.num, den: f.den }
    }
}

impl RationalFn {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if num.dim() != den.dim() {
            return Err(Error::DimensionMismatch {
                expected: num.dim(),
                found: den.dim(),
            });
        }
        if den.is_zero() {
            return Err(Error::Precondition("denominator is identically zero".into()));
        }
        Ok(Self { num, den })
    }

    /// A polynomial viewed as a rational function with denominator 1.
    pub fn from_poly(p: MultiPoly) -> Self {
        let n = p.dim();
        Self {
            num: p,
            den: MultiPoly::one(n),
        }
    }

    /// `1/(1 - z_i)` in dimension `n`.
    pub fn geometric(n: usize, i: usize) -> Self {
        let den = MultiPoly::one(n)
            .sub(&MultiPoly::variable(n, i))
            .expect("same dimension");
        Self {
            num: MultiPoly::one(n),
            den,
        }
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    /// True when the denominator is a nonzero constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// The polynomial `num/den` when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<MultiPoly> {
        if !self.is_polynomial() {
            return None;
        }
        let d = self.den.coeff(&vec![0; self.dim()]);
        Some(self.num.scale(Complex64::new(1.0, 0.0) / d))
    }

    /// Taylor polynomial at the origin up to total degree `degree`, from the
    /// linear recurrence `den · f = num`.
    pub fn taylor(&self, degree: u32) -> Result<MultiPoly> {
        let n = self.dim();
        let zero = vec![0u32; n];
        let d0 = self.den.coeff(&zero);
        if d0 == Complex64::new(0.0, 0.0) {
            return Err(Error::Precondition(
                "denominator vanishes at the origin; datum is not holomorphic there".into(),
            ));
        }
        let den_terms: Vec<(&Exponent, &Complex64)> =
            self.den.terms().filter(|(e, _)| e.iter().any(|&k| k > 0)).collect();
        let mut f: BTreeMap<Exponent, Complex64> = BTreeMap::new();
        for total in 0..=degree {
            for k in multi_indices(n, total) {
                let mut acc = self.num.coeff(&k);
                for (l, dl) in &den_terms {
                    if l.iter().zip(&k).all(|(a, b)| a <= b) {
                        let rest: Exponent = k.iter().zip(l.iter()).map(|(a, b)| a - b).collect();
                        if let Some(v) = f.get(&rest) {
                            acc -= *dl * v;
                        }
                    }
                }
                let v = acc / d0;
                if v != Complex64::new(0.0, 0.0) {
                    f.insert(k, v);
                }
            }
        }
        MultiPoly::from_terms(n, f)
    }
}

/// All multi-indices in `N_0^n` of total degree `total`, in lexicographic order.
pub(crate) fn multi_indices(n: usize, total: u32) -> Vec<Exponent> {
    fn rec(n: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() == n - 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            rec(n, remaining - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Evaluates `f` at `point`; a pole is reported when
/// `|den| < pole_tol · (1 + |num|)`.
pub fn rational_eval(f: &RationalFn, point: &[Complex64], pole_tol: f64) -> Result<Complex64> {
    let num = f.num.eval(point)?;
    let den = f.den.eval(point)?;
    if den.norm() < pole_tol * (1.0 + num.norm()) {
        return Err(Error::Pole {
            point: point.to_vec(),
        });
    }
    Ok(num / den)
}
