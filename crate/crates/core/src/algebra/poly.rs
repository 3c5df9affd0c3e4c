use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Multi-index `k ∈ N_0^n`.
pub type Exponent = Vec<u32>;

/// Largest exponent allowed in any coordinate.
pub const MAX_EXPONENT: u64 = 1 << 31;

/// Sparse polynomial in `n` complex variables with complex coefficients.
///
/// Zero coefficients are never stored; every exponent vector has length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

/// One `{"exp": [...], "re": x, "im": y}` record of the JSON encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "polynomial dimension must be positive");
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    /// `c · z^k`.
    pub fn monomial(n: usize, exp: Exponent, c: Complex64) -> Self {
        assert_eq!(exp.len(), n, "exponent length must equal dimension");
        let mut p = Self::zero(n);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The coordinate function `z_i` (0-based).
    pub fn variable(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(n, e, Complex64::new(1.0, 0.0))
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, collecting
    /// like terms.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Complex64)>,
    {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.len(),
                });
            }
            if e.iter().any(|&k| k as u64 >= MAX_EXPONENT) {
                return Err(Error::Precondition("exponent exceeds 2^31".into()));
            }
            *p.terms.entry(e).or_default() += c;
        }
        p.sweep();
        Ok(p)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms(n: usize, terms: &[(&[u32], f64)]) -> Self {
        Self::from_terms(
            n,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), Complex64::new(*c, 0.0))),
        )
        .expect("well-formed terms")
    }

    pub fn from_records(n: usize, records: &[TermRecord]) -> Result<Self> {
        Self::from_terms(
            n,
            records
                .iter()
                .map(|r| (r.exp.clone(), Complex64::new(r.re, r.im))),
        )
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(e, c)| TermRecord {
                exp: e.clone(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    fn sweep(&mut self) {
        self.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Smallest total degree among the terms.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_default() += c;
        }
        out.sweep();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.n);
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a * c);
        }
        out.sweep();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_default() += c1 * c2;
            }
        }
        out.sweep();
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(out)
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|e, _| e.iter().sum::<u32>() <= max_degree);
        out
    }

    /// `∂^k` applied to `self` for the multi-index `k`.
    pub fn derivative(&self, k: &[u32]) -> Result<Self> {
        if k.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: k.len(),
            });
        }
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e.iter().zip(k).any(|(a, b)| a < b) {
                continue;
            }
            let mut factor = 1.0;
            for (&a, &b) in e.iter().zip(k) {
                // falling factorial a (a-1) ... (a-b+1)
                for i in 0..b {
                    factor *= (a - i) as f64;
                }
            }
            let ne: Exponent = e.iter().zip(k).map(|(a, b)| a - b).collect();
            *out.terms.entry(ne).or_default() += c * factor;
        }
        out.sweep();
        Ok(out)
    }

    /// Evaluates at a complex point with compensated summation.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: point.len(),
            });
        }
        let mut acc = KahanSum::new();
        for (e, c) in &self.terms {
            let mut v = *c;
            for (&k, z) in e.iter().zip(point) {
                if k > 0 {
                    v *= z.powu(k);
                }
            }
            acc.add(v);
        }
        Ok(acc.value())
    }

    /// Substitutes `z ↦ z0 + S·y`, returning a polynomial in `y` whose
    /// dimension is the number of columns of `S` (given row-major as
    /// `rows[i][l]`).
    pub fn affine_substitute(&self, z0: &[Complex64], rows: &[Vec<Complex64>]) -> Result<Self> {
        if z0.len() != self.n || rows.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z0.len().min(rows.len()),
            });
        }
        let m = rows.first().map_or(0, |r| r.len());
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Precondition("substitution matrix is ragged or empty".into()));
        }
        let linear: Vec<MultiPoly> = (0..self.n)
            .map(|i| {
                let mut terms = vec![(vec![0; m], z0[i])];
                for (l, &s) in rows[i].iter().enumerate() {
                    let mut e = vec![0; m];
                    e[l] = 1;
                    terms.push((e, s));
                }
                MultiPoly::from_terms(m, terms)
            })
            .collect::<Result<_>>()?;
        let mut powers: Vec<Vec<MultiPoly>> = linear.iter().map(|l| vec![MultiPoly::one(m), l.clone()]).collect();
        let mut out = MultiPoly::zero(m);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(m, *c);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&linear[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut records = self.to_records();
        if records.is_empty() {
            // Keep the dimension recoverable for the zero polynomial.
            records.push(TermRecord {
                exp: vec![0; self.n],
                re: 0.0,
                im: 0.0,
            });
        }
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let n = records
            .first()
            .map(|r| r.exp.len())
            .ok_or_else(|| serde::de::Error::custom("empty polynomial record list: dimension unknown"))?;
        if n == 0 {
            return Err(serde::de::Error::custom("polynomial dimension must be positive"));
        }
        MultiPoly::from_records(n, &records).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zero_coefficients_are_swept() {
        let p = MultiPoly::from_real_terms(2, &[(&[1, 0], 1.0), (&[1, 0], -1.0), (&[0, 2], 3.0)]);
        assert_eq!(p.len(), 1);
        let q = p.sub(&p).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn derivative_power_rule() {
        let p = MultiPoly::from_real_terms(1, &[(&[5], 1.0)]);
        let d = p.derivative(&[3]).unwrap();
        assert_eq!(d, MultiPoly::from_real_terms(1, &[(&[2], 60.0)]));
        assert!(p.derivative(&[6]).unwrap().is_zero());
    }

    #[test]
    fn eval_and_substitute_agree() {
        let p = MultiPoly::from_real_terms(2, &[(&[2, 1], 2.0), (&[0, 3], -1.0), (&[0, 0], 0.5)]);
        let z0 = [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
        let s = vec![vec![c(1.0), Complex64::new(0.0, 2.0)], vec![c(-0.5), c(0.25)]];
        let q = p.affine_substitute(&z0, &s).unwrap();
        let y = [c(0.7), c(-0.3)];
        let direct_arg: Vec<Complex64> = (0..2).map(|i| z0[i] + s[i][0] * y[0] + s[i][1] * y[1]).collect();
        let a = p.eval(&direct_arg).unwrap();
        let b = q.eval(&y).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn json_round_trip_keeps_zero_dimension() {
        let z = MultiPoly::zero(3);
        let s = serde_json::to_string(&z).unwrap();
        let back: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        assert_eq!(back.dim(), 3);
        let bad: std::result::Result<MultiPoly, _> = serde_json::from_str("[]");
        assert!(bad.is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = MultiPoly::one(1);
        let b = MultiPoly::one(2);
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.eval(&[c(1.0), c(2.0)]).is_err());
    }
}
