//! Truncated formal power series in `t`, either with polynomial coefficients
//! `u_j(z)` or with scalar coefficients after specialising at a point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{apply_diffop, DiffOp, MultiPoly, RationalFn};
use crate::error::{Error, Result};
use crate::moments::MomentFn;
use crate::numeric::least_squares;

/// Coefficients `u_0, …, u_J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum Coeffs {
    Poly(Vec<MultiPoly>),
    Scalar(#[serde(with = "crate::cser::vec")] Vec<Complex64>),
}

/// `Σ_{j ≤ J} u_j t^j` with a provenance trail describing how it was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalSeries {
    pub provenance: Vec<String>,
    pub coeffs: Coeffs,
}

impl FormalSeries {
    pub fn from_polys(coeffs: Vec<MultiPoly>, provenance: impl Into<String>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Precondition("a series needs at least one coefficient".into()))?;
        let n = first.dim();
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(Self {
            provenance: vec![provenance.into()],
            coeffs: Coeffs::Poly(coeffs),
        })
    }

    pub fn from_scalars(coeffs: Vec<Complex64>, provenance: impl Into<String>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("a series needs at least one coefficient".into()));
        }
        Ok(Self {
            provenance: vec![provenance.into()],
            coeffs: Coeffs::Scalar(coeffs),
        })
    }

    /// Truncation order `J`.
    pub fn truncation(&self) -> usize {
        self.len() - 1
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Poly(c) => c.len(),
            Coeffs::Scalar(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension of `z`, or `None` for scalar series.
    pub fn dim(&self) -> Option<usize> {
        match &self.coeffs {
            Coeffs::Poly(c) => c.first().map(MultiPoly::dim),
            Coeffs::Scalar(_) => None,
        }
    }

    pub fn polys(&self) -> Option<&[MultiPoly]> {
        match &self.coeffs {
            Coeffs::Poly(c) => Some(c),
            Coeffs::Scalar(_) => None,
        }
    }

    pub fn scalars(&self) -> Option<&[Complex64]> {
        match &self.coeffs {
            Coeffs::Scalar(c) => Some(c),
            Coeffs::Poly(_) => None,
        }
    }

    fn with_step(&self, coeffs: Coeffs, step: String) -> Self {
        let mut provenance = self.provenance.clone();
        provenance.push(step);
        Self { provenance, coeffs }
    }
}

/// `û = Σ P^j(∂_z)φ / j! · t^j` up to `t^J`, built by `u_{j+1} = P u_j / (j+1)`.
pub fn formal_solution(p: &DiffOp, phi: &MultiPoly, j_max: usize) -> Result<FormalSeries> {
    if p.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    let mut coeffs = Vec::with_capacity(j_max + 1);
    coeffs.push(phi.clone());
    for j in 0..j_max {
        let next = apply_diffop(p, &coeffs[j])?.scale(Complex64::new(1.0 / (j + 1) as f64, 0.0));
        coeffs.push(next);
    }
    FormalSeries::from_polys(
        coeffs,
        format!("formal_solution(order={}, n={}, J={j_max})", p.order(), p.dim()),
    )
}

/// As [`formal_solution`], for a rational datum replaced by its Taylor
/// polynomial at the origin of degree `p·J` (enough for `u_j(0)`, `j ≤ J`).
pub fn formal_solution_rational(p: &DiffOp, phi: &RationalFn, j_max: usize) -> Result<FormalSeries> {
    let degree = p.order().max(1) as usize * j_max;
    let degree = u32::try_from(degree).map_err(|_| Error::Precondition("truncation degree too large".into()))?;
    let poly = match phi.as_polynomial() {
        Some(q) => q,
        None => phi.taylor(degree)?,
    };
    let mut s = formal_solution(p, &poly, j_max)?;
    if !phi.is_polynomial() {
        s.provenance.insert(0, format!("taylor_truncation(degree={degree})"));
    }
    Ok(s)
}

/// Coefficientwise division by `m(j)`.
pub fn borel_transform(s: &FormalSeries, m: &MomentFn) -> Result<FormalSeries> {
    let inv = |j: usize| -> Result<f64> {
        match m.eval(j) {
            Ok(v) => Ok(1.0 / v),
            Err(Error::MomentOverflow { .. }) => Ok((-m.log_eval(j)?).exp()),
            Err(e) => Err(e),
        }
    };
    let coeffs = match &s.coeffs {
        Coeffs::Poly(c) => Coeffs::Poly(
            c.iter()
                .enumerate()
                .map(|(j, u)| Ok(u.scale(Complex64::new(inv(j)?, 0.0))))
                .collect::<Result<_>>()?,
        ),
        Coeffs::Scalar(c) => Coeffs::Scalar(
            c.iter()
                .enumerate()
                .map(|(j, u)| Ok(u * inv(j)?))
                .collect::<Result<_>>()?,
        ),
    };
    let tag = serde_json::to_string(m).unwrap_or_else(|_| "?".into());
    Ok(s.with_step(coeffs, format!("borel_transform({tag})")))
}

/// Evaluates every coefficient at `z0`.
pub fn specialise(s: &FormalSeries, z0: &[Complex64]) -> Result<FormalSeries> {
    match &s.coeffs {
        Coeffs::Poly(c) => {
            let values = c.iter().map(|u| u.eval(z0)).collect::<Result<Vec<_>>>()?;
            Ok(s.with_step(Coeffs::Scalar(values), format!(
                "specialise(z0=[{}])",
                z0.iter().map(|c| format!("[{}, {}]", c.re, c.im)).collect::<Vec<_>>().join(", ")
            )))
        }
        Coeffs::Scalar(_) => Err(Error::Precondition("series is already specialised".into())),
    }
}

/// `Σ_{j ≤ J} u_j(z) t^j` by Horner's rule; `z` is ignored for scalar series.
pub fn partial_sum(s: &FormalSeries, t: Complex64, z: &[Complex64]) -> Result<Complex64> {
    let values: Vec<Complex64> = match &s.coeffs {
        Coeffs::Poly(c) => c.iter().map(|u| u.eval(z)).collect::<Result<_>>()?,
        Coeffs::Scalar(c) => c.clone(),
    };
    Ok(values.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, u| acc * t + u))
}

/// Fitted Gevrey order of a scalar series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyEstimate {
    /// Slope against the Stirling term `j ln j − j`.
    pub s_hat: f64,
    pub ln_b: f64,
    pub ln_a: f64,
    /// RMS residual of the fit in `ln |u_j|`.
    pub residual: f64,
    pub samples: usize,
    /// Set when the coefficients in range are all zero or the fit is singular.
    pub degenerate: bool,
}

const GEVREY_MIN_SAMPLES: usize = 10;

/// Least-squares fit of `ln|u_j| ≈ s (j ln j − j) + j ln B + ln A` over the
/// nonzero coefficients with `jmin ≤ j ≤ jmax`.
pub fn gevrey_estimate(s: &FormalSeries, jmin: usize, jmax: usize) -> Result<GevreyEstimate> {
    let u = s
        .scalars()
        .ok_or_else(|| Error::Precondition("gevrey_estimate needs a specialised series".into()))?;
    if jmin < 2 || jmax < jmin {
        return Err(Error::Precondition(format!("need 2 ≤ jmin ≤ jmax, got [{jmin}, {jmax}]")));
    }
    if jmax > s.truncation() {
        return Err(Error::Precondition(format!(
            "jmax = {jmax} exceeds truncation {}",
            s.truncation()
        )));
    }
    let mut stirling = Vec::new();
    let mut linear = Vec::new();
    let mut y = Vec::new();
    for (j, uj) in u.iter().enumerate().take(jmax + 1).skip(jmin) {
        let a = uj.norm();
        if a > 0.0 && a.is_finite() {
            let jf = j as f64;
            stirling.push(jf * jf.ln() - jf);
            linear.push(jf);
            y.push(a.ln());
        }
    }
    let degenerate = GevreyEstimate {
        s_hat: 0.0,
        ln_b: 0.0,
        ln_a: 0.0,
        residual: 0.0,
        samples: y.len(),
        degenerate: true,
    };
    if y.is_empty() {
        return Ok(degenerate);
    }
    if y.len() < GEVREY_MIN_SAMPLES {
        return Err(Error::TooFewCoefficients {
            needed: GEVREY_MIN_SAMPLES,
            found: y.len(),
        });
    }
    let ones = vec![1.0; y.len()];
    match least_squares(&[stirling, linear, ones], &y) {
        Some((beta, residual)) => Ok(GevreyEstimate {
            s_hat: beta[0],
            ln_b: beta[1],
            ln_a: beta[2],
            residual,
            samples: y.len(),
            degenerate: false,
        }),
        None => Ok(degenerate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::factorial;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn z_squared() -> MultiPoly {
        MultiPoly::from_real_terms(1, &[(&[2], 1.0)])
    }

    #[test]
    fn taylor_shift_for_first_derivative() {
        let s = formal_solution(&DiffOp::partial(1, 0, 1), &z_squared(), 3).unwrap();
        let u = s.polys().unwrap();
        assert_eq!(u[0], z_squared());
        assert_eq!(u[1], MultiPoly::from_real_terms(1, &[(&[1], 2.0)]));
        assert_eq!(u[2], MultiPoly::one(1));
        assert!(u[3].is_zero());
    }

    #[test]
    fn heat_on_z_squared() {
        let s = formal_solution(&DiffOp::partial(1, 0, 2), &z_squared(), 2).unwrap();
        let u = s.polys().unwrap();
        assert_eq!(u[1], MultiPoly::constant(1, c(2.0)));
        assert!(u[2].is_zero());
        let sp = specialise(&s, &[c(0.0)]).unwrap();
        assert_eq!(sp.scalars().unwrap(), &[c(0.0), c(2.0), c(0.0)]);
        let b = borel_transform(&s, &MomentFn::gamma_s(1.0)).unwrap();
        assert!((partial_sum(&b, c(1.0), &[c(0.0)]).unwrap() - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_datum_gives_zero_series() {
        let s = formal_solution(&DiffOp::laplacian(2), &MultiPoly::zero(2), 5).unwrap();
        assert!(s.polys().unwrap().iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn rational_datum_coefficients_at_origin() {
        let s = formal_solution_rational(&DiffOp::partial(1, 0, 2), &RationalFn::geometric(1, 0), 10).unwrap();
        let u = specialise(&s, &[c(0.0)]).unwrap();
        for (j, v) in u.scalars().unwrap().iter().enumerate() {
            let expect = factorial(2 * j) / factorial(j);
            assert!((v.re - expect).abs() <= 1e-12 * expect, "j={j}");
        }
        assert!(s.provenance[0].starts_with("taylor_truncation"));
    }

    #[test]
    fn borel_examples() {
        let fact = FormalSeries::from_scalars((0..=10).map(|j| c(factorial(j))).collect(), "test").unwrap();
        let b = borel_transform(&fact, &MomentFn::gamma_s(1.0)).unwrap();
        assert!(b.scalars().unwrap().iter().all(|v| (v - c(1.0)).norm() < 1e-15));
        let ones = FormalSeries::from_scalars(vec![c(1.0); 20], "test").unwrap();
        let e = borel_transform(&ones, &MomentFn::gamma_s(1.0)).unwrap();
        assert!((partial_sum(&e, c(1.0), &[]).unwrap().re - std::f64::consts::E).abs() < 1e-15);
        let id = borel_transform(&ones, &MomentFn::table(vec![1.0; 20], 0.0).unwrap()).unwrap();
        assert_eq!(id.coeffs, ones.coeffs);
    }

    #[test]
    fn geometric_partial_sum() {
        let s = FormalSeries::from_scalars(vec![c(1.0); 11], "test").unwrap();
        assert_eq!(partial_sum(&s, c(0.5), &[]).unwrap(), c(1.9990234375));
        assert_eq!(partial_sum(&s, c(0.0), &[]).unwrap(), c(1.0));
    }

    #[test]
    fn gevrey_examples() {
        let heat: Vec<Complex64> = (0..=60).map(|j| c(factorial(2 * j) / factorial(j))).collect();
        let g = gevrey_estimate(&FormalSeries::from_scalars(heat, "t").unwrap(), 2, 60).unwrap();
        assert!((0.9..=1.1).contains(&g.s_hat), "{g:?}");
        let inv: Vec<Complex64> = (0..=60).map(|j| c(1.0 / factorial(j))).collect();
        let g = gevrey_estimate(&FormalSeries::from_scalars(inv, "t").unwrap(), 2, 60).unwrap();
        assert!((-1.1..=-0.9).contains(&g.s_hat), "{g:?}");
        let ones = FormalSeries::from_scalars(vec![c(1.0); 61], "t").unwrap();
        let g = gevrey_estimate(&ones, 2, 60).unwrap();
        assert!(g.s_hat.abs() <= 0.05, "{g:?}");
        let zeros = FormalSeries::from_scalars(vec![c(0.0); 61], "t").unwrap();
        assert!(gevrey_estimate(&zeros, 2, 60).unwrap().degenerate);
        let short = FormalSeries::from_scalars(vec![c(1.0); 8], "t").unwrap();
        assert!(matches!(gevrey_estimate(&short, 2, 7), Err(Error::TooFewCoefficients { .. })));
    }

    #[test]
    fn json_round_trip() {
        let s = formal_solution(&DiffOp::laplacian(2), &MultiPoly::from_real_terms(2, &[(&[2, 2], 1.0)]), 3).unwrap();
        let back: FormalSeries = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let sp = specialise(&s, &[c(1.0), c(0.5)]).unwrap();
        let back: FormalSeries = serde_json::from_str(&serde_json::to_string(&sp).unwrap()).unwrap();
        assert_eq!(back, sp);
    }
}
