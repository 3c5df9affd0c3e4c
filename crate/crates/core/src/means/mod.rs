//! Generalised integral means `M(φ; z, t) = ∫ φ(z + t y) dμ(y)` for the
//! measure families in [`MeasureSpec`], evaluated exactly (polynomial data),
//! by quadrature (rational data) or through Pizzetti-type series.

mod exact;
mod pizzetti;
mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::algebra::{factor_symmetric, verify_factorisation, SquareMatrix, SymFactorisation, DEFAULT_TOL};
use crate::error::{Error, Result};

pub use exact::{mean_exact_poly, monomial_moment};
pub use pizzetti::{
    mean_value_check, n_scaled_mean, pizzetti_residual, pizzetti_series, rot_avg_mean, rot_avg_series,
};
pub use quadrature::{mean_quadrature, node_singularities, QuadConfig, QuadEstimate, QuadScheme};

/// Ball or sphere base for elliptic and wave measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Ball,
    Sphere,
}

/// A unit-mass measure, as a tagged JSON tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// Point mass at `a`.
    Dirac {
        #[serde(with = "crate::cser::vec")]
        a: Vec<Complex64>,
    },
    /// Normalised Lebesgue measure on the unit ball.
    Ball { n: usize },
    /// Normalised surface measure on the unit sphere.
    Sphere { n: usize },
    /// Ball/sphere pushed forward by `C Λ^{1/2}`. In JSON the factorisation
    /// may be given as `{"a": …}` alone, in which case it is computed (real
    /// symmetric positive definite `a` only); a supplied `c` and `lambda` are
    /// verified instead.
    Elliptic {
        #[serde(deserialize_with = "de_factor")]
        fact: SymFactorisation,
        base: BaseKind,
    },
    /// Ball/sphere pushed forward by `y ↦ (y_1, i y_2, …, i y_n)`.
    Wave { n: usize, base: BaseKind },
    /// `(1/s) Σ_k` of the base mean at `t e^{2πik/(ps)}`.
    RotAvg { base: Box<MeasureSpec>, s: u32, p: u32 },
    /// Base mean with the anisotropic shift `(t^{N_1} y_1, …, t^{N_n} y_n)`.
    NScaled { base: Box<MeasureSpec>, weights: Vec<u32> },
}

#[derive(Deserialize)]
struct FactorRepr {
    a: SquareMatrix,
    #[serde(default)]
    c: Option<SquareMatrix>,
    #[serde(default, with = "crate::cser::opt_vec")]
    lambda: Option<Vec<Complex64>>,
}

fn de_factor<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SymFactorisation, D::Error> {
    use serde::de::Error as _;
    let r = FactorRepr::deserialize(d)?;
    match (r.c, r.lambda) {
        (Some(c), Some(lambda)) => {
            let f = SymFactorisation { a: r.a, c, lambda };
            verify_factorisation(&f, DEFAULT_TOL).map_err(D::Error::custom)?;
            Ok(f)
        }
        (None, None) => factor_symmetric(&r.a, DEFAULT_TOL).map_err(D::Error::custom),
        _ => Err(D::Error::custom("give both c and lambda, or neither")),
    }
}

/// Where the measure lives before the support map is applied.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Support<'a> {
    Dirac(&'a [Complex64]),
    Ball(usize),
    Sphere(usize),
}

/// One term `weight · ∫ φ(z + S(τ) y) dν(y)` of a flattened measure, with
/// `S(τ) = D(τ) M` and `D(τ) = τ I` or `diag(τ^{N_i})`.
#[derive(Debug, Clone)]
pub(crate) struct Branch<'a> {
    pub support: Support<'a>,
    pub map: SquareMatrix,
    pub weights: Option<&'a [u32]>,
    pub tau: Complex64,
    pub weight: f64,
}

impl Branch<'_> {
    /// Rows of `S(τ)`.
    pub fn shift_rows(&self, tau: Complex64) -> Vec<Vec<Complex64>> {
        let rows = self.map.rows();
        rows.into_iter()
            .enumerate()
            .map(|(i, row)| {
                let scale = match self.weights {
                    Some(w) => tau.powu(w[i]),
                    None => tau,
                };
                row.into_iter().map(|m| scale * m).collect()
            })
            .collect()
    }

    /// `z + S(τ) y`.
    pub fn point(&self, z: &[Complex64], rows: &[Vec<Complex64>], y: &[f64]) -> Vec<Complex64> {
        z.iter()
            .zip(rows)
            .map(|(zi, row)| row.iter().zip(y).fold(*zi, |acc, (s, yl)| acc + s * yl))
            .collect()
    }
}

impl MeasureSpec {
    pub fn ball(n: usize) -> Self {
        MeasureSpec::Ball { n }
    }

    pub fn sphere(n: usize) -> Self {
        MeasureSpec::Sphere { n }
    }

    pub fn dirac(a: Vec<Complex64>) -> Self {
        MeasureSpec::Dirac { a }
    }

    /// Elliptic measure for a real symmetric positive definite matrix.
    pub fn elliptic(a: &SquareMatrix, base: BaseKind) -> Result<Self> {
        Ok(MeasureSpec::Elliptic {
            fact: factor_symmetric(a, DEFAULT_TOL)?,
            base,
        })
    }

    pub fn wave(n: usize, base: BaseKind) -> Self {
        MeasureSpec::Wave { n, base }
    }

    pub fn rot_avg(base: MeasureSpec, s: u32, p: u32) -> Result<Self> {
        let m = MeasureSpec::RotAvg {
            base: Box::new(base),
            s,
            p,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn n_scaled(base: MeasureSpec, weights: Vec<u32>) -> Result<Self> {
        let m = MeasureSpec::NScaled {
            base: Box::new(base),
            weights,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Dirac { a } => a.len(),
            MeasureSpec::Ball { n } | MeasureSpec::Sphere { n } | MeasureSpec::Wave { n, .. } => *n,
            MeasureSpec::Elliptic { fact, .. } => fact.dim(),
            MeasureSpec::RotAvg { base, .. } | MeasureSpec::NScaled { base, .. } => base.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Dirac { a } if a.is_empty() => Err(Error::Precondition("dirac point is empty".into())),
            MeasureSpec::Ball { n } | MeasureSpec::Sphere { n } | MeasureSpec::Wave { n, .. } if *n == 0 => {
                Err(Error::Precondition("measure dimension must be positive".into()))
            }
            MeasureSpec::Elliptic { fact, .. } => verify_factorisation(fact, DEFAULT_TOL),
            MeasureSpec::RotAvg { base, s, p } => {
                if *s == 0 || *p == 0 {
                    return Err(Error::Precondition("rotation average needs s, p ≥ 1".into()));
                }
                base.validate()
            }
            MeasureSpec::NScaled { base, weights } => {
                if matches!(**base, MeasureSpec::RotAvg { .. } | MeasureSpec::NScaled { .. }) {
                    return Err(Error::Precondition(
                        "anisotropic scaling applies to a plain measure, not to an average or another scaling".into(),
                    ));
                }
                if weights.len() != base.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: base.dim(),
                        found: weights.len(),
                    });
                }
                if weights.contains(&0) {
                    return Err(Error::Precondition("scaling weights must be positive".into()));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// Flattens rotation averages and scalings into weighted primitive terms.
    pub(crate) fn branches(&self, tau: Complex64) -> Vec<Branch<'_>> {
        let mut out = Vec::new();
        self.collect_branches(tau, 1.0, None, &mut out);
        out
    }

    fn collect_branches<'a>(&'a self, tau: Complex64, weight: f64, scaling: Option<&'a [u32]>, out: &mut Vec<Branch<'a>>) {
        let identity = |n| SquareMatrix::identity(n);
        let mut push = |support, map| {
            out.push(Branch {
                support,
                map,
                weights: scaling,
                tau,
                weight,
            })
        };
        match self {
            MeasureSpec::Dirac { a } => push(Support::Dirac(a), identity(a.len())),
            MeasureSpec::Ball { n } => push(Support::Ball(*n), identity(*n)),
            MeasureSpec::Sphere { n } => push(Support::Sphere(*n), identity(*n)),
            MeasureSpec::Elliptic { fact, base } => push(base_support(*base, fact.dim()), fact.support_map()),
            MeasureSpec::Wave { n, base } => {
                let mut d = vec![Complex64::new(0.0, 1.0); *n];
                d[0] = Complex64::new(1.0, 0.0);
                push(base_support(*base, *n), SquareMatrix::diagonal(&d))
            }
            MeasureSpec::RotAvg { base, s, p } => {
                let count = *s as usize;
                let step = 2.0 * std::f64::consts::PI / (*p as f64 * *s as f64);
                for k in 0..count {
                    let rot = Complex64::from_polar(1.0, step * k as f64);
                    base.collect_branches(tau * rot, weight / count as f64, scaling, out);
                }
            }
            MeasureSpec::NScaled { base, weights } => base.collect_branches(tau, weight, Some(weights), out),
        }
    }
}

fn base_support(base: BaseKind, n: usize) -> Support<'static> {
    match base {
        BaseKind::Ball => Support::Ball(n),
        BaseKind::Sphere => Support::Sphere(n),
    }
}
