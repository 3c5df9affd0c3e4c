use serde::{Deserialize, Serialize};

use super::gamma::ln_gamma;
use super::moment::MomentFn;
use crate::error::{Error, Result};

/// Indices above this are always compared in the log domain.
const LOG_DOMAIN_FROM: usize = 50;
const RELATION_TOL: f64 = 1e-9;

/// Outcome of [`check_generalised_moment`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub holds: bool,
    pub max_rel_deviation: f64,
    /// Index where the largest deviation occurred.
    pub worst_j: usize,
}

fn int_poly(p: &[i64], j: usize) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * j as f64 + c as f64)
}

/// Tests `p1(j) m1(j) = p2(j) m2(j) c^j` for `0 ≤ j ≤ jmax`, with the integer
/// polynomials given by ascending coefficients.
pub fn check_generalised_moment(
    m1: &MomentFn,
    m2: &MomentFn,
    p1: &[i64],
    p2: &[i64],
    c: f64,
    jmax: usize,
) -> Result<RelationCheck> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    if jmax < 1 {
        return Err(Error::Precondition("jmax must be at least 1".into()));
    }
    let mut worst = (0.0f64, 0usize);
    for j in 0..=jmax {
        let (a, b) = (int_poly(p1, j), int_poly(p2, j));
        let direct = if j <= LOG_DOMAIN_FROM {
            match (m1.eval(j), m2.eval(j)) {
                (Ok(v1), Ok(v2)) => {
                    let lhs = a * v1;
                    let rhs = b * v2 * c.powi(j as i32);
                    rhs.is_finite().then(|| deviation(lhs, rhs))
                }
                _ => None,
            }
        } else {
            None
        };
        let dev = match direct {
            Some(d) => d,
            None => {
                if a == 0.0 || b == 0.0 {
                    if a == b { 0.0 } else { f64::INFINITY }
                } else {
                    let l1 = a.abs().ln() + m1.log_eval(j)?;
                    let l2 = b.abs().ln() + m2.log_eval(j)? + j as f64 * c.ln();
                    let e = (l2 - l1).exp_m1();
                    if a.signum() == b.signum() { e.abs() } else { 2.0 + e }
                }
            }
        };
        if !(dev <= worst.0) {
            worst = (dev, j);
        }
    }
    Ok(RelationCheck {
        holds: worst.0 <= RELATION_TOL,
        max_rel_deviation: worst.0,
        worst_j: worst.1,
    })
}

fn deviation(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        return if rhs == 0.0 { 0.0 } else { f64::INFINITY };
    }
    ((lhs - rhs) / lhs).abs()
}

/// Result of [`moment_order_bounds`]. Failure is a value, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrderBounds {
    Bounded {
        c_hat: f64,
        big_c_hat: f64,
        ratios: Vec<f64>,
    },
    Unbounded {
        /// Growth factor of the normalised ratio over the sampled range.
        growth: f64,
        ratios: Vec<f64>,
    },
}

impl OrderBounds {
    pub fn is_bounded(&self) -> bool {
        matches!(self, OrderBounds::Bounded { .. })
    }
}

/// Empirical constants `c, C` with `c^j Γ(1+sj) ≤ m(j) ≤ C^j Γ(1+sj)` on
/// `1 ≤ j ≤ jmax`.
///
/// The normalised ratio `(m(j)/Γ(1+sj))^{1/j}` is declared unbounded when it
/// increases monotonically over the last half of the samples and either its
/// overall spread exceeds 10× or it keeps growing like a positive power of
/// `j` there (log-log slope above 1/2).
pub fn moment_order_bounds(m: &MomentFn, s: f64, jmax: usize) -> Result<OrderBounds> {
    if jmax < 5 {
        return Err(Error::Precondition(format!("jmax must be at least 5, got {jmax}")));
    }
    if !(s > 0.0) {
        return Err(Error::Precondition(format!("order must be positive, got {s}")));
    }
    let mut ratios = Vec::with_capacity(jmax);
    for j in 1..=jmax {
        let lr = (m.log_eval(j)? - ln_gamma(1.0 + s * j as f64)) / j as f64;
        ratios.push(lr.exp());
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let start = jmax - jmax / 2;
    let tail = &ratios[start - 1..];
    let monotone = tail.windows(2).all(|w| w[1] > w[0]);
    let (j0, j1) = (start as f64, jmax as f64);
    let slope = (tail[tail.len() - 1] / tail[0]).ln() / (j1 / j0).ln();
    if monotone && (hi / lo > 10.0 || slope > 0.5) {
        return Ok(OrderBounds::Unbounded {
            growth: hi / lo,
            ratios,
        });
    }
    Ok(OrderBounds::Bounded {
        c_hat: lo,
        big_c_hat: hi,
        ratios,
    })
}
