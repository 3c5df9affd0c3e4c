use serde::{Deserialize, Serialize};

use super::gamma::{factorial, gamma, ln_gamma, ln_pochhammer, pochhammer, MAX_FACTORIAL};
use crate::error::{Error, Result};

/// A positive sequence `j ↦ m(j)` with a declared order, given as an
/// expression tree.
///
/// JSON form is a tagged tree, for example
/// `{"kind":"product","args":[{"kind":"gamma_s","s":1},{"kind":"gamma_s","s":1}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentFn {
    /// `Γ(1 + s j)`, order `s`.
    GammaS { s: f64 },
    /// `a Γ(b + j/k)`, order `1/k`.
    GammaAbk { a: f64, b: f64, k: f64 },
    /// `4^j (n/2 + 1)_j j!`, order 2.
    PizzettiBall { n: u32 },
    /// `4^j (n/2)_j j!`, order 2.
    PizzettiSphere { n: u32 },
    Product { args: Box<(MomentFn, MomentFn)> },
    /// Requires `order(m1) > order(m2)`.
    Quotient { args: Box<(MomentFn, MomentFn)> },
    /// `j ↦ m(stride · j)`, order `stride · order(m)`.
    Subsequence { base: Box<MomentFn>, stride: u32 },
    /// Explicit values with a declared order.
    Table { values: Vec<f64>, order: f64 },
}

impl MomentFn {
    pub fn gamma_s(s: f64) -> Self {
        MomentFn::GammaS { s }
    }

    pub fn pizzetti_ball(n: u32) -> Self {
        MomentFn::PizzettiBall { n }
    }

    pub fn pizzetti_sphere(n: u32) -> Self {
        MomentFn::PizzettiSphere { n }
    }

    pub fn table(values: Vec<f64>, order: f64) -> Result<Self> {
        let m = MomentFn::Table { values, order };
        m.validate()?;
        Ok(m)
    }

    /// Checks structural invariants (positive parameters, quotient order rule,
    /// positive table entries).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMoment(msg));
        match self {
            MomentFn::GammaS { s } if !(*s > 0.0 && s.is_finite()) => bad(format!("gamma_s order must be positive, got {s}")),
            MomentFn::GammaAbk { a, b, k } if !(*a > 0.0 && *b > 0.0 && *k > 0.0) => {
                bad(format!("gamma_abk needs a, b, k > 0, got ({a}, {b}, {k})"))
            }
            MomentFn::PizzettiBall { n } | MomentFn::PizzettiSphere { n } if *n == 0 => {
                bad("pizzetti dimension must be positive".into())
            }
            MomentFn::Product { args } => {
                args.0.validate()?;
                args.1.validate()
            }
            MomentFn::Quotient { args } => {
                args.0.validate()?;
                args.1.validate()?;
                if args.0.order() <= args.1.order() {
                    return bad(format!(
                        "quotient needs order(m1) > order(m2), got {} <= {}",
                        args.0.order(),
                        args.1.order()
                    ));
                }
                Ok(())
            }
            MomentFn::Subsequence { base, stride } => {
                if *stride == 0 {
                    return bad("subsequence stride must be at least 1".into());
                }
                base.validate()
            }
            MomentFn::Table { values, order } => {
                if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return bad("table values must be positive and finite".into());
                }
                if !(*order >= 0.0) {
                    return bad("table order must be non-negative".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Declared order, following the sum/difference/stride rules.
    pub fn order(&self) -> f64 {
        match self {
            MomentFn::GammaS { s } => *s,
            MomentFn::GammaAbk { k, .. } => 1.0 / k,
            MomentFn::PizzettiBall { .. } | MomentFn::PizzettiSphere { .. } => 2.0,
            MomentFn::Product { args } => args.0.order() + args.1.order(),
            MomentFn::Quotient { args } => args.0.order() - args.1.order(),
            MomentFn::Subsequence { base, stride } => *stride as f64 * base.order(),
            MomentFn::Table { order, .. } => *order,
        }
    }

    /// `m(j)`; fails with [`Error::MomentOverflow`] when the value is not
    /// representable, in which case [`MomentFn::log_eval`] still works.
    pub fn eval(&self, j: usize) -> Result<f64> {
        let v = match self {
            MomentFn::GammaS { s } => gamma(1.0 + s * j as f64),
            MomentFn::GammaAbk { a, b, k } => a * gamma(b + j as f64 / k),
            MomentFn::PizzettiBall { n } => pizzetti(*n as f64 / 2.0 + 1.0, j),
            MomentFn::PizzettiSphere { n } => pizzetti(*n as f64 / 2.0, j),
            MomentFn::Product { args } => args.0.eval(j)? * args.1.eval(j)?,
            MomentFn::Quotient { args } => {
                let (a, b) = (args.0.eval(j), args.1.eval(j));
                match (a, b) {
                    (Ok(a), Ok(b)) => a / b,
                    // Numerator or denominator overflowed on its own; the
                    // quotient may still be finite.
                    _ => self.log_eval(j)?.exp(),
                }
            }
            MomentFn::Subsequence { base, stride } => base.eval(*stride as usize * j)?,
            MomentFn::Table { values, .. } => *values.get(j).ok_or_else(|| {
                Error::InvalidMoment(format!("table has {} entries, j = {j} requested", values.len()))
            })?,
        };
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::MomentOverflow { j });
        }
        Ok(v)
    }

    /// `ln m(j)`, available for every `j`.
    pub fn log_eval(&self, j: usize) -> Result<f64> {
        Ok(match self {
            MomentFn::GammaS { s } => ln_gamma(1.0 + s * j as f64),
            MomentFn::GammaAbk { a, b, k } => a.ln() + ln_gamma(b + j as f64 / k),
            MomentFn::PizzettiBall { n } => ln_pizzetti(*n as f64 / 2.0 + 1.0, j),
            MomentFn::PizzettiSphere { n } => ln_pizzetti(*n as f64 / 2.0, j),
            MomentFn::Product { args } => args.0.log_eval(j)? + args.1.log_eval(j)?,
            MomentFn::Quotient { args } => args.0.log_eval(j)? - args.1.log_eval(j)?,
            MomentFn::Subsequence { base, stride } => base.log_eval(*stride as usize * j)?,
            MomentFn::Table { values, .. } => values
                .get(j)
                .ok_or_else(|| {
                    Error::InvalidMoment(format!("table has {} entries, j = {j} requested", values.len()))
                })?
                .ln(),
        })
    }

    /// Number of indices available (`None` = unbounded).
    pub fn len_hint(&self) -> Option<usize> {
        match self {
            MomentFn::Table { values, .. } => Some(values.len()),
            MomentFn::Product { args } | MomentFn::Quotient { args } => {
                match (args.0.len_hint(), args.1.len_hint()) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            }
            MomentFn::Subsequence { base, stride } => base.len_hint().map(|l| l.div_ceil(*stride as usize)),
            _ => None,
        }
    }
}

/// `4^j (a)_j j!`.
fn pizzetti(a: f64, j: usize) -> f64 {
    if j > MAX_FACTORIAL {
        return f64::INFINITY;
    }
    4f64.powi(j as i32) * pochhammer(a, j) * factorial(j)
}

fn ln_pizzetti(a: f64, j: usize) -> f64 {
    j as f64 * 4f64.ln() + ln_pochhammer(a, j) + ln_gamma(1.0 + j as f64)
}

/// Pointwise product, order `s1 + s2`.
pub fn moment_product(m1: MomentFn, m2: MomentFn) -> MomentFn {
    MomentFn::Product {
        args: Box::new((m1, m2)),
    }
}

/// Pointwise quotient, order `s1 − s2`; requires `s1 > s2`.
pub fn moment_quotient(m1: MomentFn, m2: MomentFn) -> Result<MomentFn> {
    let m = MomentFn::Quotient {
        args: Box::new((m1, m2)),
    };
    m.validate()?;
    Ok(m)
}

/// `j ↦ m(stride · j)`.
pub fn moment_subsequence(m: MomentFn, stride: u32) -> Result<MomentFn> {
    let out = MomentFn::Subsequence {
        base: Box::new(m),
        stride,
    };
    out.validate()?;
    Ok(out)
}

/// `m(j)`.
pub fn moment_eval(m: &MomentFn, j: usize) -> Result<f64> {
    m.eval(j)
}

/// `ln m(j)`.
pub fn moment_log_eval(m: &MomentFn, j: usize) -> Result<f64> {
    m.log_eval(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn pizzetti_values() {
        assert_eq!(MomentFn::pizzetti_sphere(1).eval(2).unwrap(), 24.0);
        assert_eq!(MomentFn::pizzetti_ball(2).eval(1).unwrap(), 8.0);
        assert_eq!(MomentFn::pizzetti_ball(2).eval(2).unwrap(), 192.0);
        for n in 1..5 {
            assert_eq!(MomentFn::pizzetti_ball(n).eval(0).unwrap(), 1.0);
            assert_eq!(MomentFn::pizzetti_sphere(n).eval(0).unwrap(), 1.0);
        }
    }

    #[test]
    fn product_and_quotient() {
        let g1 = MomentFn::gamma_s(1.0);
        let p = moment_product(g1.clone(), g1.clone());
        assert_eq!(p.eval(2).unwrap(), 4.0);
        assert_eq!(p.order(), 2.0);
        let q = moment_quotient(MomentFn::gamma_s(2.0), g1.clone()).unwrap();
        assert!(rel(q.eval(3).unwrap(), 120.0) < 1e-14);
        assert_eq!(q.order(), 1.0);
        assert!(matches!(
            moment_quotient(g1.clone(), MomentFn::gamma_s(2.0)),
            Err(Error::InvalidMoment(_))
        ));
        let ones = MomentFn::table(vec![1.0; 8], 0.0).unwrap();
        let id = moment_product(MomentFn::pizzetti_ball(3), ones);
        for j in 0..8 {
            assert_eq!(id.eval(j).unwrap(), MomentFn::pizzetti_ball(3).eval(j).unwrap());
        }
    }

    #[test]
    fn subsequence() {
        let s = moment_subsequence(MomentFn::gamma_s(1.0), 2).unwrap();
        assert_eq!(s.eval(3).unwrap(), 720.0);
        assert_eq!(s.order(), 2.0);
        let b = moment_subsequence(MomentFn::pizzetti_ball(2), 2).unwrap();
        assert_eq!(b.eval(1).unwrap(), 192.0);
        let id = moment_subsequence(MomentFn::pizzetti_sphere(3), 1).unwrap();
        assert_eq!(id.eval(4).unwrap(), MomentFn::pizzetti_sphere(3).eval(4).unwrap());
        assert!(moment_subsequence(MomentFn::gamma_s(1.0), 0).is_err());
    }

    #[test]
    fn overflow_falls_back_to_log_domain() {
        let g = MomentFn::gamma_s(1.0);
        assert!(matches!(g.eval(200), Err(Error::MomentOverflow { j: 200 })));
        assert!(g.log_eval(200).unwrap().is_finite());
        // quotient of two overflowing values is finite
        let q = moment_quotient(MomentFn::gamma_s(2.0), MomentFn::gamma_s(1.8)).unwrap();
        assert!(q.eval(100).unwrap().is_finite());
    }

    #[test]
    fn log_and_direct_agree() {
        let ms = [
            MomentFn::gamma_s(1.0),
            MomentFn::gamma_s(2.5),
            MomentFn::pizzetti_ball(3),
            MomentFn::pizzetti_sphere(2),
            MomentFn::GammaAbk { a: 2.0, b: 1.5, k: 0.5 },
        ];
        for m in &ms {
            for j in 0..60 {
                if let Ok(v) = m.eval(j) {
                    assert!(rel(m.log_eval(j).unwrap().exp(), v) < 1e-12, "{m:?} j={j}");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let m = moment_product(MomentFn::gamma_s(1.0), MomentFn::gamma_s(1.0));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"kind":"product","args":[{"kind":"gamma_s","s":1.0},{"kind":"gamma_s","s":1.0}]}"#);
        let back: MomentFn = serde_json::from_str(r#"{"kind":"product","args":[{"kind":"gamma_s","s":1},{"kind":"gamma_s","s":1}]}"#).unwrap();
        assert_eq!(back, m);
    }
}
