use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::tanh_sinh;

/// Kernel `e_m(x) = a k x^{bk} e^{−x^k}` whose Mellin moments are
/// `m(u) = a Γ(b + u/k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelFn {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

/// Quadrature controls for [`kernel_moment_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuadConfig {
    pub rel_tol: f64,
    pub max_level: usize,
}

impl Default for KernelQuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            max_level: 12,
        }
    }
}

/// Value of a numeric integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl KernelFn {
    pub fn new(a: f64, b: f64, k: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && k > 0.0) {
            return Err(Error::Precondition(format!("kernel needs a, b, k > 0, got ({a}, {b}, {k})")));
        }
        Ok(Self { a, b, k })
    }
}

/// `e_m(x)` for `x > 0`; returns 0 for `x ≤ 0`.
pub fn kernel_eval(e: &KernelFn, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    e.a * e.k * (e.b * e.k * x.ln() - x.powf(e.k)).exp()
}

/// `∫_0^∞ x^{u−1} e_m(x) dx` by tanh-sinh on `(0, X]` plus an analytic bound
/// on the discarded tail `a Γ(b + u/k, X^k)`.
pub fn kernel_moment_integral(e: &KernelFn, u: f64, cfg: &KernelQuadConfig) -> Result<Estimate> {
    if u < 0.0 {
        return Err(Error::Precondition(format!("moment index must be non-negative, got {u}")));
    }
    let KernelFn { a, b, k } = *e;
    let power = u - 1.0 + b * k;
    if power <= -1.0 {
        return Err(Error::Precondition("integrand is not integrable at the origin".into()));
    }
    let alpha = b + u / k;
    // ln of an upper bound for a Γ(α, W).
    let ln_tail = |w: f64| -> f64 {
        let base = a.ln() + (alpha - 1.0) * w.ln() - w;
        if alpha <= 1.0 {
            base
        } else {
            base + 2f64.ln()
        }
    };
    let integrand = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        a * k * (power * x.ln() - x.powf(k)).exp()
    };
    let mut w = 41.5f64.max(2.0 * alpha + 2.0);
    for _ in 0..40 {
        let x_max = w.powf(1.0 / k);
        let half = 0.5 * x_max;
        let r = tanh_sinh(
            |x, d| integrand(if x < half { d } else { x }),
            0.0,
            x_max,
            cfg.rel_tol,
            cfg.max_level,
        );
        let tail = ln_tail(w);
        if r.value > 0.0 && tail <= (1e-17 * r.value).ln() {
            let error = r.error + tail.exp();
            if error > 1e-9 * r.value {
                return Err(Error::Quadrature(format!(
                    "kernel moment u={u}: error estimate {error:e} for value {}",
                    r.value
                )));
            }
            return Ok(Estimate { value: r.value, error });
        }
        w *= 1.5;
    }
    Err(Error::Quadrature(format!("kernel moment u={u}: tail never became negligible")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let e = KernelFn::new(1.0, 1.0, 1.0).unwrap();
        assert!((kernel_eval(&e, 1.0) - (-1f64).exp()).abs() < 1e-15);
        let e2 = KernelFn::new(1.0, 1.0, 2.0).unwrap();
        assert!((kernel_eval(&e2, 1.0) - 2.0 * (-1f64).exp()).abs() < 1e-15);
        assert!(kernel_eval(&e, 1e-300) < 1e-290);
    }

    #[test]
    fn moment_integrals_reproduce_gamma_values() {
        let cfg = KernelQuadConfig::default();
        // ∫ x e^{-x} dx = 1
        let v = kernel_moment_integral(&KernelFn::new(1.0, 1.0, 1.0).unwrap(), 1.0, &cfg).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12, "{v:?}");
        let v = kernel_moment_integral(&KernelFn::new(1.0, 1.0, 2.0).unwrap(), 2.0, &cfg).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12, "{v:?}");
        let v = kernel_moment_integral(&KernelFn::new(3.0, 1.0, 1.0).unwrap(), 0.0, &cfg).unwrap();
        assert!((v.value - 3.0).abs() < 1e-11, "{v:?}");
    }

    #[test]
    fn negative_index_rejected() {
        let e = KernelFn::new(1.0, 1.0, 1.0).unwrap();
        assert!(kernel_moment_integral(&e, -1.0, &KernelQuadConfig::default()).is_err());
        assert!(KernelFn::new(0.0, 1.0, 1.0).is_err());
    }
}
