use num_complex::Complex64;

use super::gamma::{gamma, ln_gamma};
use crate::error::{Error, Result};

/// Hard cap on the number of series terms.
pub const MITTAG_LEFFLER_CAP: usize = 100_000;

/// `E_α(z) = Σ z^j / Γ(1 + αj)` with an absolute tail bound `tol`.
///
/// Term ratios `|z| Γ(1+αj)/Γ(1+α(j+1))` decrease in `j`, so once a ratio
/// `ρ < 1` is reached the remainder is majorised by the geometric series
/// `|t_J| ρ/(1−ρ)`.
pub fn mittag_leffler(alpha: f64, z: Complex64, tol: f64) -> Result<Complex64> {
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("index must be positive, got {alpha}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ln_r = z.norm().ln();
    let arg = z.arg();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut zpow = Complex64::new(1.0, 0.0);
    for j in 0..MITTAG_LEFFLER_CAP {
        let x = 1.0 + alpha * j as f64;
        let g = gamma(x);
        let term = if g.is_finite() && zpow.is_finite() {
            zpow / g
        } else {
            Complex64::from_polar((j as f64 * ln_r - ln_gamma(x)).exp(), j as f64 * arg)
        };
        // Neumaier on both parts
        let t = sum + term;
        for (s, c, v, tt) in [
            (sum.re, &mut comp.re, term.re, t.re),
            (sum.im, &mut comp.im, term.im, t.im),
        ] {
            if s.abs() >= v.abs() {
                *c += (s - tt) + v;
            } else {
                *c += (v - tt) + s;
            }
        }
        sum = t;
        zpow *= z;
        let rho = (ln_r + ln_gamma(x) - ln_gamma(x + alpha)).exp();
        if rho < 1.0 {
            let tail = term.norm() * rho / (1.0 - rho);
            if tail <= tol {
                return Ok(sum + comp);
            }
        }
    }
    Err(Error::CapExceeded {
        cap: MITTAG_LEFFLER_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(mittag_leffler(0.7, Complex64::new(0.0, 0.0), 1e-15).unwrap(), one);
        let e = mittag_leffler(1.0, one, 1e-15).unwrap();
        assert!((e.re - std::f64::consts::E).abs() < 1e-14);
        let c = mittag_leffler(2.0, one, 1e-15).unwrap();
        assert!((c.re - 1f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn imaginary_argument_gives_cis() {
        let v = mittag_leffler(1.0, Complex64::new(0.0, 2.0), 1e-15).unwrap();
        assert!((v - Complex64::from_polar(1.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn cap_is_reported() {
        assert!(matches!(
            mittag_leffler(1e-6, Complex64::new(1.5, 0.0), 1e-15),
            Err(Error::CapExceeded { .. })
        ));
    }
}
