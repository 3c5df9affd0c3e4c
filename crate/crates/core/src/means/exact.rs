use num_complex::Complex64;

use super::{BaseKind, MeasureSpec, Support};
use crate::algebra::MultiPoly;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Normalised moment `∫ y^α dμ(y)` of the unit ball or sphere in `R^n`.
///
/// Sphere: `Π (α_i − 1)!! / Π_{k < |α|/2} (n + 2k)` when every `α_i` is even,
/// otherwise 0. Ball: the sphere value times `n / (|α| + n)`.
pub fn monomial_moment(kind: BaseKind, n: usize, alpha: &[u32]) -> Result<f64> {
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    if alpha.iter().any(|a| a % 2 == 1) {
        return Ok(0.0);
    }
    let total: u32 = alpha.iter().sum();
    let mut v = 1.0;
    for &a in alpha {
        let mut k = 1;
        while k < a {
            v *= k as f64;
            k += 2;
        }
    }
    for k in 0..total / 2 {
        v /= (n + 2 * k as usize) as f64;
    }
    if kind == BaseKind::Ball {
        v *= n as f64 / (total as usize + n) as f64;
    }
    Ok(v)
}

/// Exact mean of a polynomial: `φ(z + S y)` is expanded in `y` and integrated
/// term by term with [`monomial_moment`].
pub fn mean_exact_poly(measure: &MeasureSpec, phi: &MultiPoly, z: &[Complex64], t: Complex64) -> Result<Complex64> {
    measure.validate()?;
    measure.check_dim(phi.dim())?;
    if z.len() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: z.len(),
        });
    }
    if t == Complex64::new(0.0, 0.0) {
        return phi.eval(z);
    }
    let mut acc = KahanSum::new();
    for b in measure.branches(t) {
        let rows = b.shift_rows(b.tau);
        let v = match b.support {
            Support::Dirac(a) => {
                let point: Vec<Complex64> = z
                    .iter()
                    .zip(&rows)
                    .map(|(zi, row)| row.iter().zip(a).fold(*zi, |s, (r, ai)| s + r * ai))
                    .collect();
                phi.eval(&point)?
            }
            Support::Ball(n) | Support::Sphere(n) => {
                let kind = if matches!(b.support, Support::Ball(_)) {
                    BaseKind::Ball
                } else {
                    BaseKind::Sphere
                };
                let q = phi.affine_substitute(z, &rows)?;
                let mut inner = KahanSum::new();
                for (e, c) in q.terms() {
                    let mom = monomial_moment(kind, n, e)?;
                    if mom != 0.0 {
                        inner.add(c * mom);
                    }
                }
                inner.value()
            }
        };
        acc.add(v * b.weight);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn moment_examples() {
        assert_eq!(monomial_moment(BaseKind::Ball, 2, &[2, 0]).unwrap(), 0.25);
        assert_eq!(monomial_moment(BaseKind::Sphere, 2, &[2, 0]).unwrap(), 0.5);
        assert_eq!(monomial_moment(BaseKind::Sphere, 3, &[2, 1, 0]).unwrap(), 0.0);
        for n in 1..6 {
            assert_eq!(monomial_moment(BaseKind::Ball, n, &vec![0; n]).unwrap(), 1.0);
            assert_eq!(monomial_moment(BaseKind::Sphere, n, &vec![0; n]).unwrap(), 1.0);
        }
        // E[y1^4] on S^2 is 1/5, on the 3-ball 3/35.
        assert!((monomial_moment(BaseKind::Sphere, 3, &[4, 0, 0]).unwrap() - 0.2).abs() < 1e-16);
        assert!((monomial_moment(BaseKind::Ball, 3, &[4, 0, 0]).unwrap() - 3.0 / 35.0).abs() < 1e-16);
    }

    #[test]
    fn mean_examples() {
        let phi = MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
        let z = [c(0.3), c(-1.2)];
        let t = c(0.7);
        let base = phi.eval(&z).unwrap();
        let b = mean_exact_poly(&MeasureSpec::ball(2), &phi, &z, t).unwrap();
        assert!((b - (base + t * t / 2.0)).norm() < 1e-14);
        let s = mean_exact_poly(&MeasureSpec::sphere(2), &phi, &z, t).unwrap();
        assert!((s - (base + t * t)).norm() < 1e-14);
        let a = vec![c(0.5), Complex64::new(0.0, 2.0)];
        let d = mean_exact_poly(&MeasureSpec::dirac(a.clone()), &phi, &z, t).unwrap();
        let shifted = [z[0] + a[0] * t, z[1] + a[1] * t];
        assert!((d - phi.eval(&shifted).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn rotation_average_example() {
        let phi = MultiPoly::from_real_terms(2, &[(&[4, 0], 1.0), (&[2, 2], 2.0), (&[0, 4], 1.0)]);
        let m = MeasureSpec::rot_avg(MeasureSpec::ball(2), 2, 2).unwrap();
        let t = c(1.3);
        let v = mean_exact_poly(&m, &phi, &[c(0.0), c(0.0)], t).unwrap();
        assert!((v - t.powu(4) / 3.0).norm() < 1e-12);
    }

    #[test]
    fn scaled_examples() {
        let phi = MultiPoly::from_real_terms(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let a = vec![c(2.0), c(3.0)];
        let m = MeasureSpec::n_scaled(MeasureSpec::dirac(a), vec![2, 1]).unwrap();
        let t = c(0.5);
        let v = mean_exact_poly(&m, &phi, &[c(0.0), c(0.0)], t).unwrap();
        assert!((v - c(2.0 * 0.25 + 3.0 * 0.5)).norm() < 1e-15);
        let z1 = MultiPoly::variable(2, 0);
        let m = MeasureSpec::n_scaled(MeasureSpec::ball(2), vec![2, 1]).unwrap();
        let v = mean_exact_poly(&m, &z1, &[c(0.4), c(0.1)], c(3.0)).unwrap();
        assert!((v - c(0.4)).norm() < 1e-15);
    }
}
