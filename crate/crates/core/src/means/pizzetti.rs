use num_complex::Complex64;

use super::exact::mean_exact_poly;
use super::quadrature::{mean_quadrature, QuadConfig, QuadEstimate};
use super::MeasureSpec;
use crate::algebra::{apply_diffop, DiffOp, MultiPoly, RationalFn};
use crate::error::{Error, Result};
use crate::moments::{moment_subsequence, MomentFn};
use crate::numeric::KahanSum;

fn check_unit_mass(m: &MomentFn) -> Result<()> {
    let m0 = m.eval(0)?;
    if (m0 - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("Pizzetti-type series need m(0) = 1, got {m0}")));
    }
    Ok(())
}

/// `Σ_{j ≤ J} (P^j φ)(z) / m(j) · t^{pj}` with `p` the order of `P`.
pub fn pizzetti_series(
    p: &DiffOp,
    phi: &MultiPoly,
    m: &MomentFn,
    z: &[Complex64],
    t: Complex64,
    j_max: usize,
) -> Result<Complex64> {
    check_unit_mass(m)?;
    if p.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    let tp = t.powu(p.order());
    let mut acc = KahanSum::new();
    let mut cur = phi.clone();
    let mut tpow = Complex64::new(1.0, 0.0);
    for j in 0..=j_max {
        if cur.is_zero() {
            break;
        }
        let mj = match m.eval(j) {
            Ok(v) => v,
            Err(Error::MomentOverflow { .. }) => m.log_eval(j)?.exp(),
            Err(e) => return Err(e),
        };
        acc.add(cur.eval(z)? * tpow / mj);
        if j < j_max {
            cur = apply_diffop(p, &cur)?;
            tpow *= tp;
        }
    }
    Ok(acc.value())
}

/// `(1/s) Σ_{k<s} base(t e^{2πik/(ps)})` for any mean evaluator `base`.
pub fn rot_avg_mean<F>(base: F, s: u32, p: u32, t: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if s == 0 || p == 0 {
        return Err(Error::Precondition("rotation average needs s, p ≥ 1".into()));
    }
    let step = 2.0 * std::f64::consts::PI / (p as f64 * s as f64);
    let mut acc = KahanSum::new();
    for k in 0..s {
        acc.add(base(t * Complex64::from_polar(1.0, step * k as f64))?);
    }
    Ok(acc.value() / s as f64)
}

/// `Σ_{j ≤ J} (Q^{sj} φ)(z) / m(sj) · t^{psj}`, the series side of a rotation
/// averaged mean.
pub fn rot_avg_series(
    q: &DiffOp,
    phi: &MultiPoly,
    m: &MomentFn,
    s: u32,
    z: &[Complex64],
    t: Complex64,
    j_max: usize,
) -> Result<Complex64> {
    pizzetti_series(&q.power(s)?, phi, &moment_subsequence(m.clone(), s)?, z, t, j_max)
}

/// Mean with the anisotropic shift `z + (t^{N_1} y_1, …, t^{N_n} y_n)`.
pub fn n_scaled_mean(
    measure: &MeasureSpec,
    weights: &[u32],
    phi: &RationalFn,
    z: &[Complex64],
    t: Complex64,
    cfg: &QuadConfig,
) -> Result<QuadEstimate> {
    let scaled = MeasureSpec::n_scaled(measure.clone(), weights.to_vec())?;
    mean_quadrature(&scaled, phi, z, t, cfg)
}

/// Largest `|M(φ; z, t) − Σ P^j φ(z)/m(j) t^{pj}|` over the grids, with the
/// mean computed exactly. Requires `pJ ≥ deg φ` so that the series is exact.
pub fn pizzetti_residual(
    measure: &MeasureSpec,
    p: &DiffOp,
    m: &MomentFn,
    phi: &MultiPoly,
    z_grid: &[Vec<Complex64>],
    t_grid: &[Complex64],
    j_max: usize,
) -> Result<f64> {
    let degree = phi.degree().unwrap_or(0) as usize;
    if p.min_order() == 0 || p.min_order() as usize * j_max < degree {
        return Err(Error::Precondition(format!(
            "J = {j_max} is too small for a datum of degree {degree} and operator of order {}",
            p.order()
        )));
    }
    let mut worst = 0.0f64;
    for z in z_grid {
        for &t in t_grid {
            let mean = mean_exact_poly(measure, phi, z, t)?;
            let series = pizzetti_series(p, phi, m, z, t, j_max)?;
            worst = worst.max((mean - series).norm());
        }
    }
    Ok(worst)
}

/// Mean-value property for a `P`-harmonic polynomial: `|M(φ; z, t) − φ(z)|`
/// stays below `1e-10 (1 + |φ(z)|)` on the grids.
pub fn mean_value_check(
    p: &DiffOp,
    phi: &MultiPoly,
    measure: &MeasureSpec,
    z_grid: &[Vec<Complex64>],
    t_grid: &[Complex64],
) -> Result<bool> {
    let image = apply_diffop(p, phi)?;
    let scale = phi.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max).max(1.0);
    if image.terms().any(|(_, c)| c.norm() > 1e-12 * scale) {
        return Err(Error::Precondition("datum is not annihilated by the operator".into()));
    }
    for z in z_grid {
        let base = phi.eval(z)?;
        for &t in t_grid {
            let mean = mean_exact_poly(measure, phi, z, t)?;
            if (mean - base).norm() > 1e-10 * (1.0 + base.norm()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
