use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::DiffOp;
use crate::error::{Error, Result};
use crate::moments::MomentFn;
use crate::numeric::{least_squares, KahanSum};

/// `F(ζ) = Σ_j P(−iζ)^j / m(j)`, summed until the ratio majorant certifies a
/// tail below `tol` (absolute), with at most `cap` terms.
pub fn symbol_eval(p: &DiffOp, m: &MomentFn, zeta: &[Complex64], cap: usize, tol: f64) -> Result<Complex64> {
    if zeta.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: zeta.len(),
        });
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let arg: Vec<Complex64> = zeta.iter().map(|z| minus_i * z).collect();
    let w = p.eval_symbol(&arg)?;
    moment_series(w, m, cap, tol)
}

/// `Σ_j w^j / m(j)` with a certified tail.
fn moment_series(w: Complex64, m: &MomentFn, cap: usize, tol: f64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0 / m.eval(0)?, 0.0));
    }
    let ln_w = w.norm().ln();
    let arg_w = w.arg();
    let mut acc = KahanSum::new();
    let mut wpow = Complex64::new(1.0, 0.0);
    let mut ln_m = m.log_eval(0)?;
    for j in 0..cap {
        let direct = m.eval(j).ok().map(|mj| wpow / mj).filter(|t| t.is_finite());
        let term = direct.unwrap_or_else(|| Complex64::from_polar((j as f64 * ln_w - ln_m).exp(), j as f64 * arg_w));
        acc.add(term);
        wpow *= w;
        let ln_next = m.log_eval(j + 1)?;
        let rho = (ln_w + ln_m - ln_next).exp();
        ln_m = ln_next;
        if rho < 1.0 && term.norm() * rho / (1.0 - rho) <= tol {
            return Ok(acc.value());
        }
    }
    Err(Error::CapExceeded { cap })
}

/// Linear fit `ln|f| ≈ c + b R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisFit {
    pub angle: f64,
    pub b_hat: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Growth of `f(t) = F(t^N)` along the distinguished ray and the real axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    /// `P(−i, …, −i) = r e^{iφ}`.
    #[serde(with = "crate::cser")]
    pub probe: Complex64,
    pub order: u32,
    pub weights: Vec<u32>,
    /// Distinguished ray `t = e^{−iφ/p} R`.
    pub ray: AxisFit,
    /// Exponential growth: `b_hat > 0` with residual below 0.1.
    pub exponential: bool,
    /// Fit along `arg t = 0`, reported for comparison.
    pub real_axis: AxisFit,
    pub samples: Vec<(f64, f64)>,
}

const GROWTH_RESIDUAL: f64 = 0.1;
const SERIES_CAP: usize = 100_000;
const SERIES_TOL: f64 = 1e-14;

fn fit_axis(
    p: &DiffOp,
    m: &MomentFn,
    weights: &[u32],
    angle: f64,
    r_grid: &[f64],
) -> Result<(AxisFit, Vec<(f64, f64)>)> {
    let mut samples = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let t = Complex64::from_polar(r, angle);
        let zeta: Vec<Complex64> = weights.iter().map(|&k| t.powu(k)).collect();
        let f = symbol_eval(p, m, &zeta, SERIES_CAP, SERIES_TOL * (1.0 + r.exp()))?;
        samples.push((r, f.norm().ln()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let (beta, residual) = least_squares(&[x, vec![1.0; y.len()]], &y)
        .ok_or_else(|| Error::Precondition("radius grid is degenerate".into()))?;
    Ok((
        AxisFit {
            angle,
            b_hat: beta[0],
            intercept: beta[1],
            residual,
        },
        samples,
    ))
}

fn growth_along(p: &DiffOp, m: &MomentFn, weights: Vec<u32>, r_grid: &[f64]) -> Result<DiagonalReport> {
    if r_grid.len() < 3 {
        return Err(Error::Precondition("need at least 3 radii".into()));
    }
    let order = p.order();
    if order == 0 {
        return Err(Error::Precondition("operator has order 0".into()));
    }
    let probe = p.eval_symbol(&vec![Complex64::new(0.0, -1.0); p.dim()])?;
    if probe.norm() < 1e-14 {
        return Err(Error::DegenerateProbe(
            "P(−i, …, −i) = 0, so the distinguished ray is undefined".into(),
        ));
    }
    let angle = -probe.arg() / order as f64;
    let (ray, samples) = fit_axis(p, m, &weights, angle, r_grid)?;
    let (real_axis, _) = fit_axis(p, m, &weights, 0.0, r_grid)?;
    Ok(DiagonalReport {
        probe,
        order,
        weights,
        exponential: ray.b_hat > 0.0 && ray.residual < GROWTH_RESIDUAL,
        ray,
        real_axis,
        samples,
    })
}

/// `f(t) = F(t, …, t)` along `t = e^{−iφ/p} R` for homogeneous `P`, where
/// `P(−i, …, −i) = r e^{iφ}`; there `f = Σ (r R^p)^j / m(j)`.
pub fn diagonal_growth(p: &DiffOp, m: &MomentFn, r_grid: &[f64]) -> Result<DiagonalReport> {
    if !p.is_homogeneous() {
        return Err(Error::Precondition("diagonal growth needs a homogeneous operator".into()));
    }
    growth_along(p, m, vec![1; p.dim()], r_grid)
}

/// `f(t) = F(t^{N_1}, …, t^{N_n})` for `P` quasi-homogeneous of type `N`.
/// Orders `p ≤ 2` are rejected.
pub fn quasi_diagonal_growth(p: &DiffOp, m: &MomentFn, r_grid: &[f64]) -> Result<DiagonalReport> {
    if !p.is_quasi_homogeneous() {
        return Err(Error::Precondition("operator is not quasi-homogeneous of its declared type".into()));
    }
    if p.order() <= 2 {
        return Err(Error::NotApplicable(format!(
            "order {} ≤ 2: such operators are not covered by the growth obstruction",
            p.order()
        )));
    }
    growth_along(p, m, p.quasi_type().to_vec(), r_grid)
}

/// Grid check of `|F(ζ)| ≤ C (1 + |ζ|)^N e^{r |Im ζ|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PwsCheck {
    pub holds: bool,
    /// Largest `|F| / bound` seen.
    pub max_ratio: f64,
}

pub fn pws_check<F>(f: F, grid: &[Vec<Complex64>], c: f64, n: i32, r: f64) -> Result<PwsCheck>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    let mut max_ratio = 0.0f64;
    for zeta in grid {
        let norm = zeta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let im = zeta.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        let bound = c * (1.0 + norm).powi(n) * (r * im).exp();
        max_ratio = max_ratio.max(f(zeta)?.norm() / bound);
    }
    Ok(PwsCheck {
        holds: max_ratio <= 1.0,
        max_ratio,
    })
}
