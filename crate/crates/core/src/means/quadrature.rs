use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{exact::mean_exact_poly, MeasureSpec, Support};
use crate::algebra::{rational_eval, RationalFn, DEFAULT_POLE_TOL};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_on, poly_roots, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadScheme {
    /// Product Gauss rules up to dimension 3, Monte Carlo above.
    #[default]
    Auto,
    /// Exact monomial moments; the datum must be a polynomial.
    ExactOracle,
    ProductGauss,
    MonteCarlo,
}

/// Quadrature settings. Product rules start from `nodes` per direction and
/// double until two successive levels agree to `tol`; Monte Carlo results are
/// accepted when the standard error is below `mc_tol` relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub scheme: QuadScheme,
    pub nodes: usize,
    pub max_nodes: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub mc_tol: f64,
    pub pole_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            scheme: QuadScheme::Auto,
            nodes: 32,
            max_nodes: 256,
            mc_samples: 20_000,
            seed: 0x5eed,
            tol: 1e-8,
            mc_tol: 5e-2,
            pole_tol: DEFAULT_POLE_TOL,
        }
    }
}

/// A quadrature value with its a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadEstimate {
    #[serde(with = "crate::cser")]
    pub value: Complex64,
    pub error: f64,
    pub scheme: QuadScheme,
    /// Total number of integrand evaluations.
    pub nodes: usize,
    pub seed: Option<u64>,
}

type Nodes = Vec<(Vec<f64>, f64)>;

/// Cap on the per-direction node count in three dimensions.
const MAX_NODES_3D: usize = 64;

fn product_nodes(support: Support, level: usize) -> Nodes {
    let m = 2 * level;
    let angles = |m: usize| (0..m).map(move |k| 2.0 * PI * k as f64 / m as f64);
    match support {
        Support::Sphere(1) => vec![(vec![-1.0], 0.5), (vec![1.0], 0.5)],
        Support::Ball(1) => {
            let (x, w) = gauss_legendre_on(level, -1.0, 1.0);
            x.into_iter().zip(w).map(|(x, w)| (vec![x], 0.5 * w)).collect()
        }
        Support::Sphere(2) => angles(m).map(|a| (vec![a.cos(), a.sin()], 1.0 / m as f64)).collect(),
        Support::Ball(2) => {
            let (r, wr) = gauss_legendre_on(level, 0.0, 1.0);
            let mut out = Vec::with_capacity(level * m);
            for (r, wr) in r.into_iter().zip(wr) {
                for a in angles(m) {
                    out.push((vec![r * a.cos(), r * a.sin()], 2.0 * wr * r / m as f64));
                }
            }
            out
        }
        Support::Sphere(3) => sphere3(level, m),
        Support::Ball(3) => {
            let (r, wr) = gauss_legendre_on(level, 0.0, 1.0);
            let shell = sphere3(level, m);
            let mut out = Vec::with_capacity(level * shell.len());
            for (r, wr) in r.into_iter().zip(wr) {
                for (y, w) in &shell {
                    out.push((y.iter().map(|v| r * v).collect(), 3.0 * wr * r * r * w));
                }
            }
            out
        }
        _ => unreachable!("product rules cover dimensions 1 to 3"),
    }
}

/// Gauss-Legendre in `cos θ` times a uniform rule in the azimuth.
fn sphere3(level: usize, m: usize) -> Nodes {
    let (c, wc) = gauss_legendre_on(level, -1.0, 1.0);
    let mut out = Vec::with_capacity(level * m);
    for (c, wc) in c.into_iter().zip(wc) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for k in 0..m {
            let a = 2.0 * PI * k as f64 / m as f64;
            out.push((vec![s * a.cos(), s * a.sin(), c], wc / (2.0 * m as f64)));
        }
    }
    out
}

fn mc_nodes(support: Support, samples: usize, seed: u64) -> Nodes {
    let (n, ball) = match support {
        Support::Ball(n) => (n, true),
        Support::Sphere(n) => (n, false),
        Support::Dirac(_) => unreachable!(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = 1.0 / samples as f64;
    (0..samples)
        .map(|_| {
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = if ball { rng.gen::<f64>().powf(1.0 / n as f64) } else { 1.0 };
            (g.into_iter().map(|x| r * x / norm).collect(), w)
        })
        .collect()
}

fn support_dim(support: Support) -> usize {
    match support {
        Support::Ball(n) | Support::Sphere(n) => n,
        Support::Dirac(a) => a.len(),
    }
}

fn use_mc(support: Support, cfg: &QuadConfig) -> bool {
    cfg.scheme == QuadScheme::MonteCarlo || support_dim(support) > 3
}

fn sum_nodes<F>(nodes: &Nodes, f: &F) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let mut acc = KahanSum::new();
    for (y, w) in nodes {
        acc.add(f(y)? * *w);
    }
    Ok(acc.value())
}

/// `(value, error, evaluations, used Monte Carlo)`.
fn integrate<F>(support: Support, cfg: &QuadConfig, f: F) -> Result<(Complex64, f64, usize, bool)>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    if use_mc(support, cfg) {
        let nodes = mc_nodes(support, cfg.mc_samples.max(2), cfg.seed);
        let mut acc = KahanSum::new();
        let mut sq = 0.0;
        for (y, w) in &nodes {
            let v = f(y)?;
            acc.add(v * *w);
            sq += v.norm_sqr() * w;
        }
        let mean = acc.value();
        let var = (sq - mean.norm_sqr()).max(0.0);
        let error = (var / nodes.len() as f64).sqrt();
        if !mean.is_finite() || error > cfg.mc_tol * (1.0 + mean.norm()) {
            return Err(Error::Quadrature(format!(
                "Monte Carlo standard error {error:e} above tolerance"
            )));
        }
        return Ok((mean, error, nodes.len(), true));
    }
    if let Support::Sphere(1) = support {
        let nodes = product_nodes(support, 1);
        return Ok((sum_nodes(&nodes, &f)?, 0.0, 2, false));
    }
    let cap = if support_dim(support) == 3 {
        cfg.max_nodes.min(MAX_NODES_3D)
    } else {
        cfg.max_nodes
    };
    let mut level = cfg.nodes.max(4);
    let coarse_nodes = product_nodes(support, level / 2);
    let mut evaluations = coarse_nodes.len();
    let mut coarse = sum_nodes(&coarse_nodes, &f)?;
    loop {
        let fine_nodes = product_nodes(support, level);
        evaluations += fine_nodes.len();
        let fine = sum_nodes(&fine_nodes, &f)?;
        let error = (fine - coarse).norm();
        if fine.is_finite() && error <= cfg.tol * (1.0 + fine.norm()) {
            return Ok((fine, error, evaluations, false));
        }
        if level * 2 > cap {
            return Err(Error::Quadrature(format!(
                "refinement stalled at {level} nodes per direction (estimate {error:e})"
            )));
        }
        level *= 2;
        coarse = fine;
    }
}

fn dirac_point(z: &[Complex64], rows: &[Vec<Complex64>], a: &[Complex64]) -> Vec<Complex64> {
    z.iter()
        .zip(rows)
        .map(|(zi, row)| row.iter().zip(a).fold(*zi, |s, (r, ai)| s + r * ai))
        .collect()
}

/// Numeric mean of a rational datum. Poles are detected at the nodes only.
pub fn mean_quadrature(
    measure: &MeasureSpec,
    phi: &RationalFn,
    z: &[Complex64],
    t: Complex64,
    cfg: &QuadConfig,
) -> Result<QuadEstimate> {
    measure.validate()?;
    measure.check_dim(phi.dim())?;
    if z.len() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: z.len(),
        });
    }
    let estimate = |value, error, scheme, nodes, seed| QuadEstimate {
        value,
        error,
        scheme,
        nodes,
        seed,
    };
    if cfg.scheme == QuadScheme::ExactOracle {
        let poly = phi
            .as_polynomial()
            .ok_or_else(|| Error::Precondition("the exact oracle needs a polynomial datum".into()))?;
        let v = mean_exact_poly(measure, &poly, z, t)?;
        return Ok(estimate(v, 0.0, QuadScheme::ExactOracle, 0, None));
    }
    if t == Complex64::new(0.0, 0.0) {
        let v = rational_eval(phi, z, cfg.pole_tol)?;
        return Ok(estimate(v, 0.0, cfg.scheme, 1, None));
    }
    let mut acc = KahanSum::new();
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut any_mc = false;
    for b in measure.branches(t) {
        let rows = b.shift_rows(b.tau);
        match b.support {
            Support::Dirac(a) => {
                let point = dirac_point(z, &rows, a);
                acc.add(rational_eval(phi, &point, cfg.pole_tol)? * b.weight);
                evaluations += 1;
            }
            support => {
                let (v, e, count, mc) =
                    integrate(support, cfg, |y| rational_eval(phi, &b.point(z, &rows, y), cfg.pole_tol))?;
                acc.add(v * b.weight);
                error += e * b.weight;
                evaluations += count;
                any_mc |= mc;
            }
        }
    }
    let scheme = if any_mc {
        QuadScheme::MonteCarlo
    } else {
        QuadScheme::ProductGauss
    };
    Ok(estimate(acc.value(), error, scheme, evaluations, any_mc.then_some(cfg.seed)))
}

/// Values of `t` at which the denominator of `φ(z + S(t) y)` vanishes for
/// some quadrature node `y` (at the base node level; at most 512 samples for
/// Monte Carlo supports). Useful to tell whether a ray of `t` values crosses
/// the singular set of the integrand between sample points.
pub fn node_singularities(measure: &MeasureSpec, phi: &RationalFn, z: &[Complex64], cfg: &QuadConfig) -> Result<Vec<Complex64>> {
    measure.validate()?;
    measure.check_dim(phi.dim())?;
    let den = phi.denominator();
    let deg = den.degree().unwrap_or(0) as usize;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    for b in measure.branches(Complex64::new(1.0, 0.0)) {
        let max_weight = b.weights.map_or(1, |w| w.iter().copied().max().unwrap_or(1)) as usize;
        let d = deg * max_weight;
        let samples: Vec<(Complex64, Vec<Vec<Complex64>>)> = (0..=d)
            .map(|k| {
                let tau = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / (d + 1) as f64);
                (tau, b.shift_rows(tau))
            })
            .collect();
        let nodes: Nodes = match b.support {
            Support::Dirac(_) => vec![(Vec::new(), 1.0)],
            s if use_mc(s, cfg) => mc_nodes(s, cfg.mc_samples.clamp(2, 512), cfg.seed),
            s => product_nodes(s, cfg.nodes.max(4)),
        };
        for (y, _) in &nodes {
            let values: Vec<Complex64> = samples
                .iter()
                .map(|(_, rows)| {
                    let point = match b.support {
                        Support::Dirac(a) => dirac_point(z, rows, a),
                        _ => b.point(z, rows, y),
                    };
                    den.eval(&point)
                })
                .collect::<Result<_>>()?;
            let coeffs = interpolate(&values);
            for r in poly_roots(&coeffs) {
                roots.push(r / b.tau);
            }
        }
    }
    Ok(roots)
}

/// Coefficients of the polynomial of degree `< len` taking `values` at the
/// roots of unity, with negligible high coefficients removed.
fn interpolate(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c: Vec<Complex64> = (0..n)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for x in &mut c {
        if x.norm() <= 1e-12 * scale {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiPoly;
    use crate::means::BaseKind;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn two_point_rule() {
        let f = RationalFn::geometric(1, 0);
        let cfg = QuadConfig::default();
        let v = mean_quadrature(&MeasureSpec::sphere(1), &f, &[c(0.0)], c(0.5), &cfg).unwrap();
        assert!((v.value - c(4.0 / 3.0)).norm() < 1e-15);
        let e = mean_quadrature(&MeasureSpec::sphere(1), &f, &[c(0.0)], c(1.0), &cfg);
        assert!(matches!(e, Err(Error::Pole { .. })));
    }

    #[test]
    fn node_rules_have_unit_mass() {
        for s in [Support::Ball(1), Support::Ball(2), Support::Sphere(2), Support::Ball(3), Support::Sphere(3)] {
            let total: f64 = product_nodes(s, 8).iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-14, "{s:?}");
        }
    }

    #[test]
    fn polynomial_matches_oracle() {
        let phi = MultiPoly::from_real_terms(3, &[(&[2, 0, 1], 1.5), (&[0, 4, 0], -0.5), (&[1, 1, 2], 2.0), (&[0, 0, 0], 1.0)]);
        let z = [c(0.2), c(-0.1), c(0.3)];
        let t = Complex64::new(0.8, 0.4);
        let cfg = QuadConfig::default();
        for m in [
            MeasureSpec::ball(3),
            MeasureSpec::sphere(3),
            MeasureSpec::wave(3, BaseKind::Ball),
        ] {
            let q = mean_quadrature(&m, &RationalFn::from_poly(phi.clone()), &z, t, &cfg).unwrap();
            let exact = mean_exact_poly(&m, &phi, &z, t).unwrap();
            assert!((q.value - exact).norm() <= 1e-8 * exact.norm().max(1.0), "{m:?}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let phi = MultiPoly::from_real_terms(4, &[(&[2, 0, 0, 0], 1.0), (&[0, 0, 0, 0], 1.0)]);
        let f = RationalFn::from_poly(phi.clone());
        let z = [c(0.0); 4];
        let cfg = QuadConfig::default();
        let a = mean_quadrature(&MeasureSpec::sphere(4), &f, &z, c(1.0), &cfg).unwrap();
        let b = mean_quadrature(&MeasureSpec::sphere(4), &f, &z, c(1.0), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.scheme, QuadScheme::MonteCarlo);
        let exact = mean_exact_poly(&MeasureSpec::sphere(4), &phi, &z, c(1.0)).unwrap();
        assert!((a.value - exact).norm() < 5.0 * a.error + 1e-12);
    }

    #[test]
    fn singular_set_of_two_point_mean() {
        let f = RationalFn::geometric(1, 0);
        let z = [c(0.1)];
        let mut r = node_singularities(&MeasureSpec::sphere(1), &f, &z, &QuadConfig::default()).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(r.len(), 2);
        assert!((r[0] - c(-0.9)).norm() < 1e-12 && (r[1] - c(0.9)).norm() < 1e-12);
    }
}
