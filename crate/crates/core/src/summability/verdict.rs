use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scan::{geometric_grid, scan_rays, validate_grid, GrowthReport, SectorSpec, Verdict, DEFAULT_K_TOL};
use crate::algebra::{DiffOp, RationalFn};
use crate::error::{Error, Result};
use crate::means::{mean_quadrature, node_singularities, pizzetti_residual, MeasureSpec, QuadConfig};
use crate::moments::MomentFn;
use crate::numeric::par_map;

const UNIFORMITY_NOTE: &str =
    "growth is sampled at finitely many z; uniformity over the disc is not certified, and poles are detected at quadrature nodes only";

/// Sector scan settings; the opening defaults to `π/(4p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SectorDefaults {
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
    pub rays: usize,
    pub opening: Option<f64>,
}

impl Default for SectorDefaults {
    fn default() -> Self {
        Self {
            r_min: 0.1,
            r_max: 50.0,
            radii: 40,
            rays: 5,
            opening: None,
        }
    }
}

/// Whole-plane fan of equally spaced rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FanSpec {
    pub rays: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
}

impl Default for FanSpec {
    fn default() -> Self {
        Self {
            rays: 16,
            r_min: 0.1,
            r_max: 12.0,
            radii: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SummabilityConfig {
    pub sector: SectorDefaults,
    pub fan: FanSpec,
    /// Radius of the circle carrying the non-central `z` points.
    pub z_radius: f64,
    pub z_points: usize,
    pub k_tol: f64,
    /// Taylor degree used to validate the (measure, operator, moments) triple.
    pub check_degree: u32,
    pub quad: QuadConfig,
}

impl Default for SummabilityConfig {
    fn default() -> Self {
        Self {
            sector: SectorDefaults::default(),
            fan: FanSpec::default(),
            z_radius: 0.2,
            z_points: 5,
            k_tol: DEFAULT_K_TOL,
            check_degree: 8,
            quad: QuadConfig::default(),
        }
    }
}

/// `z = 0` plus `points − 1` points `radius · e^{2πik/(points−1)}` placed
/// along the diagonal direction `(1, …, 1)/√n`.
pub fn default_z_grid(n: usize, radius: f64, points: usize) -> Vec<Vec<Complex64>> {
    let unit = 1.0 / (n as f64).sqrt();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]];
    let ring = points.saturating_sub(1);
    for k in 0..ring {
        let w = Complex64::from_polar(radius, 2.0 * PI * k as f64 / ring as f64);
        out.push(vec![w * unit; n]);
    }
    out
}

/// One growth scan at a fixed `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScan {
    #[serde(with = "crate::cser::vec")]
    pub z: Vec<Complex64>,
    /// A point of the integrand's singular set inside the scanned region.
    #[serde(with = "crate::cser::opt")]
    pub node_singularity: Option<Complex64>,
    pub report: GrowthReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub convergent: bool,
    pub k_target: f64,
    pub k_hat: f64,
    pub singular_direction: Option<f64>,
    /// Pizzetti residual of the Taylor-truncated datum (triple validation).
    pub triple_residual: f64,
    pub scans: Vec<ZScan>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorResult {
    pub centre: f64,
    pub opening: f64,
    pub scans: Vec<ZScan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityVerdict {
    pub summable: bool,
    /// `1/(p−1)`.
    pub summability_order: f64,
    pub direction: f64,
    pub k_target: f64,
    pub k_hat: f64,
    pub label: String,
    pub sectors: Vec<SectorResult>,
    pub note: String,
}

fn target_order(p: &DiffOp) -> Result<f64> {
    let order = p.order();
    if order < 2 {
        return Err(Error::NotApplicable(format!(
            "verdicts need an operator of order at least 2, got {order}"
        )));
    }
    Ok(order as f64 / (order as f64 - 1.0))
}

fn check_inputs(p: &DiffOp, phi: &RationalFn, measure: &MeasureSpec, m: &MomentFn) -> Result<()> {
    measure.validate()?;
    m.validate()?;
    if p.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    measure.check_dim(phi.dim())
}

/// Scans `t ↦ M(φ; z, t)` on the given rays; roots of the integrand's
/// denominator accepted by `inside` mark the scan as singular.
#[allow(clippy::too_many_arguments)]
fn scan_mean(
    measure: &MeasureSpec,
    phi: &RationalFn,
    z: &[Complex64],
    angles: &[f64],
    radii: &[f64],
    k_target: f64,
    cfg: &SummabilityConfig,
    inside: impl Fn(Complex64) -> bool,
) -> Result<ZScan> {
    let roots = node_singularities(measure, phi, z, &cfg.quad)?;
    let node_singularity = roots
        .into_iter()
        .filter(|t| inside(*t))
        .min_by(|a, b| a.norm().total_cmp(&b.norm()));
    let f = |t: Complex64| mean_quadrature(measure, phi, z, t, &cfg.quad).map(|e| e.value);
    let mut report = scan_rays(f, angles, radii, k_target, cfg.k_tol)?;
    if node_singularity.is_some() {
        report.verdict = Verdict::SingularityEncountered;
    }
    Ok(ZScan {
        z: z.to_vec(),
        node_singularity,
        report,
    })
}

fn triple_residual(p: &DiffOp, phi: &RationalFn, measure: &MeasureSpec, m: &MomentFn, cfg: &SummabilityConfig) -> Result<f64> {
    let poly = match phi.as_polynomial() {
        Some(q) => q,
        None => phi.taylor(cfg.check_degree)?,
    };
    let degree = poly.degree().unwrap_or(0) as usize;
    let step = p.min_order().max(1) as usize;
    let j = degree.div_ceil(step).max(1);
    let zs = default_z_grid(phi.dim(), cfg.z_radius, cfg.z_points);
    let ts = [
        Complex64::new(0.1, 0.0),
        Complex64::new(0.0, 0.25),
        Complex64::new(-0.4, 0.0),
        Complex64::new(0.3, 0.3),
    ];
    pizzetti_residual(measure, p, m, &poly, &zs, &ts, j)
}

/// Whether the Pizzetti-type series converges for small `|t|`: every scan of
/// the mean over a whole-plane ray fan must stay within `O^{p/(p−1)}`.
pub fn convergence_verdict(
    p: &DiffOp,
    phi: &RationalFn,
    measure: &MeasureSpec,
    m: &MomentFn,
    cfg: &SummabilityConfig,
) -> Result<ConvergenceVerdict> {
    check_inputs(p, phi, measure, m)?;
    let k_target = target_order(p)?;
    let fan = cfg.fan;
    validate_grid(fan.r_min, fan.r_max, fan.radii)?;
    if fan.rays == 0 {
        return Err(Error::Precondition("the ray fan is empty".into()));
    }
    let residual = triple_residual(p, phi, measure, m, cfg)?;
    if residual > 1e-8 {
        return Err(Error::Precondition(format!(
            "measure, operator and moments do not satisfy the Pizzetti identity (residual {residual:e})"
        )));
    }
    let angles: Vec<f64> = (0..fan.rays).map(|i| 2.0 * PI * i as f64 / fan.rays as f64).collect();
    let radii = geometric_grid(fan.r_min, fan.r_max, fan.radii);
    let zs = default_z_grid(phi.dim(), cfg.z_radius, cfg.z_points);
    let scans = par_map(&zs, |z| {
        scan_mean(measure, phi, z, &angles, &radii, k_target, cfg, |t| t.norm() <= fan.r_max)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let convergent = scans.iter().all(|s| s.report.within());
    let singular_direction = scans.iter().find_map(|s| {
        s.node_singularity
            .map(|t| t.arg().rem_euclid(2.0 * PI))
            .or_else(|| s.report.singular_direction())
    });
    let k_hat = scans.iter().map(|s| s.report.k_hat).fold(0.0, f64::max);
    Ok(ConvergenceVerdict {
        convergent,
        k_target,
        k_hat,
        singular_direction,
        triple_residual: residual,
        scans,
        note: UNIFORMITY_NOTE.into(),
    })
}

/// `1/(p−1)`-summability in direction `d`: the mean must stay within
/// `O^{p/(p−1)}` on the disc-sectors centred at `(d + 2kπ)/p`, `k < p`.
pub fn summability_verdict(
    p: &DiffOp,
    phi: &RationalFn,
    measure: &MeasureSpec,
    m: &MomentFn,
    d: f64,
    cfg: &SummabilityConfig,
) -> Result<SummabilityVerdict> {
    check_inputs(p, phi, measure, m)?;
    let k_target = target_order(p)?;
    let order = p.order() as f64;
    let sd = cfg.sector;
    let opening = sd.opening.unwrap_or(PI / (4.0 * order));
    let sectors: Vec<SectorSpec> = (0..p.order())
        .map(|k| SectorSpec {
            direction: (d + 2.0 * PI * k as f64) / order,
            opening,
            r_min: sd.r_min,
            r_max: sd.r_max,
            radii: sd.radii,
            rays: sd.rays,
        })
        .collect();
    for s in &sectors {
        s.validate()?;
    }
    let zs = default_z_grid(phi.dim(), cfg.z_radius, cfg.z_points);
    let jobs: Vec<(usize, &Vec<Complex64>)> = (0..sectors.len()).flat_map(|i| zs.iter().map(move |z| (i, z))).collect();
    let scans = par_map(&jobs, |&(i, z)| {
        let s = &sectors[i];
        scan_mean(measure, phi, z, &s.angles(), &s.radius_grid(), k_target, cfg, |t| s.contains(t))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut results: Vec<SectorResult> = sectors
        .iter()
        .map(|s| SectorResult {
            centre: s.direction.rem_euclid(2.0 * PI),
            opening,
            scans: Vec::new(),
        })
        .collect();
    for ((i, _), scan) in jobs.iter().zip(scans) {
        results[*i].scans.push(scan);
    }
    let all = || results.iter().flat_map(|r| r.scans.iter());
    let summable = all().all(|s| s.report.within());
    let k_hat = all().map(|s| s.report.k_hat).fold(0.0, f64::max);
    let summability_order = 1.0 / (order - 1.0);
    let direction = d.rem_euclid(2.0 * PI);
    let label = format!(
        "{}{summability_order}-summable in direction {direction:.6}",
        if summable { "" } else { "not " }
    );
    Ok(SummabilityVerdict {
        summable,
        summability_order,
        direction,
        k_target,
        k_hat,
        label,
        sectors: results,
        note: UNIFORMITY_NOTE.into(),
    })
}
