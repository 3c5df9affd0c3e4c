use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::par_map;

/// Slack allowed above the target order before a scan is said to exceed it.
pub const DEFAULT_K_TOL: f64 = 0.15;
/// Fewest usable tail samples for a ray fit.
const MIN_TAIL_SAMPLES: usize = 5;
/// Largest order considered by the fit.
const K_MAX: f64 = 8.0;
/// A refined peak this many times above its neighbours counts as a pole.
const PEAK_RATIO: f64 = 1e6;

/// `{t : |arg t − d| < ε/2, r_min ≤ |t| ≤ r_max}` sampled on `rays` rays and a
/// geometric grid of `radii` radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub direction: f64,
    pub opening: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
    pub rays: usize,
}

impl SectorSpec {
    pub fn new(direction: f64, opening: f64) -> Self {
        Self {
            direction,
            opening,
            r_min: 0.1,
            r_max: 50.0,
            radii: 40,
            rays: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.opening > 0.0 && self.opening < 2.0 * PI) {
            return Err(Error::Precondition(format!("sector opening must lie in (0, 2π), got {}", self.opening)));
        }
        if self.rays < 3 || self.rays.is_multiple_of(2) {
            return Err(Error::Precondition(format!("rays per sector must be odd and at least 3, got {}", self.rays)));
        }
        validate_grid(self.r_min, self.r_max, self.radii)
    }

    /// Ray angles `d + (i − (R−1)/2) ε / R`, strictly inside the sector.
    pub fn angles(&self) -> Vec<f64> {
        let r = self.rays as f64;
        (0..self.rays)
            .map(|i| self.direction + (i as f64 - (r - 1.0) / 2.0) * self.opening / r)
            .collect()
    }

    pub fn radius_grid(&self) -> Vec<f64> {
        geometric_grid(self.r_min, self.r_max, self.radii)
    }

    /// Whether `t` lies in the closed disc-sector `{|t| ≤ r_min} ∪ sector`.
    pub fn contains(&self, t: Complex64) -> bool {
        let r = t.norm();
        if r > self.r_max {
            return false;
        }
        if r <= self.r_min {
            return true;
        }
        angle_distance(t.arg(), self.direction) <= self.opening / 2.0
    }
}

pub(crate) fn validate_grid(r_min: f64, r_max: f64, radii: usize) -> Result<()> {
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::Precondition(format!("radius grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if radii < 2 * MIN_TAIL_SAMPLES {
        return Err(Error::Precondition(format!(
            "at least {} radii are needed, got {radii}",
            2 * MIN_TAIL_SAMPLES
        )));
    }
    Ok(())
}

pub(crate) fn geometric_grid(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    let q = (r_max / r_min).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { r_max } else { r_min * (q * i as f64).exp() })
        .collect()
}

/// Distance between two angles on the circle, in `[0, π]`.
pub(crate) fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Ok,
    Pole,
    /// `|f|` is not a finite double.
    Overflow,
    /// The evaluator failed for another reason (e.g. quadrature).
    Error,
}

impl SampleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleStatus::Ok => "ok",
            SampleStatus::Pole => "pole",
            SampleStatus::Overflow => "overflow",
            SampleStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub r: f64,
    pub abs_f: f64,
    pub status: SampleStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayStatus {
    Fitted,
    /// `|f| ≤ e` on the whole tail.
    Bounded,
    Inconclusive,
    Singular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayReport {
    pub angle: f64,
    pub status: RayStatus,
    pub k_hat: Option<f64>,
    pub ln_a: Option<f64>,
    pub b: Option<f64>,
    pub residual: Option<f64>,
    /// Radius where a singularity was signalled.
    pub singular_at: Option<f64>,
    pub samples: Vec<RaySample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Within,
    Exceeds,
    SingularityEncountered,
}

/// Fitted exponential order over a set of rays.
///
/// Per ray, `ln|f| ≈ ln A + B (r^k − 1)/k` (read as `ln A + B ln r` at
/// `k = 0`) is fitted over the upper half of the radius grid, using samples
/// with `|f| > e`. `k_hat` is the largest ray order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub k_target: f64,
    pub k_tol: f64,
    pub k_hat: f64,
    pub ln_a: f64,
    pub b: f64,
    pub residual: f64,
    pub verdict: Verdict,
    pub rays: Vec<RayReport>,
}

impl GrowthReport {
    pub fn within(&self) -> bool {
        self.verdict == Verdict::Within
    }

    /// Angle of the first ray that signalled a singularity.
    pub fn singular_direction(&self) -> Option<f64> {
        self.rays
            .iter()
            .find(|r| r.status == RayStatus::Singular)
            .map(|r| r.angle.rem_euclid(2.0 * PI))
    }

    /// Plot-ready samples: header `ray_angle,r,abs_f,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ray_angle,r,abs_f,status\n");
        for ray in &self.rays {
            for s in &ray.samples {
                out.push_str(&format!("{},{},{},{}\n", ray.angle, s.r, s.abs_f, s.status.as_str()));
            }
        }
        out
    }
}

/// Scans `f` over the rays of `sector` against the target order `k_target`.
pub fn growth_scan<F>(f: F, sector: &SectorSpec, k_target: f64) -> Result<GrowthReport>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
{
    sector.validate()?;
    scan_rays(f, &sector.angles(), &sector.radius_grid(), k_target, DEFAULT_K_TOL)
}

/// Scans `f` along arbitrary rays `t = r e^{iθ}` with radii `radii`.
pub fn scan_rays<F>(f: F, angles: &[f64], radii: &[f64], k_target: f64, k_tol: f64) -> Result<GrowthReport>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
{
    if radii.len() < 2 * MIN_TAIL_SAMPLES || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::Precondition("radius grid must be positive, strictly increasing and long enough".into()));
    }
    let rays = par_map(angles, |&theta| scan_ray(&f, theta, radii));
    aggregate(rays, k_target, k_tol)
}

pub(crate) fn aggregate(rays: Vec<RayReport>, k_target: f64, k_tol: f64) -> Result<GrowthReport> {
    if rays.iter().all(|r| r.status == RayStatus::Inconclusive) {
        return Err(Error::Inconclusive);
    }
    let singular = rays.iter().any(|r| r.status == RayStatus::Singular);
    let mut best: Option<&RayReport> = None;
    for r in rays.iter().filter(|r| r.k_hat.is_some()) {
        if best.is_none_or(|b| r.k_hat > b.k_hat) {
            best = Some(r);
        }
    }
    let k_hat = best.and_then(|b| b.k_hat).unwrap_or(0.0);
    let verdict = if singular {
        Verdict::SingularityEncountered
    } else if k_hat <= k_target + k_tol {
        Verdict::Within
    } else {
        Verdict::Exceeds
    };
    let (ln_a, b, residual) = best.map_or((0.0, 0.0, 0.0), |r| {
        (r.ln_a.unwrap_or(0.0), r.b.unwrap_or(0.0), r.residual.unwrap_or(0.0))
    });
    Ok(GrowthReport {
        k_target,
        k_tol,
        k_hat,
        ln_a,
        b,
        residual,
        verdict,
        rays,
    })
}

fn sample<F>(f: &F, t: Complex64) -> (f64, SampleStatus)
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    match f(t) {
        Ok(v) if v.is_finite() => (v.norm(), SampleStatus::Ok),
        Ok(_) => (f64::INFINITY, SampleStatus::Overflow),
        Err(Error::Pole { .. }) => (f64::INFINITY, SampleStatus::Pole),
        Err(_) => (f64::NAN, SampleStatus::Error),
    }
}

fn scan_ray<F>(f: &F, theta: f64, radii: &[f64]) -> RayReport
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let dir = Complex64::from_polar(1.0, theta);
    let samples: Vec<RaySample> = radii
        .iter()
        .map(|&r| {
            let (abs_f, status) = sample(f, dir * r);
            RaySample { r, abs_f, status }
        })
        .collect();
    let mut report = RayReport {
        angle: theta,
        status: RayStatus::Inconclusive,
        k_hat: None,
        ln_a: None,
        b: None,
        residual: None,
        singular_at: None,
        samples,
    };
    if let Some(s) = report.samples.iter().find(|s| s.status != SampleStatus::Ok) {
        report.status = RayStatus::Singular;
        report.singular_at = Some(s.r);
        return report;
    }
    if let Some(r) = refine_peaks(f, dir, &report.samples) {
        report.status = RayStatus::Singular;
        report.singular_at = Some(r);
        return report;
    }
    let tail = &report.samples[radii.len() / 2..];
    if tail.iter().all(|s| s.abs_f <= std::f64::consts::E) {
        report.status = RayStatus::Bounded;
        report.k_hat = Some(0.0);
        return report;
    }
    let (r, y): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|s| s.abs_f > std::f64::consts::E)
        .map(|s| (s.r, s.abs_f.ln()))
        .unzip();
    if r.len() < MIN_TAIL_SAMPLES {
        return report;
    }
    let fit = box_cox_fit(&r, &y);
    report.status = RayStatus::Fitted;
    report.k_hat = Some(fit.k);
    report.ln_a = Some(fit.a);
    report.b = Some(fit.b);
    report.residual = Some(fit.rms);
    report
}

/// Golden-section search for the maximum of `|f|` around every interior
/// local maximum of the samples; a pole, non-finite value or a peak far above
/// its neighbours marks the ray singular.
fn refine_peaks<F>(f: &F, dir: Complex64, samples: &[RaySample]) -> Option<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    for w in samples.windows(3) {
        let (lo, mid, hi) = (&w[0], &w[1], &w[2]);
        if !(mid.abs_f > lo.abs_f && mid.abs_f >= hi.abs_f) {
            continue;
        }
        let (mut a, mut b) = (lo.r, hi.r);
        let eval = |r: f64| -> std::result::Result<f64, ()> {
            match sample(f, dir * r) {
                (v, SampleStatus::Ok) => Ok(v),
                _ => Err(()),
            }
        };
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = match (eval(c), eval(d)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(()), _) => return Some(c),
            (_, Err(())) => return Some(d),
        };
        for _ in 0..80 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                match eval(c) {
                    Ok(v) => fc = v,
                    Err(()) => return Some(c),
                }
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                match eval(d) {
                    Ok(v) => fd = v,
                    Err(()) => return Some(d),
                }
            }
            if b - a <= 1e-15 * b {
                break;
            }
        }
        let peak = fc.max(fd);
        if peak > PEAK_RATIO * lo.abs_f.max(hi.abs_f).max(f64::MIN_POSITIVE) {
            return Some(0.5 * (a + b));
        }
    }
    None
}

pub(crate) struct BoxCoxFit {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub rms: f64,
}

fn transform(r: f64, k: f64) -> f64 {
    if k < 1e-9 {
        r.ln()
    } else {
        (k * r.ln()).exp_m1() / k
    }
}

/// Least squares of `y` on `(1, (r^k − 1)/k)` for fixed `k`.
fn fit_fixed(r: &[f64], y: &[f64], k: f64) -> (f64, f64, f64) {
    let n = r.len() as f64;
    let x: Vec<f64> = r.iter().map(|&r| transform(r, k)).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(v, w)| (v - mx) * (w - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(v, w)| (w - a - b * v).powi(2)).sum();
    (a, b, rss)
}

/// Order `k ∈ [0, 8]` minimising the residual of the two-parameter fit: a
/// grid search at step 0.02 followed by golden-section refinement.
pub(crate) fn box_cox_fit(r: &[f64], y: &[f64]) -> BoxCoxFit {
    let rss = |k: f64| fit_fixed(r, y, k).2;
    let steps = (K_MAX / 0.02) as usize;
    let mut best = (0.0, rss(0.0));
    for i in 1..=steps {
        let k = i as f64 * 0.02;
        let v = rss(k);
        if v < best.1 {
            best = (k, v);
        }
    }
    let (mut a, mut b) = ((best.0 - 0.02).max(0.0), (best.0 + 0.02).min(K_MAX));
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (rss(c), rss(d));
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = rss(d);
        }
    }
    let mut k = 0.5 * (a + b);
    if rss(best.0) < rss(k) {
        k = best.0;
    }
    let (a0, b0, rss_k) = fit_fixed(r, y, k);
    if b0 <= 0.0 {
        // Not growing along this ray.
        let (a1, b1, rss0) = fit_fixed(r, y, 0.0);
        return BoxCoxFit {
            k: 0.0,
            a: a1,
            b: b1,
            rms: (rss0 / r.len() as f64).sqrt(),
        };
    }
    BoxCoxFit {
        k,
        a: a0,
        b: b0,
        rms: (rss_k / r.len() as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gaussian_growth_is_order_two() {
        let mut sector = SectorSpec::new(0.0, PI / 4.0);
        sector.r_max = 20.0;
        let rep = growth_scan(|t: Complex64| Ok((t * t).exp()), &sector, 2.0).unwrap();
        assert_eq!(rep.verdict, Verdict::Within);
        assert!((1.9..=2.1).contains(&rep.k_hat), "{}", rep.k_hat);
    }

    #[test]
    fn pole_on_central_ray() {
        let sector = SectorSpec::new(0.0, PI / 4.0);
        let f = |t: Complex64| {
            let d = c(1.0) - t;
            if d.norm() < 1e-14 {
                Err(Error::Pole { point: vec![t] })
            } else {
                Ok(d.inv())
            }
        };
        let rep = growth_scan(f, &sector, 1.0).unwrap();
        assert_eq!(rep.verdict, Verdict::SingularityEncountered);
        assert!(rep.singular_direction().unwrap().abs() < 1e-12);
    }

    #[test]
    fn polynomial_has_order_zero() {
        let sector = SectorSpec::new(1.0, PI / 4.0);
        let rep = growth_scan(|t: Complex64| Ok(c(1.0) + t * 3.0 + t * t * t), &sector, 0.15).unwrap();
        assert_eq!(rep.verdict, Verdict::Within);
        assert!(rep.k_hat < 0.1, "{}", rep.k_hat);
    }

    #[test]
    fn exponential_exceeds_order_half() {
        let sector = SectorSpec::new(0.0, PI / 4.0);
        let rep = growth_scan(|t: Complex64| Ok(t.exp()), &sector, 0.5).unwrap();
        assert_eq!(rep.verdict, Verdict::Exceeds);
        assert!((rep.k_hat - 1.0).abs() < 0.05, "{}", rep.k_hat);
    }

    #[test]
    fn scale_consistency() {
        let mut sector = SectorSpec::new(0.3, PI / 6.0);
        sector.r_max = 20.0;
        let f = |t: Complex64| Ok((t * t).exp() * (c(1.0) + t));
        let a = growth_scan(f, &sector, 2.0).unwrap();
        let b = growth_scan(|t| f(t).map(|v| v * 1e-5), &sector, 2.0).unwrap();
        assert!((a.k_hat - b.k_hat).abs() <= 0.02);
        assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn sector_geometry() {
        let s = SectorSpec::new(PI, PI / 8.0);
        let angles = s.angles();
        assert_eq!(angles.len(), 5);
        assert!(angles.iter().all(|a| (a - PI).abs() < PI / 16.0));
        assert!(s.contains(Complex64::from_polar(2.0, -PI + 0.01)));
        assert!(!s.contains(c(2.0)));
        assert!(s.contains(c(0.05)));
        let g = s.radius_grid();
        assert_eq!(g.len(), 40);
        assert_eq!(g[39], 50.0);
        assert!(SectorSpec { rays: 4, ..s }.validate().is_err());
    }

    #[test]
    fn csv_layout() {
        let mut sector = SectorSpec::new(0.0, 0.5);
        sector.radii = 10;
        sector.rays = 3;
        let rep = growth_scan(|t: Complex64| Ok(t), &sector, 1.0).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("ray_angle,r,abs_f,status\n"));
        assert_eq!(csv.lines().count(), 31);
    }
}
