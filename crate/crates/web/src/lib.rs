//! Browser bindings. Every export takes plain numbers or JSON text and
//! returns a JSON document; the `*_json` functions hold the logic so that it
//! can be tested natively.

use num_complex::Complex64;
use pizzetti::algebra::{DiffOp, MultiPoly, RationalFn};
use pizzetti::means::{mean_exact_poly, pizzetti_series, MeasureSpec};
use pizzetti::moments::{moment_subsequence, MomentFn};
use pizzetti::summability::{diagonal_growth, summability_verdict, SummabilityConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn measure_pair(kind: &str, n: usize) -> Result<(MeasureSpec, MomentFn), String> {
    match kind {
        "ball" => Ok((MeasureSpec::ball(n), MomentFn::pizzetti_ball(n as u32))),
        "sphere" => Ok((MeasureSpec::sphere(n), MomentFn::pizzetti_sphere(n as u32))),
        other => Err(format!("unknown measure {other:?}; use \"ball\" or \"sphere\"")),
    }
}

/// Exact mean `M(φ; z, t)` and the truncated Pizzetti series for real
/// `t ∈ [0, t_max]`, for a polynomial datum given as JSON term records.
pub fn profile_json(datum: &str, measure: &str, z_re: f64, t_max: f64, samples: usize, j_max: usize) -> Result<String, String> {
    let phi: MultiPoly = serde_json::from_str(datum).map_err(|e| format!("datum: {e}"))?;
    let n = phi.dim();
    let (mu, m) = measure_pair(measure, n)?;
    let p = DiffOp::laplacian(n);
    let z = vec![Complex64::new(z_re, 0.0); n];
    let samples = samples.clamp(2, 2000);
    let mut rows = Vec::with_capacity(samples);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = Complex64::new(t_max * i as f64 / (samples - 1) as f64, 0.0);
        let mean = mean_exact_poly(&mu, &phi, &z, t).map_err(|e| e.to_string())?;
        let series = pizzetti_series(&p, &phi, &m, &z, t, j_max).map_err(|e| e.to_string())?;
        worst = worst.max((mean - series).norm());
        rows.push(json!({"t": t.re, "mean": [mean.re, mean.im], "series": [series.re, series.im]}));
    }
    Ok(json!({"samples": rows, "max_residual": worst, "J": j_max}).to_string())
}

/// Summability verdict in direction `d` for the heat equation `u_t = u_zz`
/// with datum `1/(1 − z)` and the two-point mean.
pub fn heat_verdict_json(d: f64, r_max: f64) -> Result<String, String> {
    let mut cfg = SummabilityConfig::default();
    cfg.sector.r_max = r_max;
    let v = summability_verdict(
        &DiffOp::laplacian(1),
        &RationalFn::geometric(1, 0),
        &MeasureSpec::sphere(1),
        &MomentFn::pizzetti_sphere(1),
        d,
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    serde_json::to_string(&v).map_err(|e| e.to_string())
}

/// Growth of `F(t) = Σ P(−it)^j / (pj)!` for `P = ξ^p` along the
/// distinguished ray, `R = 1 … r_max`.
pub fn diagonal_json(p: u32, r_max: f64) -> Result<String, String> {
    if !(1..=8).contains(&p) {
        return Err(format!("order must be between 1 and 8, got {p}"));
    }
    let op = DiffOp::new(MultiPoly::from_real_terms(1, &[(&[p], 1.0)])).map_err(|e| e.to_string())?;
    let m = moment_subsequence(MomentFn::gamma_s(1.0), p).map_err(|e| e.to_string())?;
    let steps = 60;
    let grid: Vec<f64> = (0..=steps).map(|i| 1.0 + (r_max - 1.0) * i as f64 / steps as f64).collect();
    let report = diagonal_growth(&op, &m, &grid).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = pizzettiProfile)]
pub fn pizzetti_profile(datum: &str, measure: &str, z_re: f64, t_max: f64, samples: usize, j_max: usize) -> Result<String, JsValue> {
    js(profile_json(datum, measure, z_re, t_max, samples, j_max))
}

#[wasm_bindgen(js_name = heatVerdict)]
pub fn heat_verdict(d: f64, r_max: f64) -> Result<String, JsValue> {
    js(heat_verdict_json(d, r_max))
}

#[wasm_bindgen(js_name = diagonalGrowth)]
pub fn diagonal(p: u32, r_max: f64) -> Result<String, JsValue> {
    js(diagonal_json(p, r_max))
}
