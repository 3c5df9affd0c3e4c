//! JSON problem descriptions: parsing with field-path errors, default
//! filling, and task dispatch into deterministic reports.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{DiffOp, MultiPoly, RationalFn, SquareMatrix};
use crate::error::{Error, Result};
use crate::means::{mean_quadrature, node_singularities, pizzetti_residual, MeasureSpec};
use crate::moments::MomentFn;
use crate::series::{borel_transform, formal_solution, formal_solution_rational, gevrey_estimate, partial_sum, specialise};
use crate::summability::{
    convergence_verdict, default_z_grid, diagonal_growth, growth_scan, quasi_diagonal_growth, summability_verdict,
    symbol_eval, GrowthReport, SectorSpec, SummabilityConfig, Verdict, ZScan,
};

pub const TOOL: &str = "pizzetti";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    Laplacian {
        n: usize,
    },
    /// `∂²_{z_1} − ∂²_{z_2} − … − ∂²_{z_n}`.
    Wave {
        n: usize,
    },
    /// `Σ a_i ∂_{z_i}`.
    FirstOrder {
        #[serde(with = "crate::cser::vec")]
        a: Vec<Complex64>,
    },
    /// `Σ a_ij ∂²_{z_i z_j}` for a symmetric `A`.
    SecondOrder {
        a: SquareMatrix,
    },
    /// Arbitrary symbol `P(ξ)`, optionally quasi-homogeneous of type `quasi_type`.
    Symbol {
        symbol: MultiPoly,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quasi_type: Option<Vec<u32>>,
    },
}

impl OperatorSpec {
    pub fn build(&self) -> Result<DiffOp> {
        match self {
            OperatorSpec::Laplacian { n } => positive(*n).map(DiffOp::laplacian),
            OperatorSpec::Wave { n } => positive(*n).map(DiffOp::wave),
            OperatorSpec::FirstOrder { a } => DiffOp::first_order(a),
            OperatorSpec::SecondOrder { a } => DiffOp::second_order(a),
            OperatorSpec::Symbol {
                symbol,
                quasi_type: Some(n),
            } => DiffOp::quasi_homogeneous(symbol.clone(), n.clone()),
            OperatorSpec::Symbol { symbol, .. } => DiffOp::new(symbol.clone()),
        }
    }
}

fn positive(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    Ok(n)
}

/// A polynomial (record list) or a rational function (`{num, den}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatumSpec {
    Rational(RationalFn),
    Poly(MultiPoly),
}

impl DatumSpec {
    pub fn dim(&self) -> usize {
        match self {
            DatumSpec::Rational(f) => f.dim(),
            DatumSpec::Poly(p) => p.dim(),
        }
    }

    pub fn to_rational(&self) -> RationalFn {
        match self {
            DatumSpec::Rational(f) => f.clone(),
            DatumSpec::Poly(p) => RationalFn::from_poly(p.clone()),
        }
    }

    /// The datum itself if polynomial, else its Taylor truncation.
    pub fn to_poly(&self, degree: u32) -> Result<MultiPoly> {
        match self {
            DatumSpec::Poly(p) => Ok(p.clone()),
            DatumSpec::Rational(f) => match f.as_polynomial() {
                Some(p) => Ok(p),
                None => f.taylor(degree),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Solve,
    PizzettiCheck,
    Borel,
    Growth,
    Verdict,
    Symbol,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Solve,
        Task::PizzettiCheck,
        Task::Borel,
        Task::Growth,
        Task::Verdict,
        Task::Symbol,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Solve => "solve",
            Task::PizzettiCheck => "pizzetti-check",
            Task::Borel => "borel",
            Task::Growth => "growth",
            Task::Verdict => "verdict",
            Task::Symbol => "symbol",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

/// Task parameters. Unset values are filled by [`ProblemSpec::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Truncation order of formal series.
    #[serde(rename = "J", alias = "j")]
    pub j: usize,
    /// Evaluation point for `solve` and `borel`.
    #[serde(with = "crate::cser::opt_vec", skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Complex64>>,
    #[serde(with = "crate::cser::opt_vec2", skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<Vec<Complex64>>>,
    #[serde(with = "crate::cser::opt_vec", skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<Complex64>>,
    /// Summability direction; `verdict` without `d` tests convergence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_target: Option<f64>,
    /// Gevrey fit range `[jmin, J]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jmin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(with = "crate::cser::opt_vec", skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<Complex64>>,
    /// Acceptance threshold of `pizzetti-check`.
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: SummabilityConfig,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            j: 20,
            z: None,
            z_grid: None,
            t_grid: None,
            d: None,
            sector: None,
            k_target: None,
            jmin: None,
            r_grid: None,
            zeta: None,
            tol: 1e-10,
            seed: None,
            config: SummabilityConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment: Option<MomentFn>,
    pub task: Task,
    #[serde(flatten)]
    pub params: Params,
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Spec { .. } => e,
        other => Error::spec(path, other.to_string()),
    }
}

/// Parses and resolves a JSON problem. Schema violations carry the path of
/// the offending field.
pub fn parse_spec(text: &str) -> Result<ProblemSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ProblemSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::spec(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })?;
    spec.resolve()
}

impl ProblemSpec {
    pub fn op(&self) -> Result<DiffOp> {
        self.operator.build().map_err(at("operator"))
    }

    fn require<'a, T>(&self, v: &'a Option<T>, field: &str) -> Result<&'a T> {
        v.as_ref()
            .ok_or_else(|| Error::spec(field, format!("required for task {}", self.task.as_str())))
    }

    pub fn datum(&self) -> Result<&DatumSpec> {
        self.require(&self.datum, "datum")
    }

    pub fn measure(&self) -> Result<&MeasureSpec> {
        self.require(&self.measure, "measure")
    }

    pub fn moment(&self) -> Result<&MomentFn> {
        self.require(&self.moment, "moment")
    }

    /// Checks dimensions and task requirements and fills every default, so
    /// that the result is a fixed point of `resolve`.
    pub fn resolve(mut self) -> Result<Self> {
        let p = self.op()?;
        let n = p.dim();
        let dim_err = |field: &str, found: usize| {
            Error::spec(field, Error::DimensionMismatch { expected: n, found }.to_string())
        };
        if let Some(d) = &self.datum {
            if d.dim() != n {
                return Err(dim_err("datum", d.dim()));
            }
        }
        if let Some(mu) = &self.measure {
            mu.validate().map_err(at("measure"))?;
            if mu.dim() != n {
                return Err(dim_err("measure", mu.dim()));
            }
        }
        if let Some(m) = &self.moment {
            m.validate().map_err(at("moment"))?;
        }
        match self.task {
            Task::Solve => {
                self.datum()?;
            }
            Task::Borel => {
                self.datum()?;
                self.moment()?;
            }
            Task::PizzettiCheck | Task::Verdict => {
                self.datum()?;
                self.measure()?;
                self.moment()?;
            }
            Task::Growth => {
                self.datum()?;
                self.measure()?;
            }
            Task::Symbol => {
                self.moment()?;
            }
        }
        let pr = &mut self.params;
        if pr.j == 0 {
            return Err(Error::spec("J", "must be positive"));
        }
        if let Some(seed) = pr.seed.take() {
            pr.config.quad.seed = seed;
        }
        let origin = vec![Complex64::new(0.0, 0.0); n];
        match self.task {
            Task::Solve => {
                pr.z.get_or_insert(origin);
                pr.t_grid.get_or_insert_with(|| vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1)]);
            }
            Task::Borel => {
                pr.z.get_or_insert(origin);
                pr.jmin.get_or_insert(pr.j.min(5));
            }
            Task::PizzettiCheck => {
                pr.z_grid
                    .get_or_insert_with(|| default_z_grid(n, pr.config.z_radius, pr.config.z_points));
                pr.t_grid.get_or_insert_with(|| {
                    vec![
                        Complex64::new(0.25, 0.0),
                        Complex64::new(0.0, 0.5),
                        Complex64::new(-1.0, 0.0),
                        Complex64::new(1.0, 1.0),
                        Complex64::new(2.0, 0.0),
                    ]
                });
            }
            Task::Growth => {
                pr.z.get_or_insert(origin);
                let order = p.order().max(1) as f64;
                let sd = pr.config.sector;
                pr.sector.get_or_insert(SectorSpec {
                    direction: pr.d.unwrap_or(0.0),
                    opening: sd.opening.unwrap_or(PI / (4.0 * order)),
                    r_min: sd.r_min,
                    r_max: sd.r_max,
                    radii: sd.radii,
                    rays: sd.rays,
                });
                pr.k_target.get_or_insert(if order > 1.0 { order / (order - 1.0) } else { 1.0 });
            }
            Task::Verdict => {}
            Task::Symbol => {
                pr.r_grid.get_or_insert_with(|| (5..=40).map(f64::from).collect());
                if let Some(zeta) = &pr.zeta {
                    if zeta.len() != n {
                        return Err(dim_err("zeta", zeta.len()));
                    }
                }
            }
        }
        for (field, v) in [("z", &pr.z), ("zeta", &pr.zeta)] {
            if let Some(v) = v {
                if v.len() != n {
                    return Err(dim_err(field, v.len()));
                }
            }
        }
        if let Some(g) = &pr.z_grid {
            if let Some(bad) = g.iter().find(|z| z.len() != n) {
                return Err(dim_err("z_grid", bad.len()));
            }
        }
        if let Some(s) = &pr.sector {
            s.validate().map_err(at("sector"))?;
        }
        Ok(self)
    }
}

/// A named CSV file written next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub task: Task,
    pub status: &'static str,
    /// The fully resolved problem, sufficient to reproduce the run.
    pub spec: ProblemSpec,
    pub result: Value,
    /// Wall-clock stamp added by front-ends; `None` keeps reports comparable.
    pub timestamp: Option<String>,
    #[serde(skip)]
    pub sidecars: Vec<Sidecar>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation is infallible")
    }
}

/// A structured error record for reports of failed runs.
pub fn error_record(e: &Error) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "status": "error",
        "error": {
            "class": format!("{:?}", e.class()).to_lowercase(),
            "kind": e.kind(),
            "message": e.to_string(),
        }
    })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Internal(format!("serialisation failed: {e}")))
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

fn scan_sidecars(prefix: &str, scans: &[ZScan]) -> Vec<Sidecar> {
    scans
        .iter()
        .enumerate()
        .map(|(i, s)| Sidecar {
            name: format!("{prefix}_z{i}.csv"),
            contents: s.report.to_csv(),
        })
        .collect()
}

/// Runs a resolved problem.
pub fn run(spec: &ProblemSpec) -> Result<Report> {
    let spec = spec.clone().resolve()?;
    let p = spec.op()?;
    let pr = &spec.params;
    let mut sidecars = Vec::new();
    let result = match spec.task {
        Task::Solve => {
            let series = match spec.datum()? {
                DatumSpec::Poly(phi) => formal_solution(&p, phi, pr.j)?,
                DatumSpec::Rational(f) => formal_solution_rational(&p, f, pr.j)?,
            };
            let z = pr.z.as_deref().unwrap_or_default();
            let sums = pr
                .t_grid
                .iter()
                .flatten()
                .map(|&t| Ok(json!({"t": [t.re, t.im], "value": pairs(&[partial_sum(&series, t, z)?])[0]})))
                .collect::<Result<Vec<_>>>()?;
            json!({"series": to_value(&series)?, "partial_sums": sums})
        }
        Task::PizzettiCheck => {
            let step = p.min_order().max(1);
            let phi = spec.datum()?.to_poly(step * pr.j as u32)?;
            let residual = pizzetti_residual(
                spec.measure()?,
                &p,
                spec.moment()?,
                &phi,
                pr.z_grid.as_deref().unwrap_or_default(),
                pr.t_grid.as_deref().unwrap_or_default(),
                pr.j,
            )?;
            json!({"residual": residual, "tol": pr.tol, "passed": residual <= pr.tol})
        }
        Task::Borel => {
            let z = pr.z.as_deref().unwrap_or_default();
            let series = match spec.datum()? {
                DatumSpec::Poly(phi) => formal_solution(&p, phi, pr.j)?,
                DatumSpec::Rational(f) => formal_solution_rational(&p, f, pr.j)?,
            };
            let at_z = specialise(&series, z)?;
            let borel = borel_transform(&at_z, spec.moment()?)?;
            let gevrey = gevrey_estimate(&at_z, pr.jmin.unwrap_or(1), pr.j)?;
            json!({
                "coefficients": to_value(&at_z)?,
                "borel": to_value(&borel)?,
                "gevrey": to_value(&gevrey)?,
                "expected_gevrey_order": p.order() as f64 - 1.0,
            })
        }
        Task::Growth => {
            let measure = spec.measure()?;
            let phi = spec.datum()?.to_rational();
            let z = pr.z.as_deref().unwrap_or_default();
            let sector = pr.sector.ok_or_else(|| Error::Internal("sector unresolved".into()))?;
            let quad = pr.config.quad;
            let k_target = pr.k_target.ok_or_else(|| Error::Internal("k_target unresolved".into()))?;
            let f = |t: Complex64| mean_quadrature(measure, &phi, z, t, &quad).map(|e| e.value);
            let mut report: GrowthReport = growth_scan(f, &sector, k_target)?;
            let node = node_singularities(measure, &phi, z, &quad)?
                .into_iter()
                .filter(|t| sector.contains(*t))
                .min_by(|a, b| a.norm().total_cmp(&b.norm()));
            if node.is_some() {
                report.verdict = Verdict::SingularityEncountered;
            }
            sidecars.push(Sidecar {
                name: "rays.csv".into(),
                contents: report.to_csv(),
            });
            json!({"report": to_value(&report)?, "node_singularity": node.map(|t| [t.re, t.im])})
        }
        Task::Verdict => {
            let (measure, m) = (spec.measure()?, spec.moment()?);
            let phi = spec.datum()?.to_rational();
            match pr.d {
                Some(d) => {
                    let v = summability_verdict(&p, &phi, measure, m, d, &pr.config)?;
                    for (k, s) in v.sectors.iter().enumerate() {
                        sidecars.extend(scan_sidecars(&format!("rays_sector{k}"), &s.scans));
                    }
                    to_value(&v)?
                }
                None => {
                    let v = convergence_verdict(&p, &phi, measure, m, &pr.config)?;
                    sidecars.extend(scan_sidecars("rays_fan", &v.scans));
                    to_value(&v)?
                }
            }
        }
        Task::Symbol => {
            let m = spec.moment()?;
            let grid = pr.r_grid.as_deref().unwrap_or_default();
            let quasi = p.quasi_type().iter().any(|&k| k != 1);
            let growth = if quasi {
                quasi_diagonal_growth(&p, m, grid)?
            } else {
                diagonal_growth(&p, m, grid)?
            };
            let value = match &pr.zeta {
                Some(zeta) => {
                    let v = symbol_eval(&p, m, zeta, 100_000, 1e-14)?;
                    Some([v.re, v.im])
                }
                None => None,
            };
            let mut csv = String::from("r,ln_abs_f\n");
            for (r, l) in &growth.samples {
                csv.push_str(&format!("{r},{l}\n"));
            }
            sidecars.push(Sidecar {
                name: "symbol_ray.csv".into(),
                contents: csv,
            });
            json!({"growth": to_value(&growth)?, "value": value})
        }
    };
    Ok(Report {
        tool: TOOL,
        version: VERSION,
        task: spec.task,
        status: "ok",
        spec,
        result,
        timestamp: None,
        sidecars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAT: &str = r#"{
        "operator": {"kind": "laplacian", "n": 1},
        "datum": {"num": [{"exp": [0], "re": 1}], "den": [{"exp": [0], "re": 1}, {"exp": [1], "re": -1}]},
        "measure": {"kind": "sphere", "n": 1},
        "moment": {"kind": "pizzetti_sphere", "n": 1},
        "task": "verdict",
        "d": 3.141592653589793
    }"#;

    #[test]
    fn heat_spec_parses() {
        let s = parse_spec(HEAT).unwrap();
        assert_eq!(s.task, Task::Verdict);
        assert_eq!(s.params.d, Some(PI));
        assert_eq!(s.params.j, 20);
    }

    #[test]
    fn dimension_mismatch_names_the_field() {
        let text = r#"{"operator": {"kind": "laplacian", "n": 2},
            "datum": [{"exp": [1, 0, 0], "re": 1}], "task": "solve"}"#;
        match parse_spec(text) {
            Err(Error::Spec { path, message }) => {
                assert_eq!(path, "datum");
                assert!(message.contains("expected 2, found 3"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let text = r#"{"operator": {"kind": "laplacian", "n": "two"}, "task": "solve"}"#;
        match parse_spec(text) {
            Err(Error::Spec { path, .. }) => assert!(path.starts_with("operator"), "{path}"),
            other => panic!("{other:?}"),
        }
        let missing = r#"{"operator": {"kind": "laplacian", "n": 1}, "task": "verdict"}"#;
        assert!(matches!(parse_spec(missing), Err(Error::Spec { path, .. }) if path == "datum"));
    }

    #[test]
    fn solve_fills_and_echoes_j() {
        let text = r#"{"operator": {"kind": "laplacian", "n": 1},
            "datum": [{"exp": [2], "re": 1}], "task": "solve"}"#;
        let s = parse_spec(text).unwrap();
        let report = run(&s).unwrap();
        let v: Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["spec"]["J"], 20);
        assert_eq!(v["status"], "ok");
    }

    #[test]
    fn round_trip_is_identity() {
        let s = parse_spec(HEAT).unwrap();
        let back = parse_spec(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn pizzetti_check_on_the_disc() {
        let text = r#"{"operator": {"kind": "laplacian", "n": 2},
            "datum": [{"exp": [2, 0], "re": 1}, {"exp": [0, 2], "re": 1}],
            "measure": {"kind": "ball", "n": 2}, "moment": {"kind": "pizzetti_ball", "n": 2},
            "task": "pizzetti-check"}"#;
        let r = run(&parse_spec(text).unwrap()).unwrap();
        assert!(r.result["residual"].as_f64().unwrap() <= 1e-12);
        assert_eq!(r.result["passed"], true);
    }

    #[test]
    fn symbol_task_reports_exponential_growth() {
        let text = r#"{"operator": {"kind": "symbol", "symbol": [{"exp": [3], "re": 1}]},
            "moment": {"kind": "gamma_s", "s": 3}, "task": "symbol"}"#;
        let r = run(&parse_spec(text).unwrap()).unwrap();
        assert_eq!(r.result["growth"]["exponential"], true);
        let b = r.result["growth"]["ray"]["b_hat"].as_f64().unwrap();
        assert!((b - 1.0).abs() < 0.05);
        assert_eq!(r.sidecars.len(), 1);
    }
}
