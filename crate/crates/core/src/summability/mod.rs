//! Exponential-growth scans along rays and sectors, convergence and
//! summability verdicts for generalised means, and growth of Fourier-Laplace
//! symbols along distinguished rays.

mod scan;
mod symbol;
mod verdict;

pub use scan::{
    growth_scan, scan_rays, GrowthReport, RayReport, RayStatus, RaySample, SampleStatus, SectorSpec, Verdict,
    DEFAULT_K_TOL,
};
pub use symbol::{
    diagonal_growth, pws_check, quasi_diagonal_growth, symbol_eval, AxisFit, DiagonalReport, PwsCheck,
};
pub use verdict::{
    convergence_verdict, default_z_grid, summability_verdict, ConvergenceVerdict, FanSpec, SectorDefaults,
    SectorResult, SummabilityConfig, SummabilityVerdict, ZScan,
};
