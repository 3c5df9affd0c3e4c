//! Symbolic-numeric toolkit for the Cauchy problem `(∂_t − P(∂_z))u = 0, u(0, z) = φ(z)`.
//!
//! The crate builds the formal power-series solution, evaluates generalised
//! integral means of the Cauchy datum (exactly for polynomial data, by
//! quadrature for rational data, and through Pizzetti-type series), and turns
//! sectorial growth scans of those means into convergence and summability
//! verdicts.
//!
//! Module map:
//!
//! - [`algebra`]: sparse complex polynomials, rational data, differential
//!   operators and symmetric factorisations.
//! - [`moments`]: Γ, moment functions, kernel functions, Mittag-Leffler series.
//! - [`series`]: formal series in `t`, Borel transforms, Gevrey estimation.
//! - [`means`]: measures, exact/quadrature means and Pizzetti-type expansions.
//! - [`summability`]: growth scans, verdicts, Fourier-Laplace symbol growth.
//! - [`problem`]: JSON problem descriptions and report generation.

// Negated comparisons such as `!(x > 0.0)` reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cser;
pub mod error;
pub mod means;
pub mod moments;
pub mod numeric;
pub mod problem;
pub mod series;
pub mod summability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
