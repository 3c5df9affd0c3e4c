//! Sparse complex polynomial arithmetic, rational Cauchy data,
//! constant-coefficient differential operators and the symmetric matrix
//! factorisation used by elliptic means.

mod diffop;
mod matrix;
mod poly;
mod rational;

pub use diffop::{apply_diffop, iterate_diffop, DiffOp};
pub use matrix::{factor_symmetric, verify_factorisation, SquareMatrix, SymFactorisation};
pub use poly::{Exponent, MultiPoly, TermRecord};
pub use rational::{rational_eval, RationalFn};

/// Default tolerance for symmetry and orthogonality checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default relative pole tolerance for rational evaluation.
pub const DEFAULT_POLE_TOL: f64 = 1e-12;
