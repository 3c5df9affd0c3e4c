//! Γ and its relatives, moment functions and their algebra, kernel functions
//! and Mittag-Leffler series.

mod gamma;
mod kernel;
mod mittag_leffler;
mod moment;
mod relations;

pub use gamma::{factorial, gamma, ln_gamma, ln_pochhammer, pochhammer, MAX_FACTORIAL};
pub use kernel::{kernel_eval, kernel_moment_integral, Estimate, KernelFn, KernelQuadConfig};
pub use mittag_leffler::{mittag_leffler, MITTAG_LEFFLER_CAP};
pub use moment::{moment_eval, moment_log_eval, moment_product, moment_quotient, moment_subsequence, MomentFn};
pub use relations::{check_generalised_moment, moment_order_bounds, OrderBounds, RelationCheck};
