//! Exact rational arithmetic, dense linear algebra and linear programming.

mod lp;
mod matrix;
mod rat;

pub use lp::{lp_feasible, minimize, Constraint, FarkasCertificate, Feasibility, LpOutcome};
pub use matrix::{affine_rank, affine_rank_int, dot, int_rank, rank, RatMatrix};
pub use rat::{gcd_slice, lcm_denominators, primitive_integer_vector, ParseRatError, Rat};
