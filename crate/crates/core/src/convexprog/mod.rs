//! Convex constraints and the weighted-sum / translative scalarizations,
//! solved by Kelley's cutting-plane method over the instance box.

mod expr;
mod instance;
mod scalar;

pub use expr::ConvexExpr;
pub use instance::{Bounds, Hint, Mode, ProblemInstance};
pub use scalar::{
    find_slater_point, kelley_gap, restore_feasibility, solve_p1, solve_p2, ScalarSolution,
    Scalarizer, DEFAULT_GAP,
};
