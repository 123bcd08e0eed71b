//! Discrete Laplacians, linear solves, Newton iteration and the monotone
//! sub/supersolution iteration.

mod operator;
mod solve;

pub use operator::{assemble, DiscreteOperator};
pub use solve::{
    monotone_iteration, newton_solve, picard_solve, residual, residual_field, residual_vector, solve_linear,
    solve_linear_with, LinearMethod, LinearOptions, LinearSystem, MonotoneOptions, MonotoneScheme, NewtonOptions,
    ShiftRule, SolveReport, StartSide,
};
