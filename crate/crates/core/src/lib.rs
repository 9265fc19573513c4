//! Integer-order expansion of Caputo fractional derivatives of arbitrary
//! real order, reference oracles, and a solver that rewrites Caputo
//! fractional differential equations as ordinary ODE systems.

pub mod error;
pub mod expr;
pub mod fde_solver;
pub mod frac_core;
pub mod ode;
pub mod quadrature;
pub mod reference;
pub mod special_fns;

pub use error::{Error, Result};
pub use expr::Expr;
pub use frac_core::{
    caputo_expansion, coefficient_table, error_bound, rl_from_caputo_left, rl_from_caputo_right,
    rl_integral, uniform_grid, ApproxParams, CoefficientTable, FractionalOrder, GridFunction,
    MomentVector, Side,
};
pub use fde_solver::{solve_fde, successive_consistency, FdeProblem, FdeSolution, SolverConfig};
pub use quadrature::QuadratureConfig;
