//! A small MILP solver: bounded-variable simplex for the relaxations and
//! branch-and-bound over binary variables.

mod error;
mod factor;
mod simplex;

pub mod bnb;
pub mod dump;
pub mod lp;
pub mod model;

pub use bnb::{
    relative_gap, solve_milp, BranchAndBound, MilpBackend, MilpSolution, MilpStatus, SolverLimits,
};
pub use error::ModelError;
pub use lp::{kkt_residuals, solve_lp, solve_lp_with, KktResiduals, LpAlgorithm, LpSolution, LpStatus};
pub use model::{MilpModel, Row, RowId, RowSense, VarId, VarKind, Variable};
