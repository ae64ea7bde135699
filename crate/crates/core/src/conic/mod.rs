//! Dense primal-dual interior-point solver for block-diagonal semidefinite programs.

pub mod battery;
mod kkt;
mod problem;
mod solver;

pub use kkt::{dump_triplets, kkt_residuals, KktResiduals};
pub use problem::{ConicProblem, Constraint, ConstraintId, LinExpr, PsdVar, Relation, ScalarKind, ScalarVar, SymCoef};
pub use solver::{solve, ConicSolution, SolveStatus, SolverConfig};
