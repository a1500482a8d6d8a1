//! Solvability tests and general solutions for the linear equations over
//! quaternions and dual quaternions.
//!
//! Every solver reports two equivalent families of conditions: a
//! projector form (`R_A C = 0` and the like, checked against a scaled residual
//! threshold) and a rank form (integer rank equalities of block matrices). The
//! projector form decides; disagreement is surfaced in the report.

mod ax_eq_b;
mod axb;
mod conditions;
mod params;
mod rank_identity;
mod special;
mod sylvester;
mod three_term;

pub use ax_eq_b::{solve_dq_ax_eq_b, DualLeftSolver};
pub use axb::{solve_axb_eq_c, AxbKernel};
pub use conditions::{ConditionCheck, RankCondition, SolvabilityReport, Unsolvable};
pub use params::{FreeParams, SolverConfig, DEFAULT_SOLVER_TOL};
pub use rank_identity::check_rank_identity;
pub use special::{ax_eq_yb_family, solve_ax_eq_yb, solve_yb_eq_c, DualRightSolver};
pub use sylvester::{
    check_sylvester, solve_sylvester, SylvesterReport, SylvesterSolution, SylvesterWorkspace, IDENTITY_FAILURE_FACTOR,
};
pub use three_term::{solve_three_term, ThreeTermKernel, ThreeTermSolution};
