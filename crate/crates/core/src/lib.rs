//! Euclidean k-tour cover: heuristics, exact oracles and the grid-based
//! reduction with its ring decomposition.

pub mod discretization;
pub mod error;
pub mod exact;
pub mod heuristics;
pub mod model;
pub mod pipeline;
pub mod rings;

pub use error::{KtcError, Result};
pub use exact::{exact_ktc, held_karp_tsp, naive_ktc, OracleLimits};
pub use heuristics::{cover_heuristic, itp, lower_bound, mst_tsp_tour};
pub use model::{
    radial_cost, solution_cost, tour_cost, validate, Bounds, Instance, Point, Solution, Tour,
    ValidationReport, Violation,
};
pub use pipeline::{
    reduce, reduce_global, solve, solve_direct, solve_with_report, BaseKind, BaseSolverChoice,
    ReductionMode, SolveOptions,
};
