//! Exact decision procedures: LP membership in the local polytope, floor-
//! constrained setting-dependent models, value-assignment satisfiability, and
//! direction-set colorability.

pub mod ks;
pub mod lhv;
pub mod lp;
pub mod mdl;
pub mod strategies;
pub mod vcs;

pub use ks::{ks_colorable, KsResult};
pub use lhv::{decide_lhv, BellFunctional, LhvResult};
pub use lp::{solve_lp, LinearProgram, LpResult};
pub use mdl::{decide_mdl, mdl_threshold, JointDistribution, MdlResult, MdlThreshold};
pub use strategies::{enumerate_deterministic_strategies, DeterministicStrategy};
pub use vcs::{check_value_assignment, AssignmentResult, ValueConstraintSystem};
