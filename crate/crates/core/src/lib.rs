//! Toolkit for two- and three-party measurement correlations: behaviors and
//! their structural checks, hidden-variable models with per-condition
//! checkers, executable counterexample constructions, Born-rule behaviors for
//! a few bundled states, and exact-rational decision procedures with
//! replayable certificates.

pub mod constructions;
pub mod decide;
pub mod error;
pub mod hvmodel;
pub mod io;
pub mod quantum;
pub mod sample;
pub mod scenario;
pub mod value;

pub use error::{Error, Result};
pub use hvmodel::{Condition, ConditionReport, HiddenVariableModel};
pub use scenario::{Behavior, Scenario};
pub use value::{Value, ValueMode};
