//! Models of how people cast approval ballots.
//!
//! [`election`] holds the exact mechanics: top-k approval voting with random
//! tie-breaking, uncertainty over missing ballots, and the expected-utility
//! optimal ballot. [`heuristics`] implements the sincere heuristics and the
//! attainability/utility (AU) models. [`fitting`] grid-fits the models to
//! per-voter responses with leave-one-out evaluation.
//!
//! With the default `parallel` feature, ballot enumeration, grid search and
//! per-voter evaluation run on the rayon pool; results never depend on
//! scheduling.

pub mod curves;
pub mod data;
pub mod election;
pub mod error;
pub mod fitting;
pub mod heuristics;
mod par;
pub mod report;
pub mod synth;
pub mod tables;

pub use election::{
    optimal_ballot, run_election, winner_probabilities, Ballot, CandidateSet, Scenario, Tally,
    UtilityProfile,
};
pub use error::{Error, Result};
pub use fitting::{evaluate_cohort, fit_au, fit_aut, loo_evaluate, ModelKind, ResponseRecord, Scenarios};
pub use heuristics::{au_ballot, aut_ballot, complete_ballot, take_x_best, ModelParams};
pub use report::AccuracyReport;
pub use synth::{generate_synthetic_cohort, CohortSpec};
