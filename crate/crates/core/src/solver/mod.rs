//! Direct search with subspace polling and Monte-Carlo acceptance.
//!
//! Each iteration draws (or recalls) a subspace frame and a positive
//! spanning set keyed by the matrix index `t`, polls `x + δ U d`, and accepts
//! the first trial whose estimate beats the incumbent estimate by
//! `γ ε_f δ²`. The baselines `sdds_minimal` and `fullspace_2n` share the loop
//! and differ only in the poll set.

pub mod automaton;
pub mod config;
pub mod poll;
pub mod run;

pub use automaton::{IndexAutomaton, Outcome, StepSize};
pub use config::{Budget, PssSize, SolverConfig, SubspaceDim, Variant};
pub use poll::{order_directions, poll, PollContext, PollOutcome, PollSetBuilder};
pub use run::{run, run_with_estimator, IterationState, RunTrace, TraceOutcome, TraceRecord, TRACE_HEADER};
