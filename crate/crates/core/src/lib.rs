//! Dempster-Shafer evidence updating for streaming data.
//!
//! The crate covers the full path from a body of evidence to an updated one:
//!
//! * [`frame`]: frames of discernment and bit-pattern propositions;
//! * [`mass`] and [`transform`]: mass functions, belief/plausibility,
//!   pignistic probabilities and the fast zeta/Möbius transforms;
//! * [`conditioning`]: Fagin-Halpern conditionals and conditional cores;
//! * [`updating`]: the GCU and CUE update rules with their α/β strategies
//!   and priors;
//! * [`stream`]: JSON-Lines evidence streams, trajectories, rule comparison
//!   and resumable state.

// NaN must fail these checks, so the negated form is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditioning;
pub mod error;
pub mod fixtures;
pub mod frame;
pub mod io;
pub mod mass;
pub mod stream;
pub mod tol;
pub mod transform;
pub mod updating;

pub use conditioning::{
    cct_decompose, conditional_core_cct, fh_conditional_belief, fh_conditional_mass,
    fh_conditional_plausibility, fh_conditional_table, CctDecomposition, ConditioningEvent,
};
pub use error::{Error, Result};
pub use frame::{Frame, Proposition, MAX_FRAME_SIZE};
pub use mass::{random_boe, validate_assignments, MassFunction, ValidationReport, Violation};
pub use stream::{
    compare_rules, load_stream, run_from, run_stream, unsupported_proposition_report,
    ExperimentReport, Pipeline, PipelineState, StreamRecord, TrajectoryLog, TrajectorySample,
};
pub use transform::{mobius_inversion, zeta_transform, BeliefTable};
pub use updating::{
    bayes_update, cue_update, gcu_update, init_prior, AlphaStrategy, BetaStrategy, BetaWeights,
    DegenerateEventPolicy, PriorSpec, Update, UpdateConfig, UpdateRule,
};
