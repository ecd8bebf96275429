//! Command-line companion to `shockform-core`: scenario files, run
//! commands, CSV artifacts, and the invariant suite. The binary is a thin
//! wrapper over this library so integration tests can drive commands
//! directly.

// `!(a < b)`-style comparisons are deliberate: they reject NaN where a
// direct `>=` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod csvio;
pub mod scenario;
pub mod verify;

pub use commands::{
    compare, construct, decay, evolve_char, evolve_fvm, stability, RunError, RunOptions,
};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};
pub use verify::verify;

/// Exit code mapping: 0 success, 1 validation failure, 2 numerical failure.
pub fn exit_code(err: &RunError) -> i32 {
    match err {
        RunError::Validation(_) | RunError::Io(_) => 1,
        RunError::Numerical(_) => 2,
    }
}
