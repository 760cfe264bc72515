//! Entry and return time statistics for measure-preserving systems and their
//! induced (first-return) systems.
//!
//! * [`systems`]: shifts and interval maps with exact stationary sampling.
//! * [`targets`]: cylinder and interval targets, measures, occurrence automaton.
//! * [`recurrence`]: entry/return times, the induced map, block decomposition.
//! * [`distributions`]: survival curves, comparisons, exact finite-chain oracle.
//! * [`renewal`]: closed forms for the renewal shift.
//! * [`cli`]: experiment configs, batch runs, and verification checks.

pub mod cli;
pub mod distributions;
pub mod recurrence;
pub mod renewal;
pub mod rng;
pub mod systems;
pub mod targets;

pub use recurrence::{TimeSample, TrialKind, TrialPlan};
pub use rng::StreamSeed;
pub use systems::{State, SystemInstance, SystemSpec};
pub use targets::{PreparedTarget, TargetSet};
