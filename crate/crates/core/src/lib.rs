//! Up-down run generation with a bounded buffer: the machine model, online
//! and offline algorithms, input constructions, and an experiment harness.

pub mod error;
pub mod formats;
pub mod generators;
pub mod harness;
pub mod machine;
pub mod nearly_sorted;
pub mod offline;
pub mod online;

pub use error::{Error, Result};
pub use machine::{
    conserves, count_runs, simulate_maximal_run_length, BufferMachine, Direction, InputSource,
    Key, Run, RunSequence, SliceSource, UnwrittenView,
};
