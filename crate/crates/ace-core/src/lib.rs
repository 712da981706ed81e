//! Toolkit for maze-style block-programming assessment items.
//!
//! The crate is organised around a small imperative block language whose
//! programs steer an avatar across a rectangular grid toward a goal cell.
//! On top of the interpreter sit brute-force enumeration oracles, a
//! multiple-choice item bank model with structural and answer-key
//! validation, a seeded item generator whose output is verified against
//! the oracles, and the statistics used to analyse scored response
//! matrices (Cronbach alpha, a joint maximum likelihood Rasch fit,
//! item characteristic curves, Pearson correlation and Welch's t-test).
//!
//! The `ace` binary in this crate exposes the same functionality on the
//! command line; `ace-ffi` wraps a subset behind a C ABI.

pub mod exec;
pub mod gen;
pub mod grid;
pub mod io;
pub mod item;
pub mod oracle;
pub mod parse;
pub mod program;
pub mod stats;

pub use exec::{execute, Action, CrashTarget, ExecError, Outcome, Run, TraceEvent, DEFAULT_STEP_LIMIT};
pub use gen::{derive_seed, generate_bank, generate_grid, generate_item, Difficulty, GenError, GenSpec};
pub use grid::{AvatarState, CellKind, Direction, Grid, GridError, OpenGrid, Position, Turn};
pub use parse::{parse_program, ParseError};
pub use program::{Block, Condition, Program, ProgramError};

/// Version string stamped into generated banks and analysis reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
