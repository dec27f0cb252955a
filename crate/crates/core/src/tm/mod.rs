//! Transfer-matrix enumeration.

pub mod engine;
pub mod problem;
pub mod rules;

pub use engine::{reference_sweep, reference_sweep_exact, sweep, CountVector, SweepOptions, Sweeper, TmError};
pub use problem::{CellKind, DomainShape, Lattice, Layout, Move, PathKind, Plan, ProblemError, ProblemSpec};
pub use rules::{apply_update, Transition};
