//! Exact enumeration of self-avoiding walks and polygons in finite lattice
//! domains by a boundary transfer matrix, with tools for analysing the
//! resulting series.

pub mod analysis;
pub mod exact;
pub mod golden;
pub mod hash;
pub mod motzkin;
pub mod oracle;
pub mod signature;
pub mod tm;

pub use hash::{build_hash, HashFunction};
pub use motzkin::{MotzkinTables, Step};
pub use signature::{EdgeState, Signature};
pub use tm::{ProblemSpec, Transition};
pub use exact::{crt_combine, enumerate_exact, generate_primes, Series};
