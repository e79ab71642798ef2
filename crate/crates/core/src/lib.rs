//! Quantum Turing machines with source and target states, simulated over
//! finite superpositions of tape configurations.
//!
//! * [`hilbert`]: sparse complex vectors over a countable basis.
//! * [`tape`]: symbols, canonical configurations, the step map and its
//!   reverse.
//! * [`machine`]: machine tables, the file format and the local unitary
//!   conditions.
//! * [`evolution`]: the time evolution operator and its adjoint.
//! * [`distribution`]: partial probability distributions and computed
//!   outputs.
//! * [`observation`]: output measurements, observed runs and Monte Carlo
//!   sampling.
//! * [`bvcompat`]: Bernstein–Vazirani machines and their conversion.

pub mod bvcompat;
pub mod distribution;
pub mod error;
pub mod evolution;
pub mod hilbert;
pub mod machine;
pub mod observation;
pub mod par;
pub mod rng;
pub mod tape;

pub use error::{Error, ParseError, Result};
pub use evolution::Superposition;
pub use hilbert::{Amplitude, SparseVector};
pub use machine::{Machine, DEFAULT_EPS};
pub use par::Exec;
pub use tape::{Configuration, Direction, StateId, Symbol};
