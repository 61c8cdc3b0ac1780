//! Tests-as-proofs bug hunting for sequential circuits.
//!
//! [`engine::run_tapseq`] explores the reachable states of an AIGER circuit
//! by proving, for each visited state, that none of its successors is bad,
//! and then extracting new successor states from boundary points of the
//! resolution proof. [`baselines`] provides a random-walk bug hunter and a
//! bounded model checker for comparison.

pub mod aiger;
pub mod baselines;
pub mod bits;
pub mod circuits;
pub mod cnf;
pub mod encode;
pub mod encoding;
pub mod engine;
pub mod oracle;
pub mod sat;
pub mod witness;

pub use aiger::{parse_aiger, AigModel};
pub use bits::{InputVector, State};
