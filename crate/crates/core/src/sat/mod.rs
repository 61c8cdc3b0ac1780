//! SAT solving with resolution proofs of unsatisfiability.

mod phase;
mod proof;
mod solver;

pub use phase::{DefaultPhase, PhasePolicy, RandomizedPhase};
pub use proof::{check_proof, ParentRef, ProofError, ResolutionProof, ResolutionStep};
pub use solver::{solve, solve_with, SatResult, SolveOptions, Solver, SolverStats};
