//! Solver toolkit for digraph list-homomorphism instances whose correctness
//! is guaranteed under a Maltsev list polymorphism, together with reductions
//! from CSP / relational-structure questions into such instances and
//! brute-force oracles that cross-validate every piece.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `lhom-cli` crate.

#![no_std]

extern crate alloc;

mod bitset;

pub mod conjecture;
pub mod consistency;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod reductions;
pub mod solver;

pub use consistency::{components, preprocess, remove_twins, Infeasible, PairLists};
pub use graph::{
    congruent, product_graph, verify_homomorphism, Digraph, Homomorphism, Instance,
    ListAssignment, OrientedWalk, Step,
};
pub use solver::{remove_minority, solve, SolveReport, SolverOptions};
