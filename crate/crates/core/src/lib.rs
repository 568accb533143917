//! Exact-arithmetic tooling for the second-neighborhood conjecture and its
//! linear-algebraic reformulations.
//!
//! Every yes/no answer comes with a certificate that is re-checked in exact
//! rational arithmetic before it is returned.

pub mod conjecture;
pub mod digraph;
pub mod elimination;
pub mod farkas;
pub mod linalg;
pub mod search;

pub use conjecture::{
    check, check_all, consistency_check, ConjectureId, CrossCheckReport, Evidence, Status, Verdict,
};
pub use digraph::{Arc, Digraph, DigraphError, Vertex};
pub use linalg::{second_neighborhood_matrix, RatMatrix, RatVector, Rational};
