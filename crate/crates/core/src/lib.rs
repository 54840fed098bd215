//! Core library for modeling acyclic multicast networks, constructing and
//! verifying scalar linear codes over finite fields, and the matroid side of
//! the same story: receiver gammoids, their transversal duals, and lifting a
//! binary solution to every larger field through a totally unimodular signing.

pub mod code;
pub mod field;
pub mod fixtures;
pub(crate) mod flow;
pub mod lift;
pub(crate) mod linalg;
pub mod matroid;
pub mod multicast;
pub mod network;
pub mod solve;
