//! Bounded-round clique finding on G(n,½).
//!
//! The crate is split the same way the problem is: a seeded edge oracle with
//! per-round budgets, the query algorithms that run against it, matching
//! decompositions used to analyse the cliques they can find, closed-form
//! bound curves, and a certified optimizer for the three-round bound.

pub mod bounds;
pub mod certopt;
pub mod clique;
pub mod cliquealg;
pub mod graph;
pub mod matchdecomp;
pub mod oracle;

pub use graph::SimpleGraph;
pub use oracle::{EdgeKey, QueryOracle, Schedule, Transcript};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
