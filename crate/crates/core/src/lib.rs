//! Exact solver for the maximum-weight connected matching problem: find a
//! matching of maximum total weight whose covered vertices induce a connected
//! subgraph.
//!
//! Two models are provided. The compact one adds flow variables on an
//! auxiliary network and is solved by plain LP-based branch and bound. The
//! exponential one keeps only edge variables and adds minimal separator,
//! indegree and blossom inequalities on demand in a branch-and-cut search.

pub mod bench;
pub mod error;
pub mod flow;
pub mod formulation;
pub mod graph;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod separation;
pub mod solver;

pub use error::{Error, Result};
pub use graph::{Graph, Matching};
pub use io::Instance;
pub use solver::{solve, Formulation, SolveResult, SolveStatus, SolverConfig};
