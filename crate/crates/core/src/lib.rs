//! Shortest-longest path (SLP) solver library.
//!
//! An SLP query asks for a directed path whose cost sum stays at or below an
//! upper bound `W_S` while its resource sum reaches a lower bound `W_L`. The
//! solver scales and rounds both edge metrics to small integers, runs a
//! label-setting search over an implicit layered graph keyed by accumulated
//! scaled resource, and rejects extensions that would reuse an edge of the
//! base graph. A returned path is guaranteed to satisfy the relaxed bounds
//! `(1+eps)*W_S` and `(1-eps)*W_L`; "no solution" is one-sided and does not
//! certify infeasibility.
//!
//! Crate layout:
//! - [`model`]: graphs, requests, walks, and the feasibility predicates.
//! - [`scaling`]: the integer scaling transform parameterized by `tau = m/eps`.
//! - [`layered`]: implicit expansion of the layered auxiliary graph.
//! - [`solver`]: the label-setting search, the end-to-end pipeline, and
//!   result verification.
//! - [`oracle`]: exhaustive trail enumeration for desk-scale ground truth.
//! - [`generator`]: seeded random and multi-domain instance generators.
//! - [`io`]: the `slp 1` instance text format and the JSON result report.
//! - [`batch`]: data-parallel helpers (rayon behind the `parallel` feature,
//!   sequential fallback otherwise).

pub mod batch;
pub mod error;
pub mod generator;
pub mod io;
pub mod layered;
pub mod model;
pub mod oracle;
pub mod rat;
pub mod scaling;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Edge, EdgeId, Graph, Metric, Request, VertexId, Walk};
pub use rat::Rat;
pub use solver::{solve, PathResult, SolveStatus};

// Reports are `serde_json::Value` documents; re-export the crate so callers
// can consume them without pinning their own copy.
pub use serde_json;
