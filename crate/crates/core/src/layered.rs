//! Implicit auxiliary graph over states (vertex, accumulated scaled resource).
//!
//! A state (u, x) records that some walk has reached u having collected x
//! units of scaled resource, clamped at the scaled bound. Reaching layer
//! `tau_ceil` certifies the scaled resource bound, so the target of every
//! search is (t, tau_ceil). The graph is never materialized at solve time:
//! its state count is n*(tau_ceil+1), so memory tracks the search frontier
//! instead.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{EdgeId, VertexId, Walk};
use crate::scaling::ScaledInstance;

/// A vertex of the auxiliary graph: base vertex plus accumulated clamped
/// scaled resource in `[0, tau_ceil]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LayeredVertex {
    pub vertex: VertexId,
    pub layer: u64,
}

impl LayeredVertex {
    pub fn new(vertex: VertexId, layer: u64) -> Self {
        Self { vertex, layer }
    }
}

/// An edge of the auxiliary graph, tagged with the base edge it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayeredEdge {
    pub from: LayeredVertex,
    pub to: LayeredVertex,
    pub via: EdgeId,
    /// Scaled cost of the via edge.
    pub cost: u64,
}

/// The clamped layer transition `y = x + min(scaled_l, tau_ceil - x)`.
///
/// The single clamp site of the pipeline: scaled L-weights above the cap are
/// stored unclamped and only saturate here. Layers never decrease, and stay
/// put exactly when `scaled_l = 0` or the cap is already reached.
pub fn transition(layer: u64, scaled_l: u64, tau_ceil: u64) -> u64 {
    debug_assert!(layer <= tau_ceil);
    layer + scaled_l.min(tau_ceil - layer)
}

/// One layered edge per outgoing base edge of `state.vertex`, ascending by
/// via edge id. Pure and reentrant; concurrent searches may share `scaled`.
pub fn expand_neighbors(scaled: &ScaledInstance, state: LayeredVertex) -> Vec<LayeredEdge> {
    let graph = scaled.graph();
    let tau_ceil = scaled.tau_ceil();
    debug_assert!(state.layer <= tau_ceil);
    graph
        .outgoing(state.vertex)
        .iter()
        .map(|&idx| {
            let edge = graph.edge_at(idx);
            LayeredEdge {
                from: state,
                to: LayeredVertex::new(
                    edge.head,
                    transition(state.layer, scaled.scaled_l(idx), tau_ceil),
                ),
                via: edge.id,
                cost: scaled.scaled_s(idx),
            }
        })
        .collect()
}

/// Drops the layer component, returning the base walk of via edge ids.
/// Rejects input that is not contiguous in the auxiliary graph.
pub fn project_to_base(layered_path: &[LayeredEdge]) -> Result<Walk> {
    for (pos, pair) in layered_path.windows(2).enumerate() {
        if pair[0].to != pair[1].from {
            return Err(Error::MalformedWalk(format!(
                "layered edges at positions {} and {} do not share a state",
                pos,
                pos + 1
            )));
        }
    }
    Ok(Walk::new(layered_path.iter().map(|e| e.via).collect()))
}

/// Every layered edge of the full auxiliary graph, for debugging tiny
/// instances only; the result has m*(tau_ceil+1) entries.
pub fn materialize(scaled: &ScaledInstance) -> Vec<LayeredEdge> {
    let mut edges = Vec::new();
    for vertex in scaled.graph().vertices() {
        for layer in 0..=scaled.tau_ceil() {
            edges.extend(expand_neighbors(scaled, LayeredVertex::new(vertex, layer)));
        }
    }
    edges
}

/// DOT rendering of the materialized auxiliary graph for visualization.
pub fn to_dot(scaled: &ScaledInstance) -> String {
    let mut out = String::from("digraph layered {\n  rankdir=LR;\n");
    for edge in materialize(scaled) {
        let _ = writeln!(
            out,
            "  \"{},{}\" -> \"{},{}\" [label=\"e{} c{}\"];",
            edge.from.vertex, edge.from.layer, edge.to.vertex, edge.to.layer, edge.via, edge.cost
        );
    }
    out.push_str("}\n");
    out
}
