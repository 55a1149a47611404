//! Doubly-weighted directed multigraphs, requests, walks, and the feasibility
//! predicates.
//!
//! Every edge carries a cost weight `w_s` (minimization type, summed along a
//! path and compared against an upper bound) and a resource weight `w_l`
//! (maximization type, compared against a lower bound). Parallel edges are
//! allowed and distinguished by id; the candidate solution universe is trails,
//! i.e. walks that never repeat an edge although they may revisit vertices.
//!
//! All types are immutable after construction and all operations are pure, so
//! instances can be shared freely across concurrent solver runs.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{format_rat, Rat};

/// Vertex identifier; vertices of a graph with `n` vertices are `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Edge identifier, unique within a graph but otherwise arbitrary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The two additive path metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Cost-like metric, bounded from above (`w_S`).
    S,
    /// Resource-like metric, bounded from below (`w_L`).
    L,
}

/// A directed edge with its metric pair. Weights are exact non-negative
/// rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub w_s: Rat,
    pub w_l: Rat,
}

impl Edge {
    pub fn new(id: EdgeId, tail: VertexId, head: VertexId, w_s: Rat, w_l: Rat) -> Result<Self> {
        if w_s.is_negative() || w_l.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "edge {id}: weights must be non-negative, got ({}, {})",
                format_rat(&w_s),
                format_rat(&w_l)
            )));
        }
        Ok(Self { id, tail, head, w_s, w_l })
    }

    pub fn weight(&self, metric: Metric) -> &Rat {
        match metric {
            Metric::S => &self.w_s,
            Metric::L => &self.w_l,
        }
    }
}

/// Immutable directed multigraph. Edges are stored in ascending id order and
/// the per-vertex adjacency lists hold edge indices in the same order, which
/// fixes the deterministic expansion order used everywhere downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: u32,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: u32, mut edges: Vec<Edge>) -> Result<Self> {
        edges.sort_by_key(|e| e.id);
        for pair in edges.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge id {}",
                    pair[0].id
                )));
            }
        }
        let mut outgoing = vec![Vec::new(); vertex_count as usize];
        for (idx, edge) in edges.iter().enumerate() {
            if edge.tail.0 >= vertex_count || edge.head.0 >= vertex_count {
                return Err(Error::InvalidParameter(format!(
                    "edge {} references a vertex outside 0..{vertex_count}",
                    edge.id
                )));
            }
            outgoing[edge.tail.0 as usize].push(idx);
        }
        Ok(Self { vertex_count, edges, outgoing })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count).map(VertexId)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        v.0 < self.vertex_count
    }

    /// All edges, ascending by id. An edge's position in this slice is its
    /// dense index, used by the scaled weight tables and the search.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edge_index(id).map(|idx| &self.edges[idx])
    }

    pub fn edge_at(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    /// Outgoing edge indices of `v`, ascending by edge id.
    pub fn outgoing(&self, v: VertexId) -> &[usize] {
        &self.outgoing[v.0 as usize]
    }
}

/// A routing request: find a path from `source` to `target` whose cost sum is
/// at most `bound_s` while its resource sum is at least `bound_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub source: VertexId,
    pub target: VertexId,
    pub bound_s: Rat,
    pub bound_l: Rat,
}

impl Request {
    /// Both bounds must be strictly positive; the scaling transform divides
    /// by them, and a zero resource bound would degenerate the problem to a
    /// plain shortest path.
    pub fn new(source: VertexId, target: VertexId, bound_s: Rat, bound_l: Rat) -> Result<Self> {
        if !bound_s.is_positive() || !bound_l.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "request bounds must be strictly positive, got ({}, {})",
                format_rat(&bound_s),
                format_rat(&bound_l)
            )));
        }
        Ok(Self { source, target, bound_s, bound_l })
    }
}

/// An ordered edge sequence. A walk is contiguous when the head of each edge
/// equals the tail of the next; it is a trail when additionally no edge id
/// repeats. The empty walk is a legal walk from any vertex to itself.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Walk {
    edges: Vec<EdgeId>,
}

impl Walk {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(edges: Vec<EdgeId>) -> Self {
        Self { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, id) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

/// Why a walk fails to be a trail (or a walk at all).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkDefect {
    UnknownEdge(EdgeId),
    /// Edge at `position` does not start where the previous edge ended.
    Discontiguous { position: usize },
    RepeatedEdge(EdgeId),
}

impl fmt::Display for WalkDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkDefect::UnknownEdge(id) => write!(f, "edge {id} is not in the graph"),
            WalkDefect::Discontiguous { position } => {
                write!(f, "edge at position {position} does not continue the walk")
            }
            WalkDefect::RepeatedEdge(id) => write!(f, "edge {id} is used more than once"),
        }
    }
}

fn resolve_contiguous<'g>(graph: &'g Graph, walk: &Walk) -> Result<Vec<&'g Edge>> {
    let mut resolved = Vec::with_capacity(walk.len());
    for (pos, id) in walk.edges().iter().enumerate() {
        let edge = graph
            .edge(*id)
            .ok_or_else(|| Error::MalformedWalk(WalkDefect::UnknownEdge(*id).to_string()))?;
        if let Some(prev) = resolved.last() {
            let prev: &&Edge = prev;
            if prev.head != edge.tail {
                return Err(Error::MalformedWalk(
                    WalkDefect::Discontiguous { position: pos }.to_string(),
                ));
            }
        }
        resolved.push(edge);
    }
    Ok(resolved)
}

/// Both metric sums of a contiguous walk, with multiplicity for repeated
/// edges. Errors on unknown edge ids or broken contiguity.
pub fn walk_sums(graph: &Graph, walk: &Walk) -> Result<(Rat, Rat)> {
    let edges = resolve_contiguous(graph, walk)?;
    let mut s = Rat::zero();
    let mut l = Rat::zero();
    for edge in edges {
        s += &edge.w_s;
        l += &edge.w_l;
    }
    Ok((s, l))
}

/// Sum of one metric over a contiguous walk; the empty walk sums to zero.
pub fn path_weight(graph: &Graph, walk: &Walk, metric: Metric) -> Result<Rat> {
    let (s, l) = walk_sums(graph, walk)?;
    Ok(match metric {
        Metric::S => s,
        Metric::L => l,
    })
}

/// Endpoints `(start, end)` of a contiguous walk; `None` for the empty walk,
/// whose endpoints are indeterminate.
pub fn walk_endpoints(graph: &Graph, walk: &Walk) -> Result<Option<(VertexId, VertexId)>> {
    let edges = resolve_contiguous(graph, walk)?;
    Ok(match (edges.first(), edges.last()) {
        (Some(first), Some(last)) => Some((first.tail, last.head)),
        _ => None,
    })
}

fn check_endpoints(graph: &Graph, walk: &Walk, request: &Request) -> Result<()> {
    match walk_endpoints(graph, walk)? {
        None => {
            if request.source != request.target {
                return Err(Error::EndpointMismatch(format!(
                    "empty walk cannot connect {} to {}",
                    request.source, request.target
                )));
            }
        }
        Some((start, end)) => {
            if start != request.source || end != request.target {
                return Err(Error::EndpointMismatch(format!(
                    "walk runs {start} -> {end}, request asks {} -> {}",
                    request.source, request.target
                )));
            }
        }
    }
    Ok(())
}

/// Exact feasibility: `w_S(p) <= W_S` and `w_L(p) >= W_L`, boundary equality
/// included.
pub fn is_feasible(graph: &Graph, walk: &Walk, request: &Request) -> Result<bool> {
    check_endpoints(graph, walk, request)?;
    let (s, l) = walk_sums(graph, walk)?;
    Ok(s <= request.bound_s && l >= request.bound_l)
}

/// Validates an approximation factor, which must lie in `(0, 1]`.
pub fn check_epsilon(epsilon: &Rat) -> Result<()> {
    if !epsilon.is_positive() || epsilon > &Rat::one() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {}",
            format_rat(epsilon)
        )));
    }
    Ok(())
}

/// Relaxed feasibility: `w_S(p) <= (1+eps)*W_S` and `w_L(p) >= (1-eps)*W_L`.
pub fn is_approximately_feasible(
    graph: &Graph,
    walk: &Walk,
    request: &Request,
    epsilon: &Rat,
) -> Result<bool> {
    check_epsilon(epsilon)?;
    check_endpoints(graph, walk, request)?;
    let (s, l) = walk_sums(graph, walk)?;
    let one = Rat::one();
    Ok(s <= (&one + epsilon) * &request.bound_s && l >= (&one - epsilon) * &request.bound_l)
}

/// Reason the walk is not a trail, or `None` when it is one.
pub fn trail_defect(graph: &Graph, walk: &Walk) -> Option<WalkDefect> {
    let mut prev_head: Option<VertexId> = None;
    let mut seen = std::collections::HashSet::with_capacity(walk.len());
    for (pos, id) in walk.edges().iter().enumerate() {
        let Some(edge) = graph.edge(*id) else {
            return Some(WalkDefect::UnknownEdge(*id));
        };
        if let Some(head) = prev_head {
            if head != edge.tail {
                return Some(WalkDefect::Discontiguous { position: pos });
            }
        }
        if !seen.insert(*id) {
            return Some(WalkDefect::RepeatedEdge(*id));
        }
        prev_head = Some(edge.head);
    }
    None
}

/// True iff the walk is contiguous and repeats no edge id. Malformed input
/// yields `false`; use [`trail_defect`] for the reason.
pub fn validate_trail(graph: &Graph, walk: &Walk) -> bool {
    trail_defect(graph, walk).is_none()
}
