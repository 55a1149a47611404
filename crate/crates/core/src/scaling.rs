//! The scaling-and-rounding transform.
//!
//! Both edge metrics and both request bounds are mapped onto a common integer
//! grid parameterized by `tau = m/eps`: every weight becomes
//! `ceil(w * tau / W)` and both bounds become `ceil(tau)`. Rounding up is
//! load-bearing: it is what makes reaching the top layer certify the resource
//! bound up to the `(1-eps)` slack, so no alternative rounding mode exists
//! here.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Edge, Graph, Request, Walk};
use crate::rat::{ceil_to_u64, Rat};

/// Below this edge count the per-edge scaling loop stays sequential; the
/// transform is too cheap for fork-join overhead to pay off on small graphs.
#[cfg(feature = "parallel")]
const PARALLEL_EDGE_THRESHOLD: usize = 512;

/// `tau = edge_count / epsilon` together with its ceiling.
///
/// Requires at least one edge and `epsilon` in `(0, 1]`, which also gives
/// `ceil(tau) >= edge_count >= 1`.
pub fn compute_tau(edge_count: usize, epsilon: &Rat) -> Result<(Rat, u64)> {
    crate::model::check_epsilon(epsilon)?;
    if edge_count == 0 {
        return Err(Error::InvalidParameter(
            "scaling needs at least one edge, got an empty graph".to_string(),
        ));
    }
    let tau = Rat::from_integer(edge_count.into()) / epsilon;
    let tau_ceil = ceil_to_u64(&tau, "tau")?;
    Ok((tau, tau_ceil))
}

/// An instance after the scaling transform. Scaled weights are indexed by the
/// dense edge index of [`Graph::edges`], not by edge id.
///
/// Scaled L-weights may exceed `tau_ceil`; clamping is deliberately left to
/// the layered-graph transition, the single designated clamp site.
#[derive(Debug, Clone)]
pub struct ScaledInstance<'a> {
    graph: &'a Graph,
    request: &'a Request,
    epsilon: Rat,
    tau: Rat,
    tau_ceil: u64,
    scaled_s: Vec<u64>,
    scaled_l: Vec<u64>,
}

fn scale_edge(edge: &Edge, request: &Request, tau: &Rat) -> Result<(u64, u64)> {
    let s = ceil_to_u64(
        &(&edge.w_s * tau / &request.bound_s),
        &format!("scaled cost of edge {}", edge.id),
    )?;
    let l = ceil_to_u64(
        &(&edge.w_l * tau / &request.bound_l),
        &format!("scaled resource of edge {}", edge.id),
    )?;
    Ok((s, l))
}

/// Applies the transform to every edge. The original graph is untouched and
/// the result is independent of evaluation order.
pub fn scale_instance<'a>(
    graph: &'a Graph,
    request: &'a Request,
    epsilon: &Rat,
) -> Result<ScaledInstance<'a>> {
    if !graph.has_vertex(request.source) || !graph.has_vertex(request.target) {
        return Err(Error::InvalidParameter(format!(
            "request endpoints {} -> {} are not vertices of the graph",
            request.source, request.target
        )));
    }
    let (tau, tau_ceil) = compute_tau(graph.edge_count(), epsilon)?;

    #[cfg(feature = "parallel")]
    let pairs: Vec<(u64, u64)> = if graph.edge_count() >= PARALLEL_EDGE_THRESHOLD {
        graph
            .edges()
            .par_iter()
            .map(|e| scale_edge(e, request, &tau))
            .collect::<Result<_>>()?
    } else {
        graph
            .edges()
            .iter()
            .map(|e| scale_edge(e, request, &tau))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let pairs: Vec<(u64, u64)> = graph
        .edges()
        .iter()
        .map(|e| scale_edge(e, request, &tau))
        .collect::<Result<_>>()?;

    let (scaled_s, scaled_l) = pairs.into_iter().unzip();
    Ok(ScaledInstance {
        graph,
        request,
        epsilon: epsilon.clone(),
        tau,
        tau_ceil,
        scaled_s,
        scaled_l,
    })
}

impl<'a> ScaledInstance<'a> {
    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn request(&self) -> &'a Request {
        self.request
    }

    pub fn epsilon(&self) -> &Rat {
        &self.epsilon
    }

    pub fn tau(&self) -> &Rat {
        &self.tau
    }

    /// The shared scaled bound for both metrics.
    pub fn tau_ceil(&self) -> u64 {
        self.tau_ceil
    }

    /// Scaled cost of the edge at dense index `idx`.
    pub fn scaled_s(&self, idx: usize) -> u64 {
        self.scaled_s[idx]
    }

    /// Scaled resource of the edge at dense index `idx`, unclamped.
    pub fn scaled_l(&self, idx: usize) -> u64 {
        self.scaled_l[idx]
    }

    /// Unclamped scaled sums of a contiguous walk, with multiplicity. The
    /// 128-bit result cannot overflow: each term fits 64 bits and a walk over
    /// `u32` edge ids is far shorter than 2^64 steps.
    pub fn scaled_walk_sums(&self, walk: &Walk) -> Result<(u128, u128)> {
        // Reuse the model's contiguity and membership validation.
        crate::model::walk_sums(self.graph, walk)?;
        let mut s: u128 = 0;
        let mut l: u128 = 0;
        for id in walk.edges() {
            let idx = self.graph.edge_index(*id).expect("validated above");
            s += self.scaled_s[idx] as u128;
            l += self.scaled_l[idx] as u128;
        }
        Ok((s, l))
    }
}
