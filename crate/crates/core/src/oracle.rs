//! Brute-force ground truth at desk scale.
//!
//! Exhaustive enumeration over the trail universe decides exact and relaxed
//! feasibility by inspection. The problem is NP-complete, so a hard edge
//! limit keeps accidental blowups loud instead of slow, and the solver is
//! validated against these verdicts only on small instances.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{self, EdgeId, Graph, Request, VertexId, Walk};
use crate::rat::Rat;

/// Refuse exhaustive enumeration above this many edges unless the caller
/// raises the limit explicitly.
pub const DEFAULT_EDGE_LIMIT: usize = 20;

/// Emit a one-time stderr warning when a single enumeration crosses this
/// many trails.
const TRAIL_WARN_CAP: u64 = 1_000_000;

struct Frame {
    vertex: VertexId,
    out_pos: usize,
    /// Dense index of the edge that led into this frame; `None` at the root.
    in_edge: Option<usize>,
}

/// Depth-first enumeration of every trail from `source` to `target` with at
/// most `max_edges` edges. Each trail is yielded exactly once, in preorder
/// with outgoing edges tried in ascending id order; the empty trail comes
/// first when source equals target. Termination is guaranteed because a
/// trail has at most m edges.
pub struct Trails<'g> {
    graph: &'g Graph,
    target: VertexId,
    max_edges: usize,
    stack: Vec<Frame>,
    walk: Vec<EdgeId>,
    used: Vec<bool>,
    emitted: u64,
    pending_empty: bool,
    warned: bool,
}

pub fn enumerate_trails(
    graph: &Graph,
    source: VertexId,
    target: VertexId,
    max_edges: usize,
) -> Trails<'_> {
    let valid = graph.has_vertex(source) && graph.has_vertex(target);
    Trails {
        graph,
        target,
        max_edges,
        stack: if valid {
            vec![Frame {
                vertex: source,
                out_pos: 0,
                in_edge: None,
            }]
        } else {
            Vec::new()
        },
        walk: Vec::new(),
        used: vec![false; graph.edge_count()],
        emitted: 0,
        pending_empty: valid && source == target,
        warned: false,
    }
}

impl Trails<'_> {
    /// Trails yielded so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    fn note_emission(&mut self) {
        self.emitted += 1;
        if !self.warned && self.emitted > TRAIL_WARN_CAP {
            self.warned = true;
            eprintln!(
                "warning: trail enumeration passed {TRAIL_WARN_CAP} trails and is still running"
            );
        }
    }
}

impl Iterator for Trails<'_> {
    type Item = Walk;

    fn next(&mut self) -> Option<Walk> {
        if self.pending_empty {
            self.pending_empty = false;
            self.note_emission();
            return Some(Walk::empty());
        }
        loop {
            let frame = self.stack.last_mut()?;
            let outs = self.graph.outgoing(frame.vertex);
            if frame.out_pos >= outs.len() {
                let done = self.stack.pop().expect("frame just inspected");
                if let Some(idx) = done.in_edge {
                    self.used[idx] = false;
                    self.walk.pop();
                }
                continue;
            }
            let edge_idx = outs[frame.out_pos];
            frame.out_pos += 1;
            if self.used[edge_idx] || self.walk.len() >= self.max_edges {
                continue;
            }
            let edge = self.graph.edge_at(edge_idx);
            self.used[edge_idx] = true;
            self.walk.push(edge.id);
            self.stack.push(Frame {
                vertex: edge.head,
                out_pos: 0,
                in_edge: Some(edge_idx),
            });
            if edge.head == self.target {
                self.note_emission();
                return Some(Walk::new(self.walk.clone()));
            }
        }
    }
}

/// Ground-truth verdict for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    /// Some trail satisfies the exact bounds.
    pub exact_feasible: bool,
    /// First exactly feasible trail in enumeration order, if any.
    pub witness: Option<Walk>,
    /// Per tested epsilon: some trail satisfies the relaxed bounds.
    pub approx_feasible_at: BTreeMap<Rat, bool>,
    /// Candidate trails examined before the verdict was complete.
    pub trails_enumerated: u64,
}

struct Predicate {
    s_max: Rat,
    l_min: Rat,
    /// None marks the exact predicate, Some(eps) a relaxed one.
    epsilon: Option<Rat>,
    witnessed: bool,
}

/// [`decide`] with the default edge limit.
pub fn decide(graph: &Graph, request: &Request, epsilons: &[Rat]) -> Result<OracleVerdict> {
    decide_with_limit(graph, request, epsilons, DEFAULT_EDGE_LIMIT)
}

/// Exhaustively decides exact feasibility plus relaxed feasibility at every
/// epsilon in `epsilons`.
///
/// The walk over the trail tree prunes subtrees whose cost sum already
/// exceeds every still-unwitnessed threshold (cost sums only grow along a
/// trail) and stops as soon as all predicates are witnessed; neither cut can
/// change a verdict or the exact witness, which stays the first feasible
/// trail in enumeration order.
pub fn decide_with_limit(
    graph: &Graph,
    request: &Request,
    epsilons: &[Rat],
    limit: usize,
) -> Result<OracleVerdict> {
    if graph.edge_count() > limit {
        return Err(Error::OracleLimit {
            edges: graph.edge_count(),
            limit,
        });
    }
    if !graph.has_vertex(request.source) || !graph.has_vertex(request.target) {
        return Err(Error::InvalidParameter(format!(
            "request endpoints {} -> {} are not vertices of the graph",
            request.source, request.target
        )));
    }
    let one = Rat::one();
    let mut predicates = vec![Predicate {
        s_max: request.bound_s.clone(),
        l_min: request.bound_l.clone(),
        epsilon: None,
        witnessed: false,
    }];
    for eps in epsilons {
        model::check_epsilon(eps)?;
        predicates.push(Predicate {
            s_max: (&one + eps) * &request.bound_s,
            l_min: (&one - eps) * &request.bound_l,
            epsilon: Some(eps.clone()),
            witnessed: false,
        });
    }

    let mut verdict = OracleVerdict {
        exact_feasible: false,
        witness: None,
        approx_feasible_at: epsilons.iter().map(|e| (e.clone(), false)).collect(),
        trails_enumerated: 0,
    };
    let prune_bound = |preds: &[Predicate]| -> Option<Rat> {
        preds
            .iter()
            .filter(|p| !p.witnessed)
            .map(|p| p.s_max.clone())
            .max()
    };
    let mut remaining = predicates.len();
    let check_arrival = |preds: &mut [Predicate],
                             verdict: &mut OracleVerdict,
                             remaining: &mut usize,
                             walk: &[EdgeId],
                             s: &Rat,
                             l: &Rat| {
        verdict.trails_enumerated += 1;
        for p in preds.iter_mut().filter(|p| !p.witnessed) {
            if s <= &p.s_max && l >= &p.l_min {
                p.witnessed = true;
                *remaining -= 1;
                match &p.epsilon {
                    None => {
                        verdict.exact_feasible = true;
                        verdict.witness = Some(Walk::new(walk.to_vec()));
                    }
                    Some(eps) => {
                        verdict.approx_feasible_at.insert(eps.clone(), true);
                    }
                }
            }
        }
    };

    // Root arrival: the empty trail when source equals target.
    let mut s_sum = Rat::zero();
    let mut l_sum = Rat::zero();
    if request.source == request.target {
        check_arrival(
            &mut predicates,
            &mut verdict,
            &mut remaining,
            &[],
            &s_sum,
            &l_sum,
        );
    }

    let mut stack = vec![Frame {
        vertex: request.source,
        out_pos: 0,
        in_edge: None,
    }];
    let mut walk: Vec<EdgeId> = Vec::new();
    let mut used = vec![false; graph.edge_count()];
    let mut threshold = prune_bound(&predicates);

    while remaining > 0 {
        let Some(frame) = stack.last_mut() else {
            break;
        };
        let outs = graph.outgoing(frame.vertex);
        if frame.out_pos >= outs.len() {
            let done = stack.pop().expect("frame just inspected");
            if let Some(idx) = done.in_edge {
                used[idx] = false;
                walk.pop();
                let edge = graph.edge_at(idx);
                s_sum -= &edge.w_s;
                l_sum -= &edge.w_l;
            }
            continue;
        }
        let edge_idx = outs[frame.out_pos];
        frame.out_pos += 1;
        if used[edge_idx] {
            continue;
        }
        let edge = graph.edge_at(edge_idx);
        let next_s = &s_sum + &edge.w_s;
        if matches!(&threshold, Some(bound) if &next_s > bound) {
            continue; // no unwitnessed predicate is reachable down this branch
        }
        used[edge_idx] = true;
        walk.push(edge.id);
        s_sum = next_s;
        l_sum += &edge.w_l;
        stack.push(Frame {
            vertex: edge.head,
            out_pos: 0,
            in_edge: Some(edge_idx),
        });
        if edge.head == request.target {
            let before = remaining;
            check_arrival(
                &mut predicates,
                &mut verdict,
                &mut remaining,
                &walk,
                &s_sum,
                &l_sum,
            );
            if remaining != before {
                threshold = prune_bound(&predicates);
            }
        }
    }
    Ok(verdict)
}
