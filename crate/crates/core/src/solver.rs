//! Label-setting search over the implicit layered graph, the end-to-end
//! solve pipeline, and independent result verification.
//!
//! The search is Dijkstra with one modification: a candidate extension is
//! rejected when its base edge already occurs on the recorded best path to
//! the predecessor state. That prune models single-use resources; it costs
//! completeness (a rejected extension might have been the only way forward)
//! and the pipeline is honest about that: `NoSolution` never certifies
//! infeasibility of the original instance.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_traits::Zero;

use crate::error::Result;
use crate::layered::{transition, LayeredEdge, LayeredVertex};
use crate::model::{self, Graph, Request, Walk};
use crate::rat::Rat;
use crate::scaling::{scale_instance, ScaledInstance};

/// Fixed-capacity bitset over dense edge indices. Every label carries one,
/// and improving relaxations clone it, so footprint (one bit per edge) beats
/// pointer-chasing set types here.
#[derive(Debug, Clone, PartialEq, Eq)]
struct EdgeSet {
    words: Box<[u64]>,
}

impl EdgeSet {
    fn new(edge_count: usize) -> Self {
        Self {
            words: vec![0u64; edge_count.div_ceil(64)].into_boxed_slice(),
        }
    }

    fn contains(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    fn insert(&mut self, idx: usize) {
        self.words[idx / 64] |= 1u64 << (idx % 64);
    }
}

/// Search knobs. Edge repetition detection is on by default; switching it
/// off is a diagnostic mode that exists so tests can demonstrate why the
/// prune is necessary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub detect_edge_repetition: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            detect_edge_repetition: true,
        }
    }
}

/// Expansion counters. Deterministic for identical inputs, so they take part
/// in result equality and golden tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    /// States extracted from the queue and finalized.
    pub states_settled: u64,
    /// Layered edges examined from settled states (including rejected ones).
    pub relaxations: u64,
    /// Relaxations rejected because the base edge was already on the path.
    pub erd_rejections: u64,
    /// Heap insertions (initial state plus improving relaxations).
    pub queue_pushes: u64,
}

/// A settled path to the target layer, before the cost gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub layered_path: Vec<LayeredEdge>,
    /// Scaled cost of the path; the gate compares this against `tau_ceil`.
    pub cost: u64,
}

struct Label {
    state: LayeredVertex,
    cost: u64,
    /// Predecessor label index and the dense index of the via edge. The
    /// parent is settled at relax time, so the chain is stable.
    parent: Option<(usize, usize)>,
    /// Base edges on the recorded path; absent when detection is off.
    used: Option<EdgeSet>,
    settled: bool,
}

/// Shortest scaled-cost search from `(s, 0)` toward `(t, tau_ceil)`.
///
/// Each layered state keeps a single label and is settled at most once.
/// Ties are fixed: among equal-cost frontier entries the smallest
/// (vertex id, layer) settles first, and an equal-cost relaxation never
/// replaces the label found first. Reached states are stored sparsely, so
/// memory follows the explored frontier rather than `n * tau_ceil`.
pub fn search(
    scaled: &ScaledInstance,
    options: &SearchOptions,
) -> (Option<SearchOutcome>, Diagnostics) {
    let graph = scaled.graph();
    let request = scaled.request();
    let tau_ceil = scaled.tau_ceil();
    let target = LayeredVertex::new(request.target, tau_ceil);

    let mut diagnostics = Diagnostics::default();
    let mut labels: Vec<Label> = Vec::new();
    let mut index: HashMap<(u32, u64), usize> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(u64, u32, u64)>> = BinaryHeap::new();

    let start = LayeredVertex::new(request.source, 0);
    labels.push(Label {
        state: start,
        cost: 0,
        parent: None,
        used: options.detect_edge_repetition.then(|| EdgeSet::new(graph.edge_count())),
        settled: false,
    });
    index.insert((start.vertex.0, start.layer), 0);
    heap.push(Reverse((0, start.vertex.0, start.layer)));
    diagnostics.queue_pushes += 1;

    let mut target_label: Option<usize> = None;
    #[cfg(debug_assertions)]
    let mut last_settled_cost = 0u64;

    while let Some(Reverse((cost, vertex, layer))) = heap.pop() {
        let label_idx = index[&(vertex, layer)];
        if labels[label_idx].settled || labels[label_idx].cost != cost {
            continue; // stale heap entry
        }
        labels[label_idx].settled = true;
        diagnostics.states_settled += 1;
        #[cfg(debug_assertions)]
        {
            debug_assert!(cost >= last_settled_cost, "settled costs regressed");
            last_settled_cost = cost;
        }

        let state = labels[label_idx].state;
        if state == target {
            target_label = Some(label_idx);
            break;
        }

        for &edge_idx in graph.outgoing(state.vertex) {
            diagnostics.relaxations += 1;
            if let Some(used) = &labels[label_idx].used {
                if used.contains(edge_idx) {
                    diagnostics.erd_rejections += 1;
                    continue;
                }
            }
            // Costs along an edge-unique path cannot overflow in practice;
            // with detection off a repeating walk can, and such a walk is
            // safely droppable because its cost already exceeds any gate.
            let Some(candidate) = cost.checked_add(scaled.scaled_s(edge_idx)) else {
                continue;
            };
            let edge = graph.edge_at(edge_idx);
            let to = LayeredVertex::new(
                edge.head,
                transition(state.layer, scaled.scaled_l(edge_idx), tau_ceil),
            );
            let next_idx = labels.len();
            let entry = *index.entry((to.vertex.0, to.layer)).or_insert(next_idx);
            if entry == next_idx {
                labels.push(Label {
                    state: to,
                    cost: candidate,
                    parent: Some((label_idx, edge_idx)),
                    used: None,
                    settled: false,
                });
            } else {
                if labels[entry].settled || candidate >= labels[entry].cost {
                    continue;
                }
                labels[entry].cost = candidate;
                labels[entry].parent = Some((label_idx, edge_idx));
            }
            if options.detect_edge_repetition {
                let mut used = labels[label_idx].used.clone().expect("detection on");
                used.insert(edge_idx);
                labels[entry].used = Some(used);
            }
            heap.push(Reverse((candidate, to.vertex.0, to.layer)));
            diagnostics.queue_pushes += 1;
        }
    }

    let outcome = target_label.map(|idx| {
        let cost = labels[idx].cost;
        let mut hops = Vec::new();
        let mut cursor = idx;
        while let Some((parent_idx, edge_idx)) = labels[cursor].parent {
            hops.push(LayeredEdge {
                from: labels[parent_idx].state,
                to: labels[cursor].state,
                via: graph.edge_at(edge_idx).id,
                cost: scaled.scaled_s(edge_idx),
            });
            cursor = parent_idx;
        }
        hops.reverse();
        SearchOutcome {
            layered_path: hops,
            cost,
        }
    });
    (outcome, diagnostics)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    NoSolution,
}

/// Outcome of a solve call. For `Solved`, the walk is a trail from source to
/// target satisfying the relaxed bounds; for `NoSolution` the weight fields
/// are zeroed and only `tau`, `tau_ceil`, `epsilon`, and the diagnostics
/// carry information.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub status: SolveStatus,
    pub walk: Option<Walk>,
    pub raw_s: Rat,
    pub raw_l: Rat,
    pub scaled_s: u64,
    pub scaled_l_clamped: u64,
    pub tau: Rat,
    pub tau_ceil: u64,
    pub epsilon: Rat,
    pub diagnostics: Diagnostics,
}

/// Scale, search, gate. A `Solved` result always satisfies the relaxed
/// bounds; errors are structural (bad parameters, overflow), never a silent
/// `NoSolution`.
pub fn solve(graph: &Graph, request: &Request, epsilon: &Rat) -> Result<PathResult> {
    solve_with_options(graph, request, epsilon, &SearchOptions::default())
}

/// [`solve`] with explicit search options; see [`SearchOptions`].
pub fn solve_with_options(
    graph: &Graph,
    request: &Request,
    epsilon: &Rat,
    options: &SearchOptions,
) -> Result<PathResult> {
    let scaled = scale_instance(graph, request, epsilon)?;
    let (outcome, diagnostics) = search(&scaled, options);
    let tau_ceil = scaled.tau_ceil();

    // The final gate: the settled path must also respect the scaled cost
    // bound, otherwise the answer is "no solution".
    if let Some(outcome) = outcome {
        if outcome.cost <= tau_ceil {
            let walk = crate::layered::project_to_base(&outcome.layered_path)?;
            let (raw_s, raw_l) = model::walk_sums(graph, &walk)?;
            let final_layer = outcome
                .layered_path
                .last()
                .map(|e| e.to.layer)
                .unwrap_or(0);
            debug_assert_eq!(final_layer, tau_ceil);
            return Ok(PathResult {
                status: SolveStatus::Solved,
                walk: Some(walk),
                raw_s,
                raw_l,
                scaled_s: outcome.cost,
                scaled_l_clamped: final_layer,
                tau: scaled.tau().clone(),
                tau_ceil,
                epsilon: epsilon.clone(),
                diagnostics,
            });
        }
    }
    Ok(PathResult {
        status: SolveStatus::NoSolution,
        walk: None,
        raw_s: Rat::zero(),
        raw_l: Rat::zero(),
        scaled_s: 0,
        scaled_l_clamped: 0,
        tau: scaled.tau().clone(),
        tau_ceil,
        epsilon: epsilon.clone(),
        diagnostics,
    })
}

/// The three re-verification predicates of a result, recomputed from the
/// instance. For `NoSolution` everything holds vacuously.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerificationChecks {
    /// The walk is a trail with the requested endpoints and at most m edges.
    pub trail_valid: bool,
    /// Raw sums satisfy the relaxed bounds.
    pub approx_feasible: bool,
    /// Unclamped scaled resource sum reaches the scaled bound.
    pub scaled_resource_met: bool,
    /// Scaled cost sum stays within the scaled bound.
    pub scaled_cost_met: bool,
}

impl VerificationChecks {
    pub fn all(&self) -> bool {
        self.trail_valid && self.approx_feasible && self.scaled_resource_met && self.scaled_cost_met
    }

    fn vacuous() -> Self {
        Self {
            trail_valid: true,
            approx_feasible: true,
            scaled_resource_met: true,
            scaled_cost_met: true,
        }
    }
}

/// Recomputes the verification predicates for a claimed outcome. Works from
/// the walk alone so third parties can recheck a parsed report against the
/// instance file; malformed input turns checks false instead of erroring.
pub fn verification_checks(
    graph: &Graph,
    request: &Request,
    epsilon: &Rat,
    status: SolveStatus,
    walk: Option<&Walk>,
) -> VerificationChecks {
    if status == SolveStatus::NoSolution {
        return VerificationChecks::vacuous();
    }
    let mut checks = VerificationChecks {
        trail_valid: false,
        approx_feasible: false,
        scaled_resource_met: false,
        scaled_cost_met: false,
    };
    let Some(walk) = walk else {
        return checks;
    };
    checks.trail_valid = model::validate_trail(graph, walk)
        && walk.len() <= graph.edge_count()
        && match model::walk_endpoints(graph, walk) {
            Ok(Some((start, end))) => start == request.source && end == request.target,
            Ok(None) => request.source == request.target,
            Err(_) => false,
        };
    checks.approx_feasible =
        model::is_approximately_feasible(graph, walk, request, epsilon).unwrap_or(false);
    if let Ok(scaled) = scale_instance(graph, request, epsilon) {
        if let Ok((scaled_s, scaled_l)) = scaled.scaled_walk_sums(walk) {
            let tau_ceil = scaled.tau_ceil() as u128;
            checks.scaled_resource_met = scaled_l >= tau_ceil;
            checks.scaled_cost_met = scaled_s <= tau_ceil;
        }
    }
    checks
}

/// Independent recheck of a solve result: trail validity and endpoints, raw
/// sums against the relaxed bounds, and the scaled sums against the scaled
/// bound, all recomputed from the instance. `NoSolution` verifies vacuously.
/// Any malformed or tampered field yields `false` rather than an error.
pub fn verify_result(
    graph: &Graph,
    request: &Request,
    epsilon: &Rat,
    result: &PathResult,
) -> bool {
    match result.status {
        SolveStatus::NoSolution => true,
        SolveStatus::Solved => {
            let Some(walk) = &result.walk else {
                return false;
            };
            if !verification_checks(graph, request, epsilon, result.status, Some(walk)).all() {
                return false;
            }
            // Recorded fields must match recomputation.
            let Ok((raw_s, raw_l)) = model::walk_sums(graph, walk) else {
                return false;
            };
            if raw_s != result.raw_s || raw_l != result.raw_l {
                return false;
            }
            let Ok(scaled) = scale_instance(graph, request, epsilon) else {
                return false;
            };
            let Ok((scaled_s, _)) = scaled.scaled_walk_sums(walk) else {
                return false;
            };
            scaled_s == result.scaled_s as u128
                && result.scaled_l_clamped == scaled.tau_ceil()
                && result.tau_ceil == scaled.tau_ceil()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, EdgeId, VertexId};
    use crate::rat::{rat, rat_int};
    use num_bigint::BigInt;

    fn edge(id: u32, tail: u32, head: u32, w_s: i64, w_l: i64) -> Edge {
        Edge::new(
            EdgeId(id),
            VertexId(tail),
            VertexId(head),
            rat_int(w_s),
            rat_int(w_l),
        )
        .unwrap()
    }

    fn worked() -> (Graph, Request) {
        let g = Graph::new(
            3,
            vec![edge(1, 0, 1, 1, 5), edge(2, 1, 2, 1, 5), edge(3, 0, 2, 1, 0)],
        )
        .unwrap();
        let r = Request::new(VertexId(0), VertexId(2), rat_int(3), rat_int(10)).unwrap();
        (g, r)
    }

    fn erd_instance() -> (Graph, Request) {
        let g = Graph::new(
            3,
            vec![edge(1, 0, 1, 1, 2), edge(2, 1, 0, 1, 2), edge(3, 1, 2, 1, 0)],
        )
        .unwrap();
        let r = Request::new(VertexId(0), VertexId(2), rat_int(3), rat_int(3)).unwrap();
        (g, r)
    }

    #[test]
    fn worked_instance_is_solved() {
        let (g, r) = worked();
        let result = solve(&g, &r, &rat_int(1)).unwrap();
        assert_eq!(result.status, SolveStatus::Solved);
        assert_eq!(
            result.walk,
            Some(Walk::new(vec![EdgeId(1), EdgeId(2)]))
        );
        assert_eq!(result.raw_s, rat_int(2));
        assert_eq!(result.raw_l, rat_int(10));
        assert_eq!(result.scaled_s, 2);
        assert_eq!(result.scaled_l_clamped, 3);
        assert_eq!(result.tau_ceil, 3);
        assert!(verify_result(&g, &r, &rat_int(1), &result));
        // Settle order is pinned by the tie-break: (s,0), (a,2), (t,0), (t,3).
        assert_eq!(
            result.diagnostics,
            Diagnostics {
                states_settled: 4,
                relaxations: 3,
                erd_rejections: 0,
                queue_pushes: 4,
            }
        );
    }

    #[test]
    fn erd_instance_has_no_solution() {
        let (g, r) = erd_instance();
        let result = solve(&g, &r, &rat(2, 3)).unwrap();
        assert_eq!(result.status, SolveStatus::NoSolution);
        assert_eq!(result.tau_ceil, 5);
        assert_eq!(result.diagnostics.erd_rejections, 1);
        assert!(result.walk.is_none());
        assert!(verify_result(&g, &r, &rat(2, 3), &result));
    }

    #[test]
    fn disabling_detection_reaches_the_target_with_a_repeating_walk() {
        let (g, r) = erd_instance();
        let eps = rat(2, 3);
        let scaled = scale_instance(&g, &r, &eps).unwrap();
        let options = SearchOptions {
            detect_edge_repetition: false,
        };
        let (outcome, _) = search(&scaled, &options);
        let outcome = outcome.expect("target reachable once edges may repeat");
        assert_eq!(outcome.cost, 8);
        let walk = crate::layered::project_to_base(&outcome.layered_path).unwrap();
        assert_eq!(
            walk,
            Walk::new(vec![EdgeId(1), EdgeId(2), EdgeId(1), EdgeId(3)])
        );
        assert!(!model::validate_trail(&g, &walk));
        // The cost gate still rejects that walk, so even this mode does not
        // emit it as a solution.
        let result = solve_with_options(&g, &r, &eps, &options).unwrap();
        assert_eq!(result.status, SolveStatus::NoSolution);
    }

    #[test]
    fn two_target_trails_one_within_the_cost_gate() {
        // Trails [e1,e2] and [e3,e4] both reach the top layer; only the
        // latter respects the scaled cost bound, so it is the answer.
        let g = Graph::new(
            5,
            vec![
                edge(1, 0, 1, 5, 3),
                edge(2, 1, 4, 5, 3),
                edge(3, 0, 2, 1, 3),
                edge(4, 2, 4, 1, 3),
                edge(5, 0, 3, 1, 1),
                edge(6, 3, 4, 1, 1),
            ],
        )
        .unwrap();
        let r = Request::new(VertexId(0), VertexId(4), rat_int(6), rat_int(6)).unwrap();
        let eps = rat_int(1);
        let scaled = scale_instance(&g, &r, &eps).unwrap();
        let reaches_top = |ids: &[u32]| {
            let walk = Walk::new(ids.iter().map(|i| EdgeId(*i)).collect());
            let mut layer = 0;
            for id in walk.edges() {
                let idx = g.edge_index(*id).unwrap();
                layer = transition(layer, scaled.scaled_l(idx), scaled.tau_ceil());
            }
            layer == scaled.tau_ceil()
        };
        assert!(reaches_top(&[1, 2]));
        assert!(reaches_top(&[3, 4]));
        assert!(!reaches_top(&[5, 6]));

        let result = solve(&g, &r, &eps).unwrap();
        assert_eq!(result.status, SolveStatus::Solved);
        assert_eq!(result.walk, Some(Walk::new(vec![EdgeId(3), EdgeId(4)])));
        assert_eq!(result.raw_s, rat_int(2));
        assert_eq!(result.raw_l, rat_int(6));
        assert!(verify_result(&g, &r, &eps, &result));
    }

    #[test]
    fn source_equal_target_is_unreachable() {
        let g = Graph::new(3, vec![edge(1, 1, 2, 1, 1)]).unwrap();
        let r = Request::new(VertexId(0), VertexId(0), rat_int(1), rat_int(1)).unwrap();
        let result = solve(&g, &r, &rat_int(1)).unwrap();
        assert_eq!(result.status, SolveStatus::NoSolution);
    }

    #[test]
    fn zero_weight_cycles_terminate() {
        let g = Graph::new(
            2,
            vec![edge(1, 0, 1, 0, 0), edge(2, 1, 0, 0, 0), edge(3, 0, 1, 0, 0)],
        )
        .unwrap();
        let r = Request::new(VertexId(0), VertexId(1), rat_int(1), rat_int(1)).unwrap();
        for detect in [true, false] {
            let options = SearchOptions {
                detect_edge_repetition: detect,
            };
            let result = solve_with_options(&g, &r, &rat_int(1), &options).unwrap();
            assert_eq!(result.status, SolveStatus::NoSolution);
        }
    }

    #[test]
    fn empty_graph_is_an_invalid_parameter() {
        let g = Graph::new(2, vec![]).unwrap();
        let r = Request::new(VertexId(0), VertexId(1), rat_int(1), rat_int(1)).unwrap();
        assert!(solve(&g, &r, &rat_int(1)).is_err());
    }

    #[test]
    fn oversized_costs_do_not_panic() {
        // Each edge scales to 2^63; their sum overflows u64 and is dropped,
        // which is sound because it could never pass the gate.
        let big = Rat::from_integer(BigInt::from(3u8) * (BigInt::from(1u8) << 62));
        let mk = |id, tail, head| {
            Edge::new(
                EdgeId(id),
                VertexId(tail),
                VertexId(head),
                big.clone(),
                rat_int(1),
            )
            .unwrap()
        };
        let g = Graph::new(3, vec![mk(1, 0, 1), mk(2, 1, 2)]).unwrap();
        let r = Request::new(VertexId(0), VertexId(2), rat_int(3), rat_int(2)).unwrap();
        let result = solve(&g, &r, &rat_int(1)).unwrap();
        assert_eq!(result.status, SolveStatus::NoSolution);
    }

    #[test]
    fn results_are_deterministic() {
        let (g, r) = worked();
        let a = solve(&g, &r, &rat(1, 2)).unwrap();
        let b = solve(&g, &r, &rat(1, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn verification_rejects_tampering() {
        let (g, r) = worked();
        let eps = rat_int(1);
        let good = solve(&g, &r, &eps).unwrap();
        assert!(verify_result(&g, &r, &eps, &good));

        // Swap in the low-resource walk [e3]; raw_l = 0 violates the
        // resource bound for any eps < 1, and here the recomputed sums
        // no longer match the recorded ones.
        let mut tampered = good.clone();
        tampered.walk = Some(Walk::new(vec![EdgeId(3)]));
        assert!(!verify_result(&g, &r, &eps, &tampered));

        let mut wrong_sum = good.clone();
        wrong_sum.raw_s = rat_int(99);
        assert!(!verify_result(&g, &r, &eps, &wrong_sum));

        let mut wrong_scaled = good.clone();
        wrong_scaled.scaled_s = 99;
        assert!(!verify_result(&g, &r, &eps, &wrong_scaled));

        let mut missing_walk = good.clone();
        missing_walk.walk = None;
        assert!(!verify_result(&g, &r, &eps, &missing_walk));
    }
}
