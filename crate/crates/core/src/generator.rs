//! Seeded instance generators for fuzzing and benchmarks.
//!
//! Determinism contract: the same `GenParams` produce the same instance on
//! every platform. The PRNG is ChaCha8 seeded with the 64-bit seed; it is
//! pinned by algorithm, not by library version.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Edge, EdgeId, Graph, Request, VertexId};
use crate::rat::Rat;

/// How request bounds are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundPolicy {
    /// Sample a random walk from source to target and use its weight sums as
    /// the bounds, making the instance exactly feasible by construction.
    FromRandomPath,
    /// Use the given bounds verbatim.
    Fixed { bound_s: Rat, bound_l: Rat },
}

/// Graph shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// Arbitrary multigraph: every edge picks its endpoints uniformly.
    UniformRandom,
    /// Vertices split into consecutive groups; edges only go from one group
    /// to the next, so the graph is acyclic.
    LayeredDag { layers: u32 },
    /// A chain of domains. Each domain is a full mesh over its border
    /// vertices (virtual intra-domain edges with positive resource), and
    /// consecutive domains are joined by a complete bipartite layer of
    /// inter-domain links with unit cost and zero resource.
    MultiDomain {
        domains: u32,
        borders_per_domain: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    /// Vertex count; derived from the structure for multi-domain.
    pub n: u32,
    /// Edge count, met exactly for uniform-random and layered-dag; derived
    /// from the structure for multi-domain.
    pub m: u32,
    /// Inclusive integer range for cost weights.
    pub w_s_range: (u64, u64),
    /// Inclusive integer range for resource weights.
    pub w_l_range: (u64, u64),
    pub bound_policy: BoundPolicy,
    pub structure: Structure,
}

fn int_rat(value: u64) -> Rat {
    Rat::from_integer(value.into())
}

fn check_range(name: &str, range: (u64, u64)) -> Result<()> {
    if range.0 > range.1 {
        return Err(Error::InvalidParameter(format!(
            "{name} range {}..={} is empty",
            range.0, range.1
        )));
    }
    Ok(())
}

/// Weight sums of the edges at `spine` positions in `edges`.
fn spine_sums(edges: &[Edge], spine: &[usize]) -> (Rat, Rat) {
    let mut s = Rat::from_integer(0.into());
    let mut l = Rat::from_integer(0.into());
    for &idx in spine {
        s += &edges[idx].w_s;
        l += &edges[idx].w_l;
    }
    (s, l)
}

/// Deterministically generates an instance from `params`; see the type docs
/// for the structural guarantees of each shape.
pub fn generate(params: &GenParams) -> Result<(Graph, Request)> {
    check_range("cost weight", params.w_s_range)?;
    check_range("resource weight", params.w_l_range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    match params.structure {
        Structure::UniformRandom => generate_uniform(params, &mut rng),
        Structure::LayeredDag { layers } => generate_layered(params, layers, &mut rng),
        Structure::MultiDomain {
            domains,
            borders_per_domain,
        } => generate_multi_domain(params, domains, borders_per_domain, &mut rng),
    }
}

fn sample_weight(rng: &mut ChaCha8Rng, range: (u64, u64)) -> Rat {
    int_rat(rng.random_range(range.0..=range.1))
}

/// Draws weights for the spine edges. When the bounds come from the spine,
/// redraws until both sums are positive so they qualify as request bounds;
/// this needs both ranges to admit positive values.
fn sample_spine_weights(
    params: &GenParams,
    rng: &mut ChaCha8Rng,
    spine_len: usize,
) -> Result<Vec<(Rat, Rat)>> {
    let draw = |rng: &mut ChaCha8Rng| -> Vec<(Rat, Rat)> {
        (0..spine_len)
            .map(|_| {
                (
                    sample_weight(rng, params.w_s_range),
                    sample_weight(rng, params.w_l_range),
                )
            })
            .collect()
    };
    if matches!(params.bound_policy, BoundPolicy::Fixed { .. }) {
        return Ok(draw(rng));
    }
    if params.w_s_range.1 == 0 || params.w_l_range.1 == 0 {
        return Err(Error::InvalidParameter(
            "bounds from a random path need weight ranges that allow positive values".to_string(),
        ));
    }
    for _ in 0..64 {
        let weights = draw(rng);
        let zero = Rat::from_integer(0.into());
        let s: Rat = weights.iter().map(|(s, _)| s).sum();
        let l: Rat = weights.iter().map(|(_, l)| l).sum();
        if s > zero && l > zero {
            return Ok(weights);
        }
    }
    Err(Error::InvalidParameter(
        "could not sample a spine with positive weight sums".to_string(),
    ))
}

fn build_request(
    params: &GenParams,
    source: VertexId,
    target: VertexId,
    spine: (&[Edge], &[usize]),
) -> Result<Request> {
    match &params.bound_policy {
        BoundPolicy::Fixed { bound_s, bound_l } => {
            Request::new(source, target, bound_s.clone(), bound_l.clone())
        }
        BoundPolicy::FromRandomPath => {
            let (s, l) = spine_sums(spine.0, spine.1);
            Request::new(source, target, s, l)
        }
    }
}

fn generate_uniform(params: &GenParams, rng: &mut ChaCha8Rng) -> Result<(Graph, Request)> {
    let (n, m) = (params.n, params.m);
    if n < 2 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "uniform-random needs n >= 2 and m >= 1, got n={n}, m={m}"
        )));
    }
    let source = VertexId(rng.random_range(0..n));
    let target = loop {
        let v = VertexId(rng.random_range(0..n));
        if v != source {
            break v;
        }
    };
    // Spine: a walk from source to target whose edges get ids 1..=k. Its
    // vertices may repeat but its edges are fresh, so it is always a trail.
    let spine_len = rng.random_range(1..=m.min(n)) as usize;
    let mut vertices = vec![source];
    for _ in 1..spine_len {
        vertices.push(VertexId(rng.random_range(0..n)));
    }
    vertices.push(target);

    let spine_weights = sample_spine_weights(params, rng, spine_len)?;
    let mut edges = Vec::with_capacity(m as usize);
    for (i, (w_s, w_l)) in spine_weights.into_iter().enumerate() {
        edges.push(Edge::new(
            EdgeId(i as u32 + 1),
            vertices[i],
            vertices[i + 1],
            w_s,
            w_l,
        )?);
    }
    for id in spine_len as u32 + 1..=m {
        let tail = VertexId(rng.random_range(0..n));
        let head = VertexId(rng.random_range(0..n));
        edges.push(Edge::new(
            EdgeId(id),
            tail,
            head,
            sample_weight(rng, params.w_s_range),
            sample_weight(rng, params.w_l_range),
        )?);
    }
    let spine: Vec<usize> = (0..spine_len).collect();
    let request = build_request(params, source, target, (&edges, &spine))?;
    Ok((Graph::new(n, edges)?, request))
}

/// Group of vertex `v` when 0..n is split into `layers` consecutive chunks
/// of near-equal size; returns the half-open vertex range of group `g`.
fn group_range(n: u32, layers: u32, g: u32) -> (u32, u32) {
    let base = n / layers;
    let extra = n % layers;
    let start = g * base + g.min(extra);
    let len = base + u32::from(g < extra);
    (start, start + len)
}

fn pick_in_group(rng: &mut ChaCha8Rng, n: u32, layers: u32, g: u32) -> VertexId {
    let (lo, hi) = group_range(n, layers, g);
    VertexId(rng.random_range(lo..hi))
}

fn generate_layered(
    params: &GenParams,
    layers: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(Graph, Request)> {
    let (n, m) = (params.n, params.m);
    if layers < 2 || n < layers || m < layers - 1 {
        return Err(Error::InvalidParameter(format!(
            "layered-dag needs 2 <= layers <= n and m >= layers-1, got n={n}, m={m}, layers={layers}"
        )));
    }
    let source = pick_in_group(rng, n, layers, 0);
    let target = pick_in_group(rng, n, layers, layers - 1);
    // Spine: one vertex per group, giving a guaranteed source-target path.
    let mut vertices = vec![source];
    for g in 1..layers - 1 {
        vertices.push(pick_in_group(rng, n, layers, g));
    }
    vertices.push(target);
    let spine_len = (layers - 1) as usize;

    let spine_weights = sample_spine_weights(params, rng, spine_len)?;
    let mut edges = Vec::with_capacity(m as usize);
    for (i, (w_s, w_l)) in spine_weights.into_iter().enumerate() {
        edges.push(Edge::new(
            EdgeId(i as u32 + 1),
            vertices[i],
            vertices[i + 1],
            w_s,
            w_l,
        )?);
    }
    for id in spine_len as u32 + 1..=m {
        let g = rng.random_range(0..layers - 1);
        let tail = pick_in_group(rng, n, layers, g);
        let head = pick_in_group(rng, n, layers, g + 1);
        edges.push(Edge::new(
            EdgeId(id),
            tail,
            head,
            sample_weight(rng, params.w_s_range),
            sample_weight(rng, params.w_l_range),
        )?);
    }
    let spine: Vec<usize> = (0..spine_len).collect();
    let request = build_request(params, source, target, (&edges, &spine))?;
    Ok((Graph::new(n, edges)?, request))
}

fn generate_multi_domain(
    params: &GenParams,
    domains: u32,
    borders: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(Graph, Request)> {
    if domains < 1 || borders < 2 {
        return Err(Error::InvalidParameter(format!(
            "multi-domain needs domains >= 1 and borders >= 2, got {domains} and {borders}"
        )));
    }
    if params.w_l_range.1 == 0 {
        return Err(Error::InvalidParameter(
            "multi-domain intra-domain edges need a resource range allowing positive values"
                .to_string(),
        ));
    }
    let n = domains * borders;
    let border = |d: u32, b: u32| VertexId(d * borders + b);
    let intra_l = (params.w_l_range.0.max(1), params.w_l_range.1);

    let mut edges = Vec::new();
    let mut next_id = 1u32;
    let mut push = |edges: &mut Vec<Edge>, tail, head, w_s, w_l| -> Result<()> {
        edges.push(Edge::new(EdgeId(next_id), tail, head, w_s, w_l)?);
        next_id += 1;
        Ok(())
    };
    for d in 0..domains {
        // Full mesh of virtual edges inside the domain.
        for x in 0..borders {
            for y in 0..borders {
                if x != y {
                    push(
                        &mut edges,
                        border(d, x),
                        border(d, y),
                        sample_weight(rng, params.w_s_range),
                        sample_weight(rng, intra_l),
                    )?;
                }
            }
        }
        // Complete bipartite inter-domain links to the next domain.
        if d + 1 < domains {
            for x in 0..borders {
                for y in 0..borders {
                    push(
                        &mut edges,
                        border(d, x),
                        border(d + 1, y),
                        int_rat(1),
                        int_rat(0),
                    )?;
                }
            }
        }
    }

    let source = border(0, rng.random_range(0..borders));
    let target = if domains == 1 {
        loop {
            let t = border(0, rng.random_range(0..borders));
            if t != source {
                break t;
            }
        }
    } else {
        border(domains - 1, rng.random_range(0..borders))
    };

    // Spine: one intra hop in the entry domain (securing a positive resource
    // sum), an inter hop per domain boundary, and a final intra hop to the
    // target if needed.
    let mut lookup = std::collections::HashMap::new();
    for (idx, e) in edges.iter().enumerate() {
        lookup.entry((e.tail, e.head)).or_insert(idx);
    }
    let mut spine = Vec::new();
    let mut cur = source;
    if domains == 1 {
        spine.push(lookup[&(cur, target)]);
    } else {
        let hop = loop {
            let b = border(0, rng.random_range(0..borders));
            if b != cur {
                break b;
            }
        };
        spine.push(lookup[&(cur, hop)]);
        cur = hop;
        for d in 1..domains {
            let next = border(d, rng.random_range(0..borders));
            spine.push(lookup[&(cur, next)]);
            cur = next;
        }
        if cur != target {
            spine.push(lookup[&(cur, target)]);
        }
    }

    let request = match &params.bound_policy {
        BoundPolicy::Fixed { .. } => build_request(params, source, target, (&edges, &spine))?,
        BoundPolicy::FromRandomPath => {
            let (s, l) = spine_sums(&edges, &spine);
            // Inter-domain hops cost 1 each, so s is positive whenever there
            // are two or more domains; a single all-zero-cost domain still
            // needs a positive cost bound, and raising it keeps the spine
            // feasible.
            let s = s.max(int_rat(1));
            Request::new(source, target, s, l)?
        }
    };
    Ok((Graph::new(n, edges)?, request))
}
