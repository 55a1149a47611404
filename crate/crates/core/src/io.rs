//! Instance text format and the JSON result report.
//!
//! Instance grammar, line oriented, `#` starts a comment line:
//!
//! ```text
//! slp 1
//! g <n> <m>
//! e <id> <tail> <head> <w_s> <w_l>     (exactly m lines)
//! r <s> <t> <W_S> <W_L>                (exactly one line)
//! ```
//!
//! Numbers are exact rationals: integers, decimals, or `a/b`. Serialization
//! is canonical (reduced rationals, edges ascending by id), so parse then
//! serialize then parse is the identity on instances.

use num_traits::Signed;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Edge, EdgeId, Graph, Request, VertexId, Walk};
use crate::rat::{format_rat, parse_rat, Rat};
use crate::solver::{verification_checks, PathResult, SolveStatus, VerificationChecks};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn take<'a>(fields: &mut impl Iterator<Item = &'a str>, line: usize, what: &str) -> Result<&'a str> {
    fields.next().ok_or_else(|| err(line, format!("missing {what}")))
}

fn parse_u32(token: &str, line: usize, what: &str) -> Result<u32> {
    token
        .parse()
        .map_err(|_| err(line, format!("{what} '{token}' is not a non-negative integer")))
}

fn parse_weight(token: &str, line: usize, what: &str) -> Result<Rat> {
    let value = parse_rat(token).map_err(|e| err(line, format!("{what}: {e}")))?;
    if value.is_negative() {
        return Err(err(line, format!("{what} must be non-negative, got {token}")));
    }
    Ok(value)
}

fn reject_extras<'a>(fields: &mut impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match fields.next() {
        Some(extra) => Err(err(line, format!("unexpected trailing field '{extra}'"))),
        None => Ok(()),
    }
}

/// Parses the instance grammar with line-accurate errors.
pub fn parse_instance(text: &str) -> Result<(Graph, Request)> {
    let mut header_seen = false;
    let mut shape: Option<(u32, u32)> = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen_ids = std::collections::HashMap::new();
    let mut request: Option<Request> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if !header_seen {
            if content != "slp 1" {
                return Err(err(line, format!("expected header 'slp 1', got '{content}'")));
            }
            header_seen = true;
            continue;
        }
        let mut fields = content.split_whitespace();
        let directive = fields.next().expect("non-empty line");
        match directive {
            "g" => {
                if shape.is_some() {
                    return Err(err(line, "duplicate graph line"));
                }
                let n = parse_u32(take(&mut fields, line, "vertex count")?, line, "vertex count")?;
                let m = parse_u32(take(&mut fields, line, "edge count")?, line, "edge count")?;
                reject_extras(&mut fields, line)?;
                shape = Some((n, m));
            }
            "e" => {
                let Some((n, m)) = shape else {
                    return Err(err(line, "edge line before the graph line"));
                };
                if edges.len() as u32 == m {
                    return Err(err(line, format!("more than {m} edge lines")));
                }
                let id = parse_u32(take(&mut fields, line, "edge id")?, line, "edge id")?;
                let tail = parse_u32(take(&mut fields, line, "tail vertex")?, line, "tail vertex")?;
                let head = parse_u32(take(&mut fields, line, "head vertex")?, line, "head vertex")?;
                let w_s = parse_weight(take(&mut fields, line, "cost weight")?, line, "cost weight")?;
                let w_l = parse_weight(
                    take(&mut fields, line, "resource weight")?,
                    line,
                    "resource weight",
                )?;
                reject_extras(&mut fields, line)?;
                if let Some(first) = seen_ids.insert(id, line) {
                    return Err(err(line, format!("edge id {id} already used on line {first}")));
                }
                if tail >= n || head >= n {
                    return Err(err(line, format!("edge endpoints must lie in 0..{n}")));
                }
                edges.push(Edge::new(EdgeId(id), VertexId(tail), VertexId(head), w_s, w_l)?);
            }
            "r" => {
                let Some((n, _)) = shape else {
                    return Err(err(line, "request line before the graph line"));
                };
                if request.is_some() {
                    return Err(err(line, "duplicate request line"));
                }
                let s = parse_u32(take(&mut fields, line, "source")?, line, "source")?;
                let t = parse_u32(take(&mut fields, line, "target")?, line, "target")?;
                let bound_s = parse_weight(take(&mut fields, line, "cost bound")?, line, "cost bound")?;
                let bound_l = parse_weight(
                    take(&mut fields, line, "resource bound")?,
                    line,
                    "resource bound",
                )?;
                reject_extras(&mut fields, line)?;
                if s >= n || t >= n {
                    return Err(err(line, format!("request endpoints must lie in 0..{n}")));
                }
                request = Some(
                    Request::new(VertexId(s), VertexId(t), bound_s, bound_l)
                        .map_err(|e| err(line, e.to_string()))?,
                );
            }
            other => {
                return Err(err(line, format!("unknown directive '{other}'")));
            }
        }
    }

    let eof = last_line + 1;
    if !header_seen {
        return Err(err(eof, "missing header 'slp 1'"));
    }
    let Some((n, m)) = shape else {
        return Err(err(eof, "missing graph line"));
    };
    if edges.len() as u32 != m {
        return Err(err(eof, format!("expected {m} edge lines, found {}", edges.len())));
    }
    let Some(request) = request else {
        return Err(err(eof, "missing request line"));
    };
    Ok((Graph::new(n, edges)?, request))
}

/// Canonical text form of an instance.
pub fn serialize_instance(graph: &Graph, request: &Request) -> String {
    let mut out = String::from("slp 1\n");
    out.push_str(&format!("g {} {}\n", graph.vertex_count(), graph.edge_count()));
    for e in graph.edges() {
        out.push_str(&format!(
            "e {} {} {} {} {}\n",
            e.id,
            e.tail,
            e.head,
            format_rat(&e.w_s),
            format_rat(&e.w_l)
        ));
    }
    out.push_str(&format!(
        "r {} {} {} {}\n",
        request.source,
        request.target,
        format_rat(&request.bound_s),
        format_rat(&request.bound_l)
    ));
    out
}

fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Solved => "solved",
        SolveStatus::NoSolution => "no-solution",
    }
}

/// Self-contained JSON report for a solve outcome. All verification booleans
/// are recomputed from the instance here, so a third party holding the
/// instance file can redo the same checks. `wall_seconds` is the only
/// non-deterministic field.
pub fn build_report(
    graph: &Graph,
    request: &Request,
    result: &PathResult,
    wall_seconds: f64,
) -> Value {
    let checks = verification_checks(
        graph,
        request,
        &result.epsilon,
        result.status,
        result.walk.as_ref(),
    );
    let walk = result
        .walk
        .as_ref()
        .map(|w| Value::Array(w.edges().iter().map(|e| json!(e.0)).collect()))
        .unwrap_or(Value::Null);
    json!({
        "format": "slp-report",
        "version": 1,
        "status": status_str(result.status),
        "epsilon": format_rat(&result.epsilon),
        "tau": format_rat(&result.tau),
        "tau_ceil": result.tau_ceil,
        "walk": walk,
        "raw_s": format_rat(&result.raw_s),
        "raw_l": format_rat(&result.raw_l),
        "scaled_s": result.scaled_s,
        "scaled_l_clamped": result.scaled_l_clamped,
        "verification": {
            "trail_valid": checks.trail_valid,
            "approx_feasible": checks.approx_feasible,
            "scaled_resource_met": checks.scaled_resource_met,
            "scaled_cost_met": checks.scaled_cost_met,
        },
        "diagnostics": {
            "states_settled": result.diagnostics.states_settled,
            "relaxations": result.diagnostics.relaxations,
            "erd_rejections": result.diagnostics.erd_rejections,
            "queue_pushes": result.diagnostics.queue_pushes,
        },
        "wall_seconds": wall_seconds,
    })
}

/// A report read back from disk, sufficient to re-run verification.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub status: SolveStatus,
    pub walk: Option<Walk>,
    pub epsilon: Rat,
    pub tau: Rat,
    pub tau_ceil: u64,
    pub raw_s: Rat,
    pub raw_l: Rat,
    pub scaled_s: u64,
    pub scaled_l_clamped: u64,
    pub verification: VerificationChecks,
}

fn report_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        msg: msg.into(),
    }
}

fn get<'v>(value: &'v Value, key: &str) -> Result<&'v Value> {
    value
        .get(key)
        .ok_or_else(|| report_err(format!("report is missing '{key}'")))
}

fn get_rat(value: &Value, key: &str) -> Result<Rat> {
    let s = get(value, key)?
        .as_str()
        .ok_or_else(|| report_err(format!("'{key}' must be a string rational")))?;
    parse_rat(s).map_err(|e| report_err(format!("'{key}': {e}")))
}

fn get_u64(value: &Value, key: &str) -> Result<u64> {
    get(value, key)?
        .as_u64()
        .ok_or_else(|| report_err(format!("'{key}' must be a non-negative integer")))
}

fn get_bool(value: &Value, key: &str) -> Result<bool> {
    get(value, key)?
        .as_bool()
        .ok_or_else(|| report_err(format!("'{key}' must be a boolean")))
}

/// Parses a report produced by [`build_report`].
pub fn parse_report(text: &str) -> Result<ParsedReport> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| report_err(format!("bad JSON: {e}")))?;
    if get(&value, "format")?.as_str() != Some("slp-report") {
        return Err(report_err("not an slp-report document"));
    }
    if get_u64(&value, "version")? != 1 {
        return Err(report_err("unsupported report version"));
    }
    let status = match get(&value, "status")?.as_str() {
        Some("solved") => SolveStatus::Solved,
        Some("no-solution") => SolveStatus::NoSolution,
        other => return Err(report_err(format!("unknown status {other:?}"))),
    };
    let walk = match get(&value, "walk")? {
        Value::Null => None,
        Value::Array(ids) => {
            let mut edges = Vec::with_capacity(ids.len());
            for id in ids {
                let id = id
                    .as_u64()
                    .and_then(|v| u32::try_from(v).ok())
                    .ok_or_else(|| report_err("walk entries must be edge ids"))?;
                edges.push(EdgeId(id));
            }
            Some(Walk::new(edges))
        }
        _ => return Err(report_err("'walk' must be null or an array of edge ids")),
    };
    let verification = get(&value, "verification")?;
    Ok(ParsedReport {
        status,
        walk,
        epsilon: get_rat(&value, "epsilon")?,
        tau: get_rat(&value, "tau")?,
        tau_ceil: get_u64(&value, "tau_ceil")?,
        raw_s: get_rat(&value, "raw_s")?,
        raw_l: get_rat(&value, "raw_l")?,
        scaled_s: get_u64(&value, "scaled_s")?,
        scaled_l_clamped: get_u64(&value, "scaled_l_clamped")?,
        verification: VerificationChecks {
            trail_valid: get_bool(verification, "trail_valid")?,
            approx_feasible: get_bool(verification, "approx_feasible")?,
            scaled_resource_met: get_bool(verification, "scaled_resource_met")?,
            scaled_cost_met: get_bool(verification, "scaled_cost_met")?,
        },
    })
}
