//! `slp`: solve, verify, generate, compare, and bench from the shell.
//!
//! Exit codes partition outcomes: 0 success (Solved for `solve`), 2
//! NoSolution from `solve`, 1 any error. Wall-clock timing never goes to
//! stdout, so output is byte-identical across runs with equal inputs.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use slp_core::generator::{generate, BoundPolicy, GenParams, Structure};
use slp_core::io::{build_report, parse_instance, parse_report, serialize_instance};
use slp_core::layered::transition;
use slp_core::model::walk_sums;
use slp_core::oracle::{decide_with_limit, DEFAULT_EDGE_LIMIT};
use slp_core::rat::{format_rat, parse_rat, Rat};
use slp_core::scaling::scale_instance;
use slp_core::solver::{verification_checks, verify_result};
use slp_core::{solve, Graph, Request, SolveStatus};

const ORACLE_LIMIT_VAR: &str = "SLP_ORACLE_MAX_EDGES";

#[derive(Parser)]
#[command(name = "slp", version, about = "Bicriteria shortest/longest path solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Re-check a report against its instance with exact arithmetic.
    Verify(VerifyArgs),
    /// Emit a seeded random instance in the text format.
    Generate(GenerateArgs),
    /// Run solver and exhaustive oracle side by side and report the gap.
    Compare(CompareArgs),
    /// Time the solver across an epsilon ladder and emit counters as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    input: PathBuf,
    /// Approximation factor in (0, 1]; decimals and a/b rationals accepted.
    /// Hyphen values are let through so a negative gets the range error.
    #[arg(long, value_parser = epsilon_arg, allow_hyphen_values = true)]
    epsilon: Rat,
    /// Write a JSON report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Re-verify the result and fail on any violated check.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file the report refers to.
    input: PathBuf,
    /// Report produced by `slp solve --report`.
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    /// Vertex count.
    #[arg(long)]
    n: u32,
    /// Edge count.
    #[arg(long)]
    m: u32,
    /// uniform | layered:<layers> | domains:<domains>,<borders>
    #[arg(long, default_value = "uniform", value_parser = structure_arg)]
    structure: Structure,
    /// Inclusive integer cost-weight range, as "lo,hi".
    #[arg(long, default_value = "0,10", value_parser = range_arg)]
    ws_range: (u64, u64),
    /// Inclusive integer resource-weight range, as "lo,hi".
    #[arg(long, default_value = "0,10", value_parser = range_arg)]
    wl_range: (u64, u64),
    /// Fixed request bounds "W_S,W_L"; default derives them from a random
    /// path so the instance is guaranteed feasible.
    #[arg(long, value_parser = bounds_arg)]
    bounds: Option<(Rat, Rat)>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance file; when absent, trials are generated from --seed.
    input: Option<PathBuf>,
    /// Comma-separated epsilon list.
    #[arg(long, default_value = "1,1/2,1/4,1/10")]
    epsilons: String,
    /// Number of generated instances (ignored with an explicit file).
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Vertex count for generated trials.
    #[arg(long, default_value_t = 6)]
    n: u32,
    /// Edge count for generated trials.
    #[arg(long, default_value_t = 10)]
    m: u32,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 50)]
    n: u32,
    #[arg(long, default_value_t = 150)]
    m: u32,
    /// Comma-separated epsilon ladder.
    #[arg(long, default_value = "1/5,1/10,1/20")]
    epsilon_list: String,
    /// Solves per epsilon on the same instance; counters must repeat.
    #[arg(long, default_value_t = 3)]
    repeats: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn epsilon_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s)
}

fn structure_arg(s: &str) -> Result<Structure, String> {
    if s == "uniform" {
        return Ok(Structure::UniformRandom);
    }
    if let Some(rest) = s.strip_prefix("layered:") {
        let layers: u32 = rest.parse().map_err(|_| "layer count must be an integer")?;
        return Ok(Structure::LayeredDag { layers });
    }
    if let Some(rest) = s.strip_prefix("domains:") {
        let (d, b) = rest
            .split_once(',')
            .ok_or("expected domains:<domains>,<borders>")?;
        return Ok(Structure::MultiDomain {
            domains: d.parse().map_err(|_| "domain count must be an integer")?,
            borders_per_domain: b.parse().map_err(|_| "border count must be an integer")?,
        });
    }
    Err(format!(
        "unknown structure {s:?}; expected uniform, layered:<layers>, or domains:<domains>,<borders>"
    ))
}

fn range_arg(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected \"lo,hi\"")?;
    let lo = lo.trim().parse().map_err(|_| "lo must be an integer")?;
    let hi = hi.trim().parse().map_err(|_| "hi must be an integer")?;
    Ok((lo, hi))
}

fn bounds_arg(s: &str) -> Result<(Rat, Rat), String> {
    let (a, b) = s.split_once(',').ok_or("expected \"W_S,W_L\"")?;
    Ok((parse_rat(a.trim())?, parse_rat(b.trim())?))
}

fn parse_epsilon_list(list: &str) -> Result<Vec<Rat>> {
    let mut out = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        let eps = parse_rat(part)
            .map_err(|e| anyhow::anyhow!("bad epsilon {part:?}: {e}"))?;
        out.push(eps);
    }
    if out.is_empty() {
        bail!("epsilon list is empty");
    }
    Ok(out)
}

fn load_instance(path: &PathBuf) -> Result<(Graph, Request)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn oracle_limit() -> Result<usize> {
    match std::env::var(ORACLE_LIMIT_VAR) {
        Ok(s) => s
            .parse()
            .with_context(|| format!("{ORACLE_LIMIT_VAR} must be an integer, got {s:?}")),
        Err(_) => Ok(DEFAULT_EDGE_LIMIT),
    }
}

fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Solved => "solved",
        SolveStatus::NoSolution => "no-solution",
    }
}

fn emit(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let (graph, request) = load_instance(&args.input)?;
    let started = Instant::now();
    let result = solve(&graph, &request, &args.epsilon)?;
    let wall = started.elapsed().as_secs_f64();

    println!("status: {}", status_str(result.status));
    if let Some(walk) = &result.walk {
        let ids: Vec<String> = walk.edges().iter().map(|e| e.0.to_string()).collect();
        println!("walk: {}", ids.join(" "));
        println!("raw_s: {}", format_rat(&result.raw_s));
        println!("raw_l: {}", format_rat(&result.raw_l));
        println!("scaled_s: {}", result.scaled_s);
        println!("scaled_l_clamped: {}", result.scaled_l_clamped);
    }
    println!("tau: {}", format_rat(&result.tau));
    println!("tau_ceil: {}", result.tau_ceil);
    eprintln!("wall_seconds: {wall:.6}");

    if args.verify {
        let checks = verification_checks(
            &graph,
            &request,
            &args.epsilon,
            result.status,
            result.walk.as_ref(),
        );
        println!(
            "verification: trail_valid={} approx_feasible={} scaled_resource_met={} scaled_cost_met={}",
            checks.trail_valid,
            checks.approx_feasible,
            checks.scaled_resource_met,
            checks.scaled_cost_met
        );
        if !verify_result(&graph, &request, &args.epsilon, &result) {
            bail!("verification failed for {}", args.input.display());
        }
    }

    if let Some(report_path) = &args.report {
        let report = build_report(&graph, &request, &result, wall);
        let mut text = serde_json_to_string(&report);
        text.push('\n');
        emit(Some(report_path), &text)?;
    }

    Ok(match result.status {
        SolveStatus::Solved => 0,
        SolveStatus::NoSolution => 2,
    })
}

// Pretty JSON with the map's natural (sorted) key order.
fn serde_json_to_string(value: &slp_core::serde_json::Value) -> String {
    slp_core::serde_json::to_string_pretty(value).expect("report serializes")
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let (graph, request) = load_instance(&args.input)?;
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading {}", args.report.display()))?;
    let report = parse_report(&text).with_context(|| format!("parsing {}", args.report.display()))?;

    let recomputed = verification_checks(
        &graph,
        &request,
        &report.epsilon,
        report.status,
        report.walk.as_ref(),
    );
    let pairs = [
        ("trail_valid", recomputed.trail_valid, report.verification.trail_valid),
        ("approx_feasible", recomputed.approx_feasible, report.verification.approx_feasible),
        (
            "scaled_resource_met",
            recomputed.scaled_resource_met,
            report.verification.scaled_resource_met,
        ),
        ("scaled_cost_met", recomputed.scaled_cost_met, report.verification.scaled_cost_met),
    ];
    let mut ok = true;
    for (name, now, recorded) in pairs {
        let verdict = if now == recorded { "reproduced" } else { "MISMATCH" };
        println!("{name}: {now} (report: {recorded}, {verdict})");
        ok &= now == recorded && now;
    }

    // The recorded sums and scaling constants must match a recomputation.
    let scaled = scale_instance(&graph, &request, &report.epsilon)?;
    let mut consistent = scaled.tau() == &report.tau && scaled.tau_ceil() == report.tau_ceil;
    if let Some(walk) = &report.walk {
        let (raw_s, raw_l) = walk_sums(&graph, walk)?;
        consistent &= raw_s == report.raw_s && raw_l == report.raw_l;
        let mut cost = 0u64;
        let mut layer = 0u64;
        for id in walk.edges() {
            let idx = graph
                .edge_index(*id)
                .with_context(|| format!("report walk uses unknown edge {id}"))?;
            cost = cost.saturating_add(scaled.scaled_s(idx));
            layer = transition(layer, scaled.scaled_l(idx), scaled.tau_ceil());
        }
        consistent &= cost == report.scaled_s && layer == report.scaled_l_clamped;
    }
    println!("recorded_values: {}", if consistent { "reproduced" } else { "MISMATCH" });
    ok &= consistent;

    if !ok {
        bail!("verification failed for {}", args.report.display());
    }
    println!("verification: ok");
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8> {
    let bound_policy = match &args.bounds {
        Some((s, l)) => BoundPolicy::Fixed {
            bound_s: s.clone(),
            bound_l: l.clone(),
        },
        None => BoundPolicy::FromRandomPath,
    };
    let (graph, request) = generate(&GenParams {
        seed: args.seed,
        n: args.n,
        m: args.m,
        w_s_range: args.ws_range,
        w_l_range: args.wl_range,
        bound_policy,
        structure: args.structure,
    })?;
    emit(args.out.as_ref(), &serialize_instance(&graph, &request))?;
    Ok(0)
}

fn cmd_compare(args: &CompareArgs) -> Result<u8> {
    let epsilons = parse_epsilon_list(&args.epsilons)?;
    let limit = oracle_limit()?;

    let instances: Vec<(Graph, Request)> = match &args.input {
        Some(path) => vec![load_instance(path)?],
        None => (0..args.trials)
            .map(|t| {
                generate(&GenParams {
                    seed: args.seed.wrapping_add(t as u64),
                    n: args.n,
                    m: args.m,
                    w_s_range: (0, 10),
                    w_l_range: (0, 10),
                    bound_policy: BoundPolicy::FromRandomPath,
                    structure: Structure::UniformRandom,
                })
            })
            .collect::<slp_core::Result<_>>()?,
    };

    println!("trial  epsilon  solver       oracle-exact  oracle-approx  note");
    let mut runs = 0u64;
    let mut solved = 0u64;
    let mut violations = 0u64;
    let mut exact_runs = 0u64;
    let mut missed = 0u64;
    for (trial, (graph, request)) in instances.iter().enumerate() {
        let verdict = decide_with_limit(graph, request, &epsilons, limit)?;
        for eps in &epsilons {
            let result = solve(graph, request, eps)?;
            runs += 1;
            let approx = verdict.approx_feasible_at[eps];
            let mut note = "ok";
            match result.status {
                SolveStatus::Solved => {
                    solved += 1;
                    if !approx || !verify_result(graph, request, eps, &result) {
                        note = "SOUNDNESS VIOLATION";
                        violations += 1;
                    }
                }
                SolveStatus::NoSolution => {
                    if verdict.exact_feasible {
                        note = "missed";
                    }
                }
            }
            if verdict.exact_feasible && result.status == SolveStatus::NoSolution {
                missed += 1;
            }
            if verdict.exact_feasible {
                exact_runs += 1;
            }
            println!(
                "{:<6} {:<8} {:<12} {:<13} {:<14} {}",
                trial,
                format_rat(eps),
                status_str(result.status),
                if verdict.exact_feasible { "yes" } else { "no" },
                if approx { "yes" } else { "no" },
                note,
            );
        }
    }
    let rate = if exact_runs == 0 {
        "n/a".to_string()
    } else {
        format!("{missed}/{exact_runs} ({:.2}%)", 100.0 * missed as f64 / exact_runs as f64)
    };
    println!(
        "summary: instances={} runs={runs} solved={solved} soundness-violations={violations} missed-feasible={rate}",
        instances.len(),
    );
    if violations > 0 {
        bail!("{violations} soundness violation(s); the (1+eps, 1-eps) guarantee was broken");
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let epsilons = parse_epsilon_list(&args.epsilon_list)?;
    let (graph, request) = generate(&GenParams {
        seed: args.seed,
        n: args.n,
        m: args.m,
        w_s_range: (0, 10),
        w_l_range: (0, 10),
        bound_policy: BoundPolicy::FromRandomPath,
        structure: Structure::UniformRandom,
    })?;

    let mut csv = String::from(
        "n,m,epsilon,repeat,seed,status,states_settled,relaxations,erd_rejections,queue_pushes,wall_ms\n",
    );
    for eps in &epsilons {
        for repeat in 0..args.repeats {
            let started = Instant::now();
            let result = solve(&graph, &request, eps)?;
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let d = &result.diagnostics;
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{:.3}",
                args.n,
                args.m,
                format_rat(eps),
                repeat,
                args.seed,
                status_str(result.status),
                d.states_settled,
                d.relaxations,
                d.erd_rejections,
                d.queue_pushes,
                wall_ms,
            )
            .expect("string write");
        }
    }
    emit(args.csv.as_ref(), &csv)?;
    Ok(0)
}

fn run() -> Result<u8> {
    // Clap's own usage errors exit with 2 by default, which would collide
    // with the NoSolution code; fold them into the generic error exit.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive here too and stay exit 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
