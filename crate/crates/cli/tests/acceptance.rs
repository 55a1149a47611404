//! Release acceptance suite. One test per criterion; each prints a single
//! "criterion N: PASS" line on success so the run reads as a checklist.
//!
//! Criteria 1 through 4 share a seeded 1000-instance corpus that is
//! materialized once per process and reused by every reader.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use slp_core::batch;
use slp_core::generator::{generate, BoundPolicy, GenParams, Structure};
use slp_core::io::parse_instance;
use slp_core::layered::{project_to_base, transition};
use slp_core::model::{validate_trail, walk_sums};
use slp_core::oracle::{decide, enumerate_trails};
use slp_core::rat::{rat, rat_int, Rat};
use slp_core::scaling::scale_instance;
use slp_core::solver::{search, SearchOptions};
use slp_core::{solve, EdgeId, Graph, Request, SolveStatus, Walk};

fn epsilons() -> Vec<Rat> {
    vec![rat_int(1), rat(1, 2), rat(1, 4), rat(1, 10)]
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn load_fixture(name: &str) -> (Graph, Request) {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture readable");
    parse_instance(&text).expect("fixture parses")
}

fn slp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Wall-clock is the only permitted difference between identical runs.
fn mask_wall_lines(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("wall_seconds"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn mask_wall_column(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

struct CorpusRun {
    solved: bool,
    /// Exact-arithmetic relaxed-bound check on the returned walk.
    approx_ok: bool,
    /// Unclamped scaled sums meet the scaled bounds.
    scaled_ok: bool,
    /// The walk is a trail of at most m edges with the right endpoints.
    trail_ok: bool,
    /// Oracle verdicts, present when m is small enough to enumerate.
    oracle_approx: Option<bool>,
    oracle_exact: Option<bool>,
}

struct Corpus {
    runs: Vec<CorpusRun>,
    elapsed: Duration,
}

fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let started = Instant::now();
        let seeds: Vec<u64> = (0..1000).collect();
        let eps_list = epsilons();
        let per_instance = batch::run(&seeds, |&seed| {
            let n = 4 + (seed % 7) as u32;
            let m = 6 + (seed % 15) as u32;
            let (g, r) = generate(&GenParams {
                seed,
                n,
                m,
                w_s_range: (0, 10),
                w_l_range: (0, 10),
                bound_policy: BoundPolicy::FromRandomPath,
                structure: Structure::UniformRandom,
            })
            .expect("generation succeeds");
            let verdict = (m <= 16).then(|| decide(&g, &r, &eps_list).expect("oracle fits guard"));

            eps_list
                .iter()
                .map(|eps| {
                    let result = solve(&g, &r, eps).expect("solve succeeds");
                    let solved = result.status == SolveStatus::Solved;
                    let (approx_ok, scaled_ok, trail_ok) = match &result.walk {
                        Some(walk) => {
                            let (s, l) = walk_sums(&g, walk).expect("walk sums");
                            let approx_ok = s <= (rat_int(1) + eps) * &r.bound_s
                                && l >= (rat_int(1) - eps) * &r.bound_l;
                            let scaled = scale_instance(&g, &r, eps).expect("scaling succeeds");
                            let (ss, sl) = scaled.scaled_walk_sums(walk).expect("scaled sums");
                            let tc = scaled.tau_ceil() as u128;
                            let scaled_ok = sl >= tc && ss <= tc;
                            let trail_ok =
                                validate_trail(&g, walk) && walk.len() <= g.edge_count();
                            (approx_ok, scaled_ok, trail_ok)
                        }
                        None => (true, true, true),
                    };
                    CorpusRun {
                        solved,
                        approx_ok,
                        scaled_ok,
                        trail_ok,
                        oracle_approx: verdict.as_ref().map(|v| v.approx_feasible_at[eps]),
                        oracle_exact: verdict.as_ref().map(|v| v.exact_feasible),
                    }
                })
                .collect::<Vec<_>>()
        });
        Corpus {
            runs: per_instance.into_iter().flatten().collect(),
            elapsed: started.elapsed(),
        }
    })
}

#[test]
fn criterion_1_approximation_guarantee_fuzz() {
    let corpus = corpus();
    assert_eq!(corpus.runs.len(), 4000, "1000 instances x 4 epsilons");
    let solved = corpus.runs.iter().filter(|r| r.solved).count();
    assert!(solved > 0, "fuzz corpus must exercise the Solved path");
    let violations = corpus.runs.iter().filter(|r| r.solved && !r.approx_ok).count();
    assert_eq!(violations, 0, "relaxed-bound violations on Solved results");
    assert!(
        corpus.elapsed < Duration::from_secs(120),
        "corpus took {:?}, budget is 2 minutes",
        corpus.elapsed
    );
    println!(
        "criterion 1 (approximation-guarantee fuzz, {} runs, {} solved, {:?}): PASS",
        corpus.runs.len(),
        solved,
        corpus.elapsed
    );
}

#[test]
fn criterion_2_scaled_bound_invariants() {
    let corpus = corpus();
    let violations = corpus.runs.iter().filter(|r| r.solved && !r.scaled_ok).count();
    assert_eq!(violations, 0, "unclamped scaled-sum violations on Solved results");
    println!("criterion 2 (scaled-bound invariants on the fuzz corpus): PASS");
}

#[test]
fn criterion_3_trail_soundness() {
    let corpus = corpus();
    let violations = corpus.runs.iter().filter(|r| r.solved && !r.trail_ok).count();
    assert_eq!(violations, 0, "non-trail or oversized walks on Solved results");
    println!("criterion 3 (trail soundness on the fuzz corpus): PASS");
}

#[test]
fn criterion_4_one_sided_oracle_agreement() {
    let corpus = corpus();
    let checked = corpus.runs.iter().filter(|r| r.oracle_approx.is_some()).count();
    assert!(checked > 0, "the m <= 16 slice must be non-empty");
    let disagreements = corpus
        .runs
        .iter()
        .filter(|r| r.solved && r.oracle_approx == Some(false))
        .count();
    assert_eq!(
        disagreements, 0,
        "solver claimed Solved where the oracle sees no approximately feasible trail"
    );
    // The converse direction is a known gap: report it, never assert it.
    let exact = corpus.runs.iter().filter(|r| r.oracle_exact == Some(true)).count();
    let missed = corpus
        .runs
        .iter()
        .filter(|r| r.oracle_exact == Some(true) && !r.solved)
        .count();
    let rate = 100.0 * missed as f64 / exact.max(1) as f64;
    println!(
        "criterion 4 (oracle agreement, {checked} runs checked): PASS \
         (missed-feasible {missed}/{exact} = {rate:.2}%, reported only)"
    );
}

#[test]
fn criterion_5_edge_repetition_detection_regression() {
    let (g, r) = load_fixture("erd.slp");
    assert_eq!(g.edge_count(), 3);
    assert_eq!(r.bound_s, rat_int(3));
    assert_eq!(r.bound_l, rat_int(3));
    let eps = rat(2, 3);

    let result = solve(&g, &r, &eps).expect("solve succeeds");
    assert_eq!(result.status, SolveStatus::NoSolution);

    // Test-only mode: drop the detection and the search reaches the top
    // layer, but only by walking edge 1 twice.
    let scaled = scale_instance(&g, &r, &eps).unwrap();
    let (outcome, _) = search(
        &scaled,
        &SearchOptions {
            detect_edge_repetition: false,
        },
    );
    let outcome = outcome.expect("target reachable once edges may repeat");
    let walk = project_to_base(&outcome.layered_path).unwrap();
    let mut ids: Vec<u32> = walk.edges().iter().map(|e| e.0).collect();
    let len_before = ids.len();
    ids.sort_unstable();
    ids.dedup();
    assert!(ids.len() < len_before, "projection must repeat an edge");
    assert!(!validate_trail(&g, &walk));
    println!("criterion 5 (edge-repetition detection necessity): PASS");
}

#[test]
fn criterion_6_worked_example_regression() {
    let dir = tempfile::tempdir().unwrap();
    let worked = fixture("worked.slp");
    let mut reports = Vec::new();
    let mut stdouts = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = slp(&[
            "solve",
            worked.to_str().unwrap(),
            "--epsilon",
            "1",
            "--report",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        stdouts.push(stdout(&out));
        reports.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(stdouts[0], stdouts[1], "stdout must be byte-identical");
    assert_eq!(
        mask_wall_lines(&reports[0]),
        mask_wall_lines(&reports[1]),
        "reports must be byte-identical outside the wall-clock field"
    );

    let report: slp_core::serde_json::Value =
        slp_core::serde_json::from_str(&reports[0]).unwrap();
    assert_eq!(report["status"], "solved");
    assert_eq!(report["walk"], slp_core::serde_json::json!([1, 2]));
    assert_eq!(report["raw_s"], "2");
    assert_eq!(report["raw_l"], "10");
    assert_eq!(report["scaled_l_clamped"], 3);
    assert_eq!(report["tau_ceil"], 3);
    println!("criterion 6 (worked-example regression): PASS");
}

#[test]
fn criterion_7_cost_gate_selects_the_cheap_trail() {
    let (g, r) = load_fixture("gate.slp");
    let eps = rat_int(1);
    let scaled = scale_instance(&g, &r, &eps).unwrap();

    let mut reach_top = Vec::new();
    let mut within_gate = Vec::new();
    for trail in enumerate_trails(&g, r.source, r.target, g.edge_count()) {
        let mut layer = 0;
        let mut cost = 0u64;
        for id in trail.edges() {
            let idx = g.edge_index(*id).unwrap();
            layer = transition(layer, scaled.scaled_l(idx), scaled.tau_ceil());
            cost += scaled.scaled_s(idx);
        }
        if layer == scaled.tau_ceil() {
            reach_top.push(trail.clone());
            if cost <= scaled.tau_ceil() {
                within_gate.push(trail);
            }
        }
    }
    assert_eq!(reach_top.len(), 2, "exactly two trails reach the top layer");
    assert_eq!(within_gate.len(), 1, "exactly one of them passes the cost gate");
    let expected = Walk::new(vec![EdgeId(3), EdgeId(4)]);
    assert_eq!(within_gate[0], expected);

    let result = solve(&g, &r, &eps).expect("solve succeeds");
    assert_eq!(result.status, SolveStatus::Solved);
    assert_eq!(result.walk, Some(expected.clone()));

    let verdict = decide(&g, &r, std::slice::from_ref(&eps)).expect("oracle fits guard");
    assert!(verdict.exact_feasible);
    assert_eq!(verdict.witness, Some(expected));
    assert!(verdict.approx_feasible_at[&eps]);
    println!("criterion 7 (cost gate picks the unique in-budget trail): PASS");
}

#[test]
fn criterion_8_scaling_smoke() {
    let (g, r) = generate(&GenParams {
        seed: 8,
        n: 100,
        m: 400,
        w_s_range: (0, 10),
        w_l_range: (0, 10),
        bound_policy: BoundPolicy::FromRandomPath,
        structure: Structure::UniformRandom,
    })
    .expect("generation succeeds");

    let mut settled = Vec::new();
    for eps in [rat(1, 5), rat(1, 10), rat(1, 20)] {
        let started = Instant::now();
        let result = solve(&g, &r, &eps).expect("solve succeeds");
        let elapsed = started.elapsed();
        assert!(
            elapsed < Duration::from_secs(60),
            "epsilon {eps} took {elapsed:?}, budget is 60 seconds"
        );
        settled.push(result.diagnostics.states_settled);
    }
    assert!(
        settled[0] < settled[1] && settled[1] < settled[2],
        "halving epsilon must settle strictly more states, got {settled:?}"
    );
    println!("criterion 8 (scaling smoke, settled counters {settled:?}): PASS");
}

#[test]
fn criterion_9_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let worked = fixture("worked.slp");

    let twice = |args: &[&str]| {
        let a = slp(args);
        let b = slp(args);
        assert_eq!(a.status.code(), b.status.code(), "args: {args:?}");
        (a, b)
    };

    // solve: identical stdout, identical report minus the wall-clock field.
    let ra = dir.path().join("a.json");
    let rb = dir.path().join("b.json");
    for path in [&ra, &rb] {
        let run = slp(&[
            "solve",
            worked.to_str().unwrap(),
            "--epsilon",
            "2/3",
            "--verify",
            "--report",
            path.to_str().unwrap(),
        ]);
        assert_eq!(run.status.code(), Some(0));
    }
    let report_a = std::fs::read_to_string(&ra).unwrap();
    let report_b = std::fs::read_to_string(&rb).unwrap();
    assert_eq!(mask_wall_lines(&report_a), mask_wall_lines(&report_b));

    let (a, b) = twice(&["solve", worked.to_str().unwrap(), "--epsilon", "2/3"]);
    assert_eq!(stdout(&a), stdout(&b));

    // verify
    let verify_args = ["verify", worked.to_str().unwrap(), "--report", ra.to_str().unwrap()];
    let (a, b) = twice(&verify_args);
    assert_eq!(stdout(&a), stdout(&b));

    // generate
    let (a, b) = twice(&["generate", "--seed", "11", "--n", "8", "--m", "14"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(!stdout(&a).is_empty());

    // compare
    let (a, b) = twice(&["compare", "--trials", "4", "--seed", "2", "--epsilons", "1,1/2"]);
    assert_eq!(stdout(&a), stdout(&b));

    // bench: everything but the wall-clock column must repeat.
    let (a, b) = twice(&[
        "bench", "--n", "12", "--m", "30", "--epsilon-list", "1/4", "--repeats", "2",
        "--seed", "3",
    ]);
    assert_eq!(mask_wall_column(&stdout(&a)), mask_wall_column(&stdout(&b)));
    println!("criterion 9 (CLI determinism across consecutive runs): PASS");
}
