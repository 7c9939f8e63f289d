//! Command-line front end.
//!
//! Exit status: 0 when every invariant checked by the subcommand holds, 1 when
//! one fails or the run errors (a JSON record goes to stderr), 2 on bad flags.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use twocopy_core::boxworld::{
    box_twirl, chsh_value, lhv_membership, lhv_membership_exact, noisy_pr_at, noisy_pr_exact, pr_box, pr_weight,
};
use twocopy_core::nogo::{corner_sweep, figure1_regions, theorem_scan};
use twocopy_core::scalar::rational;
use twocopy_core::werner::{
    bbpssw_step, ppt_min_eigenvalue, singlet_fidelity, three_copy_formula, three_copy_protocol, twirl_quantum,
    werner_state_at, werner_threshold_bisect, TwirlMethod, WernerParam,
};
use twocopy_core::wirings::{effective_box, extract_quad_coeffs, figure2_wiring, q_curve_check};
use twocopy_core::{sampling, Error as CoreError};

use crate::report::{hex32, Cell, Check, Summary, Table};
use crate::search::{search_all_wirings, SearchConfig, SearchError, SearchOutcome, DEFAULT_BLOCK_SIZE};

#[derive(Debug, Parser)]
#[command(name = "twocopy", version, about = "Two-copy purification checks for Werner states and noisy PR-boxes")]
pub struct Cli {
    /// Points in each p-grid (at least 2).
    #[arg(long, global = true, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid_points: u64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the main tolerance of the subcommand.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Artifact format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Werner entanglement threshold and the partial-transpose curve.
    Werner,
    /// One recurrence step on two Werner copies.
    Bbpssw,
    /// Three-copy protocol against its cubic.
    ThreeCopy,
    /// CHSH values and the local-polytope threshold of noisy PR-boxes.
    Boxes,
    /// Property suite for both twirls.
    TwirlCheck {
        #[arg(long, default_value_t = 100)]
        states: usize,
        #[arg(long, default_value_t = 1000)]
        boxes: usize,
    },
    /// Exhaustive search over deterministic local wirings of two boxes.
    WiringSearch {
        #[arg(long, default_value_t = default_workers(), value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Alice classes per work block.
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE as u64, value_parser = clap::value_parser!(u64).range(1..))]
        block_size: u64,
        /// Scan only the first N Alice classes.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        alice_limit: Option<u64>,
        /// Stop after N newly finished blocks (requires --checkpoint).
        #[arg(long, requires = "checkpoint")]
        max_blocks: Option<usize>,
    },
    /// Random and corner scans for a purifying quadratic.
    Nogo {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0.75)]
        ps: f64,
    },
    /// Regions and attempted curves of the conditions plot.
    Fig1 {
        #[arg(long, default_value_t = 0.5)]
        ps: f64,
        #[arg(long, default_value_t = 0.75)]
        pe: f64,
    },
    /// Output purity of the representative adaptive wiring.
    Fig2,
}

fn default_workers() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

/// Result of one subcommand: its checks, the JSON document and the table.
pub struct Outcome {
    pub summary: Summary,
    pub document: Value,
    pub table: Table,
    pub default_format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{0}")]
    Usage(String),
    #[error("search stopped after {done} of {total} blocks; rerun with the same checkpoint to continue")]
    Interrupted { done: usize, total: usize },
}

/// Parses `args`, runs, writes the artifact and the summary, and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli).map_err(EmitError::from).and_then(|o| emit(&cli, &o).map(|_| o)) {
        Ok(outcome) => {
            eprintln!("{}", serde_json::to_string(&outcome.summary).expect("summary serializes"));
            if outcome.summary.passed() {
                0
            } else {
                1
            }
        }
        Err(EmitError::Run(RunError::Usage(msg))) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            let record = json!({
                "schema_version": crate::report::SCHEMA_VERSION,
                "status": "error",
                "error": e.to_string(),
            });
            eprintln!("{record}");
            1
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum EmitError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), EmitError> {
    let sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match cli.format.unwrap_or(outcome.default_format) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &outcome.document).map_err(io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Format::Csv => outcome.table.write_csv(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome, RunError> {
    let n = cli.grid_points as usize;
    let tol = cli.tolerance;
    if let Some(t) = tol.filter(|t| t.is_nan() || *t < 0.0) {
        return Err(RunError::Usage(format!("--tolerance must be non-negative, got {t}")));
    }
    match &cli.command {
        Command::Werner => werner(n, tol),
        Command::Bbpssw => bbpssw(n, tol),
        Command::ThreeCopy => three_copy(n, tol),
        Command::Boxes => boxes(n, tol),
        Command::TwirlCheck { states, boxes } => twirl_check(*states, *boxes, cli.seed, tol),
        Command::WiringSearch {
            workers,
            checkpoint,
            block_size,
            alice_limit,
            max_blocks,
        } => {
            let config = SearchConfig {
                grid_points: n,
                workers: *workers as usize,
                block_size: *block_size as usize,
                alice_limit: alice_limit.map(|v| v as usize),
                checkpoint: checkpoint.clone(),
                max_new_blocks: *max_blocks,
            };
            wiring_search(&config, tol)
        }
        Command::Nogo { samples, ps } => nogo(*samples, *ps, cli.seed),
        Command::Fig1 { ps, pe } => fig1(*ps, *pe, n),
        Command::Fig2 => fig2(n, tol),
    }
}

/// `k/(n−1)` for `k = 0..n`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

fn werner(n: usize, tol: Option<f64>) -> Result<Outcome, RunError> {
    let threshold = werner_threshold_bisect(1e-12);
    let mut table = Table::new(&["p", "ppt_min_eigenvalue", "singlet_fidelity"]);
    let mut curve = Vec::with_capacity(n);
    for p in unit_grid(n) {
        let rho = werner_state_at(p)?;
        let (e, f) = (ppt_min_eigenvalue(&rho), singlet_fidelity(&rho));
        table.push(vec![Cell::Num(p), Cell::Num(e), Cell::Num(f)]);
        curve.push((p, e));
    }
    // Below p = 1/4 the smallest eigenvalue belongs to another branch and rises.
    let upper: Vec<f64> = curve.iter().filter(|(p, _)| *p >= 0.25).map(|c| c.1).collect();
    let decreasing = upper.windows(2).all(|w| w[1] < w[0]);
    let summary = Summary::new(
        "werner",
        vec![
            Check::at_most("threshold_error", (threshold - 0.5).abs(), tol.unwrap_or(1e-8)),
            Check::holds("ppt_decreasing_on_quarter_to_one", decreasing),
        ],
    );
    let document = json!({ "summary": summary, "threshold": threshold, "curve": rows(&table) });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Csv,
    })
}

/// Fidelity recurrence of the two-copy protocol, written out independently of
/// the density-matrix simulation. The Werner parameter is the singlet
/// fidelity.
fn recurrence(f: f64) -> (f64, f64) {
    let g = (1.0 - f) / 3.0;
    let success = f * f + 2.0 * f * g + 5.0 * g * g;
    (success, (f * f + g * g) / success)
}

fn bbpssw(n: usize, tol: Option<f64>) -> Result<Outcome, RunError> {
    let mut table = Table::new(&["p", "success_prob", "p_success", "p_deterministic"]);
    let mut residual: f64 = 0.0;
    let mut improves = true;
    let mut probs_valid = true;
    for p in unit_grid(n) {
        let out = bbpssw_step(WernerParam::new(p)?);
        let (succ, p_out) = recurrence(p);
        residual = residual
            .max((out.success_prob - succ).abs())
            .max((out.out_purity_success.get() - p_out).abs());
        probs_valid &= (-1e-12..=1.0 + 1e-12).contains(&out.success_prob);
        if p > 0.5 + 1e-6 && p < 1.0 - 1e-6 {
            improves &= out.out_purity_success.get() > p;
        }
        table.push(vec![
            Cell::Num(p),
            Cell::Num(out.success_prob),
            Cell::Num(out.out_purity_success.get()),
            Cell::Num(out.out_purity_deterministic.get()),
        ]);
    }
    let summary = Summary::new(
        "bbpssw",
        vec![
            Check::at_most("recurrence_residual", residual, tol.unwrap_or(1e-9)),
            Check::holds("success_prob_in_unit_interval", probs_valid),
            Check::holds("improves_above_threshold", improves),
        ],
    );
    let document = json!({ "summary": summary, "curve": rows(&table) });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Csv,
    })
}

fn three_copy(n: usize, tol: Option<f64>) -> Result<Outcome, RunError> {
    let mut table = Table::new(&["p", "simulated", "formula", "residual"]);
    let mut max_residual: f64 = 0.0;
    let mut improves = true;
    for p in unit_grid(n) {
        let sim = three_copy_protocol(WernerParam::new(p)?).get();
        let formula = three_copy_formula(p);
        let r = (sim - formula).abs();
        max_residual = max_residual.max(r);
        if p > 0.5 + 1e-6 && p < 1.0 - 1e-6 {
            improves &= sim > p;
        }
        table.push(vec![Cell::Num(p), Cell::Num(sim), Cell::Num(formula), Cell::Num(r)]);
    }
    let summary = Summary::new(
        "three-copy",
        vec![
            Check::at_most("max_residual", max_residual, tol.unwrap_or(1e-9)),
            Check::holds("improves_above_threshold", improves),
        ],
    );
    let document = json!({ "summary": summary, "max_residual": max_residual, "curve": rows(&table) });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Csv,
    })
}

fn boxes(n: usize, tol: Option<f64>) -> Result<Outcome, RunError> {
    let mut table = Table::new(&["p", "chsh", "lhv_feasible"]);
    let mut chsh_residual: f64 = 0.0;
    let mut lhv_agrees = true;
    for p in unit_grid(n) {
        let d = noisy_pr_at(p)?;
        let chsh = chsh_value(&d);
        chsh_residual = chsh_residual.max((chsh - (8.0 * p - 4.0)).abs());
        let feasible = lhv_membership(&d).feasible;
        // Far from the threshold the float path must agree with |CHSH| <= 2.
        if (p - 0.75).abs() > 1e-6 && (p - 0.25).abs() > 1e-6 {
            lhv_agrees &= feasible == (chsh.abs() <= 2.0);
        }
        table.push(vec![Cell::Num(p), Cell::Num(chsh), Cell::Bool(feasible)]);
    }
    let step = rational(1, 1_000_000_000);
    let at = rational(3, 4);
    let exact = |p| lhv_membership_exact(&noisy_pr_exact(&p)).feasible;
    let below = exact(&at - &step);
    let at_threshold = exact(at.clone());
    let above = exact(&at + &step);
    let chsh_pr = chsh_value(&pr_box());
    let summary = Summary::new(
        "boxes",
        vec![
            Check::equal("chsh_pr_box", chsh_pr, 4.0),
            Check::at_most("chsh_line_residual", chsh_residual, tol.unwrap_or(1e-12)),
            Check::holds("lhv_float_matches_chsh", lhv_agrees),
            Check::holds("lhv_exact_feasible_below", below),
            Check::holds("lhv_exact_feasible_at_three_quarters", at_threshold),
            Check::holds("lhv_exact_infeasible_above", !above),
        ],
    );
    let document = json!({
        "summary": summary,
        "chsh_pr_box": chsh_pr,
        "exact_threshold": { "below": below, "at": at_threshold, "above": above, "step": "1/1000000000" },
        "curve": rows(&table),
    });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Json,
    })
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct TwirlStats {
    pub design_vs_closed_form: f64,
    pub quantum_family_residual: f64,
    pub quantum_linearity: f64,
    pub box_family_residual: f64,
    pub box_invariance: f64,
    pub box_linearity: f64,
}

/// Sampled property suite of the two twirls.
pub fn twirl_stats(states: usize, boxes: usize, seed: u64) -> Result<TwirlStats, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = TwirlStats::default();
    let mut prev = None;
    for _ in 0..states {
        let rho = sampling::random_two_qubit_state(&mut rng);
        let design = twirl_quantum(&rho, TwirlMethod::TwoDesign);
        let closed = twirl_quantum(&rho, TwirlMethod::ClosedForm);
        s.design_vs_closed_form = s.design_vs_closed_form.max(design.matrix().max_abs_diff(closed.matrix()));
        let family = werner_state_at(singlet_fidelity(&design).clamp(0.0, 1.0))?;
        s.quantum_family_residual = s.quantum_family_residual.max(design.matrix().max_abs_diff(family.matrix()));
        if let Some(other) = prev.replace(rho.clone()) {
            let mixed = twirl_quantum(&rho.mix(0.3, &other), TwirlMethod::TwoDesign);
            let separate = twirl_quantum(&rho, TwirlMethod::TwoDesign).mix(0.3, &twirl_quantum(&other, TwirlMethod::TwoDesign));
            s.quantum_linearity = s.quantum_linearity.max(mixed.matrix().max_abs_diff(separate.matrix()));
        }
    }
    let mut prev = None;
    for _ in 0..boxes {
        let d = sampling::random_box(&mut rng);
        let t = box_twirl(&d);
        let family = noisy_pr_at(pr_weight(&t).clamp(0.0, 1.0))?;
        s.box_family_residual = s.box_family_residual.max(t.max_abs_diff(&family));
        if let Some(other) = prev.replace(d) {
            let lhs = box_twirl(&d.mix(0.3, &other));
            let rhs = t.mix(0.3, &box_twirl(&other));
            s.box_linearity = s.box_linearity.max(lhs.max_abs_diff(&rhs));
        }
    }
    for p in unit_grid(101) {
        let d = noisy_pr_at(p)?;
        s.box_invariance = s.box_invariance.max(box_twirl(&d).max_abs_diff(&d));
    }
    Ok(s)
}

fn twirl_check(states: usize, boxes: usize, seed: u64, tol: Option<f64>) -> Result<Outcome, RunError> {
    let s = twirl_stats(states, boxes, seed)?;
    let summary = Summary::new(
        "twirl-check",
        vec![
            Check::at_most("design_vs_closed_form", s.design_vs_closed_form, tol.unwrap_or(1e-10)),
            Check::at_most("quantum_family_residual", s.quantum_family_residual, tol.unwrap_or(1e-10)),
            Check::at_most("quantum_linearity", s.quantum_linearity, tol.unwrap_or(1e-12)),
            Check::at_most("box_family_residual", s.box_family_residual, tol.unwrap_or(1e-12)),
            Check::at_most("box_invariance", s.box_invariance, tol.unwrap_or(1e-12)),
            Check::at_most("box_linearity", s.box_linearity, tol.unwrap_or(1e-12)),
        ],
    );
    let mut table = Table::new(&["check", "value", "bound", "pass"]);
    for c in &summary.checks {
        table.push(vec![Cell::Text(c.name.clone()), Cell::Num(c.value), Cell::Num(c.bound), Cell::Bool(c.pass)]);
    }
    let document = json!({ "summary": summary, "states": states, "boxes": boxes, "seed": seed, "stats": s });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Json,
    })
}

fn wiring_search(config: &SearchConfig, tol: Option<f64>) -> Result<Outcome, RunError> {
    let report = match search_all_wirings(config)? {
        SearchOutcome::Complete(r) => r,
        SearchOutcome::Interrupted(p) => {
            return Err(RunError::Interrupted {
                done: p.blocks_done,
                total: p.blocks_total,
            })
        }
    };
    eprintln!("wiring-search: {} pairs in {:.1?}", report.total_pairs, report.elapsed);
    let summary = Summary::new(
        "wiring-search",
        vec![
            Check::at_most("max_gap", report.max_gap, tol.unwrap_or(1e-12)),
            Check::at_most("max_boundary_gap", report.max_boundary_gap, 0.0),
            Check::equal("boundary_violations", report.boundary_violations as f64, 0.0),
            Check::equal("range_violations", report.range_violations as f64, 0.0),
        ],
    );
    let mut table = Table::new(&[
        "deduped_party_count",
        "total_pairs",
        "max_gap",
        "witness_alice",
        "witness_bob",
        "max_boundary_gap",
        "boundary_violations",
    ]);
    table.push(vec![
        Cell::Int(report.deduped_party_count as u64),
        Cell::Int(report.total_pairs),
        Cell::Num(report.max_gap),
        Cell::Text(report.witness.alice.clone()),
        Cell::Text(report.witness.bob.clone()),
        Cell::Num(report.max_boundary_gap),
        Cell::Int(report.boundary_violations),
    ]);
    let document = json!({ "summary": summary, "report": report });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Json,
    })
}

fn nogo(samples: u64, ps: f64, seed: u64) -> Result<Outcome, RunError> {
    if !(ps > 0.0 && ps < 1.0) {
        return Err(RunError::Usage(format!("--ps must lie in (0, 1), got {ps}")));
    }
    let scan = theorem_scan(ps, samples, seed)?;
    let corners = corner_sweep(&rational(1, 2));
    let corners_upper = corner_sweep(&rational(3, 4));
    let summary = Summary::new(
        "nogo",
        vec![
            Check::equal("scan_counterexamples", scan.counterexamples as f64, 0.0),
            Check::equal("corner_counterexamples_half", corners.counterexamples as f64, 0.0),
            Check::equal("corner_counterexamples_three_quarters", corners_upper.counterexamples as f64, 0.0),
        ],
    );
    let mut table = Table::new(&["scan", "p_s", "samples", "admissible", "counterexamples"]);
    for (name, p, s) in [("random", ps, scan), ("corners", 0.5, corners), ("corners", 0.75, corners_upper)] {
        table.push(vec![
            Cell::Text(name.into()),
            Cell::Num(p),
            Cell::Int(s.samples),
            Cell::Int(s.admissible),
            Cell::Int(s.counterexamples),
        ]);
    }
    let document = json!({
        "summary": summary,
        "p_s": ps,
        "seed": seed,
        "scan": scan,
        "corners": { "half": corners, "three_quarters": corners_upper },
    });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Json,
    })
}

fn fig1(ps: f64, pe: f64, n: usize) -> Result<Outcome, RunError> {
    if !(ps > 0.0 && ps < pe && pe < 1.0) {
        return Err(RunError::Usage(format!("need 0 < --ps < --pe < 1, got {ps} and {pe}")));
    }
    let data = figure1_regions(ps, pe, n)?;
    let mut table = Table::new(&["kind", "id", "label", "p", "lower", "upper"]);
    for r in &data.regions {
        table.push(vec![
            Cell::Text("region".into()),
            Cell::Int(r.region_id as u64),
            Cell::Text(if r.lower_strict { "open-below".into() } else { "closed".into() }),
            Cell::Num(r.p),
            Cell::Num(r.q_min),
            Cell::Num(r.q_max),
        ]);
    }
    for c in &data.curves {
        for &(p, q) in &c.points {
            table.push(vec![
                Cell::Text("curve".into()),
                Cell::Int(c.curve_id as u64),
                Cell::Text(c.label.into()),
                Cell::Num(p),
                Cell::Num(q),
                Cell::Num(q),
            ]);
        }
    }
    let summary = Summary::new(
        "fig1",
        data.curves
            .iter()
            .map(|c| Check::holds(&format!("{}_not_a_counterexample", c.label), !c.report.is_counterexample()))
            .collect(),
    );
    let document = json!({ "summary": summary, "figure": data });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Csv,
    })
}

fn fig2(n: usize, tol: Option<f64>) -> Result<Outcome, RunError> {
    let (alice, bob) = figure2_wiring();
    let (wa, wb) = (alice.behavior(), bob.behavior());
    let q = extract_quad_coeffs(&wa, &wb)?;
    let mut table = Table::new(&["p", "q_formula", "q_simulated", "gap"]);
    let mut max_gap_above = f64::NEG_INFINITY;
    let mut samples = Vec::with_capacity(n);
    for p in unit_grid(n) {
        let s = noisy_pr_at(p)?;
        let sim = pr_weight(&box_twirl(&effective_box(&wa, &wb, &s, &s)?));
        let formula = q.eval(p);
        if p > 0.75 {
            max_gap_above = max_gap_above.max(formula - p);
        }
        samples.push(p);
        table.push(vec![Cell::Num(p), Cell::Num(formula), Cell::Num(sim), Cell::Num(formula - p)]);
    }
    let residual = q_curve_check(&wa, &wb, &samples)?;
    let summary = Summary::new(
        "fig2",
        vec![
            Check::at_most("curve_residual", residual, tol.unwrap_or(1e-10)),
            Check::at_most("max_gap_above_three_quarters", max_gap_above, 0.0),
            Check::holds("coefficients_in_unit_interval", q.in_unit_range()),
        ],
    );
    let document = json!({
        "summary": summary,
        "alice": hex32(alice.encode()),
        "bob": hex32(bob.encode()),
        "coeffs": q,
        "curve": rows(&table),
    });
    Ok(Outcome {
        summary,
        document,
        table,
        default_format: Format::Csv,
    })
}

/// Table rows as JSON objects keyed by column name.
fn rows(table: &Table) -> Value {
    Value::Array(
        table
            .rows
            .iter()
            .map(|row| {
                let obj = table
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, cell)| {
                        let v = match cell {
                            Cell::Num(x) => json!(x),
                            Cell::Int(x) => json!(x),
                            Cell::Bool(x) => json!(x),
                            Cell::Text(x) => json!(x),
                        };
                        (k.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}
