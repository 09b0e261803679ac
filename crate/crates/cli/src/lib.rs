//! Commands behind the `bodycad` binary.
//!
//! Each command returns its exit code and output instead of printing, so the
//! binary stays a thin wrapper and the commands are testable in-process.

use std::fmt::Write as _;
use std::path::Path;

use bodycad::analyzer::{analyze, crossvalidate, AnalysisReport, Combinatorial, CrossCheck};
use bodycad::engine::{decide, Status};
use bodycad::field::{Fp, Rational};
use bodycad::graph::{BiColoredMultigraph, SparsityParams};
use bodycad::io::{parse_document, parse_graph, report_to_json};
use bodycad::parallel::Execution;
use serde::{Deserialize, Serialize};

/// The exit-code contract.
pub mod exit {
    /// Minimally rigid, numeric cross-check agrees.
    pub const RIGID: i32 = 0;
    /// Unreadable or invalid input, or invalid options.
    pub const INPUT_ERROR: i32 = 1;
    /// Independent but flexible.
    pub const UNDERCONSTRAINED: i32 = 2;
    /// Some constraint is dependent on the others (including over-counted inputs).
    pub const DEPENDENT: i32 = 3;
    /// A point-point coincidence is present; only numeric results are reported.
    pub const WITHHELD: i32 = 4;
    /// The combinatorial and numeric results disagree.
    pub const DISAGREE: i32 = 5;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(code: i32, stdout: String) -> Self {
        CommandOutput { code, stdout, stderr: String::new() }
    }

    fn input_error(message: impl std::fmt::Display) -> Self {
        CommandOutput { code: exit::INPUT_ERROR, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum FieldChoice {
    #[default]
    Rational,
    Prime,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::MinimallyRigid => exit::RIGID,
        Status::Underconstrained => exit::UNDERCONSTRAINED,
        Status::Dependent | Status::NotCounted => exit::DEPENDENT,
    }
}

/// Exit code of an analysis report.
pub fn report_code(report: &AnalysisReport) -> i32 {
    match (&report.combinatorial, report.cross_check) {
        (Combinatorial::Withheld { .. }, _) => exit::WITHHELD,
        (_, CrossCheck::Disagree) => exit::DISAGREE,
        (Combinatorial::Decided { status, .. }, _) => status_code(*status),
    }
}

fn join(items: impl IntoIterator<Item = impl ToString>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn det_text(det: Option<bool>) -> &'static str {
    match det {
        Some(true) => "det nonzero",
        Some(false) => "det zero",
        None => "not square",
    }
}

pub fn render_report(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let full = 6 * report.bodies.saturating_sub(1);
    let _ = writeln!(out, "bodies: {}, constraints: {}", report.bodies, report.constraints);
    let _ = writeln!(
        out,
        "primitives: {} angular (red), {} blind (black)",
        report.primitives.angular, report.primitives.blind
    );
    match &report.combinatorial {
        Combinatorial::Decided { status, rank, deficiency } => {
            let _ =
                writeln!(out, "combinatorial: {} (rank {rank} of {full}, deficiency {deficiency})", status.as_str());
        }
        Combinatorial::Withheld { reason } => {
            let _ = writeln!(out, "combinatorial: withheld ({reason})");
        }
    }
    let n = &report.numeric;
    let _ = writeln!(
        out,
        "numeric ({}): embedding rank {}, dof {}, {}",
        n.field,
        n.embedding.rank,
        n.embedding.dof,
        det_text(n.embedding.det_nonzero)
    );
    let _ = writeln!(
        out,
        "numeric ({}): generic rank {}, dof {}, {} (seed {}, attempts {})",
        n.field,
        n.generic.rank,
        n.generic.dof,
        det_text(n.generic.det_nonzero),
        n.generic_seed,
        n.attempts
    );
    let cross = match report.cross_check {
        CrossCheck::Agree => "agree",
        CrossCheck::Disagree => "disagree",
        CrossCheck::NotApplicable => "not-applicable",
    };
    let _ = writeln!(out, "cross-check: {cross}");
    if let Some(cert) = &report.certificate {
        let _ = writeln!(out, "certificate:");
        let trees = cert.trees.iter().map(|t| t.tree).max().unwrap_or(0);
        for tree in 1..=trees {
            let rows = cert.trees.iter().filter(|t| t.tree == tree).map(|t| format!("{} ({})", t.row, t.constraint));
            let _ = writeln!(out, "  tree {tree}: {}", join(rows));
        }
        let _ = writeln!(out, "  black rows in angular-side trees: {}", join(&cert.angular_side_black));
    }
    if !report.circuits.is_empty() {
        let _ = writeln!(out, "circuits:");
        for (k, c) in report.circuits.iter().enumerate() {
            let _ = writeln!(out, "  {}: constraints {}; rows {}", k + 1, join(&c.constraints), join(&c.rows));
        }
    }
    out
}

fn read(path: &Path) -> Result<String, CommandOutput> {
    std::fs::read_to_string(path).map_err(|e| CommandOutput::input_error(format!("{}: {e}", path.display())))
}

/// Analyzes an input document given as text.
pub fn analyze_text(text: &str, seed: u64, field: FieldChoice, format: OutputFormat) -> CommandOutput {
    let fw = match parse_document(text) {
        Ok(fw) => fw,
        Err(e) => return CommandOutput::input_error(e),
    };
    let report = match field {
        FieldChoice::Rational => analyze::<Rational>(&fw, seed),
        FieldChoice::Prime => analyze::<Fp>(&fw, seed),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return CommandOutput::input_error(e),
    };
    let stdout = match format {
        OutputFormat::Text => render_report(&report),
        OutputFormat::Json => report_to_json(&report) + "\n",
    };
    CommandOutput::ok(report_code(&report), stdout)
}

pub fn cmd_analyze(path: &Path, seed: u64, field: FieldChoice, format: OutputFormat) -> CommandOutput {
    match read(path) {
        Ok(text) => analyze_text(&text, seed, field, format),
        Err(out) => out,
    }
}

/// Machine-readable result of `check-graph`; vertices, edges and trees are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphReport {
    pub k: usize,
    pub g: usize,
    pub n: usize,
    pub m: usize,
    pub red: usize,
    pub status: Status,
    pub rank: usize,
    pub deficiency: usize,
    /// Edges of each tree, by edge line order.
    pub trees: Option<Vec<Vec<usize>>>,
    pub circuit: Option<Vec<usize>>,
}

pub fn graph_report(graph: &BiColoredMultigraph, params: SparsityParams) -> GraphReport {
    let verdict = decide(graph, params);
    let trees = verdict
        .certificate
        .as_ref()
        .map(|cert| (0..params.k()).map(|c| cert.tree(c).iter().map(|e| e.0 + 1).collect()).collect());
    GraphReport {
        k: params.k(),
        g: params.g(),
        n: graph.n(),
        m: graph.m(),
        red: graph.red_count(),
        status: verdict.status,
        rank: verdict.rank,
        deficiency: verdict.deficiency,
        trees,
        circuit: verdict.circuit.map(|c| c.iter().map(|e| e.0 + 1).collect()),
    }
}

pub fn render_graph_report(r: &GraphReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph: n={}, m={} ({} red), (k,g)=({},{})", r.n, r.m, r.red, r.k, r.g);
    let _ = writeln!(
        out,
        "verdict: {} (rank {} of {}, deficiency {})",
        r.status.as_str(),
        r.rank,
        r.k * r.n.saturating_sub(1),
        r.deficiency
    );
    if let Some(trees) = &r.trees {
        let _ = writeln!(out, "certificate:");
        for (k, t) in trees.iter().enumerate() {
            let side = if k >= r.k - r.g { "angular" } else { "black" };
            let _ = writeln!(out, "  tree {} ({side}): edges {}", k + 1, join(t));
        }
    }
    if let Some(c) = &r.circuit {
        let _ = writeln!(out, "circuit: edges {}", join(c));
    }
    out
}

pub fn check_graph_text(text: &str, k: usize, g: usize, format: OutputFormat) -> CommandOutput {
    let params = match SparsityParams::new(k, g) {
        Ok(p) => p,
        Err(e) => return CommandOutput::input_error(e),
    };
    let graph = match parse_graph(text) {
        Ok(g) => g,
        Err(e) => return CommandOutput::input_error(e),
    };
    let report = graph_report(&graph, params);
    let stdout = match format {
        OutputFormat::Text => render_graph_report(&report),
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
    };
    CommandOutput::ok(status_code(report.status), stdout)
}

pub fn cmd_check_graph(path: &Path, k: usize, g: usize, format: OutputFormat) -> CommandOutput {
    match read(path) {
        Ok(text) => check_graph_text(&text, k, g, format),
        Err(out) => out,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidationSummary {
    pub k: usize,
    pub g: usize,
    pub trials: usize,
    pub nmax: usize,
    pub seed: u64,
    pub agree: usize,
    pub rigid: usize,
    pub specialization_checked: usize,
    pub specialization_nonzero: usize,
    pub fan_checked: usize,
    pub fan_single_term: usize,
    /// Trial numbers (0-based) that failed any check.
    pub failures: Vec<usize>,
}

pub struct CrossValidateOptions {
    pub trials: usize,
    pub nmax: usize,
    pub k: usize,
    pub g: usize,
    pub seed: u64,
    pub execution: Execution,
}

pub fn cmd_crossvalidate(opts: &CrossValidateOptions, format: OutputFormat) -> CommandOutput {
    let params = match SparsityParams::new(opts.k, opts.g) {
        Ok(p) => p,
        Err(e) => return CommandOutput::input_error(e),
    };
    let run = match crossvalidate(opts.trials, opts.nmax, params, opts.seed, opts.execution) {
        Ok(r) => r,
        Err(e) => return CommandOutput::input_error(e),
    };
    let count = |f: &dyn Fn(&bodycad::analyzer::TrialOutcome) -> Option<bool>| -> (usize, usize) {
        let checked: Vec<bool> = run.trials.iter().filter_map(f).collect();
        (checked.len(), checked.iter().filter(|&&b| b).count())
    };
    let (specialization_checked, specialization_nonzero) = count(&|t| t.specialization_nonzero);
    let (fan_checked, fan_single_term) = count(&|t| t.single_fan_term);
    let summary = CrossValidationSummary {
        k: opts.k,
        g: opts.g,
        trials: opts.trials,
        nmax: opts.nmax,
        seed: opts.seed,
        agree: run.agreements(),
        rigid: run.rigid(),
        specialization_checked,
        specialization_nonzero,
        fan_checked,
        fan_single_term,
        failures: run
            .trials
            .iter()
            .filter(|t| !t.agree || t.specialization_nonzero == Some(false) || t.single_fan_term == Some(false))
            .map(|t| t.trial)
            .collect(),
    };
    let stdout = match format {
        OutputFormat::Text => format!(
            "crossvalidate (k,g)=({},{}) trials={} nmax={} seed={}: agree {}/{}, rigid {}, specialization {}/{}, single fan term {}/{}\n",
            summary.k,
            summary.g,
            summary.trials,
            summary.nmax,
            summary.seed,
            summary.agree,
            summary.trials,
            summary.rigid,
            summary.specialization_nonzero,
            summary.specialization_checked,
            summary.fan_single_term,
            summary.fan_checked
        ),
        OutputFormat::Json => serde_json::to_string_pretty(&summary).expect("summaries serialize") + "\n",
    };
    let code = if run.all_pass() { exit::RIGID } else { exit::DISAGREE };
    CommandOutput::ok(code, stdout)
}
