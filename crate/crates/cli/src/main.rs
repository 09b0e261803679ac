use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bodycad::parallel::Execution;
use bodycad_cli::{
    cmd_analyze, cmd_check_graph, cmd_crossvalidate, exit, CommandOutput, CrossValidateOptions, FieldChoice,
    OutputFormat,
};
use clap::{Args, Parser, Subcommand};

/// Rigidity analysis of body-and-cad constraint systems.
///
/// Exit codes: 0 minimally rigid, 1 input error, 2 underconstrained,
/// 3 dependent, 4 combinatorial verdict withheld, 5 numeric disagreement.
#[derive(Parser)]
#[command(name = "bodycad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormatArgs {
    /// Machine-readable JSON output.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output (default).
    #[arg(long)]
    text: bool,
}

impl FormatArgs {
    fn format(&self) -> OutputFormat {
        if self.json {
            OutputFormat::Json
        } else {
            OutputFormat::Text
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a constraint document.
    Analyze {
        path: PathBuf,
        /// Seed of the random generic labeling.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Field for the numeric checks.
        #[arg(long, value_enum, default_value_t = FieldChoice::Rational)]
        field: FieldChoice,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Decide a bare bi-colored multigraph.
    CheckGraph {
        path: PathBuf,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        g: usize,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Compare the combinatorial decision with random determinants.
    Crossvalidate {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        g: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run trials one at a time.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        format: FormatArgs,
    },
}

fn run(cli: Cli) -> CommandOutput {
    match cli.command {
        Command::Analyze { path, seed, field, format } => cmd_analyze(&path, seed, field, format.format()),
        Command::CheckGraph { path, k, g, format } => cmd_check_graph(&path, k, g, format.format()),
        Command::Crossvalidate { trials, nmax, k, g, seed, sequential, format } => {
            let execution = if sequential { Execution::Sequential } else { Execution::Parallel };
            cmd_crossvalidate(&CrossValidateOptions { trials, nmax, k, g, seed, execution }, format.format())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = run(cli);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
