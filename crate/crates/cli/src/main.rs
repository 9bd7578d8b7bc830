use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chronoforce::ConsistencyMode;
use chronoforce_cli::{load_model, run_command, CliError, Command, Flags, Report, EXIT_ERROR};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Finite-model checker for monotone record systems.
#[derive(Parser)]
#[command(name = "chronoforce", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Static checks on every event definition.
    Validate(Opts),
    /// Reachable states plus consistency, monotonicity, diamond and clock checks.
    Explore(Opts),
    /// Weak and strong influence edges with witnesses.
    Influence(Opts),
    /// Induced order, linear extension and strong cycles.
    Chronology(Opts),
    /// Every premise check and the cycle verdict.
    Diagnose(Opts),
    /// Invariance of a schedule under swaps of independent events.
    TraceCheck(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nonempty,
    Measure,
}

#[derive(Args)]
struct Opts {
    /// Model file (JSON).
    #[arg(value_name = "MODEL", required_unless_present = "model")]
    path: Option<PathBuf>,
    #[arg(long, value_name = "PATH", conflicts_with = "path")]
    model: Option<PathBuf>,
    /// Consistency mode, overriding the model file.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_name = "N", default_value_t = Flags::default().max_states)]
    max_states: usize,
    #[arg(long, value_name = "N", default_value_t = Flags::default().max_depth)]
    max_depth: usize,
    /// Comma-separated event names (trace-check).
    #[arg(long, value_delimiter = ',', value_name = "E1,E2,...")]
    schedule: Option<Vec<String>>,
    /// Random swap chains (trace-check).
    #[arg(long, value_name = "N", default_value_t = Flags::default().swaps)]
    swaps: usize,
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Write a Graphviz graph.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Write the JSON report; `-` prints it instead of the summary.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Treat monotonicity violations and unmatched table rules as errors.
    #[arg(long)]
    strict: bool,
}

impl Opts {
    fn flags(&self) -> Flags {
        Flags {
            mode: self.mode.map(|m| match m {
                Mode::Nonempty => ConsistencyMode::Nonempty,
                Mode::Measure => ConsistencyMode::PositiveMeasure,
            }),
            max_states: self.max_states,
            max_depth: self.max_depth,
            schedule: self.schedule.clone(),
            swaps: self.swaps,
            seed: self.seed,
            strict: self.strict,
        }
    }

    fn model_path(&self) -> &Path {
        self.model
            .as_deref()
            .or(self.path.as_deref())
            .expect("clap enforces a model path")
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn run(cmd: Command, opts: &Opts) -> Result<Report, CliError> {
    if opts.dot.is_some() && matches!(cmd, Command::Validate | Command::TraceCheck) {
        return Err(CliError::Usage(format!("--dot is not available for {}", cmd.as_str())));
    }
    let path = opts.model_path();
    let model = load_model(path)?;
    let mut report = run_command(cmd, &model, &opts.flags())?;
    report.command.model = Some(path.display().to_string());

    if let (Some(path), Some(dot)) = (&opts.dot, &report.dot) {
        write(path, dot)?;
    }
    match &opts.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(p) => {
            write(p, &report.to_json())?;
            print!("{}", report.summary);
        }
        None => print!("{}", report.summary),
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, opts) = match &cli.command {
        Cmd::Validate(o) => (Command::Validate, o),
        Cmd::Explore(o) => (Command::Explore, o),
        Cmd::Influence(o) => (Command::Influence, o),
        Cmd::Chronology(o) => (Command::Chronology, o),
        Cmd::Diagnose(o) => (Command::Diagnose, o),
        Cmd::TraceCheck(o) => (Command::TraceCheck, o),
    };
    match run(cmd, opts) {
        Ok(report) => ExitCode::from(report.exit_status),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
