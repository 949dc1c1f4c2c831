use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qsense_cli::{
    cmd_bound, cmd_control_simulate, cmd_curves_biomag, cmd_curves_fig1, cmd_mc, parse_count, parse_frequencies,
    render_json, CliError, ScenarioSpec,
};
use qsense_core::scenarios::ProbeKind;

#[derive(Parser)]
#[command(name = "qsense", version, about = "Quantum speed limits for sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Speed limits and detection time for a scenario spec (JSON on stdout).
    Bound {
        spec: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Tabulated curves as CSV.
    Curves {
        #[command(subcommand)]
        curve: Curve,
    },
    /// Monte Carlo detection-rate sweep over time.
    Mc {
        spec: PathBuf,
        #[arg(long, default_value = "10000", value_parser = parse_count)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of time points, including t = 0.
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Controlled rotating-field detection.
    Control {
        #[command(subcommand)]
        action: ControlAction,
    },
}

#[derive(Subcommand)]
enum Curve {
    /// Bounds and crossing time against the probe weight c0².
    Fig1 {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value = "1", value_parser = parse_count)]
        n: u64,
        #[arg(long, default_value_t = 199)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, value_enum, default_value_t = KindArg::Single)]
        kind: KindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum resolvable field amplitude against frequency.
    Biomag {
        #[arg(long, default_value = "1", value_parser = parse_count)]
        n: u64,
        /// `lo:hi:log[:points]`, `lo:hi:lin[:points]` or a single value in Hz.
        #[arg(long, default_value = "1:1000:log", value_parser = |s: &str| parse_frequencies(s).map(Frequencies))]
        f: Frequencies,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, value_enum, default_value_t = KindArg::Single)]
        kind: KindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone)]
struct Frequencies(Vec<f64>);

#[derive(Subcommand)]
enum ControlAction {
    /// Fidelity trace under the controlled Hamiltonian.
    Simulate {
        spec: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Use the first-order expansion of the signal around the control point.
        #[arg(long)]
        linearized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Single,
    Product,
    Ghz,
}

impl From<KindArg> for ProbeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Single => ProbeKind::Single,
            KindArg::Product => ProbeKind::Product,
            KindArg::Ghz => ProbeKind::Ghz,
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => write_stdout(text),
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Returns `true` when the result is feasible.
fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Bound { spec, pretty } => {
            let out = cmd_bound(&ScenarioSpec::from_path(&spec)?)?;
            write_stdout(&(render_json(&out, pretty) + "\n"))?;
            Ok(out.feasible)
        }
        Command::Curves { curve } => {
            let (text, out) = match curve {
                Curve::Fig1 { omega, n, grid, m, kind, out } => (cmd_curves_fig1(omega, n, grid, m, kind.into())?, out),
                Curve::Biomag { n, f, m, kind, out } => (cmd_curves_biomag(n, &f.0, m, kind.into())?, out),
            };
            emit(&text, out.as_deref())?;
            Ok(true)
        }
        Command::Mc { spec, reps, seed, points, t_max, out } => {
            let text = cmd_mc(&ScenarioSpec::from_path(&spec)?, reps, seed, points, t_max)?;
            emit(&text, out.as_deref())?;
            Ok(true)
        }
        Command::Control {
            action: ControlAction::Simulate { spec, steps, linearized, out },
        } => {
            let text = cmd_control_simulate(&ScenarioSpec::from_path(&spec)?, steps, linearized)?;
            emit(&text, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qsense: infeasible: the detection threshold is not reached");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("qsense: {e}");
            ExitCode::from(1)
        }
    }
}
