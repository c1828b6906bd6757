use std::path::PathBuf;
use std::process::ExitCode;

use bcabe_cli::{commands, Failure};
use bcabe_core::FamilyLabel;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bcabe", version, about = "Bell-correlated activable bound entangled states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a family's density matrix as a state file.
    State {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check recursion, orthogonality, Pauli connections and permutation invariance.
    Verify {
        #[arg(long, value_parser = parse_size)]
        size: usize,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Perturb rho+ before checking (test hook).
        #[arg(long, hide = true)]
        tamper: bool,
    },
    /// Partial-transpose analysis of every bipartition.
    Cuts {
        #[command(flatten)]
        target: Target,
        /// Magnitude of the NPT threshold.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound, simulated preparation, audit and ebit count.
    Certify {
        #[command(flatten)]
        target: Target,
        /// Defaults to exact up to 6 qubits and sampled beyond.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bound on the prepared state's trace distance to the target
        /// [default: 1e-12 exact, 0.05 sampled].
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the first branch's transcript [default: next to --out].
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long, value_parser = parse_size)]
    size: usize,
    #[arg(long, value_parser = parse_family, default_value = "rho+")]
    family: FamilyLabel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

fn parse_size(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if matches!(n, 4 | 6 | 8) {
        Ok(n)
    } else {
        Err(format!("size must be 4, 6 or 8 qubits, got {n}"))
    }
}

fn parse_family(s: &str) -> Result<FamilyLabel, String> {
    s.parse()
        .map_err(|_| format!("family must be one of rho+, rho-, sigma+, sigma-, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::State { target, out } => commands::state(target.size, target.family, &out),
        Command::Verify {
            size,
            tolerance,
            out,
            tamper,
        } => commands::verify(size, tolerance, out.as_deref(), tamper),
        Command::Cuts { target, tolerance, out } => {
            commands::cuts(target.size, target.family, tolerance, out.as_deref())
        }
        Command::Certify {
            target,
            mode,
            samples,
            seed,
            tolerance,
            out,
            transcript,
        } => {
            let mode = match mode.unwrap_or(if target.size <= 6 { Mode::Exact } else { Mode::Sampled }) {
                Mode::Exact => bcabe_core::ProtocolMode::Exact,
                Mode::Sampled => bcabe_core::ProtocolMode::Sampled { samples, seed },
            };
            let transcript = transcript.or_else(|| out.as_ref().map(|p| p.with_extension("transcript.jsonl")));
            commands::certify(
                target.size,
                target.family,
                mode,
                tolerance,
                out.as_deref(),
                transcript.as_deref(),
            )
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check => eprintln!("bcabe: one or more checks failed"),
                Failure::Usage(msg) => eprintln!("bcabe: {msg}"),
                Failure::Io(msg) => eprintln!("bcabe: I/O error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
