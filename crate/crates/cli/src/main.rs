use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ea_cli::commands::{run, Command, ObservableAction, Options};
use ea_cli::report::Format;

/// Workbench for finite effect algebras.
///
/// Exit codes: 0 when every checked property holds, 1 when one fails,
/// 2 on usage or input errors.
#[derive(Parser)]
#[command(name = "ea", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Node budget for compatibility searches.
    #[arg(long, global = true, default_value_t = ea_core::compat::DEFAULT_BUDGET)]
    budget: u64,
    /// Largest algebra size for `sweep`.
    #[arg(long, global = true, default_value_t = 6)]
    max_size: usize,
    /// Seed for random observables.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Compare the report with this file, or write it there if missing.
    #[arg(long, global = true)]
    snapshot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the axioms and list violations.
    Validate { file: PathBuf },
    /// RDP, RIP, homogeneity, lattice, orthoalgebra, OMP and OML flags.
    Classify { file: PathBuf },
    /// Sharp, principal and central elements.
    Sharp { file: PathBuf },
    /// The orthoalgebraic skeleton.
    Skeleton { file: PathBuf },
    /// Maximal internally compatible subsets.
    Blocks { file: PathBuf },
    /// Maximal Boolean sub-orthoalgebras.
    BooleanCover { file: PathBuf },
    /// Compatibility of two elements.
    Compat { file: PathBuf, a: String, b: String },
    /// Elements compatible with `a`.
    Commutant { file: PathBuf, a: String },
    /// Simple observables.
    Observable {
        #[command(subcommand)]
        action: ObservableCmd,
    },
    /// Spectral resolutions.
    Resolution {
        #[command(subcommand)]
        action: ResolutionCmd,
    },
    /// Extreme states, order determination and fullness.
    States { file: PathBuf },
    /// The embedding into functions on the extreme states.
    Clan { file: PathBuf },
    /// Run every structural check over all algebras up to a size.
    Sweep {
        /// Overrides --max-size.
        n: Option<usize>,
    },
    /// Hasse diagram in DOT, sharp elements as filled boxes.
    Dot { file: PathBuf },
}

#[derive(clap::Args)]
struct ObservableArgs {
    file: PathBuf,
    /// Space-separated `value:label` atoms; random observables when absent.
    #[arg(long)]
    atoms: Option<String>,
    /// How many random observables.
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Subcommand)]
enum ObservableCmd {
    Build(ObservableArgs),
    Roundtrip(ObservableArgs),
    Question(ObservableArgs),
    Range(ObservableArgs),
}

#[derive(Subcommand)]
enum ResolutionCmd {
    /// Validate `value:label` jumps and rebuild the observable.
    Check {
        file: PathBuf,
        #[arg(long)]
        jumps: String,
    },
}

fn command(cmd: Cmd, options: &mut Options) -> Command {
    match cmd {
        Cmd::Validate { file } => Command::Validate(file),
        Cmd::Classify { file } => Command::Classify(file),
        Cmd::Sharp { file } => Command::Sharp(file),
        Cmd::Skeleton { file } => Command::Skeleton(file),
        Cmd::Blocks { file } => Command::Blocks(file),
        Cmd::BooleanCover { file } => Command::BooleanCover(file),
        Cmd::Compat { file, a, b } => Command::Compat { file, a, b },
        Cmd::Commutant { file, a } => Command::Commutant { file, a },
        Cmd::Observable { action } => {
            let (action, args) = match action {
                ObservableCmd::Build(a) => (ObservableAction::Build, a),
                ObservableCmd::Roundtrip(a) => (ObservableAction::Roundtrip, a),
                ObservableCmd::Question(a) => (ObservableAction::Question, a),
                ObservableCmd::Range(a) => (ObservableAction::Range, a),
            };
            Command::Observable { action, file: args.file, atoms: args.atoms, count: args.count }
        }
        Cmd::Resolution { action: ResolutionCmd::Check { file, jumps } } => {
            Command::ResolutionCheck { file, jumps }
        }
        Cmd::States { file } => Command::States(file),
        Cmd::Clan { file } => Command::Clan(file),
        Cmd::Sweep { n } => {
            if let Some(n) = n {
                options.max_size = n;
            }
            Command::Sweep
        }
        Cmd::Dot { file } => Command::Dot(file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    let mut options = Options { budget: cli.budget, max_size: cli.max_size, seed: cli.seed };
    let cmd = command(cli.command, &mut options);

    let report = match run(&cmd, &options) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(err.exit_code());
        }
    };
    let text = report.render(format);
    print!("{text}");

    if let Some(path) = cli.snapshot {
        match std::fs::read_to_string(&path) {
            Ok(old) if old == text => {}
            Ok(_) => {
                eprintln!("report differs from snapshot {}", path.display());
                return ExitCode::from(1);
            }
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => {
                if let Err(err) = std::fs::write(&path, &text) {
                    eprintln!("error: {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            }
            Err(err) => {
                eprintln!("error: {}: {err}", path.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(u8::from(report.violation))
}
