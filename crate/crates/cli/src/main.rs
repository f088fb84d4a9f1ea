use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

/// Lefschetz defect of complex abelian varieties.
#[derive(Parser)]
#[command(name = "defect", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Defect of an isogeny decomposition.
    Classify {
        file: PathBuf,
        /// Write a JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-class analysis and box search on an explicit torus.
    Torus {
        file: PathBuf,
        /// Coefficient bound for the search over the Néron-Severi basis.
        #[arg(long = "box", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=16))]
        box_bound: u32,
        /// Restrict the table to one declared class, by 1-based index or label.
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites on an explicit torus.
    Verify {
        file: PathBuf,
        /// Comma-separated subset of voisin,kunneth,lefschetz,oracle.
        #[arg(long, value_delimiter = ',', default_value = "voisin,kunneth,lefschetz,oracle")]
        checks: Vec<String>,
        #[arg(long = "box", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=16))]
        box_bound: u32,
    },
    /// Built-in reports.
    Report {
        #[arg(value_enum)]
        which: ReportKind,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Threefolds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { file, out } => commands::classify(&file, out.as_deref()),
        Command::Torus { file, box_bound, class, out } => {
            commands::torus(&file, box_bound, class.as_deref(), out.as_deref())
        }
        Command::Verify { file, checks, box_bound } => commands::verify(&file, &checks, box_bound),
        Command::Report { which: ReportKind::Threefolds, format } => commands::report_threefolds(format),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
