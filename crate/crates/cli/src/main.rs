mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pslrack::config::{Limits, DEFAULT_MAX_Q};
use pslrack::fpgroup::DEFAULT_COSET_LIMIT;
use pslrack::subgroups::DEFAULT_LATTICE_BOUND;

use commands::{CliError, FpOptions, ModeArg};
use output::{OracleStatus, Report};

/// Conjugacy classes of PSL(2,q) as racks: class tables, subracks,
/// minimality, associated groups and second homology.
#[derive(Parser, Debug)]
#[command(name = "pslrack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Print the report as JSON
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print class tables as CSV
    #[arg(long, global = true)]
    csv: bool,
    /// Largest accepted field order
    #[arg(long, global = true, env = "PSLRACK_MAX_Q", default_value_t = DEFAULT_MAX_Q)]
    max_q: u32,
    /// Largest group order for which full subgroup lattices are built
    #[arg(long, global = true, env = "PSLRACK_LATTICE_BOUND", default_value_t = DEFAULT_LATTICE_BOUND)]
    lattice_bound: u64,
    /// Coset table rows before enumeration gives up
    #[arg(long, global = true, env = "PSLRACK_COSET_LIMIT", default_value_t = DEFAULT_COSET_LIMIT)]
    coset_limit: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of the conjugacy classes of PSL(2,q)
    Classes { q: u32 },
    /// Subrack families of a class
    Subracks {
        q: u32,
        /// Class id as printed by `classes`, e.g. unip:b=1
        class: String,
        /// Cross-check against brute-force subracks
        #[arg(long)]
        verify: bool,
        /// Brute-force oracle for --verify
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Whether classes are minimal non-abelian racks
    Minimal {
        q: u32,
        /// A single class id; all non-trivial classes by default
        class: Option<String>,
    },
    /// Associated group and relative Schur multiplier of a class
    Ass { q: u32, class: String },
    /// Second quandle homology of a class
    H2 { q: u32, class: String },
    /// Coset enumeration and class data for a presentation
    Fpgroup {
        /// Presentation file, or @a6cover, @a6cover-schur, @a5 for a built-in one
        file: String,
        /// Report coset counts
        #[arg(long)]
        cosets: bool,
        /// Conjugacy classes of the enumerated group
        #[arg(long)]
        classes: bool,
        /// Quotient by the central subgroup of order N
        #[arg(long, value_name = "N")]
        quotient: Option<usize>,
    },
    /// Run the invariant suite; exits non-zero if any check fails
    Verify {
        /// `Q`, `A-B` or a comma-separated list
        range: String,
        /// Include per-check timings (output is then not reproducible)
        #[arg(long)]
        timings: bool,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    let limits = Limits { max_q: g.max_q, lattice_bound: g.lattice_bound, coset_limit: g.coset_limit };
    let field = |q: u32| limits.field(q);
    match &cli.command {
        Command::Classes { q } => commands::classes(&field(*q)?, &limits),
        Command::Subracks { q, class, verify, mode } => commands::subracks(&field(*q)?, class, *verify, *mode, &limits),
        Command::Minimal { q, class } => commands::minimal(&field(*q)?, class.as_deref()),
        Command::Ass { q, class } => commands::ass(&field(*q)?, class),
        Command::H2 { q, class } => commands::h2(&field(*q)?, class),
        Command::Fpgroup { file, cosets, classes, quotient } => {
            commands::fpgroup(file, &FpOptions { cosets: *cosets, classes: *classes, quotient: *quotient }, &limits)
        }
        Command::Verify { range, timings } => commands::verify(range, &limits, *timings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = if cli.global.csv {
        match &report.csv {
            Some(c) => c.clone(),
            None => {
                eprintln!("error: --csv is only available for class tables");
                return ExitCode::from(2);
            }
        }
    } else if cli.global.json {
        serde_json::to_string_pretty(&report.envelope()).expect("json") + "\n"
    } else {
        report.render_human()
    };
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => {}
        // a closed pipe (`| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if report.command == "verify" && report.status == OracleStatus::OracleFailed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
