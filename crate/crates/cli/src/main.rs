//! `examiner` — a workbench for the surprise examination paradox.
//!
//! Subcommands expose each construction and derivation with text, JSON, and
//! CSV output; `check` re-verifies transcript files through the proof
//! kernels; `regen-goldens` rewrites the golden regression tree.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod error;
mod goldens;
mod proof_file;
mod render;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "examiner",
    version,
    about = "Formal-logic workbench for the surprise examination paradox",
    after_help = "Exit status: 0 success, 2 usage error, 3 domain error, 4 check failure.\n\
                  EXAMINER_FORMAT sets the default output format."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (default: $EXAMINER_FORMAT, else text).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to a file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Print Gödel numbers in full instead of abbreviated form.
    #[arg(long, global = true)]
    full_codes: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Gödelized self-referential announcement and machine-check
    /// the students' refutation of it.
    Fitch {
        /// Days in the exam week.
        #[arg(long, default_value_t = 2)]
        days: u32,
        /// Join the per-day disjuncts with exclusive-or (m <= 2 only).
        #[arg(long)]
        xor: bool,
    },
    /// Build the knowledge-rule announcement, derive the last-day
    /// elimination lemma and the contradiction from the knowledge tower.
    Epistemic {
        /// Days in the exam week.
        #[arg(long, default_value_t = 2)]
        days: u32,
        /// Use the designated-student labels (Art, Bob, Carl, Don, Eric).
        #[arg(long)]
        students: bool,
    },
    /// Build the Knower sentence and derive its contradiction.
    Knower,
    /// Iterated prisoner's dilemma: backward induction, and exhaustive pure
    /// Nash enumeration at n <= 2.
    Ipd {
        /// Number of rounds.
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        /// Payoff quadruple T,R,P,S (rationals; default 2,1,0,-2).
        #[arg(long, value_name = "T,R,P,S")]
        payoffs: Option<String>,
        /// Exhaustively enumerate pure Nash equilibria (n <= 2).
        #[arg(long)]
        enumerate: bool,
    },
    /// Compute the surprise-maximizing exam schedule.
    Surprise {
        /// Days in the week.
        #[arg(long, default_value_t = 5)]
        days: usize,
        /// Cross-check the recursion against the grid-search oracle.
        #[arg(long)]
        oracle: bool,
        /// Shorthand for --format csv.
        #[arg(long)]
        csv: bool,
    },
    /// Re-verify a proof transcript file (text or JSON); exits 4 on
    /// rejection.
    Check {
        /// Transcript file (.json or text).
        file: PathBuf,
        /// Rule set override: fitch, knower, or epistemic.
        #[arg(long)]
        rules: Option<String>,
        /// Day horizon for epistemic checking (when not in the file).
        #[arg(long)]
        days: Option<u32>,
        /// Designated-student agent labels for epistemic checking.
        #[arg(long)]
        students: bool,
    },
    /// Rewrite the golden transcripts and tables deterministically.
    RegenGoldens {
        /// Target directory.
        dir: PathBuf,
    },
}

fn resolve_format(cli_format: Option<Format>, csv_shorthand: bool) -> Result<Format, CliError> {
    if csv_shorthand {
        return Ok(Format::Csv);
    }
    if let Some(f) = cli_format {
        return Ok(f);
    }
    match std::env::var("EXAMINER_FORMAT") {
        Ok(v) => match v.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Usage(format!(
                "EXAMINER_FORMAT must be text, json, or csv (got '{other}')"
            ))),
        },
        Err(_) => Ok(Format::Text),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let csv_shorthand = matches!(&cli.command, Command::Surprise { csv: true, .. });
    let format = resolve_format(cli.format, csv_shorthand)?;
    let rendered = match cli.command {
        Command::Fitch { days, xor } => render::fitch(days, xor, format, cli.full_codes)?,
        Command::Epistemic { days, students } => render::epistemic(days, students, format)?,
        Command::Knower => render::knower(format, cli.full_codes)?,
        Command::Ipd {
            rounds,
            payoffs,
            enumerate,
        } => render::ipd(rounds, payoffs.as_deref(), enumerate, format)?,
        Command::Surprise { days, oracle, .. } => render::surprise(days, oracle, format)?,
        Command::Check {
            file,
            rules,
            days,
            students,
        } => render::check_file(&file, rules.as_deref(), days, students)?,
        Command::RegenGoldens { dir } => {
            let written = goldens::regenerate(&dir)?;
            format!("wrote {} golden files under {}\n", written, dir.display())
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered).map_err(CliError::Io)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
