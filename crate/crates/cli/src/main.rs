//! `vdck`: generate van der Corput-Kronecker-type points over F_p and check
//! their structural properties exactly.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 horizon or budget exhausted,
//! 4 falsification (a result contradicting a property the construction is
//! supposed to have), 1 I/O failure.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CmdError, GenArgs, GrowthArgs, LowerBoundArgs, VerifyCmd};
use config::Common;

#[derive(Parser, Debug)]
#[command(name = "vdck", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the first N points as exact rationals to points.csv.
    Gen(GenArgs),
    /// Check one structural property and report PASS or FAIL.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Exact box-count deficit of the (I, H, J) net for a given m.
    Lowerbound(LowerBoundArgs),
    /// Exact N D*_N for N = p^k and least-squares fits.
    Growth(GrowthArgs),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Gen(a) => &a.common,
            Command::Lowerbound(a) => &a.common,
            Command::Growth(a) => &a.common,
            Command::Verify { which } => match which {
                VerifyCmd::Deficiency { common, .. }
                | VerifyCmd::Tvalue { common, .. }
                | VerifyCmd::Admissible { common, .. }
                | VerifyCmd::Hankel { common, .. }
                | VerifyCmd::Correspondence { common, .. } => common,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    if let Some(threads) = common.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let format = common.format;
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Verify { which } => commands::verify(which),
        Command::Lowerbound(a) => commands::lowerbound(a),
        Command::Growth(a) => commands::growth(a),
    };
    match result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(outcome.report.render(format).as_bytes())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.falsified { 4 } else { 0 })
        }
        Err(CmdError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_falsification() {
                4
            } else if e.is_budget() {
                3
            } else {
                2
            })
        }
        Err(CmdError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
