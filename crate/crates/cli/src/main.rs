//! `hilding`: fit, verify and apply perturbation certificates from the
//! command line.
//!
//! Exit codes: 0 verified or pass, 1 refuted or fail, 2 inconclusive, 3 input
//! error, 4 numerical failure.

mod commands;
mod problem;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<hilding::Error> for Failure {
    fn from(e: hilding::Error) -> Failure {
        use hilding::Error as E;
        let code = match &e {
            E::Unverified { status, .. } if status == "refuted" => 1,
            E::Unverified { .. } => 2,
            E::Numerical(_) => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hilding",
    version,
    about = "Certified perturbation bounds for operators on lp spaces"
)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Seed for every randomized search [default: 0, or the file's seed].
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a certificate for (S, T), or verify the given one.
    Certify { file: PathBuf },
    /// Carry a certificate through inverse, scaling, homotopy and repair.
    Transform { file: PathBuf },
    /// Operator norm and minimum gain enclosures of T.
    Norm { file: PathBuf },
    /// Neumann-series inverse of T with its error bound.
    Invert { file: PathBuf },
    /// Eigenvalues of T and its fixed-point and antipodal gaps.
    Spectrum { file: PathBuf },
    /// Invertibility of alpha I - T along a real ray.
    Rays { file: PathBuf },
    /// Codimension of T(Y) by continuation from the identity.
    Codim { file: PathBuf },
    /// Kernels, codimensions and indices of a certified pair.
    Fredholm { file: PathBuf },
    /// Distance from x to the span of T^k x, n <= k <= K.
    Krylov { file: PathBuf },
    /// Build a named example and check its claims.
    Gallery {
        /// rotation_l1, block_rotation, truncated_shift, diagonal_growth or example10.
        name: Option<String>,
        /// Problem file with a [gallery] table.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// A number >= 1 or "inf".
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        k: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(report::Report, Outcome), Failure> {
    use commands::*;
    let seed = cli.seed;
    match cli.command {
        Command::Certify { file } => certify(&load(&file)?, seed),
        Command::Transform { file } => transform(&load(&file)?, seed),
        Command::Norm { file } => norm(&load(&file)?, seed),
        Command::Invert { file } => invert(&load(&file)?, seed),
        Command::Spectrum { file } => spectrum(&load(&file)?, seed),
        Command::Rays { file } => rays(&load(&file)?, seed),
        Command::Codim { file } => codim(&load(&file)?, seed),
        Command::Fredholm { file } => fredholm(&load(&file)?, seed),
        Command::Krylov { file } => krylov(&load(&file)?, seed),
        Command::Gallery {
            name,
            file,
            m,
            n,
            p,
            k,
        } => {
            let f = match file {
                Some(path) => load(&path)?,
                None => problem::ProblemFile::default(),
            };
            gallery(&f, GalleryArgs { name, m, n, p, k }, seed)
        }
    }
}

fn load(path: &std::path::Path) -> Result<problem::ProblemFile, Failure> {
    problem::ProblemFile::load(path)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok((mut report, outcome)) => {
            report.set("exit_code", outcome.code());
            print!("{}", report.render(format));
            ExitCode::from(outcome.code())
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
