//! `pdet`: command-line front end for the p-determinant pipelines.
//!
//! Exit codes: 0 on success, 1 when a verification finds a mismatch, 2 for
//! usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pdet_core::verify::CACHE_DIR_ENV;

#[derive(Parser, Debug)]
#[command(name = "pdet", version, about = "p-determinants and regularized determinants of differential operators")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Directory for cached coefficient series. Caching is off unless this
    /// or the environment variable is set.
    #[arg(long, env = CACHE_DIR_ENV, global = true)]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OperatorArgs {
    /// Operator description (JSON).
    #[arg(long = "op")]
    pub op: PathBuf,

    /// Replace the file's prefactor, e.g. "-(1+t)".
    #[arg(long, allow_hyphen_values = true)]
    pub prefactor: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Heun,
    Elliptic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// h = λ² from the Heun continued fraction.
    Heun,
    /// (λ − 1)² from the elliptic closed form.
    Elliptic,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Det_p(D) as a polynomial over F_p.
    Detp {
        #[command(flatten)]
        op: OperatorArgs,
        /// Primes, repeated or comma separated.
        #[arg(long = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// The regularized determinant L(D) with its certified order.
    Ldet {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        order: u64,
        /// Keep more powers of ε than the default n(K+1).
        #[arg(long)]
        eps_bound: Option<usize>,
    },
    /// The Weierstrass coefficients w_1 … w_n.
    Wpoly {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        order: u64,
        #[arg(long)]
        eps_bound: Option<usize>,
    },
    /// The monodromy-exponent series.
    Lambda {
        #[arg(long, value_enum, default_value_t = Variant::Heun)]
        variant: Variant,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..))]
        order: u64,
        /// Print the series that ldet is compared with instead: λ² for heun,
        /// (λ − 1)² for elliptic.
        #[arg(long)]
        square: bool,
    },
    /// Congruence reports: Det_p(D) against L(D) mod p.
    Verify {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u64).range(1..))]
        order: u64,
        /// Also run p = 2 (reported, never counted as a failure).
        #[arg(long)]
        force_p2: bool,
    },
    /// Denominator valuations against the conjectured formulas.
    Denoms {
        #[arg(long, value_enum, default_value_t = Source::Heun)]
        source: Source,
        /// Number of coefficients: t^0 … t^{order-1}.
        #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u64).range(3..))]
        order: u64,
        #[arg(long, default_value_t = 2)]
        start: usize,
        /// Exit 1 on deviations outside the documented exceptions.
        #[arg(long)]
        strict: bool,
    },
    /// Numerical monodromy eigenvalues around |x| = radius.
    #[command(name = "monodromy-num")]
    MonodromyNum {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t_imag: f64,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match commands::run(&cli) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
