//! `dougall-pi`: exact checks of the finite identities, certification of
//! the bundled pi formulas, and digit computations.
//!
//! Exit codes: 0 pass, 1 usage error, 2 mathematical failure, 3 only
//! known anomalies failed.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dougall_pi::inversion::Pair;
use dougall_pi::Error;

use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "dougall-pi", version, about = "Verify Dougall-sum identities and the pi series derived from them")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Catalog file to use instead of the bundled one.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Print passing items too.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Deliberate fault for exercising the failure paths.
    #[arg(long, global = true, value_enum, hide = true)]
    pub inject: Option<Inject>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inject {
    /// Negate one side of every identity.
    SignFlip,
    /// Use the all-zero inversion scheme.
    ZeroScheme,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact and high-precision checks.
    #[command(subcommand)]
    Verify(Verify),
    /// Canonical base-16 series for a parameter box.
    Derive(DeriveArgs),
    /// Decimal digits of pi from a catalog entry.
    Pi(PiArgs),
    /// Hexadecimal digits of pi at an arbitrary position.
    Bbp(BbpArgs),
    /// Ratio of consecutive terms of a catalog entry.
    Rate(RateArgs),
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Dougall's terminating sum against its closed form.
    Dougall(DougallArgs),
    /// Round trips through the inverse series pairs.
    Inversion(InversionArgs),
    /// Parity form, binomial form and dual relation.
    Chain(TrialArgs),
    /// Lemma and both families against their Gamma quotients.
    Lemma(LemmaArgs),
    /// Gamma(x+n) / (n^x (n-1)!) against 1.
    Limit(LimitArgs),
    /// Every catalog entry: numeric value and theorem match.
    Catalog(CatalogArgs),
    /// Catalog entries against the two base-16 digit formulas.
    Bbp(BbpEquivArgs),
}

#[derive(Args, Debug)]
pub struct TrialArgs {
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Bound on numerators and denominators of random rationals.
    #[arg(long, default_value_t = 12)]
    pub max_coeff: i64,
}

#[derive(Args, Debug)]
pub struct DougallArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub max_coeff: i64,
}

#[derive(Args, Debug)]
pub struct InversionArgs {
    #[arg(long, value_delimiter = ',', default_value = "plain,extended")]
    pub pairs: Vec<PairArg>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub max_coeff: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    Plain,
    Extended,
}

impl From<PairArg> for Pair {
    fn from(p: PairArg) -> Pair {
        match p {
            PairArg::Plain => Pair::Plain,
            PairArg::Extended => Pair::Extended,
        }
    }
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 120)]
    pub terms: usize,
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    /// Rational points x.
    #[arg(long, value_delimiter = ',', default_value = "1/3,1/2,5/6")]
    pub x: Vec<String>,
    /// Values of n; the tolerance at n is 1/n.
    #[arg(long, value_delimiter = ',', default_value = "100,1000")]
    pub n: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub digits: u32,
}

#[derive(Args, Debug)]
pub struct BbpEquivArgs {
    #[arg(long)]
    pub id: Option<String>,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    #[arg(long)]
    pub theorem: String,
    /// Parameters `a,b,c,d`, each an integer or `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
    /// Also sum the series to this many digits and compare with the Gamma quotient.
    #[arg(long)]
    pub digits: Option<u32>,
}

#[derive(Args, Debug)]
pub struct PiArgs {
    #[arg(long)]
    pub entry: String,
    #[arg(long, default_value_t = 100)]
    pub digits: u32,
}

#[derive(Args, Debug)]
pub struct BbpArgs {
    #[arg(long)]
    pub pos: u64,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// Cross-check against a base conversion of the reference value.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value_t = 500)]
    pub k: usize,
    /// Fail unless the ratio is within this relative distance of the limit.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// A run that could not start: bad arguments, unknown ids, unreadable input.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let started = Instant::now();
    let mut report = RunReport::new(command);
    let outcome = dougall_pi::par::with_jobs(cli.jobs, || commands::run(&cli, &mut report));
    if let Err(UsageError(msg)) = outcome {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    report.finish();
    if cli.timings {
        report.elapsed_ms = Some(started.elapsed().as_millis());
    }
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Format::Text => print!("{}", report.to_text(cli.verbose)),
    }
    ExitCode::from(report.exit_code() as u8)
}
