//! `prym`: covers, Prym representations, orbit searches and point-pushing certificates.
//!
//! Exit codes: 0 success, 1 invalid input, 2 cap exceeded, 3 verification failure.

mod commands;
mod config;
mod inputs;
mod manifest;
mod report;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::commands::Run;
use crate::config::Settings;

#[derive(Parser)]
#[command(name = "prym", version, about = "Higher Prym representations of mapping class groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Print the surface group presentation and peripheral words
    Present,
    /// Build the cover of a marking and summarize it
    Cover,
    /// Emit the Prym representation bundle
    Prym,
    /// Search for a finite orbit in V_K
    Orbit,
    /// Stabilizer of the kernel under the generator library
    Stabilizer,
    /// Stabilizer, orbit search and point-pushing certificate
    Certify,
    /// Check a certificate against a bundle
    Verify,
    /// Run the invariant suites
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Present => "present",
            Command::Cover => "cover",
            Command::Prym => "prym",
            Command::Orbit => "orbit",
            Command::Stabilizer => "stabilizer",
            Command::Certify => "certify",
            Command::Verify => "verify",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Args, Clone, Default)]
pub struct Opts {
    /// Surface type `g,n,p` (genus, boundary components, punctures)
    #[arg(long, global = true)]
    pub surface: Option<String>,
    /// Level-L marking onto H_1 mod L
    #[arg(long, global = true)]
    pub level: Option<usize>,
    /// Target group: a table file or Q8, Zn, Dn, Sk, Zl^r
    #[arg(long, global = true)]
    pub quotient: Option<String>,
    /// Generator images such as `a->i,b->j`, or a marking file
    #[arg(long, global = true)]
    pub marking: Option<String>,
    /// Intersect the kernels of all epimorphisms onto the quotient
    #[arg(long, global = true)]
    pub epi_closure: bool,
    /// Generator library file instead of the built-in one
    #[arg(long, global = true)]
    pub library: Option<PathBuf>,
    /// Orbit cap in vectors
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[arg(long, global = true)]
    pub stabilizer_cap: Option<usize>,
    #[arg(long, global = true)]
    pub aut_cap: Option<usize>,
    #[arg(long, global = true)]
    pub epi_cap: Option<usize>,
    /// Worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `key = value` file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Also write a report; only `md` is supported
    #[arg(long, global = true)]
    pub report: Option<String>,
    /// Integer vector, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub vector: Option<String>,
    /// Candidate strategies: image, finite-order, short
    #[arg(long, global = true)]
    pub candidates: Option<String>,
    #[arg(long, global = true)]
    pub bundle: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cert: Option<PathBuf>,
}

#[derive(Debug)]
pub struct VerificationFailed(pub String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerificationFailed>().is_some() {
        return 3;
    }
    match e.downcast_ref::<prym_core::Error>() {
        Some(prym_core::Error::CapExceeded { .. }) => 2,
        Some(prym_core::Error::Internal(_)) => 3,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let settings = Settings::resolve(&cli.opts)?;
    if let Some(n) = settings.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut run = Run::new(cli.command.name(), &settings)?;
    let result = match cli.command {
        Command::Present => commands::present(&mut run),
        Command::Cover => commands::cover(&mut run),
        Command::Prym => commands::prym(&mut run),
        Command::Orbit => commands::orbit(&mut run),
        Command::Stabilizer => commands::stabilizer(&mut run),
        Command::Certify => commands::certify(&mut run),
        Command::Verify => commands::verify(&mut run),
        Command::Selftest => {
            let suites = selftest::run(settings.seed, settings.cap.min(200_000));
            let pass = suites.iter().all(|s| s.pass);
            for s in &suites {
                run.report.row(&s.name, if s.pass { "pass" } else { "fail" });
            }
            run.artifacts.manifest.result("pass", pass);
            run.artifacts.write_json("selftest.json", &suites)?;
            if pass {
                Ok(())
            } else {
                Err(VerificationFailed("selftest".into()).into())
            }
        }
    };
    // artifacts describe failed runs too
    run.finish()?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
