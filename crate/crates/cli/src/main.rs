//! `perslab`: experiment runner for persistence probabilities.
//!
//! Every subcommand reads an optional `--config` file of `key = value`
//! lines; flags override file keys. Data goes to standard output and to the
//! CSV at `output`, next to which a `.manifest` with the resolved config is
//! written. Exit status: 0 ok, 1 assertion failed, 2 configuration or
//! budget error.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Budget(String),
    Assertion(String),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Config(_) | Failure::Budget(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config-error: {m}"),
            Failure::Budget(m) => write!(f, "budget-exceeded: {m}"),
            Failure::Assertion(m) => write!(f, "assertion-failed: {m}"),
        }
    }
}

impl From<persistence_core::Error> for Failure {
    fn from(e: persistence_core::Error) -> Self {
        use persistence_core::Error as E;
        match e {
            E::StateBudgetExceeded { .. } | E::TooLarge(_) => Failure::Budget(e.to_string()),
            E::ExponentMismatch { .. } => Failure::Assertion(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

macro_rules! keys {
    ($($(#[$doc:meta])* $field:ident),* $(,)?) => {
        /// Configuration keys; each flag overrides the key of the same name
        /// in the config file.
        #[derive(Args, Debug, Default)]
        pub struct Keys {
            /// Config file of `key = value` lines (a run manifest works too)
            #[arg(long)]
            config: Option<PathBuf>,
            $($(#[$doc])* #[arg(long = stringify!($field))] $field: Option<String>,)*
        }

        impl Keys {
            fn pairs(self) -> (Option<PathBuf>, Vec<(&'static str, String)>) {
                let mut v = Vec::new();
                $(if let Some(x) = self.$field { v.push((stringify!($field), x)); })*
                (self.config, v)
            }
        }
    };
}

keys!(
    /// Increment family: simple, lazy, geometric, right-continuous, laplace, right-exponential, heavy-tail
    family,
    stay_prob,
    up_prob,
    neg_head,
    neg_tail_first,
    neg_tail_ratio,
    pos_prob,
    rate,
    neg_law,
    neg_rate,
    neg_width,
    /// Stability index (heavy-tail family) or target index (estimate-constant)
    alpha,
    k0,
    /// Time horizon
    n,
    /// Grid of horizons: `16,32,64` or `geom:lo:hi:count`
    grid,
    /// Transition budget of the exact program
    budget,
    horizon,
    /// Crossing convention: weak-up, strict-up, last-negative, leave-zero
    convention,
    /// Positivity sequence: spec, half, one, zero
    probs,
    /// strict or weak
    mode,
    /// Bivariate law: a builtin name or `x,y=p;x,y=p;...`
    bspec,
    /// Cycle length cap
    cap,
    samples,
    tolerance,
    /// Estimate CSV to read
    input,
    slope_tolerance,
    /// Use the exact programs where available (true/false)
    exact,
    /// Base seed; defaults to $PERSISTLAB_SEED, then 0
    seed,
    shards,
    /// CSV path; the manifest goes next to it
    output,
    /// Turn assertions on or off (default on)
    assert,
);

#[derive(Parser, Debug)]
#[command(name = "perslab", version, about = "Persistence probabilities of integrated random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact p_N for lattice laws
    ExactP(Keys),
    /// Exact bridge persistence p*_N
    ExactBridge(Keys),
    /// p_N by exhaustive path enumeration
    Enumerate(Keys),
    /// Exact law of the first cycle up to a horizon
    CycleLaw(Keys),
    /// Asymmetry of the exact cycle laws under the crossing conventions
    SymmetryAudit(Keys),
    /// Positivity probabilities and the Sparre-Andersen recursion
    Spitzer(Keys),
    /// Partial sums of sum_n (P(S_n > 0) - 1/alpha) / n
    SeriesDiagnostic(Keys),
    /// Half-plane inequalities for a bivariate walk
    Prop2(Keys),
    /// KS test of cycle lengths against positive cycle areas
    CorollaryCheck(Keys),
    /// Monte Carlo p_N
    McP(Keys),
    /// Monte Carlo tail of the first cycle length
    McCycleTail(Keys),
    /// Scaling of the number of cycles by time N
    EtaScaling(Keys),
    /// Both sides of the cycle-minimum identity
    KeyIdentity(Keys),
    /// Monte Carlo P(S_n > 0)
    PositivityLimit(Keys),
    /// Log-log fit of an estimate CSV
    FitExponent(Keys),
    /// Persistence constant from an estimate CSV
    EstimateConstant(Keys),
    /// Grid of p_N, exponent fit, constant and its reference interval
    ScalingReport(Keys),
    /// Run the command named by the config's `command` key
    Run(Keys),
}

impl Command {
    fn split(self) -> (Option<&'static str>, Keys) {
        use Command::*;
        match self {
            ExactP(k) => (Some("exact-p"), k),
            ExactBridge(k) => (Some("exact-bridge"), k),
            Enumerate(k) => (Some("enumerate"), k),
            CycleLaw(k) => (Some("cycle-law"), k),
            SymmetryAudit(k) => (Some("symmetry-audit"), k),
            Spitzer(k) => (Some("spitzer"), k),
            SeriesDiagnostic(k) => (Some("series-diagnostic"), k),
            Prop2(k) => (Some("prop2"), k),
            CorollaryCheck(k) => (Some("corollary-check"), k),
            McP(k) => (Some("mc-p"), k),
            McCycleTail(k) => (Some("mc-cycle-tail"), k),
            EtaScaling(k) => (Some("eta-scaling"), k),
            KeyIdentity(k) => (Some("key-identity"), k),
            PositivityLimit(k) => (Some("positivity-limit"), k),
            FitExponent(k) => (Some("fit-exponent"), k),
            EstimateConstant(k) => (Some("estimate-constant"), k),
            ScalingReport(k) => (Some("scaling-report"), k),
            Run(k) => (None, k),
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (command, keys) = cli.command.split();
    let (file, flags) = keys.pairs();
    let cfg = Config::resolve(command, file.as_deref(), flags)?;
    let out = commands::dispatch(&cfg)?;

    let path = cfg.output();
    let io = |e: std::io::Error| Failure::config(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(&path, &out.csv).map_err(io)?;
    std::fs::write(path.with_extension("manifest"), cfg.manifest()).map_err(io)?;

    print!("{}", out.stdout);
    for note in &out.notes {
        eprintln!("{note}");
    }
    if !out.failed.is_empty() {
        let msg = out.failed.join("; ");
        if cfg.asserting()? {
            return Err(Failure::Assertion(msg));
        }
        eprintln!("not asserted: {msg}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
