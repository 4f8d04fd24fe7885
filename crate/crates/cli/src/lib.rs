//! Command-line front end: barrier budgets, topology checks, conditioning
//! studies, extractions and sensitivity planning.

mod commands;
pub mod manifest;
pub mod output;
pub mod reports;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "gkpforge",
    version,
    about = "Generalized King plot rank-2 toolkit"
)]
pub struct Cli {
    /// Isotope chain (CSV or JSON); defaults to the bundled Mo chain.
    #[arg(long, global = true)]
    pub chain: Option<PathBuf>,
    /// Directory receiving the JSON report (and CSV where applicable).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Overrides the seed of any random component.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Barrier budget for one probe isotope.
    Budget {
        /// Anchor configuration; defaults to the bundled Mo41+ anchors.
        #[arg(long)]
        anchors: Option<PathBuf>,
        /// `current` or `projected`.
        #[arg(long, default_value = "current")]
        scenario: String,
        /// Mass number of the probe isotope.
        #[arg(long, default_value_t = 95)]
        probe: u32,
        /// Upper electronic state, e.g. `2p3/2`.
        #[arg(long, default_value = "2p3/2")]
        channel: String,
    },
    /// Equation counting for the minimum topologies.
    Solvability {
        /// Rank-2-sensitive transitions in the requested configuration.
        #[arg(long, default_value_t = 1)]
        transitions: u32,
        /// Background unknowns per fit.
        #[arg(long, default_value_t = 2)]
        nbkg: u32,
        /// Radioactive odd isotope to add (repeatable).
        #[arg(long = "add-isotope")]
        add_isotope: Vec<u32>,
    },
    /// κ distribution over sampled probe parameters.
    Condition {
        /// Sampling spec; defaults to the bundled 91Mo spec.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Electronic coefficients; defaults to the bundled Mo41+ set.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Overrides the sample count of the spec.
        #[arg(long)]
        samples: Option<usize>,
        /// Use the bundled positive-Qs sampling spec.
        #[arg(long)]
        positive: bool,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Weighted least-squares extraction of the gravitomagnetic coupling.
    Extract {
        /// Residual file, or `bundled:<name>`.
        #[arg(long)]
        rhs: String,
        /// Electronic coefficients; defaults to the bundled Mo41+ set.
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// Milestone ladder, optionally located at a target sensitivity.
    Milestones {
        /// Target sensitivity in eV.
        #[arg(long)]
        target: Option<f64>,
        /// Milestone ladder; defaults to the bundled ladder.
        #[arg(long)]
        ladder: Option<PathBuf>,
    },
    /// Decay-limited Ramsey plan.
    Ramsey {
        /// Half-life, e.g. `930s`, `15.5min`; omit for a stable isotope.
        #[arg(long = "half-life")]
        half_life: Option<String>,
        /// Requested interrogation time; defaults to the optimum (or 1 s).
        #[arg(long)]
        tr: Option<String>,
        /// Independent repetitions averaged in the campaign.
        #[arg(long, default_value_t = 1)]
        reps: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// The physics refuses: underdetermined or singular systems.
    Refused(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Refused(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Refused(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

/// Runs the parsed command, returning the text for stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    commands::run(cli)
}
