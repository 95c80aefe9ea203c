// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for `cpmod`.
//!
//! Every command reads a problem file (see [`problem`]), prints a [`Report`]
//! on standard output and exits with 0 for a positive verdict, 1 for a
//! negative one and 2 when the input or a precondition is invalid.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
pub mod problem;
pub mod report;

pub use problem::{ElementFile, ProblemFile};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] cpmod::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Complete,
    Pointwise,
}

#[derive(Debug, Parser)]
#[command(name = "cpmod", version, about = "Completely positive maps on Hilbert C*-modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Equality tolerance; rank and PSD thresholds scale with it.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Run sampled oracle checks and add their residuals to the report.
    #[arg(long, global = true)]
    pub verify: bool,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of samples for sampled checks.
    #[arg(long, global = true, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a map is a module CP map and print its underlying map.
    Validate { file: PathBuf, map: String },
    /// Stinespring quintuple of a map.
    Stinespring { file: PathBuf, map: String },
    /// Equivalence of two maps and the connecting partial isometry.
    Compare { file: PathBuf, a: String, b: String },
    /// Whether the first map is dominated by the second.
    Dominates {
        file: PathBuf,
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "complete")]
        mode: Mode,
    },
    /// Radon-Nikodym derivative of the first map with respect to the second.
    Rn { file: PathBuf, a: String, b: String },
    /// Compression of a map by a commutant element `T ⊕ S`.
    Compress {
        file: PathBuf,
        map: String,
        #[arg(long)]
        element: PathBuf,
    },
    /// Basis of the commutant of the Stinespring representation.
    Commutant { file: PathBuf, map: String },
    /// Purity test through the commutant dimension.
    Purity { file: PathBuf, map: String },
    /// Quintuple of the first map rebuilt from that of the second and the
    /// derivative.
    Reconstruct { file: PathBuf, a: String, b: String },
}

/// Exit status and report of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub positive: bool,
    pub report: Report,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.positive {
            0
        } else {
            1
        }
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    commands::run(cli)
}

/// Renders the report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    }
}
