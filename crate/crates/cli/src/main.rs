//! Command-line front end for the pattern-front toolkit.
//!
//! Pipeline: `spectrum` → `periodic` → `reduced` → `front` → `simulate` →
//! `validate`. Every subcommand reads the flat key = value config file
//! (`alpha0`, `c0`, `gamma`, `eps` required; `q0`, `x0` optional), writes
//! CSV/JSON artifacts into the output directory and records a run manifest
//! carrying the config digest that every artifact references.
//!
//! Exit codes: 0 success, 2 precondition/config error, 3 numerical failure.
//! The `PATTERNFRONT_OUT` environment variable overrides `--out`.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use patternfront_core::error::ErrorKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "patternfront",
    version,
    about = "Spectra, periodic states, reduced heteroclinics, modulating fronts and full-PDE validation for the Swift-Hohenberg/conservation-law system"
)]
pub struct Cli {
    /// Path to the key = value parameter config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (PATTERNFRONT_OUT overrides this flag).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Seed for the optional perturbation in `simulate`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Exact + asymptotic spatial-dynamics eigenvalues with the central
    /// classification, per ε; optionally the dispersive-extension spectra.
    Spectrum {
        /// Largest Fourier index |n|.
        #[arg(long, default_value_t = 30)]
        n_max: i64,
        /// Comma-separated ε list (defaults to the config value).
        #[arg(long, value_delimiter = ',')]
        eps_list: Vec<f64>,
        /// Also emit the dispersive-extension spectrum.
        #[arg(long)]
        extended: bool,
        /// Extension: dispersion coefficient c_u (β = c_u).
        #[arg(long, default_value_t = 1.0)]
        cu: f64,
        /// Extension: drift coefficient c_v.
        #[arg(long, default_value_t = 1.0)]
        cv: f64,
        /// Extension: front speed c.
        #[arg(long, default_value_t = 3.0)]
        c: f64,
    },
    /// Leading-order + Newton-refined stationary periodic state.
    Periodic {
        #[arg(long, default_value_t = 16)]
        n_modes: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Collocation samples for the (x, u, v) CSV.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Reduced-system fixed points, linearizations and heteroclinic
    /// trajectories over a γ sweep (the reduced-orbit data set).
    Reduced {
        /// Comma-separated γ sweep (defaults to the config value).
        #[arg(long, value_delimiter = ',')]
        gamma_list: Vec<f64>,
        /// Unstable-manifold offset.
        #[arg(long, default_value_t = 1e-5)]
        delta: f64,
    },
    /// Heteroclinic shooting plus modulating-front reconstruction; with
    /// --simulate also evolves the front under the full PDE.
    Front {
        #[arg(long, value_delimiter = ',')]
        gamma_list: Vec<f64>,
        #[arg(long, default_value_t = 1e-5)]
        delta: f64,
        #[arg(long, default_value_t = 4096)]
        n_grid: usize,
        #[arg(long, default_value_t = 64)]
        n_periods: usize,
        /// Evolve the assembled front and measure speed/conservation.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long, default_value_t = 60.0)]
        t_end: f64,
    },
    /// Evolve the refined periodic state (optionally seeded-perturbed)
    /// under the full PDE; writes diagnostics and a final snapshot.
    Simulate {
        #[arg(long, default_value_t = 512)]
        n_grid: usize,
        #[arg(long, default_value_t = 8)]
        n_periods: usize,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        /// Scheme: imex1 | imex2 | etdrk.
        #[arg(long, default_value = "imex2")]
        scheme: String,
        /// Amplitude of a seeded smooth perturbation (uses --seed).
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, default_value_t = 20)]
        record_every: usize,
    },
    /// Conservation, stationarity and ansatz-residual checks; exits 3 if
    /// any check fails.
    Validate {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025])]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 4096)]
        n_grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("patternfront: {err}");
            match err.kind() {
                ErrorKind::Precondition => ExitCode::from(2),
                ErrorKind::Numerical => ExitCode::from(3),
            }
        }
    }
}
