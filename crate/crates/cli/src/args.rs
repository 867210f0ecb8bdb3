use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Flags, Format};

#[derive(Debug, Parser)]
#[command(
    name = "nhbloch",
    version,
    about = "Band structures, gauge equivalences and exceptional points of PT-symmetric periodic potentials"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Potential: NAME:V0[,tau] with NAME in V1, V1+V2, fig5; inline JSON; or a .json file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub potential: Option<String>,

    /// Gain/loss parameter τ; fills or overrides the τ of a shorthand.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<f64>,

    /// Crystal momentum grid min:max:count, or a single value.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<String>,

    /// Plane-wave truncation M (matrix dimension 2M+1).
    #[arg(short = 'M', long = "truncation", global = true)]
    pub truncation: Option<usize>,

    /// Number of bands.
    #[arg(long, global = true)]
    pub bands: Option<usize>,

    /// Output directory; without it the main artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Grid points of the finite-difference oracle.
    #[arg(long, global = true)]
    pub fd_points: Option<usize>,

    /// Worker threads.
    #[arg(long, global = true, env = "NHBLOCH_THREADS")]
    pub threads: Option<usize>,

    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn flags(&self) -> Flags {
        Flags {
            potential: self.potential.clone(),
            tau: self.tau,
            k: self.k.clone(),
            truncation: self.truncation,
            bands: self.bands,
            out: self.out.clone(),
            format: self.format,
            fd_points: self.fd_points,
            threads: self.threads,
            config: self.config.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band structure over a k grid (optionally over a τ grid as well).
    Bands {
        /// τ grid min:max:count; overrides --tau and adds a tau column.
        #[arg(long, allow_hyphen_values = true)]
        tau_grid: Option<String>,
    },
    /// Plane-wave bands against the real-space finite-difference oracle.
    Fdcheck,
    /// Gauge angle and equivalent potential (JSON).
    Gauge,
    /// Participation ratios before and after the gauge transformation.
    Pr,
    /// One Bloch state in real space or momentum space.
    Wavefunction {
        /// Band index (1-based).
        #[arg(long, default_value_t = 1)]
        band: usize,
        /// Real-space samples over one period centred on x = 0.
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Apply the gauge transformation to the state first.
        #[arg(long)]
        gauge: bool,
        #[arg(long, value_enum, default_value_t = Basis::Real)]
        basis: Basis,
    },
    /// Locate the gap minimum of a band pair in τ and classify it (JSON).
    EpScan {
        /// Band pair n,n+1 (or just n).
        #[arg(long, default_value = "2,3")]
        pair: String,
        /// τ window lo:hi.
        #[arg(long, default_value = "0.5:1.5")]
        window: String,
    },
    /// Classify a known EP location as conventional or Dirac (JSON).
    EpClassify {
        #[arg(long, default_value = "2,3")]
        pair: String,
        #[arg(long, default_value_t = 1.0)]
        tau_ep: f64,
    },
    /// Power-law fit of the pair splitting near an EP (JSON).
    Dispersion {
        #[arg(long, default_value = "2,3")]
        pair: String,
        /// EP location in the varied parameter.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<f64>,
        #[arg(long, default_value = "below")]
        side: String,
        /// Parameter varied away from the EP.
        #[arg(long, value_enum, default_value_t = Vary::Tau)]
        vary: Vary,
    },
    /// Follow eigenstates around a closed loop (JSON).
    Encircle {
        #[arg(long, value_enum, default_value_t = System::TwoLevel)]
        system: System,
        /// Loop centre: (Δ, g) for the two-level model, (k, τ) for Bloch.
        #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
        center: String,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Tracked states (1-based).
        #[arg(long, default_value = "1,2")]
        states: String,
        /// Coupling t of the two-level model.
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
    },
    /// Riemann-sheet mesh of the two-level model (CSV).
    Riemann {
        #[arg(long, allow_hyphen_values = true, default_value = "-1:1")]
        delta: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:2")]
        g: String,
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
    },
    /// Few-mode truncated model and its spectrum (JSON).
    Truncated {
        /// H2, H3, H3_nnn, H3_nnn_physical or H4.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1.0)]
        v0: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        omega_prime: Option<f64>,
    },
    /// Data bundle for one figure, with a manifest.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Real,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    Tau,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    TwoLevel,
    Bloch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    S1,
    S3,
    S4,
}

impl FigureName {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::S1 => "s1",
            FigureName::S3 => "s3",
            FigureName::S4 => "s4",
        }
    }
}
