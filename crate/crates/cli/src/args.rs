use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "nmlg", version, about = "Attenuation and universal densities for bounded Gaussian classes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for Monte Carlo sampling; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Seed for Monte Carlo runs.
    #[arg(long, global = true, env = "NMLG_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// The parameter box: mean in `[-alpha/2, alpha/2]`, std-dev in `[sigma-min, sigma-max]`.
#[derive(Debug, Clone, Copy, Args)]
pub struct ClassArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Approx,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Group {
    Atten1d,
    Atten2d,
    Mc,
    Exact,
    In,
    Reductions,
    Growth,
    Equalizer,
    Dominance,
    Mle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Attenuation of the class for sequences of length n.
    Atten {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Relative tolerance for quadrature.
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
    },
    /// Exact and approximate attenuation over a range of n.
    Scan {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        /// `log2` visits the powers of two in `[n-min, n-max]`.
        #[arg(long, value_enum, default_value_t = Scale::Linear)]
        scale: Scale,
    },
    /// Cross-checks the closed forms against quadrature and Monte Carlo.
    Verify {
        /// Check groups to run (comma separated); all when omitted.
        #[arg(long, value_enum, value_delimiter = ',')]
        only: Vec<Group>,
        /// Sequence length of the I_n limit experiment.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Samples per Monte Carlo check.
        #[arg(long, default_value_t = 400_000)]
        samples: usize,
    },
    /// Clipped maximum-likelihood estimate for a sequence.
    Mle {
        #[command(flatten)]
        class: ClassArgs,
        /// Sequence file; stdin when omitted or `-`.
        input: Option<PathBuf>,
    },
    /// Log universal density and code length of a sequence.
    Logq {
        #[command(flatten)]
        class: ClassArgs,
        /// Also report the regret of the model with this mean (requires --sigma).
        #[arg(long, allow_negative_numbers = true, requires = "sigma")]
        mu: Option<f64>,
        #[arg(long, requires = "mu")]
        sigma: Option<f64>,
        /// Sequence file; stdin when omitted or `-`.
        input: Option<PathBuf>,
    },
    /// Tabulates the single-observation envelope on a grid.
    Envelope {
        #[command(flatten)]
        class: ClassArgs,
        /// Grid start; defaults to -(alpha/2 + 4 sigma-max).
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        /// Grid end; defaults to alpha/2 + 4 sigma-max.
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// The Gaussian mass I_n, optionally with a Monte Carlo estimate.
    In {
        #[arg(long)]
        n: usize,
        /// Draw this many samples for a Monte Carlo estimate.
        #[arg(long)]
        samples: Option<usize>,
    },
}
