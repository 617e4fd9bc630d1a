use std::path::PathBuf;

use annulus_core::IntervalSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "annulus", version, about = "Lattice points near a circle: areas, correlations and sector statistics")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file (default: `$ANNULUS_OUT_DIR/<command>.<format>`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RadiusArg {
    #[arg(long = "R", short = 'R', value_name = "R")]
    pub radius: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// The annulus points in angular order.
    Gamma(RadiusArg),
    /// Boundary-square areas in angular order.
    Areas(RadiusArg),
    /// Mean and variance of the areas, with correlations and pair counts.
    Moments {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long, default_value = "1..8")]
        k: KList,
        #[arg(long = "L", default_value = "100")]
        l: usize,
        #[arg(long, default_value = "50")]
        pair_k: usize,
    },
    /// Empirical autocorrelations.
    Ck {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long)]
        k: KList,
    },
    /// Monte Carlo autocorrelations of the rectangle model.
    ModelCk {
        #[arg(long)]
        k: KList,
        #[arg(long, value_parser = parse_count, default_value = "1e6")]
        samples: usize,
        #[arg(long, default_value = "42")]
        seed: u64,
    },
    /// Average of the first L autocorrelations.
    AvgCk {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long = "L", default_value = "100")]
        l: usize,
    },
    /// Normalised pair count in the angular window for k.
    PairCorr {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "-h,h", allow_hyphen_values = true)]
        i1: IntervalSpec,
        #[arg(long, default_value = "-h,h", allow_hyphen_values = true)]
        i2: IntervalSpec,
        #[arg(long, default_value = "0,2pi", allow_hyphen_values = true)]
        j: IntervalSpec,
    },
    /// Mixed correlation sum over pairs in the angular window for k.
    MixedCorr {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long)]
        k: usize,
    },
    /// Histogram of (r, θ, r') over pairs, with a chi-square uniformity test.
    JointHist {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "8")]
        bins: usize,
    },
    /// Variance of narrow sector counts against the D(I) prediction.
    SectorVar {
        #[command(flatten)]
        r: RadiusArg,
        /// Window width in radians; defaults to R^-0.95.
        #[arg(long)]
        width: Option<f64>,
        #[arg(long, default_value = "-h,h", allow_hyphen_values = true)]
        interval: IntervalSpec,
        #[arg(long, value_parser = parse_count)]
        grid: Option<usize>,
        #[arg(long, default_value = "1000")]
        lambda_max: f64,
    },
    /// Sector count against its area main term.
    Equidist {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long, default_value = "-h,h", allow_hyphen_values = true)]
        interval: IntervalSpec,
    },
    /// Tangent-rectangle approximation diagnostic.
    DiagRect {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "1")]
        cprime: f64,
    },
    /// KS distance between the areas and the limit law.
    LimitDist {
        #[command(flatten)]
        r: RadiusArg,
        #[arg(long, value_parser = parse_count, default_value = "1e6")]
        samples: usize,
        #[arg(long, default_value = "42")]
        seed: u64,
    },
    /// Rerun every golden experiment and compare.
    Verify {
        #[arg(long, default_value = "golden")]
        golden: PathBuf,
    },
    /// Record the golden experiments.
    Golden {
        #[arg(long, default_value = "golden")]
        golden: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gamma(_) => "gamma",
            Command::Areas(_) => "areas",
            Command::Moments { .. } => "moments",
            Command::Ck { .. } => "ck",
            Command::ModelCk { .. } => "model-ck",
            Command::AvgCk { .. } => "avg-ck",
            Command::PairCorr { .. } => "pair-corr",
            Command::MixedCorr { .. } => "mixed-corr",
            Command::JointHist { .. } => "joint-hist",
            Command::SectorVar { .. } => "sector-var",
            Command::Equidist { .. } => "equidist",
            Command::DiagRect { .. } => "diag-rect",
            Command::LimitDist { .. } => "limit-dist",
            Command::Verify { .. } => "verify",
            Command::Golden { .. } => "golden",
        }
    }
}

/// Non-negative integer, also in float notation such as `1e6`.
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 1e15 {
        Ok(x as usize)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

/// A list of lags: `k`, `a..b` (inclusive), `a..=b`, or a comma list of those.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KList(pub Vec<usize>);

impl std::str::FromStr for KList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_ks(s).map(KList)
    }
}

pub fn parse_ks(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (parse_count(a)?, parse_count(b)?);
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_count(part)?);
        }
    }
    Ok(out)
}
