//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcqw_core::{CoinVariant, Complex64, InitialState};

#[derive(Debug, Clone, Parser)]
#[command(name = "gcqw", version, about = "Generalized coined quantum walk experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// P(T) against D for one period p.
    RecurrenceSweep(RecurrenceSweepArgs),
    /// P(kT) against k.
    MultiRecurrence(MultiRecurrenceArgs),
    /// sigma(t) with the ballistic prediction.
    SigmaDynamics(SigmaDynamicsArgs),
    /// Quasi-energy levels on a grid of d.
    Spectrum(SpectrumArgs),
    /// Discrete walk against the coupled-mode continuum.
    BlochCompare(BlochCompareArgs),
    /// sigma(t) for a linear phase with irrational slope.
    Localization(LocalizationArgs),
    /// Raw amplitude dump.
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoinArg {
    Standard,
    Symmetric,
}

impl From<CoinArg> for CoinVariant {
    fn from(c: CoinArg) -> Self {
        match c {
            CoinArg::Standard => CoinVariant::Standard,
            CoinArg::Symmetric => CoinVariant::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    /// Closed form when it validates, numeric otherwise.
    Auto,
    ClosedForm,
    /// Even p only: root of the whole bracket.
    ClosedFormCorrected,
    Numeric,
    /// Closed form and numeric rows side by side.
    Both,
}

/// A list of values: `a,b,c` or the inclusive range `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{x}`: {e}"))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err("range must be start:stop:step".into());
            }
            let (a, b, h) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if !(h > 0.0) || b < a {
                return Err("range needs step > 0 and stop >= start".into());
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            // snap to 12 decimals so 0.1 + 2 * 0.1 prints as 0.3
            let v = (0..=n)
                .map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12)
                .collect();
            Ok(Grid(v))
        } else {
            s.split(',').map(parse).collect::<Result<Vec<_>, _>>().map(Grid)
        }
    }
}

impl Grid {
    /// Sorted ascending, duplicates removed.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// `site:c0re,c0im,c1re,c1im`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialArg {
    pub site: usize,
    pub coin: [Complex64; 2],
}

impl FromStr for InitialArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (site, rest) = s
            .split_once(':')
            .ok_or("expected site:c0re,c0im,c1re,c1im")?;
        let site = site.trim().parse::<usize>().map_err(|e| format!("site: {e}"))?;
        let v = rest
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if v.len() != 4 {
            return Err(format!("expected 4 coin components, got {}", v.len()));
        }
        Ok(InitialArg {
            site,
            coin: [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])],
        })
    }
}

impl InitialArg {
    pub fn state(&self) -> InitialState {
        InitialState::localized(self.site, self.coin[0], self.coin[1])
    }

    pub fn describe(&self) -> String {
        format!(
            "{}:{},{},{},{}",
            self.site, self.coin[0].re, self.coin[0].im, self.coin[1].re, self.coin[1].im
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[arg(long, value_enum, default_value_t = CoinArg::Standard)]
    pub coin: CoinArg,
    /// Initial state; defaults to coin |0> at site 0.
    #[arg(long)]
    pub initial: Option<InitialArg>,
    /// Cycle length; defaults to the smallest wraparound-free multiple of p.
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RecurrenceSweepArgs {
    #[arg(long, default_value_t = 9)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    /// Diabatic transition probabilities.
    #[arg(long = "D", default_value = "0:1:0.05")]
    pub big_d: Grid,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct MultiRecurrenceArgs {
    #[arg(long, default_value_t = 10)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long = "D", default_value_t = 0.5)]
    pub big_d: f64,
    #[arg(long = "k-max", default_value_t = 30)]
    pub k_max: u32,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SigmaDynamicsArgs {
    #[arg(long, default_value_t = 16)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long = "D", default_value_t = 0.5)]
    pub big_d: f64,
    #[arg(long = "t-max", default_value_t = 1000)]
    pub t_max: usize,
    /// Record every this many steps.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Also record the return probability.
    #[arg(long)]
    pub with_return: bool,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long = "N", default_value_t = 21)]
    pub n: usize,
    /// Grid of coin amplitudes d.
    #[arg(long, conflicts_with = "big_d", default_value = "0:1:0.05")]
    pub d: Grid,
    /// Grid of D = d^2 instead of d.
    #[arg(long = "D")]
    pub big_d: Option<Grid>,
    #[arg(long, value_enum, default_value_t = SourceArg::Auto)]
    pub source: SourceArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct BlochCompareArgs {
    #[arg(long = "D", default_value_t = 0.25)]
    pub big_d: f64,
    /// Phase slope in radians; overrides --q/--p.
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long = "t-max", default_value_t = 60)]
    pub t_max: usize,
    #[arg(long, value_enum, default_value_t = CoinArg::Symmetric)]
    pub coin: CoinArg,
    #[arg(long)]
    pub initial: Option<InitialArg>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct LocalizationArgs {
    #[arg(long = "D", default_value_t = 0.5)]
    pub big_d: f64,
    #[arg(long, default_value_t = 0.5)]
    pub phi: f64,
    #[arg(long = "t-max", default_value_t = 500)]
    pub t_max: usize,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[arg(long = "D", conflicts_with = "d")]
    pub big_d: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Phase slope in radians; overrides --q/--p.
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long, default_value_t = 0)]
    pub q: u32,
    #[arg(long = "t-max", default_value_t = 10)]
    pub t_max: usize,
    /// Dump every this many steps.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub output: Output,
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::RecurrenceSweep(a) => &a.output,
            Command::MultiRecurrence(a) => &a.output,
            Command::SigmaDynamics(a) => &a.output,
            Command::Spectrum(a) => &a.output,
            Command::BlochCompare(a) => &a.output,
            Command::Localization(a) => &a.output,
            Command::Evolve(a) => &a.output,
        }
    }
}
