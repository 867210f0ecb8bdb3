//! Run settings: command-line flags layered over an optional JSON config
//! file, layered over defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use nhbloch::bands::linspace;
use nhbloch::model::{PotentialFamily, PotentialSpec, Shorthand, DEFAULT_TRUNCATION};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_K: Grid = Grid {
    min: -0.5,
    max: 0.5,
    count: 101,
};
pub const DEFAULT_BANDS: usize = 3;
pub const DEFAULT_FD_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `min:max:count`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Grid {
            min: x,
            max: x,
            count: 1,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }

    fn validate(self) -> Result<Self> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::config("grid bounds must be finite"));
        }
        if self.count == 0 {
            return Err(CliError::config("grid needs at least one point"));
        }
        if self.count > 1 && self.max < self.min {
            return Err(CliError::config(format!(
                "grid max {} is below min {}",
                self.max, self.min
            )));
        }
        Ok(self)
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::config(format!("cannot parse grid {s:?}; expected min:max:count or a value"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
        let grid = match parts.as_slice() {
            [x] => Grid::single(num(x)?),
            [a, b, n] => Grid {
                min: num(a)?,
                max: num(b)?,
                count: n.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        grid.validate()
    }
}

/// `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::config(format!("cannot parse range {s:?}; expected lo:hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// `a,b`.
pub fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::config(format!("cannot parse point {s:?}; expected a,b"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialInput {
    Text(String),
    Spec(PotentialSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum GridInput {
    Text(String),
    Grid(Grid),
}

/// Contents of a `--config` file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    potential: Option<PotentialInput>,
    tau: Option<f64>,
    k: Option<GridInput>,
    truncation: Option<usize>,
    bands: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    fd_points: Option<usize>,
    threads: Option<usize>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("malformed config {}: {e}", path.display())))
    }
}

/// Values given on the command line; all optional.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub potential: Option<String>,
    pub tau: Option<f64>,
    pub k: Option<String>,
    pub truncation: Option<usize>,
    pub bands: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub fd_points: Option<usize>,
    pub threads: Option<usize>,
    pub config: Option<PathBuf>,
}

/// Merged settings for one invocation.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    potential: Option<PotentialInput>,
    pub tau: Option<f64>,
    k: Option<Grid>,
    truncation: Option<usize>,
    bands: Option<usize>,
    pub out: Option<PathBuf>,
    format: Option<Format>,
    fd_points: Option<usize>,
    pub threads: Option<usize>,
}

impl Settings {
    pub fn resolve(flags: Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let k = match flags.k {
            Some(s) => Some(s.parse()?),
            None => match file.k {
                Some(GridInput::Text(s)) => Some(s.parse()?),
                Some(GridInput::Grid(g)) => Some(g.validate()?),
                None => None,
            },
        };
        let settings = Settings {
            potential: flags.potential.map(PotentialInput::Text).or(file.potential),
            tau: flags.tau.or(file.tau),
            k,
            truncation: flags.truncation.or(file.truncation),
            bands: flags.bands.or(file.bands),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format),
            fd_points: flags.fd_points.or(file.fd_points),
            threads: flags.threads.or(file.threads),
        };
        if settings.threads == Some(0) {
            return Err(CliError::config("threads must be at least 1"));
        }
        if settings.tau.is_some_and(|t| !t.is_finite()) {
            return Err(CliError::config("tau must be finite"));
        }
        Ok(settings)
    }

    pub fn k_grid(&self) -> Grid {
        self.k.unwrap_or(DEFAULT_K)
    }

    /// The single momentum of point-wise commands.
    pub fn k_point(&self, default: f64) -> Result<f64> {
        match self.k {
            None => Ok(default),
            Some(g) if g.count == 1 => Ok(g.min),
            Some(g) => Err(CliError::config(format!(
                "this command takes a single --k value, got a grid of {}",
                g.count
            ))),
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    pub fn bands(&self) -> usize {
        self.bands.unwrap_or(DEFAULT_BANDS)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn fd_points(&self) -> usize {
        self.fd_points.unwrap_or(DEFAULT_FD_POINTS)
    }

    fn potential_text(&self) -> Result<&PotentialInput> {
        self.potential
            .as_ref()
            .ok_or_else(|| CliError::config("no potential given (use --potential NAME:V0,tau)"))
    }

    /// Concrete potential: a shorthand (with `--tau` filling or overriding
    /// its τ), inline JSON, or a path to a JSON file.
    pub fn potential(&self) -> Result<PotentialSpec> {
        match self.potential_text()? {
            PotentialInput::Spec(p) => Ok(p.clone()),
            PotentialInput::Text(s) => {
                let s = s.trim();
                if s.starts_with('{') {
                    return serde_json::from_str(s)
                        .map_err(|e| CliError::config(format!("malformed potential JSON: {e}")));
                }
                if s.ends_with(".json") {
                    let text = std::fs::read_to_string(s)
                        .map_err(|e| CliError::config(format!("cannot read potential {s}: {e}")))?;
                    return serde_json::from_str(&text)
                        .map_err(|e| CliError::config(format!("malformed potential {s}: {e}")));
                }
                let sh: Shorthand = s.parse()?;
                let tau = self.tau.or(sh.tau).ok_or_else(|| {
                    CliError::config(format!("potential {s} needs a tau (NAME:V0,tau or --tau)"))
                })?;
                Ok(sh.family.at(tau))
            }
        }
    }

    /// One-parameter family named by a shorthand; any τ in it is ignored.
    pub fn family(&self) -> Result<PotentialFamily> {
        match self.potential_text()? {
            PotentialInput::Text(s) => Ok(s.parse::<Shorthand>()?.family),
            PotentialInput::Spec(_) => Err(CliError::config(
                "this command needs a potential family shorthand (V1:V0, V1+V2:V0 or fig5:V0)",
            )),
        }
    }
}
