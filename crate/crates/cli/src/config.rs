use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

/// Temperature grid `lo:hi:count:log|lin`, in units of T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Lin => self.lo + (self.hi - self.lo) * f,
                    Spacing::Log => (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count, spacing] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not lo:hi:count:log|lin"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid value '{x}': {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("grid count '{count}': {e}"))?;
        let spacing = match spacing.trim() {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            other => return Err(format!("grid spacing '{other}' is not log or lin")),
        };
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(format!("grid needs 0 < lo < hi, got lo={lo} hi={hi}"));
        }
        if count < 2 {
            return Err(format!("grid needs at least 2 points, got {count}"));
        }
        Ok(Self {
            lo,
            hi,
            count,
            spacing,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{:?}:{:?}:{}:{spacing}", self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, rename = "kB", skip_serializing_if = "Option::is_none")]
    pub kb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracles: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_check: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimerSection {
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToySection {
    #[serde(default, rename = "E0", skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, rename = "eR", skip_serializing_if = "Option::is_none")]
    pub e_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, rename = "E0", skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, rename = "eR_per_site", skip_serializing_if = "Option::is_none")]
    pub e_r_per_site: Option<f64>,
}

/// Contents of a `--config` file; every key is optional and flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimer: Option<DimerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dicke: Option<DickeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn run(&self) -> RunSection {
        self.run.clone().unwrap_or_default()
    }
}

/// Run-wide settings after merging flags over the file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub grid: GridSpec,
    pub seed: u64,
    pub kb: f64,
    pub out: Option<PathBuf>,
    pub oracles: bool,
    pub matrix_check: bool,
}

impl RunSettings {
    pub fn to_section(&self) -> RunSection {
        RunSection {
            grid: Some(self.grid.to_string()),
            seed: Some(self.seed),
            kb: Some(self.kb),
            out: self.out.clone(),
            oracles: Some(self.oracles),
            matrix_check: Some(self.matrix_check),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<GridSpec, CliError> {
    s.parse().map_err(CliError::Config)
}
