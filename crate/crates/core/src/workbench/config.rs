//! Option parsing shared by flags and the TOML config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectral::WeightingMeasure;

/// Scenario-generation method applied to the loaded returns.
#[derive(Debug, Clone, PartialEq)]
pub enum GenMethod {
    /// Rows as loaded, uniform weights.
    Hist,
    /// Geometric recency weights.
    WeightedHist { lambda: f64 },
    /// `t_out` scenarios, each compounding `n` resampled rows.
    Bootstrap {
        n: usize,
        t_out: usize,
        recency: Option<f64>,
    },
    /// Gaussian fit to the data, `t_out` draws (defaults to the row count).
    MonteCarlo { t_out: Option<usize> },
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| config_err(format!("cannot parse {what} from '{s}'")))
}

/// `tail:<λ>`, `alpha:<α>`, `beta:<α>,<β>` or `atomic:<λ1>=<w1>,...`.
///
/// Integer `beta` parameters give Beta V@R; other real values select the
/// continuous beta family.
pub fn parse_measure(spec: &str) -> Result<WeightingMeasure> {
    let (family, params) = spec
        .split_once(':')
        .ok_or_else(|| config_err(format!("measure '{spec}' needs the form family:params")))?;
    match family.trim().to_ascii_lowercase().as_str() {
        "tail" => WeightingMeasure::tail(num(params, "tail level")?),
        "alpha" => WeightingMeasure::alpha_var(num(params, "alpha")?),
        "beta" => {
            let (a, b) = params
                .split_once(',')
                .ok_or_else(|| config_err("beta measure needs 'beta:<alpha>,<beta>'"))?;
            match (a.trim().parse::<u32>(), b.trim().parse::<u32>()) {
                (Ok(a), Ok(b)) => WeightingMeasure::beta_var(a, b),
                _ => WeightingMeasure::beta_family(num(a, "alpha")?, num(b, "beta")?),
            }
        }
        "atomic" => {
            let atoms = params
                .split(',')
                .map(|atom| {
                    let (l, w) = atom
                        .split_once('=')
                        .ok_or_else(|| config_err(format!("atom '{atom}' needs level=weight")))?;
                    Ok((num(l, "atom level")?, num(w, "atom weight")?))
                })
                .collect::<Result<Vec<_>>>()?;
            WeightingMeasure::atomic(atoms)
        }
        other => Err(config_err(format!("unknown measure family '{other}'"))),
    }
}

/// `hist`, `whist:<λ>`, `boot:<n>,<T>[,<λ>]` or `mc[:<T>]`.
pub fn parse_gen(spec: &str) -> Result<GenMethod> {
    let (method, params) = match spec.split_once(':') {
        Some((m, p)) => (m.trim(), Some(p)),
        None => (spec.trim(), None),
    };
    match (method.to_ascii_lowercase().as_str(), params) {
        ("hist", None) => Ok(GenMethod::Hist),
        ("whist", Some(p)) => Ok(GenMethod::WeightedHist {
            lambda: num(p, "recency factor")?,
        }),
        ("boot", Some(p)) => {
            let parts: Vec<&str> = p.split(',').collect();
            match parts.as_slice() {
                [n, t] | [n, t, _] => Ok(GenMethod::Bootstrap {
                    n: num(n, "bootstrap horizon")?,
                    t_out: num(t, "bootstrap scenario count")?,
                    recency: parts.get(2).map(|l| num(l, "recency factor")).transpose()?,
                }),
                _ => Err(config_err("bootstrap needs 'boot:<n>,<T>[,<lambda>]'")),
            }
        }
        ("mc", None) => Ok(GenMethod::MonteCarlo { t_out: None }),
        ("mc", Some(p)) => Ok(GenMethod::MonteCarlo {
            t_out: Some(num(p, "scenario count")?),
        }),
        _ => Err(config_err(format!("unknown scenario generation '{spec}'"))),
    }
}

/// Comma-separated floats.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| num(v, what)).collect()
}

/// A list option in the config file: a number, an array, or the same
/// comma-separated string the flag takes.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

impl ListValue {
    pub fn to_vec(&self, what: &str) -> Result<Vec<f64>> {
        match self {
            ListValue::One(v) => Ok(vec![*v]),
            ListValue::Many(v) => Ok(v.clone()),
            ListValue::Text(s) => parse_list(s, what),
        }
    }
}

/// Keys of the optional TOML config file. Names match the long flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub index: Option<String>,
    pub rf: Option<f64>,
    pub measure: Option<String>,
    pub gen: Option<String>,
    pub seed: Option<u64>,
    pub csv: Option<bool>,
    pub out: Option<PathBuf>,
    pub spot: Option<ListValue>,
    pub portfolio: Option<ListValue>,
    pub groups: Option<usize>,
    pub levels: Option<ListValue>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub economy: Option<PathBuf>,
    pub market: Option<ListValue>,
    pub payoff: Option<String>,
    pub underlier: Option<String>,
    pub rstar: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }
}

/// Resolved options common to every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub measure: WeightingMeasure,
    pub data: PathBuf,
    pub index: Option<String>,
    pub rf: f64,
    /// Empty means one unit per asset; a single value is broadcast.
    pub spot: Vec<f64>,
    pub gen: GenMethod,
    pub seed: u64,
    pub csv: bool,
    pub out: Option<PathBuf>,
}
