//! Resolved run configuration, errors and output plumbing.

use std::fmt;
use std::fs;
use std::io::Write;
use std::str::FromStr;

use boundbell::ppt::DEFAULT_TOL;
use boundbell::states::default_alpha;
use serde::Serialize;

pub const TOL_ENV: &str = "BOUNDBELL_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Auto,
    Fixed(f64),
}

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        let v: f64 = s.parse().map_err(|_| format!("expected radians or `auto`, got `{s}`"))?;
        if !v.is_finite() {
            return Err(format!("alpha must be finite, got {s}"));
        }
        Ok(Self::Fixed(v))
    }
}

impl Alpha {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Self::Auto => default_alpha(n),
            Self::Fixed(v) => v,
        }
    }

    pub fn is_auto(self) -> bool {
        self == Self::Auto
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(boundbell::Error),
    Usage(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Core(e) => write!(f, "{e}"),
            Self::Usage(m) | Self::Io(m) => f.write_str(m),
        }
    }
}

impl From<boundbell::Error> for CliError {
    fn from(e: boundbell::Error) -> Self {
        Self::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use boundbell::Error::*;
        match self {
            Self::Core(NotEntangled) => 3,
            Self::Core(PairUnavailable(..)) => 4,
            Self::Core(NumericDegeneracy(_)) => 5,
            _ => 2,
        }
    }
}

/// `--tol`, then `$BOUNDBELL_TOL`, then the library default.
pub fn resolve_tol(flag: Option<f64>) -> Result<f64, CliError> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}={s} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!("tolerance must be finite and >= 0, got {tol}")));
    }
    Ok(tol)
}

/// Echoed at the top of every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_auto: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_range: Option<(usize, usize)>,
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))
}

pub fn write_file(path: &str, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes to `out` if given, else to stdout.
pub fn emit(out: Option<&str>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
