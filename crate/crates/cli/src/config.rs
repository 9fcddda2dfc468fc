//! `key = value` config files merged under command-line flags.

use std::path::Path;

use schroedsym::suite::{ReportFormat, RunConfig};
use schroedsym::Family;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: cannot read: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected key = value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown field {field:?}")]
    UnknownField { line: usize, field: String },
    #[error("{location}field {field}: {message}")]
    Value {
        location: String,
        field: String,
        message: String,
    },
}

/// Values set either by the file or by flags; `None` keeps the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub family: Option<String>,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
    pub nt: Option<usize>,
    pub nx: Option<usize>,
    pub format: Option<String>,
}

fn parse_field<T: std::str::FromStr>(line: usize, field: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError::Value {
        location: format!("line {line}: "),
        field: field.to_string(),
        message: format!("{raw:?}: {e}"),
    })
}

impl Overrides {
    pub fn parse(text: &str) -> Result<Overrides, ConfigError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    text: raw.to_string(),
                })?;
            match key {
                "family" => o.family = Some(value.to_string()),
                "k" => o.k = Some(parse_field(line, key, value)?),
                "alpha" => o.alpha = Some(parse_field(line, key, value)?),
                "beta" => o.beta = Some(parse_field(line, key, value)?),
                "omega" => o.omega = Some(parse_field(line, key, value)?),
                "n" => o.n = Some(parse_field(line, key, value)?),
                "seed" => o.seed = Some(parse_field(line, key, value)?),
                "trials" => o.trials = Some(parse_field(line, key, value)?),
                "tol" => o.tol = Some(parse_field(line, key, value)?),
                "nt" => o.nt = Some(parse_field(line, key, value)?),
                "nx" => o.nx = Some(parse_field(line, key, value)?),
                "format" => o.format = Some(value.to_string()),
                _ => {
                    return Err(ConfigError::UnknownField {
                        line,
                        field: key.to_string(),
                    })
                }
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Overrides, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Overrides::parse(&text)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            family: self.family.or(base.family),
            k: self.k.or(base.k),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            omega: self.omega.or(base.omega),
            n: self.n.or(base.n),
            seed: self.seed.or(base.seed),
            trials: self.trials.or(base.trials),
            tol: self.tol.or(base.tol),
            nt: self.nt.or(base.nt),
            nx: self.nx.or(base.nx),
            format: self.format.or(base.format),
        }
    }

    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let value_err = |field: &str, message: String| ConfigError::Value {
            location: String::new(),
            field: field.to_string(),
            message,
        };
        let d = RunConfig::default();
        let family = match self.family.as_deref() {
            None | Some("all") => None,
            Some(f) => Some(
                f.parse::<Family>()
                    .map_err(|e| value_err("family", e.to_string()))?,
            ),
        };
        let format = match self.format.as_deref() {
            None => d.format,
            Some(f) => f
                .parse::<ReportFormat>()
                .map_err(|e| value_err("format", e.to_string()))?,
        };
        let cfg = RunConfig {
            family,
            k: self.k.unwrap_or(d.k),
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            omega: self.omega.unwrap_or(d.omega),
            n: self.n.unwrap_or(d.n),
            seed: self.seed.unwrap_or(d.seed),
            trials: self.trials.unwrap_or(d.trials),
            tol: self.tol.or(d.tol),
            nt: self.nt.unwrap_or(d.nt),
            nx: self.nx.unwrap_or(d.nx),
            format,
        };
        cfg.validate().map_err(|e| {
            let msg = e.to_string();
            let field = msg.split(':').next().unwrap_or("config").trim().to_string();
            value_err(&field, msg)
        })?;
        Ok(cfg)
    }
}
