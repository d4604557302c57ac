use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::Flags;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    Value { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

const KEYS: [&str; 11] = [
    "rho",
    "lambda",
    "epsilon",
    "window",
    "seed",
    "emit-lp",
    "limit-candidates",
    "limit-seconds",
    "limit-nodes",
    "runs",
    "folds",
];

/// Parse `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownKey(k));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn parse_window(s: &str) -> Option<(f64, f64)> {
    let (lo, hi) = s.split_once(',')?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

/// Effective settings: flags, then config file, then defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub rho: u32,
    pub rho_given: bool,
    pub lambda: Option<f64>,
    pub epsilon: f64,
    pub window: Option<(f64, f64)>,
    pub seed: u64,
    pub emit_lp: Option<PathBuf>,
    pub limit_candidates: Option<usize>,
    pub limit_seconds: Option<f64>,
    pub limit_nodes: usize,
    pub runs: usize,
    pub folds: usize,
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ConfigError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| ConfigError::Value { key: key.into(), value: v.clone() }),
    }
}

impl Settings {
    pub fn resolve(f: &Flags) -> Result<Settings, ConfigError> {
        let cfg = match &f.config {
            Some(p) => parse_config(
                &fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?,
            )?,
            None => BTreeMap::new(),
        };
        let window = match pick(f.window.clone(), &cfg, "window")? {
            None => None,
            Some(w) => Some(parse_window(&w).ok_or(ConfigError::Value { key: "window".into(), value: w })?),
        };
        let rho = pick(f.rho, &cfg, "rho")?;
        let s = Settings {
            rho: rho.unwrap_or(2),
            rho_given: rho.is_some(),
            lambda: pick(f.lambda, &cfg, "lambda")?,
            epsilon: pick(f.epsilon, &cfg, "epsilon")?.unwrap_or(1e-5),
            window,
            seed: pick(f.seed, &cfg, "seed")?.unwrap_or(0),
            emit_lp: pick(f.emit_lp.clone(), &cfg, "emit-lp")?,
            limit_candidates: pick(f.limit_candidates, &cfg, "limit-candidates")?,
            limit_seconds: pick(f.limit_seconds, &cfg, "limit-seconds")?,
            limit_nodes: pick(None, &cfg, "limit-nodes")?.unwrap_or(200_000),
            runs: pick(None, &cfg, "runs")?.unwrap_or(10),
            folds: pick(None, &cfg, "folds")?.unwrap_or(5),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.rho == 0 {
            return bad("rho must be positive");
        }
        if self.lambda.is_some_and(|l| !(l >= 0.0 && l.is_finite())) {
            return bad("lambda must be finite and non-negative");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if let Some((lo, hi)) = self.window {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return bad("window must satisfy LO <= HI");
            }
        }
        if self.limit_seconds.is_some_and(|t| !(t > 0.0)) {
            return bad("limit-seconds must be positive");
        }
        if self.runs == 0 || self.folds < 2 {
            return bad("need runs >= 1 and folds >= 2");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        fs::write(&p, "# run\nrho = 3\nwindow=1,2\nlimit_seconds=5\nfolds=4\n").unwrap();
        let f = Flags { config: Some(p), window: Some("0,9".into()), ..Flags::default() };
        let s = Settings::resolve(&f).unwrap();
        assert_eq!((s.rho, s.window, s.limit_seconds, s.folds, s.epsilon), (3, Some((0.0, 9.0)), Some(5.0), 4, 1e-5));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(parse_config("nope=1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(parse_config("rho"), Err(ConfigError::Syntax { line: 1 })));
        let f = Flags { window: Some("3,1".into()), ..Flags::default() };
        assert!(Settings::resolve(&f).is_err());
    }
}
