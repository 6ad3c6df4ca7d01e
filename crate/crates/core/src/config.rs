//! Flat `key = value` configuration and the layered parameter map used by
//! the command line.
//!
//! Precedence, highest first: command-line flag, `--config` file, the file
//! named by `MEMKICK_CONFIG`, built-in default.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Environment variable naming the lowest-precedence config file.
pub const CONFIG_ENV: &str = "MEMKICK_CONFIG";

/// Every key accepted in a config file.
pub const KEYS: &[&str] = &[
    "map", "engine", "seed_step", "lambda", "z0", "m", "v", "T", "alpha", "a", "b", "p", "q",
    "g_case", "P0", "rho", "j", "forcing", "C", "beta", "mu", "gamma", "y0", "y0_d1", "n_steps",
    "out", "param", "from", "to", "grid", "transient", "sample", "delta0", "renorm_every", "tail",
    "tol", "z", "max_terms", "nmax", "rate", "t", "t_max",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    EnvFile,
    ConfigFile,
    Flag,
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::invalid(
                "config",
                &format!("line {} of {origin} is not `key = value`", i + 1),
                line,
            ));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::invalid(&key, &format!("unknown configuration key in {origin}"), value.trim()));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid("config", "cannot read config file", format!("{origin}: {e}")))?;
    parse_config(&text, &origin)
}

/// Merged parameters with the layer each value came from.
#[derive(Debug, Clone, Default)]
pub struct Params {
    values: BTreeMap<String, (String, Source)>,
}

impl Params {
    pub fn layered(
        flags: Vec<(String, String)>,
        config: Option<&Path>,
        env_config: Option<&Path>,
    ) -> Result<Self> {
        let mut p = Params::default();
        if let Some(path) = env_config {
            p.apply(read_config(path)?, Source::EnvFile);
        }
        if let Some(path) = config {
            p.apply(read_config(path)?, Source::ConfigFile);
        }
        p.apply(flags, Source::Flag);
        Ok(p)
    }

    fn apply(&mut self, pairs: Vec<(String, String)>, source: Source) {
        for (k, v) in pairs {
            self.values.insert(k, (v, source));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn source(&self, key: &str) -> Option<Source> {
        self.values.get(key).map(|(_, s)| *s)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::invalid(key, "must be a real number", v))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn f64_req(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?
            .ok_or_else(|| Error::invalid(key, "is required", "missing"))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::invalid(key, "must be a non-negative integer", v)),
            None => Ok(default),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    /// One of `choices`, defaulting to the first.
    pub fn choice<'a>(&self, key: &str, choices: &[&'a str]) -> Result<&'a str> {
        match self.get(key) {
            None => Ok(choices[0]),
            Some(v) => choices
                .iter()
                .find(|c| **c == v)
                .copied()
                .ok_or_else(|| Error::invalid(key, &format!("must be one of {}", choices.join("|")), v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# header\n\nalpha = 0.5  # order\nn-steps=10\n";
        let kv = parse_config(text, "t").unwrap();
        assert_eq!(
            kv,
            vec![("alpha".into(), "0.5".into()), ("n_steps".into(), "10".into())]
        );
    }

    #[test]
    fn rejects_unknown_key_and_bad_line() {
        let err = parse_config("alpah = 1", "t").unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("alpah"));
        assert!(parse_config("alpha 1", "t").is_err());
    }

    #[test]
    fn precedence_flag_over_file_over_env() {
        let dir = tempfile::tempdir().unwrap();
        let env = dir.path().join("env.conf");
        let file = dir.path().join("file.conf");
        writeln!(std::fs::File::create(&env).unwrap(), "m = 0.1\nv = 2\nT = 3").unwrap();
        writeln!(std::fs::File::create(&file).unwrap(), "m = 0.2\nv = 4").unwrap();
        let p = Params::layered(vec![("m".into(), "0.3".into())], Some(&file), Some(&env)).unwrap();
        assert_eq!(p.f64_or("m", 0.0).unwrap(), 0.3);
        assert_eq!(p.f64_or("v", 0.0).unwrap(), 4.0);
        assert_eq!(p.f64_or("T", 0.0).unwrap(), 3.0);
        assert_eq!(p.f64_or("a", 7.0).unwrap(), 7.0);
        assert_eq!(p.source("v"), Some(Source::ConfigFile));
    }

    #[test]
    fn typed_getters_name_the_key() {
        let p = Params::layered(vec![("alpha".into(), "x".into())], None, None).unwrap();
        let err = p.f64_or("alpha", 1.0).unwrap_err();
        assert!(err.to_string().contains("`alpha`"));
        assert!(p.choice("map", &["logistic", "burst"]).unwrap() == "logistic");
    }
}
