//! `key = value` configuration merged with command-line flags.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::{Failure, RunFlags};

const KNOWN_KEYS: [&str; 19] = [
    "problem", "n", "spectrum", "mass", "stiffness", "u", "seed", "active", "s", "r", "lambda-l",
    "lambda-u", "delta", "rel-tol", "quad-tol", "truth", "rate", "out", "vector-out",
];

/// Merged settings; flags override the config file.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

/// Parses config text. Keys are those of the long flags without `--`.
pub fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<String, String>, Failure> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::usage(format!("{origin}:{}: expected `key = value`", idx + 1)));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Failure::usage(format!("{origin}:{}: unknown key `{key}`", idx + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

impl Settings {
    pub fn resolve(flags: &RunFlags) -> Result<Self, Failure> {
        let mut values = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read config {path}: {e}")))?;
                parse_config(&text, path)?
            }
            None => BTreeMap::new(),
        };
        for (key, value) in flags.pairs() {
            if let Some(v) = value {
                values.insert(key.to_string(), v.clone());
            }
        }
        Ok(Self { values })
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        self.str(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Failure::usage(format!("{key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, Failure> {
        self.parse(key)?
            .ok_or_else(|| Failure::usage(format!("missing required setting `{key}`")))
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, Failure> {
        self.str(key).map(|v| parse_list(key, v)).transpose()
    }

    /// `r` as a comma list or an inclusive range `a:b`.
    pub fn r_list(&self) -> Result<Option<Vec<usize>>, Failure> {
        let Some(v) = self.str("r") else {
            return Ok(None);
        };
        let bad = || Failure::usage(format!("r: cannot parse {v:?}"));
        let list: Vec<usize> = match v.split_once(':') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if b < a {
                    return Err(Failure::usage(format!("r: empty range {v:?}")));
                }
                (a..=b).collect()
            }
            None => parse_list("r", v)?,
        };
        if list.is_empty() || list.contains(&0) {
            return Err(Failure::usage("r values must be positive"));
        }
        Ok(Some(list))
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, Failure> {
    v.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| Failure::usage(format!("{key}: cannot parse {item:?}")))
        })
        .collect()
}
