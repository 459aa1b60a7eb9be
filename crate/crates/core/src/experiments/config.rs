//! Flat `key = value` experiment configuration.
//!
//! Numbers accept `pi` products and quotients (`pi/5`, `2*pi/3`, `-0.5`),
//! lists are comma separated, and `a:b:n` expands to `n` evenly spaced
//! values from `a` to `b` inclusive.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Raw key/value pairs as read from a file and the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key = value, got '{line}'",
                    no + 1
                ))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", no + 1)));
            }
            if cfg.values.contains_key(k) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{k}'",
                    no + 1
                )));
            }
            cfg.values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(cfg)
    }

    /// Insert or override one value.
    pub fn set(&mut self, key: &str, value: &str) {
        self.values
            .insert(key.to_string(), value.trim().to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

/// Configuration checked against an experiment's key set, with defaults filled.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    /// `keys` pairs each accepted key with its default; an empty default
    /// marks an optional key.
    pub fn resolve(cfg: &Config, keys: &[(&str, &str)]) -> Result<Self> {
        for k in cfg.keys() {
            if !keys.iter().any(|(name, _)| *name == k) {
                let valid: Vec<&str> = keys.iter().map(|(n, _)| *n).collect();
                return Err(Error::Config(format!(
                    "unknown key '{k}' (valid keys: {})",
                    valid.join(", ")
                )));
            }
        }
        let mut values = BTreeMap::new();
        for (name, default) in keys {
            let v = cfg.get(name).unwrap_or(default);
            if !v.is_empty() {
                values.insert(name.to_string(), v.to_string());
            }
        }
        Ok(Self { values })
    }

    /// Resolved values in key order, for the output metadata.
    pub fn echo(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_number(self.raw(key)?).map_err(|e| keyed(key, e))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        parse_count(self.raw(key)?).map_err(|e| keyed(key, e))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let raw = self.raw(key)?;
        raw.parse().map_err(|_| {
            Error::Config(format!(
                "{key}: expected a non-negative integer, got '{raw}'"
            ))
        })
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(Error::Config(format!(
                "{key}: expected true or false, got '{other}'"
            ))),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.raw(key)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        parse_list(self.raw(key)?).map_err(|e| keyed(key, e))
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        let raw = self.raw(key)?;
        let mut out = Vec::new();
        for item in raw.split(',').map(str::trim) {
            if let Some((a, b)) = item.split_once("..") {
                let (a, b) = (
                    parse_count(a).map_err(|e| keyed(key, e))?,
                    parse_count(b).map_err(|e| keyed(key, e))?,
                );
                if b < a {
                    return Err(Error::Config(format!("{key}: empty range '{item}'")));
                }
                out.extend(a..=b);
            } else {
                out.push(parse_count(item).map_err(|e| keyed(key, e))?);
            }
        }
        Ok(out)
    }

    pub fn str_list(&self, key: &str) -> Result<Vec<String>> {
        Ok(self
            .raw(key)?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect())
    }
}

fn keyed(key: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{key}: {m}")),
        other => other,
    }
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| {
        Error::Config(format!(
            "expected a non-negative integer, got '{}'",
            s.trim()
        ))
    })
}

/// A single number: `[-] factor ((*|/) factor)*` where a factor is a decimal
/// literal or `pi`; `inf` is accepted on its own.
pub fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Config(format!("cannot parse number '{t}'"));
    if t.is_empty() {
        return Err(bad());
    }
    match t {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = rest[..end].trim();
        let x = match factor {
            "pi" => std::f64::consts::PI,
            f => {
                if f.is_empty() || f.contains("inf") || f.contains("nan") {
                    return Err(bad());
                }
                f.parse::<f64>().map_err(|_| bad())?
            }
        };
        value = if op == '*' { value * x } else { value / x };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}

/// Comma-separated numbers and `a:b:n` ranges.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(parse_number(one)?),
            [a, b, n] => {
                let (a, b) = (parse_number(a)?, parse_number(b)?);
                let n = parse_count(n)?;
                match n {
                    0 => return Err(Error::Config(format!("range '{item}' has no points"))),
                    1 => out.push(a),
                    _ => out.extend((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64)),
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "cannot parse list item '{item}' (expected x or a:b:n)"
                )))
            }
        }
    }
    Ok(out)
}
