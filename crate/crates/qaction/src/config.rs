//! Plain-text key/value configuration.
//!
//! Format: one `key = value` per line, `#` starts a comment, blank lines are
//! ignored. Keys are dot-namespaced (`classical.v2`, `fit.t_grid`). List
//! values are comma-separated. See the repository README for the full schema.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{ActionParams1D, ActionParams2D, PhysConst};

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::validation(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"))
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(s) => s.parse::<f64>().map_err(|_| Error::validation(key, format!("not a number: `{s}`"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(s) => s.parse::<usize>().map_err(|_| Error::validation(key, format!("not an integer: `{s}`"))),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(s) => s.parse::<u64>().map_err(|_| Error::validation(key, format!("not an integer: `{s}`"))),
        }
    }

    pub fn get_str<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.entries.get(key).map(|s| s.as_str()).unwrap_or(default)
    }

    /// Comma-separated list of numbers.
    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    tok.parse::<f64>().map_err(|_| Error::validation(key, format!("not a number: `{tok}`")))
                })
                .collect(),
        }
    }

    pub fn get_usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    tok.parse::<usize>().map_err(|_| Error::validation(key, format!("not an integer: `{tok}`")))
                })
                .collect(),
        }
    }

    /// Physical constants block: `phys.hbar` (default 1).
    pub fn phys_const(&self) -> Result<PhysConst> {
        PhysConst::new(self.get_f64("phys.hbar", 1.0)?)
    }

    /// 1-D action block under `prefix.{m,v2,v_m2,v0}`; defaults are the
    /// paper's classical setup m=1, v2=0.5, v_m2=1, v0=0.
    pub fn action_1d(&self, prefix: &str) -> Result<ActionParams1D> {
        let d = ActionParams1D::paper_classical();
        ActionParams1D::new(
            self.get_f64(&format!("{prefix}.m"), d.m)?,
            self.get_f64(&format!("{prefix}.v2"), d.v2)?,
            self.get_f64(&format!("{prefix}.v_m2"), d.v_m2)?,
            self.get_f64(&format!("{prefix}.v0"), d.v0)?,
        )
    }

    /// 2-D action block under `prefix.{m,v2,v22,v4}`; defaults are the
    /// classical coupled system m=1, v2=0.5, v22=0.05, v4=0.
    pub fn action_2d(&self, prefix: &str) -> Result<ActionParams2D> {
        let d = ActionParams2D::classical_coupled();
        ActionParams2D::new(
            self.get_f64(&format!("{prefix}.m"), d.m)?,
            self.get_f64(&format!("{prefix}.v2"), d.v2)?,
            self.get_f64(&format!("{prefix}.v22"), d.v22)?,
            self.get_f64(&format!("{prefix}.v4"), d.v4)?,
        )
    }
}
