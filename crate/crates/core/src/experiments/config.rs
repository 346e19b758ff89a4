//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # desk-scale phase transition
//! n_range = 10, 20
//! m_range = 20..200:60
//! trials = 10
//! corruption_fraction = 0.05
//! ```
//!
//! Lists are comma-separated items, each a number or an inclusive
//! `lo..hi` / `lo..hi:step` range.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_range: Vec<usize>,
    pub m_range: Vec<usize>,
    pub trials: usize,
    pub corruption_fraction: f64,
    pub corruption_bound: f64,
    pub noise_sigma: f64,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub success_threshold: f64,
    /// Seeds per `(n, m)` cell in the certificate and isometry audits.
    pub audit_seeds: usize,
    /// Sampled matrices per seed in the isometry audit.
    pub isometry_samples: usize,
    /// `|S⁺| = |S⁻|` for the certificate audit; `None` means `⌈0.001 m⌉`.
    pub sign_set_size: Option<usize>,
    /// When false, wall-clock columns are written as 0 so that outputs are
    /// byte-identical across runs.
    pub record_timing: bool,
    pub max_iters: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_range: vec![10, 20],
            m_range: vec![20, 60, 120, 200],
            trials: 10,
            corruption_fraction: 0.05,
            corruption_bound: 1e4,
            noise_sigma: 0.0,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            success_threshold: 1e-3,
            audit_seeds: 100,
            isometry_samples: 500,
            sign_set_size: None,
            record_timing: true,
            max_iters: crate::solver::DEFAULT_MAX_ITERS,
        }
    }
}

impl ExperimentConfig {
    /// The full study grid: `n ∈ {5, 10, …, 50}`, `m ∈ {10, 20, …, 250}`.
    pub fn paper_scale() -> Self {
        ExperimentConfig {
            n_range: (5..=50).step_by(5).collect(),
            m_range: (10..=250).step_by(10).collect(),
            ..Self::default()
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_range" => self.n_range = parse_list(value)?,
            "m_range" => self.m_range = parse_list(value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "corruption_fraction" => self.corruption_fraction = parse_num(key, value)?,
            "corruption_bound" => self.corruption_bound = parse_num(key, value)?,
            "noise_sigma" => self.noise_sigma = parse_num(key, value)?,
            "base_seed" => self.base_seed = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "success_threshold" => self.success_threshold = parse_num(key, value)?,
            "audit_seeds" => self.audit_seeds = parse_num(key, value)?,
            "isometry_samples" => self.isometry_samples = parse_num(key, value)?,
            "sign_set_size" => {
                self.sign_set_size = match value {
                    "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "record_timing" => self.record_timing = parse_num(key, value)?,
            "max_iters" => self.max_iters = parse_num(key, value)?,
            _ => return Err(Error::Parse(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.n_range.is_empty() || self.m_range.is_empty() {
            return bad("n_range and m_range must be non-empty");
        }
        if self.n_range.contains(&0) || self.m_range.contains(&0) {
            return bad("signal lengths and measurement counts must be positive");
        }
        if !(0.0..0.5).contains(&self.corruption_fraction) {
            return bad("corruption_fraction must lie in [0, 0.5)");
        }
        if !(self.corruption_bound > 0.0 && self.corruption_bound.is_finite()) {
            return bad("corruption_bound must be positive");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise_sigma must be nonnegative");
        }
        if !(self.success_threshold >= 0.0) {
            return bad("success_threshold must be nonnegative");
        }
        if self.audit_seeds == 0 || self.isometry_samples == 0 || self.max_iters == 0 {
            return bad("audit_seeds, isometry_samples and max_iters must be positive");
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::Parse(format!("{key} = {value:?}: {e}")))
}

/// Parses `"10,20"`, `"5..50"`, `"10..250:10"` or any comma-separated mix.
pub fn parse_list(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (hi, step),
                None => (rest, "1"),
            };
            let lo: usize = parse_num("range start", lo.trim())?;
            let hi: usize = parse_num("range end", hi.trim())?;
            let step: usize = parse_num("range step", step.trim())?;
            if step == 0 || hi < lo {
                return Err(Error::Parse(format!("empty or invalid range {item:?}")));
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(parse_num("list item", item)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("empty list {spec:?}")));
    }
    Ok(out)
}
