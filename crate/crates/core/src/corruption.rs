//! Noisy, grossly corrupted measurement sets `b = clean + η + ε`.
//!
//! Measurement indices are 0-based throughout.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{Domain, Stream};
use crate::sensing::{SensingEnsemble, Signal};

/// How the gross errors `ε` on the support are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum CorruptionMode {
    None,
    /// `εᵢ ~ Uniform([0, bound])`, added to the clean value.
    UniformLarge { bound: f64 },
    /// Explicit length-`m` vector; must vanish off the support.
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    None,
    /// `ηᵢ ~ N(0, σ²)` i.i.d.
    Gaussian { sigma: f64 },
    /// Explicit length-`m` vector.
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionPlan {
    /// Sorted, deduplicated indices of the corruption support `S`.
    pub support: Vec<usize>,
    pub mode: CorruptionMode,
    pub noise: NoiseModel,
}

impl CorruptionPlan {
    pub fn clean() -> Self {
        CorruptionPlan {
            support: Vec::new(),
            mode: CorruptionMode::None,
            noise: NoiseModel::None,
        }
    }

    pub fn gaussian_noise(sigma: f64) -> Self {
        CorruptionPlan {
            noise: NoiseModel::Gaussian { sigma },
            ..Self::clean()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub b: Vec<f64>,
    pub clean: Vec<f64>,
    pub eta: Vec<f64>,
    pub eps: Vec<f64>,
    /// Sorted support `S` of the gross errors.
    pub support: Vec<usize>,
}

impl MeasurementSet {
    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// `|S| / m`.
    pub fn corruption_fraction(&self) -> f64 {
        self.support.len() as f64 / self.m() as f64
    }

    pub fn eta_l1(&self) -> f64 {
        self.eta.iter().map(|v| v.abs()).sum()
    }

    /// CSV with columns `index,b,clean,eta,eps,in_S`. Floats use the shortest
    /// representation that round-trips exactly.
    pub fn to_csv(&self) -> String {
        let mut in_s = vec![false; self.m()];
        for &i in &self.support {
            in_s[i] = true;
        }
        let mut out = String::from("index,b,clean,eta,eps,in_S\n");
        for i in 0..self.m() {
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{}",
                self.b[i], self.clean[i], self.eta[i], self.eps[i], in_s[i] as u8
            );
        }
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    fn assemble(clean: Vec<f64>, eta: Vec<f64>, eps: Vec<f64>, support: Vec<usize>) -> Self {
        let b = clean
            .iter()
            .zip(&eta)
            .zip(&eps)
            .map(|((c, n), e)| c + n + e)
            .collect();
        MeasurementSet {
            b,
            clean,
            eta,
            eps,
            support,
        }
    }
}

/// `⌈fraction · m⌉`, treating products within rounding of an integer as that integer
/// (so `0.07 · 100` gives 7, not 8).
pub fn support_size(fraction: f64, m: usize) -> usize {
    let x = fraction * m as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Leading-index support `{0, …, ⌈fraction·m⌉ − 1}`.
pub fn leading_support(fraction: f64, m: usize) -> Result<Vec<usize>> {
    let k = checked_support_size(fraction, m)?;
    Ok((0..k).collect())
}

/// A support of the same size as [`leading_support`], drawn uniformly by seed.
pub fn randomized_support(fraction: f64, m: usize, seed: u64) -> Result<Vec<usize>> {
    let k = checked_support_size(fraction, m)?;
    let mut idx: Vec<usize> = (0..m).collect();
    let mut s = Stream::new(Domain::Corruption, seed, u64::MAX);
    for i in 0..k {
        let j = i + s.below((m - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut support = idx[..k].to_vec();
    support.sort_unstable();
    Ok(support)
}

fn checked_support_size(fraction: f64, m: usize) -> Result<usize> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "corruption fraction must lie in [0, 1), got {fraction}"
        )));
    }
    let k = support_size(fraction, m);
    if k >= m {
        return Err(Error::InvalidArgument(format!(
            "corruption fraction {fraction} corrupts all {m} measurements"
        )));
    }
    Ok(k)
}

/// The benchmark simulation model: on the leading `⌈fraction·m⌉` indices the
/// measurement is overwritten by a draw from `Uniform([0, bound])`, elsewhere
/// it is exact. `ε` records the difference, `η = 0`.
pub fn apply_paper_simulation(
    ensemble: &SensingEnsemble,
    signal: &Signal,
    fraction: f64,
    bound: f64,
    seed: u64,
) -> Result<MeasurementSet> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "corruption bound must be positive, got {bound}"
        )));
    }
    let support = leading_support(fraction, ensemble.m())?;
    let clean = ensemble.clean_measurements(signal)?;
    let m = clean.len();
    let mut eps = vec![0.0; m];
    for &i in &support {
        let value = bound * Stream::new(Domain::Corruption, seed, i as u64).uniform();
        eps[i] = value - clean[i];
    }
    Ok(MeasurementSet::assemble(clean, vec![0.0; m], eps, support))
}

/// Adds `ηᵢ ~ N(0, σ²)` to every measurement outside the support and
/// re-assembles `b`. Measurements on the support are left as they were,
/// since the simulation model overwrites them.
pub fn add_gaussian_noise(ms: MeasurementSet, sigma: f64, seed: u64) -> MeasurementSet {
    let m = ms.m();
    let mut in_s = vec![false; m];
    for &i in &ms.support {
        in_s[i] = true;
    }
    let eta = (0..m)
        .map(|i| {
            if in_s[i] {
                0.0
            } else {
                sigma * Stream::new(Domain::Noise, seed, i as u64).normal()
            }
        })
        .collect();
    MeasurementSet::assemble(ms.clean, eta, ms.eps, ms.support)
}

/// General form: additive noise everywhere plus additive gross errors on the support.
pub fn apply_plan(
    ensemble: &SensingEnsemble,
    signal: &Signal,
    plan: &CorruptionPlan,
    seed: u64,
) -> Result<MeasurementSet> {
    let clean = ensemble.clean_measurements(signal)?;
    let m = clean.len();

    let mut support = plan.support.clone();
    support.sort_unstable();
    support.dedup();
    if let Some(&bad) = support.iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange { index: bad, len: m });
    }

    let eta = match &plan.noise {
        NoiseModel::None => vec![0.0; m],
        NoiseModel::Gaussian { sigma } => {
            if !(*sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad noise level {sigma}")));
            }
            (0..m)
                .map(|i| sigma * Stream::new(Domain::Noise, seed, i as u64).normal())
                .collect()
        }
        NoiseModel::Given(eta) => {
            ensemble.check_measurements(eta)?;
            eta.clone()
        }
    };

    let eps = match &plan.mode {
        CorruptionMode::None => vec![0.0; m],
        CorruptionMode::UniformLarge { bound } => {
            if !(*bound > 0.0 && bound.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "corruption bound must be positive, got {bound}"
                )));
            }
            let mut eps = vec![0.0; m];
            for &i in &support {
                eps[i] = bound * Stream::new(Domain::Corruption, seed, i as u64).uniform();
            }
            eps
        }
        CorruptionMode::Given(eps) => {
            ensemble.check_measurements(eps)?;
            let mut in_s = vec![false; m];
            for &i in &support {
                in_s[i] = true;
            }
            if let Some(index) = (0..m).find(|&i| eps[i] != 0.0 && !in_s[i]) {
                return Err(Error::CorruptionOffSupport { index });
            }
            eps.clone()
        }
    };

    Ok(MeasurementSet::assemble(clean, eta, eps, support))
}
