use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::format::fmt_sig6;
use crate::corruption::{add_gaussian_noise, apply_paper_simulation};
use crate::error::{Error, Result};
use crate::estimator::metrics;
use crate::rng::mix_seed;
use crate::sensing::{SensingEnsemble, Signal};
use crate::solver::{solve, SolverConfig, SolverMode, Termination};

pub const GRID_CSV_HEADER: &str =
    "n,m,trials,mean_capped_error,success_count,mean_iterations,wall_seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub mean_capped_error: f64,
    pub success_count: usize,
    pub mean_iterations: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Sorted by `(n, m)`.
    pub cells: Vec<GridCell>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub capped_error: f64,
    pub iterations: usize,
    pub seconds: f64,
}

/// Seed of trial `trial` in cell `(n, m)`: `mix_seed([base_seed, n, m, trial])`.
pub fn trial_seed(base_seed: u64, n: usize, m: usize, trial: usize) -> u64 {
    mix_seed(&[base_seed, n as u64, m as u64, trial as u64])
}

/// One recovery trial with `x₀ = e₁` under the configured corruption model.
/// Any solver failure is recorded as capped error 1.
pub fn run_trial(cfg: &ExperimentConfig, n: usize, m: usize, trial: usize) -> TrialOutcome {
    let start = Instant::now();
    let seed = trial_seed(cfg.base_seed, n, m, trial);
    let outcome = (|| -> Result<(f64, usize)> {
        let ensemble = SensingEnsemble::generate(n, m, seed)?;
        let x0 = Signal::basis(n, 0);
        let mut ms =
            apply_paper_simulation(&ensemble, &x0, cfg.corruption_fraction, cfg.corruption_bound, seed)?;
        if cfg.noise_sigma > 0.0 {
            ms = add_gaussian_noise(ms, cfg.noise_sigma, seed);
        }
        let mut solver_cfg = SolverConfig::for_ensemble(&ensemble, SolverMode::L1);
        solver_cfg.max_iters = cfg.max_iters;
        let report = solve(&ensemble, &ms.b, &solver_cfg)?;
        if report.termination == Termination::NumericalFailure {
            return Ok((1.0, report.iterations));
        }
        let met = metrics(&report.x_hat, &x0, ms.eta_l1(), m)?;
        Ok((met.capped_relative_error, report.iterations))
    })();
    let (capped_error, iterations) = outcome.unwrap_or((1.0, 0));
    TrialOutcome {
        capped_error,
        iterations,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every `(n, m, trial)` in parallel. Results depend only on the
/// configuration, never on scheduling.
pub fn run_phase_transition(cfg: &ExperimentConfig) -> Result<GridResult> {
    cfg.validate()?;
    let mut ns = cfg.n_range.clone();
    let mut ms = cfg.m_range.clone();
    ns.sort_unstable();
    ns.dedup();
    ms.sort_unstable();
    ms.dedup();

    let tasks: Vec<(usize, usize, usize)> = ns
        .iter()
        .flat_map(|&n| ms.iter().map(move |&m| (n, m)))
        .flat_map(|(n, m)| (0..cfg.trials).map(move |t| (n, m, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = tasks
        .par_iter()
        .map(|&(n, m, t)| run_trial(cfg, n, m, t))
        .collect();

    let cells = outcomes
        .chunks(cfg.trials)
        .zip(tasks.chunks(cfg.trials))
        .map(|(outs, keys)| {
            let (n, m, _) = keys[0];
            let k = outs.len() as f64;
            GridCell {
                n,
                m,
                trials: outs.len(),
                mean_capped_error: outs.iter().map(|o| o.capped_error).sum::<f64>() / k,
                success_count: outs
                    .iter()
                    .filter(|o| o.capped_error <= cfg.success_threshold)
                    .count(),
                mean_iterations: outs.iter().map(|o| o.iterations as f64).sum::<f64>() / k,
                wall_seconds: if cfg.record_timing {
                    outs.iter().map(|o| o.seconds).sum()
                } else {
                    0.0
                },
            }
        })
        .collect();
    Ok(GridResult { cells })
}

impl GridResult {
    pub fn cell(&self, n: usize, m: usize) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.n == n && c.m == m)
    }

    fn sorted_cells(&self) -> Vec<&GridCell> {
        let mut cells: Vec<&GridCell> = self.cells.iter().collect();
        cells.sort_by_key(|c| (c.n, c.m));
        cells
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(GRID_CSV_HEADER);
        out.push('\n');
        for c in self.sorted_cells() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.n,
                c.m,
                c.trials,
                fmt_sig6(c.mean_capped_error),
                c.success_count,
                fmt_sig6(c.mean_iterations),
                fmt_sig6(c.wall_seconds)
            );
        }
        out
    }

    /// Plain `P2` graymap, one row per `n` (ascending) and one column per
    /// `m` (ascending); white is zero error, black is total failure.
    pub fn to_pgm(&self) -> Result<String> {
        let mut ns: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        let mut ms: Vec<usize> = self.cells.iter().map(|c| c.m).collect();
        ns.sort_unstable();
        ns.dedup();
        ms.sort_unstable();
        ms.dedup();
        if ns.is_empty() {
            return Err(Error::RaggedGrid("no cells".into()));
        }
        if self.cells.len() != ns.len() * ms.len() {
            return Err(Error::RaggedGrid(format!(
                "{} cells for a {}×{} grid",
                self.cells.len(),
                ns.len(),
                ms.len()
            )));
        }
        let mut out = format!("P2\n{} {}\n255\n", ms.len(), ns.len());
        for &n in &ns {
            let mut row = Vec::with_capacity(ms.len());
            for &m in &ms {
                let cell = self
                    .cell(n, m)
                    .ok_or_else(|| Error::RaggedGrid(format!("missing cell (n={n}, m={m})")))?;
                row.push(pixel(cell.mean_capped_error).to_string());
            }
            let _ = writeln!(out, "{}", row.join(" "));
        }
        Ok(out)
    }
}

/// `round_half_up(255 · (1 − error))`, clamped to `0..=255`.
pub fn pixel(error: f64) -> u8 {
    let v = (255.0 * (1.0 - error) + 0.5).floor();
    v.clamp(0.0, 255.0) as u8
}

pub fn emit_csv(result: &GridResult, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &result.to_csv())
}

pub fn emit_heatmap(result: &GridResult, path: impl AsRef<Path>) -> Result<()> {
    let pgm = result.to_pgm()?;
    write_file(path.as_ref(), &pgm)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
