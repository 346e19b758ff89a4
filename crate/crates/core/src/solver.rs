//! First-order primal-dual solver for the lifted ℓ1 program
//!
//! ```text
//!     minimize  ‖A(X) − b‖₁ + λ·tr(X)   subject to  X ⪰ 0
//! ```
//!
//! Each iteration performs
//!
//! ```text
//!     y  ← clamp(y + σ(A X̄ − b), [−1, 1])
//!     X⁺ ← Π_psd(X − τ(A* y + λI))
//!     X̄  ← 2X⁺ − X
//! ```
//!
//! The clamp is the proximal map of the conjugate of `‖· − b‖₁`. Only
//! `A X̄` is ever needed, so it is carried by linearity instead of forming
//! `X̄`. Convergence requires `τσ‖A‖² ≤ 1`.

use crate::error::{Error, Result};
use crate::sensing::{SensingEnsemble, Signal};
use crate::symmat::{psd_project, split_t, SymmetricMatrix, TangentSpace};

/// Safety factor applied to the power-iteration estimate of `‖A‖`.
pub const NORM_SAFETY_FACTOR: f64 = 1.01;
/// Fraction of `1/‖A‖` used for both default step sizes.
pub const DEFAULT_STEP_FRACTION: f64 = 0.99;
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_MAX_ITERS: usize = 50_000;
/// A feasibility solve succeeds when the ℓ1 residual is at most `m` times this.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// Residual tolerance used by default in feasibility mode, tight enough for
/// the ℓ1 residual to reach [`FEASIBILITY_TOLERANCE`].
pub const FEASIBILITY_SOLVER_TOLERANCE: f64 = 1e-11;

const POWER_MAX_ITERS: usize = 500;
const POWER_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverMode {
    /// `min ‖A(X) − b‖₁` over the PSD cone.
    L1,
    /// `min λ tr(X) + ‖A(X) − b‖₁` over the PSD cone.
    L1PlusTrace { lambda: f64 },
    /// Find `X ⪰ 0` with `A(X) = b`, via the exact ℓ1 penalty.
    Feasibility,
}

impl SolverMode {
    fn trace_weight(self) -> f64 {
        match self {
            SolverMode::L1PlusTrace { lambda } => lambda,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub max_iters: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    /// τ
    pub step_primal: f64,
    /// σ
    pub step_dual: f64,
    pub operator_norm_estimate: f64,
}

impl SolverConfig {
    /// Default configuration with steps derived from an operator-norm estimate.
    pub fn with_norm(mode: SolverMode, operator_norm_estimate: f64) -> Self {
        let step = DEFAULT_STEP_FRACTION / operator_norm_estimate;
        let tol = match mode {
            SolverMode::Feasibility => FEASIBILITY_SOLVER_TOLERANCE,
            _ => DEFAULT_TOLERANCE,
        };
        SolverConfig {
            mode,
            max_iters: DEFAULT_MAX_ITERS,
            tol_primal: tol,
            tol_dual: tol,
            step_primal: step,
            step_dual: step,
            operator_norm_estimate,
        }
    }

    pub fn for_ensemble(ensemble: &SensingEnsemble, mode: SolverMode) -> Self {
        Self::with_norm(mode, estimate_operator_norm(ensemble))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if let SolverMode::L1PlusTrace { lambda } = self.mode {
            if !(lambda >= 0.0 && lambda.is_finite()) {
                return bad(format!("trace weight must be nonnegative, got {lambda}"));
            }
        }
        if !(self.step_primal > 0.0 && self.step_dual > 0.0) {
            return bad("step sizes must be positive".into());
        }
        let product =
            self.step_primal * self.step_dual * self.operator_norm_estimate.powi(2);
        if !(product <= 1.0) {
            return bad(format!("step condition τσ‖A‖² ≤ 1 violated ({product})"));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub x_hat: SymmetricMatrix,
    /// `‖A(X̂) − b‖₁ + λ·tr(X̂)`, recomputed from `x_hat`.
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual_history: Vec<f64>,
    pub dual_residual_history: Vec<f64>,
    /// Objective of the primal iterate after each iteration.
    pub objective_history: Vec<f64>,
    pub termination: Termination,
    /// Set in feasibility mode: whether the ℓ1 residual certifies `A(X̂) = b`.
    pub feasible: Option<bool>,
}

/// Objective of `X` for the given mode.
pub fn objective(
    ensemble: &SensingEnsemble,
    b: &[f64],
    x: &SymmetricMatrix,
    mode: SolverMode,
) -> Result<f64> {
    let ax = ensemble.forward(x)?;
    Ok(l1_residual(&ax, b) + mode.trace_weight() * x.trace())
}

fn l1_residual(ax: &[f64], b: &[f64]) -> f64 {
    ax.iter().zip(b).map(|(a, b)| (a - b).abs()).sum()
}

pub fn solve(ensemble: &SensingEnsemble, b: &[f64], cfg: &SolverConfig) -> Result<SolverReport> {
    ensemble.check_measurements(b)?;
    cfg.validate()?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("measurements must be finite".into()));
    }

    let n = ensemble.n();
    let m = ensemble.m();
    let lambda = cfg.mode.trace_weight();
    let tau = cfg.step_primal;
    let sigma = cfg.step_dual;

    if b.iter().all(|&v| v == 0.0) {
        return finish(ensemble, b, cfg, SymmetricMatrix::zeros(n), 0, Termination::Converged, Histories::default());
    }

    let scale = (b.iter().map(|v| v.abs()).sum::<f64>() / m as f64).max(1.0);

    let mut x = SymmetricMatrix::zeros(n);
    let mut y = vec![0.0; m];
    let mut ax = vec![0.0; m];
    let mut ax_bar = vec![0.0; m];
    let mut y_next = vec![0.0; m];
    let mut grad = SymmetricMatrix::zeros(n);
    let mut hist = Histories::with_capacity(cfg.max_iters.min(4096));
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;

    for _ in 0..cfg.max_iters {
        iterations += 1;

        for i in 0..m {
            y_next[i] = (y[i] + sigma * (ax_bar[i] - b[i])).clamp(-1.0, 1.0);
        }

        ensemble.adjoint_into(&y_next, &mut grad);
        let mut step = x.clone();
        step.axpy(-tau, &grad);
        let step = if lambda != 0.0 { step.shifted(-tau * lambda) } else { step };
        let x_next = match psd_project(&step) {
            Ok(p) => p,
            Err(_) => {
                termination = Termination::NumericalFailure;
                break;
            }
        };
        let ax_next = ensemble.forward(&x_next)?;

        let primal = x.sub(&x_next).frobenius_norm() / tau;
        let dual = (0..m)
            .map(|i| {
                let r = (y[i] - y_next[i]) / sigma + (ax_bar[i] - ax_next[i]);
                r * r
            })
            .sum::<f64>()
            .sqrt();
        let primal = primal / scale;
        let dual = dual / scale;

        for i in 0..m {
            ax_bar[i] = 2.0 * ax_next[i] - ax[i];
        }
        ax = ax_next;
        x = x_next;
        std::mem::swap(&mut y, &mut y_next);

        hist.primal.push(primal);
        hist.dual.push(dual);
        hist.objective.push(l1_residual(&ax, b) + lambda * x.trace());

        if !(primal.is_finite() && dual.is_finite()) || !x.is_finite() {
            termination = Termination::NumericalFailure;
            break;
        }
        if primal <= cfg.tol_primal && dual <= cfg.tol_dual {
            termination = Termination::Converged;
            break;
        }
    }

    if !x.is_finite() {
        x = SymmetricMatrix::zeros(n);
    }
    finish(ensemble, b, cfg, x, iterations, termination, hist)
}

#[derive(Default)]
struct Histories {
    primal: Vec<f64>,
    dual: Vec<f64>,
    objective: Vec<f64>,
}

impl Histories {
    fn with_capacity(cap: usize) -> Self {
        Histories {
            primal: Vec::with_capacity(cap),
            dual: Vec::with_capacity(cap),
            objective: Vec::with_capacity(cap),
        }
    }
}

fn finish(
    ensemble: &SensingEnsemble,
    b: &[f64],
    cfg: &SolverConfig,
    mut x: SymmetricMatrix,
    iterations: usize,
    termination: Termination,
    hist: Histories,
) -> Result<SolverReport> {
    let mut value = objective(ensemble, b, &x, cfg.mode)?;
    // The zero matrix is always feasible with objective ‖b‖₁.
    let zero_value = b.iter().map(|v| v.abs()).sum::<f64>();
    if !(value <= zero_value) {
        x = SymmetricMatrix::zeros(ensemble.n());
        value = zero_value;
    }
    let feasible = match cfg.mode {
        SolverMode::Feasibility => {
            Some(value <= ensemble.m() as f64 * FEASIBILITY_TOLERANCE)
        }
        _ => None,
    };
    Ok(SolverReport {
        x_hat: x,
        objective: value,
        iterations,
        primal_residual_history: hist.primal,
        dual_residual_history: hist.dual,
        objective_history: hist.objective,
        termination,
        feasible,
    })
}

/// Estimate of `‖A‖` (as a map from symmetric matrices with the Frobenius
/// norm to `ℝᵐ`) by power iteration on `A*A`, inflated by
/// [`NORM_SAFETY_FACTOR`].
pub fn estimate_operator_norm(ensemble: &SensingEnsemble) -> f64 {
    let n = ensemble.n();
    let mut x = SymmetricMatrix::identity(n).scaled(1.0 / (n as f64).sqrt());
    let mut rayleigh = 0.0_f64;
    for _ in 0..POWER_MAX_ITERS {
        let ax = ensemble.forward(&x).expect("dimensions agree");
        let next_rayleigh: f64 = ax.iter().map(|v| v * v).sum();
        let y = ensemble.adjoint(&ax).expect("dimensions agree");
        let norm = y.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        x = y.scaled(1.0 / norm);
        let converged = (next_rayleigh - rayleigh).abs() < POWER_REL_TOL * next_rayleigh;
        rayleigh = next_rayleigh;
        if converged {
            break;
        }
    }
    rayleigh.sqrt() * NORM_SAFETY_FACTOR
}

/// `‖H_{T⊥}‖₁ + (2/m)‖η‖₁ − 0.56‖H_T‖_F` for `H = X̂ − x₀x₀ᵗ`; nonnegative
/// when the recovered error lies in the feasible cone.
pub fn check_feasible_cone(
    report: &SolverReport,
    x0: &Signal,
    eta_l1: f64,
    m: usize,
    tangent: &TangentSpace,
) -> Result<f64> {
    let h = report.x_hat.sub(&x0.lifted());
    let (h_t, h_perp) = split_t(&h, tangent)?;
    Ok(h_perp.nuclear_norm()? + 2.0 * eta_l1 / m as f64 - 0.56 * h_t.frobenius_norm())
}
