//! Signal extraction from a recovered lifted matrix, and error metrics.

use crate::error::{Error, Result};
use crate::sensing::Signal;
use crate::symmat::{eig_sym, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics {
    /// `‖X̂ − x₀x₀ᵗ‖_F`
    pub matrix_error_frob: f64,
    /// `min(‖X̂ − x₀x₀ᵗ‖_F / ‖x₀x₀ᵗ‖_F, 1)`; for `x₀ = 0` it is 0 iff `X̂ = 0`, else 1.
    pub capped_relative_error: f64,
    /// `min(‖x̂ − x₀‖, ‖x̂ + x₀‖)`
    pub signal_error: f64,
    /// `min(‖x₀‖, ‖η‖₁ / (m‖x₀‖))`, and 0 when `x₀ = 0`.
    pub theorem_bound_rhs: f64,
}

/// `√λ₁ · u₁` from the leading eigenpair, or zero when `λ₁ ≤ 0`.
pub fn extract_signal(x_hat: &SymmetricMatrix) -> Result<Vec<f64>> {
    let eig = eig_sym(x_hat)?;
    let top = eig.eigenvalues[0];
    if top <= 0.0 {
        return Ok(vec![0.0; x_hat.dim()]);
    }
    let scale = top.sqrt();
    Ok(eig.eigenvector(0).into_iter().map(|u| scale * u).collect())
}

pub fn metrics(
    x_hat: &SymmetricMatrix,
    x0: &Signal,
    eta_l1: f64,
    m: usize,
) -> Result<RecoveryMetrics> {
    if x_hat.dim() != x0.dim() {
        return Err(Error::DimensionMismatch {
            expected: x0.dim(),
            found: x_hat.dim(),
        });
    }
    let truth = x0.lifted();
    let matrix_error_frob = x_hat.sub(&truth).frobenius_norm();
    let truth_norm = truth.frobenius_norm();
    let capped_relative_error = if truth_norm == 0.0 {
        if x_hat.frobenius_norm() > 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (matrix_error_frob / truth_norm).min(1.0)
    };

    let x_est = extract_signal(x_hat)?;
    let dist = |sign: f64| -> f64 {
        x_est
            .iter()
            .zip(x0.as_slice())
            .map(|(a, b)| (a - sign * b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let signal_error = dist(1.0).min(dist(-1.0));

    let x0_norm = x0.norm();
    let theorem_bound_rhs = if x0_norm == 0.0 {
        0.0
    } else {
        x0_norm.min(eta_l1 / (m as f64 * x0_norm))
    };

    Ok(RecoveryMetrics {
        matrix_error_frob,
        capped_relative_error,
        signal_error,
        theorem_bound_rhs,
    })
}
