use super::SymmetricMatrix;
use crate::error::{Error, Result};

/// Tangent space `T = { y x̄ᵗ + x̄ yᵗ }` of the rank-one manifold at `x̄ x̄ᵗ`.
///
/// `P_{T⊥}(M) = (I − x̄x̄ᵗ) M (I − x̄x̄ᵗ)` and `P_T = I − P_{T⊥}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSpace {
    anchor: Vec<f64>,
}

impl TangentSpace {
    /// Normalizes `x0`; fails for the zero vector.
    pub fn new(x0: &[f64]) -> Result<Self> {
        let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x0.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroSignal);
        }
        Ok(TangentSpace {
            anchor: x0.iter().map(|v| v / norm).collect(),
        })
    }

    /// Unit vector `x̄`.
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// `(I − x̄x̄ᵗ) M (I − x̄x̄ᵗ)`.
    pub fn project_perp(&self, m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        self.check_dim(m)?;
        let x = &self.anchor;
        let w = m.matvec(x);
        let c: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        Ok(SymmetricMatrix::from_upper_fn(x.len(), |i, j| {
            m.get(i, j) - x[i] * w[j] - w[i] * x[j] + c * x[i] * x[j]
        }))
    }

    pub fn project(&self, m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        Ok(split_t(m, self)?.0)
    }

    /// The `T⊥` block expressed in an orthonormal basis of `x̄⊥`, an
    /// `(n − 1) × (n − 1)` matrix. Its eigenvalues are those of `M`
    /// restricted to `x̄⊥`. Returns `None` when `n = 1` (`x̄⊥` is trivial).
    pub fn restrict_perp(&self, m: &SymmetricMatrix) -> Result<Option<SymmetricMatrix>> {
        self.check_dim(m)?;
        let n = self.dim();
        if n == 1 {
            return Ok(None);
        }
        // Householder reflector H = I − 2wwᵗ/‖w‖² with H x̄ = ∓e₁; columns 1.. of
        // H are an orthonormal basis of x̄⊥.
        let x = &self.anchor;
        let mut w = x.clone();
        w[0] += if x[0] >= 0.0 { 1.0 } else { -1.0 };
        let ww: f64 = w.iter().map(|v| v * v).sum();
        let basis = |i: usize, k: usize| -> f64 {
            let delta = if i == k { 1.0 } else { 0.0 };
            delta - 2.0 * w[i] * w[k] / ww
        };
        // MB = M · H[:, 1..]
        let mut mb = vec![0.0; n * (n - 1)];
        for i in 0..n {
            for k in 1..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += m.get(i, j) * basis(j, k);
                }
                mb[i * (n - 1) + (k - 1)] = s;
            }
        }
        Ok(Some(SymmetricMatrix::from_upper_fn(n - 1, |a, b| {
            let mut s = 0.0;
            for i in 0..n {
                s += basis(i, a + 1) * mb[i * (n - 1) + b];
            }
            s
        })))
    }

    fn check_dim(&self, m: &SymmetricMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        Ok(())
    }
}

/// Splits `M` into its components `(M_T, M_{T⊥})` with `M_T + M_{T⊥} = M`.
pub fn split_t(
    m: &SymmetricMatrix,
    t: &TangentSpace,
) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
    let perp = t.project_perp(m)?;
    let tangent = m.sub(&perp);
    Ok((tangent, perp))
}
