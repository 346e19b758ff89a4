//! Dense real symmetric matrices.
//!
//! Storage is full row-major, but every mutating path writes both `(i, j)`
//! and `(j, i)` from a single computed value, so `get(i, j) == get(j, i)`
//! holds bitwise for every matrix this module hands out.

mod eigen;
mod tangent;

use std::fmt;

pub use eigen::{eig_sym, psd_project, EigenDecomposition, EIG_TOL};
pub use tangent::{split_t, TangentSpace};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// Frobenius, spectral and nuclear norm of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixNorms {
    pub frobenius: f64,
    pub spectral: f64,
    pub nuclear: f64,
}

impl SymmetricMatrix {
    /// # Panics
    /// If `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "symmetric matrix dimension must be positive");
        SymmetricMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from full rows; rejects input that is not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self::from_upper_fn(dim, |i, j| rows[i][j]))
    }

    /// `x xᵗ`.
    pub fn outer(x: &[f64]) -> Self {
        Self::from_upper_fn(x.len(), |i, j| x[i] * x[j])
    }

    /// `y xᵗ + x yᵗ`, an element of the tangent space at `x`.
    pub fn sym_outer(y: &[f64], x: &[f64]) -> Self {
        assert_eq!(y.len(), x.len());
        Self::from_upper_fn(x.len(), |i, j| y[i] * x[j] + x[i] * y[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    /// Row-major view of the full matrix.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Trace inner product `⟨A, B⟩ = tr(A B)`.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, a| acc.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    /// `aᵗ M a`.
    pub fn quad_form(&self, a: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.dim);
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut s = 0.0;
            for (mij, aj) in row.iter().zip(a) {
                s += mij * aj;
            }
            acc += a[i] * s;
        }
        acc
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `self += alpha · a aᵗ`.
    pub fn add_rank_one(&mut self, alpha: f64, a: &[f64]) {
        debug_assert_eq!(a.len(), self.dim);
        let n = self.dim;
        for i in 0..n {
            let ai = alpha * a[i];
            if ai == 0.0 {
                continue;
            }
            for j in i..n {
                let v = self.data[i * n + j] + ai * a[j];
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SymmetricMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| alpha * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + alpha · I`.
    pub fn shifted(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] += alpha;
        }
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim, "symmetric matrix dimension mismatch");
        SymmetricMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn norms(&self) -> Result<MatrixNorms> {
        let eig = eig_sym(self)?;
        Ok(MatrixNorms {
            frobenius: self.frobenius_norm(),
            spectral: eig.spectral_norm(),
            nuclear: eig.nuclear_norm(),
        })
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(eig_sym(self)?.spectral_norm())
    }

    pub fn nuclear_norm(&self) -> Result<f64> {
        Ok(eig_sym(self)?.nuclear_norm())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*eig_sym(self)?.eigenvalues.last().expect("dim >= 1"))
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.data.chunks(self.dim).collect();
        f.debug_struct("SymmetricMatrix")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

/// Frobenius, spectral and nuclear norms in one call.
pub fn norms(m: &SymmetricMatrix) -> Result<MatrixNorms> {
    m.norms()
}
