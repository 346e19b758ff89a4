//! Gaussian sensing ensemble and the lifted measurement operator
//! `A(X) = (aᵢᵗ X aᵢ)ᵢ` with adjoint `A*λ = Σᵢ λᵢ aᵢaᵢᵗ`.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{Domain, Stream};
use crate::symmat::SymmetricMatrix;

/// `m` i.i.d. `N(0, Iₙ)` vectors. Vector `i` is drawn from its own stream
/// `(seed, i)`, so any subset can be regenerated independently.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingEnsemble {
    n: usize,
    m: usize,
    seed: u64,
    /// Row-major `m × n`.
    vectors: Vec<f64>,
}

/// The unknown signal `x₀`. The zero vector is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(pub Vec<f64>);

impl Signal {
    /// Standard basis vector `e_k` in `ℝⁿ`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut x = vec![0.0; n];
        x[k] = 1.0;
        Signal(x)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn lifted(&self) -> SymmetricMatrix {
        SymmetricMatrix::outer(&self.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl SensingEnsemble {
    pub fn generate(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument(format!(
                "ensemble needs n >= 1 and m >= 1 (got n={n}, m={m})"
            )));
        }
        let mut vectors = vec![0.0; m * n];
        vectors
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                let mut s = Stream::new(Domain::Sensing, seed, i as u64);
                for v in row.iter_mut() {
                    *v = s.normal();
                }
            });
        Ok(SensingEnsemble {
            n,
            m,
            seed,
            vectors,
        })
    }

    /// Wraps explicit vectors (row-major `m × n`). The seed is recorded as given.
    pub fn from_vectors(n: usize, vectors: Vec<f64>, seed: u64) -> Result<Self> {
        if n == 0 || vectors.is_empty() || vectors.len() % n != 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot split {} values into vectors of length {n}",
                vectors.len()
            )));
        }
        Ok(SensingEnsemble {
            n,
            m: vectors.len() / n,
            seed,
            vectors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n)
    }

    /// `(aᵢᵗ X aᵢ)ᵢ`.
    pub fn forward(&self, x: &SymmetricMatrix) -> Result<Vec<f64>> {
        self.check_matrix(x)?;
        Ok(self.vectors().map(|a| x.quad_form(a)).collect())
    }

    /// `Σᵢ λᵢ aᵢaᵢᵗ`, accumulated in index order.
    pub fn adjoint(&self, lam: &[f64]) -> Result<SymmetricMatrix> {
        self.check_measurements(lam)?;
        let mut out = SymmetricMatrix::zeros(self.n);
        self.adjoint_into(lam, &mut out);
        Ok(out)
    }

    /// Writes `Σᵢ λᵢ aᵢaᵢᵗ` into `out`, overwriting it.
    pub(crate) fn adjoint_into(&self, lam: &[f64], out: &mut SymmetricMatrix) {
        let n = self.n;
        let data = out.data_mut();
        data.iter_mut().for_each(|v| *v = 0.0);
        // Upper triangle only, mirrored at the end.
        for (a, &l) in self.vectors().zip(lam) {
            if l == 0.0 {
                continue;
            }
            for i in 0..n {
                let li = l * a[i];
                let row = &mut data[i * n..(i + 1) * n];
                for j in i..n {
                    row[j] += li * a[j];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                data[j * n + i] = data[i * n + j];
            }
        }
    }

    /// `⟨aᵢ, x₀⟩²`.
    pub fn clean_measurements(&self, signal: &Signal) -> Result<Vec<f64>> {
        if signal.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: signal.dim(),
            });
        }
        Ok(self
            .vectors()
            .map(|a| {
                let p: f64 = a.iter().zip(&signal.0).map(|(u, v)| u * v).sum();
                p * p
            })
            .collect())
    }

    /// Plain-text dump: a `# sensing n=<n> m=<m> seed=<seed>` header, then one
    /// whitespace-separated row per vector with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("# sensing n={} m={} seed={}\n", self.n, self.m, self.seed);
        for a in self.vectors() {
            let row: Vec<String> = a.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty ensemble file".into()))?;
        let rest = header
            .strip_prefix("# sensing")
            .ok_or_else(|| Error::Parse(format!("bad ensemble header: {header:?}")))?;
        let (mut n, mut m, mut seed) = (None, None, None);
        for field in rest.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let parse_err = |_| Error::Parse(format!("bad header value {field:?}"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(parse_err)?),
                "m" => m = Some(value.parse::<usize>().map_err(parse_err)?),
                "seed" => seed = Some(value.parse::<u64>().map_err(parse_err)?),
                _ => return Err(Error::Parse(format!("unknown header field {key:?}"))),
            }
        }
        let (n, m, seed) = match (n, m, seed) {
            (Some(n), Some(m), Some(s)) => (n, m, s),
            _ => return Err(Error::Parse("header must define n, m and seed".into())),
        };
        let mut vectors = Vec::with_capacity(n * m);
        let mut rows = 0;
        for line in lines {
            let before = vectors.len();
            for tok in line.split_whitespace() {
                vectors.push(
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {rows}: {e}")))?,
                );
            }
            if vectors.len() - before != n {
                return Err(Error::Parse(format!(
                    "row {rows} has {} values, expected {n}",
                    vectors.len() - before
                )));
            }
            rows += 1;
        }
        if rows != m {
            return Err(Error::Parse(format!("expected {m} rows, found {rows}")));
        }
        Self::from_vectors(n, vectors, seed)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub(crate) fn check_matrix(&self, x: &SymmetricMatrix) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_measurements(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: v.len(),
            });
        }
        Ok(())
    }
}
