//! Inexact dual certificates for ℓ1 phase retrieval and empirical audits
//! of the ℓ1-isometry and Wishart tangent-space bounds.
//!
//! For a unit anchor `x̄ = x₀/‖x₀‖` and disjoint index sets `S⁺`, `S⁻`:
//!
//! ```text
//!     λᵢ = −7/m                                    i ∈ S⁺
//!     λᵢ = +7/m                                    i ∈ S⁻
//!     λᵢ = (β₀ − ⟨aᵢ, x̄⟩² 1(|⟨aᵢ, x̄⟩| ≤ 3)) / m    otherwise
//!     Y  = Σᵢ λᵢ aᵢaᵢᵗ
//! ```
//!
//! with `β₀ = E[z⁴ 1(|z| ≤ 3)]`. Conditioned on the anchor coordinate,
//! `E[Y]` vanishes on `T` and equals `(β₀ − E[z² 1(|z| ≤ 3)]) I ≈ 1.7 I` on
//! `T⊥`, which is where the 1.7 centering below comes from.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rng::{Domain, Stream};
use crate::sensing::{SensingEnsemble, Signal};
use crate::symmat::{split_t, SymmetricMatrix, TangentSpace};

/// Coefficient magnitude on the gross-error sets, in units of `1/m`.
pub const SIGN_COEFFICIENT: f64 = 7.0;
pub const TRUNCATION: f64 = 3.0;

pub const TANGENT_BOUND_STRONG: f64 = 0.25;
pub const PERP_CENTER: f64 = 1.7;
pub const PERP_RADIUS: f64 = 0.3;

pub const TANGENT_BOUND: f64 = 0.5;
pub const PERP_FLOOR: f64 = 1.0;

/// `1 + 1/16`
pub const ISOMETRY_UPPER: f64 = 1.0 + 1.0 / 16.0;
/// `0.94 (1 − 1/16)`
pub const ISOMETRY_LOWER: f64 = 0.94 * (1.0 - 1.0 / 16.0);
pub const WISHART_T_BOUND: f64 = 5.0;

const SIMPSON_PANELS: usize = 20_000;

/// `E[z⁴ 1(|z| ≤ cutoff)]` for standard normal `z`, by composite Simpson.
/// An infinite cutoff integrates over `[−40, 40]`, beyond which the
/// integrand is below double precision.
pub fn truncated_fourth_moment(cutoff: f64) -> f64 {
    let c = cutoff.min(40.0);
    if c <= 0.0 {
        return 0.0;
    }
    let f = |z: f64| z.powi(4) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let h = 2.0 * c / SIMPSON_PANELS as f64;
    let mut acc = f(-c) + f(c);
    for k in 1..SIMPSON_PANELS {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(-c + k as f64 * h);
    }
    acc * h / 3.0
}

/// `β₀ = E[z⁴ 1(|z| ≤ 3)] ≈ 2.6728`.
pub fn compute_beta0() -> f64 {
    truncated_fourth_moment(TRUNCATION)
}

#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub y: SymmetricMatrix,
    pub lam: Vec<f64>,
    pub s_plus: Vec<usize>,
    pub s_minus: Vec<usize>,
    pub beta0: f64,
}

pub fn build_certificate(
    ensemble: &SensingEnsemble,
    x0: &Signal,
    s_plus: &[usize],
    s_minus: &[usize],
) -> Result<DualCertificate> {
    if x0.dim() != ensemble.n() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.n(),
            found: x0.dim(),
        });
    }
    let tangent = TangentSpace::new(x0.as_slice())?;
    let anchor = tangent.anchor();
    let m = ensemble.m();

    // 0 = complement, 1 = S⁺, 2 = S⁻
    let mut membership = vec![0u8; m];
    for (set, tag) in [(s_plus, 1u8), (s_minus, 2u8)] {
        for &i in set {
            if i >= m {
                return Err(Error::IndexOutOfRange { index: i, len: m });
            }
            if membership[i] != 0 && membership[i] != tag {
                return Err(Error::InvalidArgument(format!(
                    "index {i} is in both S+ and S-"
                )));
            }
            membership[i] = tag;
        }
    }

    let beta0 = compute_beta0();
    let mf = m as f64;
    let lam: Vec<f64> = ensemble
        .vectors()
        .zip(&membership)
        .map(|(a, &tag)| match tag {
            1 => -SIGN_COEFFICIENT / mf,
            2 => SIGN_COEFFICIENT / mf,
            _ => {
                let p: f64 = a.iter().zip(anchor).map(|(u, v)| u * v).sum();
                let truncated = if p.abs() <= TRUNCATION { p * p } else { 0.0 };
                (beta0 - truncated) / mf
            }
        })
        .collect();
    let y = ensemble.adjoint(&lam)?;

    let mut s_plus = s_plus.to_vec();
    let mut s_minus = s_minus.to_vec();
    s_plus.sort_unstable();
    s_plus.dedup();
    s_minus.sort_unstable();
    s_minus.dedup();

    Ok(DualCertificate {
        y,
        lam,
        s_plus,
        s_minus,
        beta0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateReport {
    /// `‖Y_T‖_F`
    pub y_t_frob: f64,
    /// `‖Y_{T⊥} − 1.7 I_{T⊥}‖`
    pub y_perp_centered_spectral: f64,
    /// Smallest eigenvalue of `Y` restricted to `x̄⊥`.
    pub y_perp_min_eig: f64,
    pub lambda_ok: bool,
    pub passes_lemma5: bool,
    pub passes_conditions_7_9: bool,
}

pub const CERTIFICATE_CSV_HEADER: &str = "seed,n,m,s_plus,s_minus,yT_frob,yTperp_centered_spectral,yTperp_min_eig,lambda_ok,passes_lemma5,passes_conditions_7_9";

impl CertificateReport {
    pub fn csv_row(&self, seed: u64, n: usize, m: usize, s_plus: usize, s_minus: usize) -> String {
        format!(
            "{seed},{n},{m},{s_plus},{s_minus},{:.17e},{:.17e},{:.17e},{},{},{}",
            self.y_t_frob,
            self.y_perp_centered_spectral,
            self.y_perp_min_eig,
            self.lambda_ok as u8,
            self.passes_lemma5 as u8,
            self.passes_conditions_7_9 as u8
        )
    }
}

/// Evaluates the certificate conditions for a gross-error vector `eps`.
/// A sign mismatch between `eps` and `(S⁺, S⁻)` yields `lambda_ok = false`.
pub fn check_certificate(
    cert: &DualCertificate,
    x0: &Signal,
    eps: &[f64],
) -> Result<CertificateReport> {
    let m = cert.lam.len();
    if eps.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: eps.len(),
        });
    }
    let tangent = TangentSpace::new(x0.as_slice())?;
    let (y_t, _) = split_t(&cert.y, &tangent)?;
    let y_t_frob = y_t.frobenius_norm();

    let (y_perp_centered_spectral, y_perp_min_eig) = match tangent.restrict_perp(&cert.y)? {
        Some(restricted) => {
            let eig = crate::symmat::eig_sym(&restricted)?;
            let centered = eig
                .eigenvalues
                .iter()
                .fold(0.0_f64, |acc, l| acc.max((l - PERP_CENTER).abs()));
            (centered, *eig.eigenvalues.last().expect("dim >= 1"))
        }
        None => (0.0, f64::INFINITY),
    };

    let bound = SIGN_COEFFICIENT / m as f64;
    let lambda_ok = cert.lam.iter().zip(eps).all(|(&l, &e)| {
        if e != 0.0 {
            l == -bound * e.signum()
        } else {
            l.abs() <= bound
        }
    });

    Ok(CertificateReport {
        y_t_frob,
        y_perp_centered_spectral,
        y_perp_min_eig,
        lambda_ok,
        passes_lemma5: y_t_frob <= TANGENT_BOUND_STRONG && y_perp_centered_spectral <= PERP_RADIUS,
        passes_conditions_7_9: y_perp_min_eig >= PERP_FLOOR && y_t_frob <= TANGENT_BOUND && lambda_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryAudit {
    /// Worst `(1/m)‖A(X)‖₁ / ‖X‖₁` over sampled symmetric `X`.
    pub upper_worst: f64,
    /// Worst `(1/m)‖A(X)‖₁ / ‖X‖` over sampled rank-2 `X`.
    pub lower_worst: f64,
}

impl IsometryAudit {
    pub fn upper_ok(&self) -> bool {
        self.upper_worst <= ISOMETRY_UPPER
    }

    pub fn lower_ok(&self) -> bool {
        self.lower_worst >= ISOMETRY_LOWER
    }
}

/// Samples `trials` matrices for each side of the ℓ1-isometry.
///
/// Upper side: trial `t` draws a Gaussian symmetric matrix (`t ≡ 0 mod 4`),
/// a random rank-one `xxᵗ` (`t ≡ 1`), a Gaussian diagonal (`t ≡ 2`) or the
/// measurement-aligned rank-one `aⱼaⱼᵗ` with `j = ⌊t/4⌋ mod m` (`t ≡ 3`),
/// normalized by the nuclear norm. Lower side: `±uuᵗ ± vvᵗ` with independent random
/// unit `u`, `v` and signs, normalized by the spectral norm.
pub fn audit_l1_isometry(ensemble: &SensingEnsemble, trials: usize, seed: u64) -> Result<IsometryAudit> {
    if trials == 0 {
        return Err(Error::InvalidArgument("isometry audit needs at least one trial".into()));
    }
    let n = ensemble.n();
    let mf = ensemble.m() as f64;
    let mut upper_worst = 0.0_f64;
    let mut lower_worst = f64::INFINITY;
    let l1 = |x: &SymmetricMatrix| -> Result<f64> {
        Ok(ensemble.forward(x)?.iter().map(|v| v.abs()).sum::<f64>() / mf)
    };

    for t in 0..trials {
        let mut s = Stream::new(Domain::Audit, seed, t as u64);
        let x = match t % 4 {
            0 => SymmetricMatrix::from_upper_fn(n, |_, _| s.normal()),
            1 => {
                let v: Vec<f64> = (0..n).map(|_| s.normal()).collect();
                SymmetricMatrix::outer(&v)
            }
            2 => {
                let d: Vec<f64> = (0..n).map(|_| s.normal()).collect();
                SymmetricMatrix::from_diag(&d)
            }
            _ => SymmetricMatrix::outer(ensemble.vector((t / 4) % ensemble.m())),
        };
        let nuclear = x.nuclear_norm()?;
        if nuclear > 0.0 {
            upper_worst = upper_worst.max(l1(&x)? / nuclear);
        }

        let u = s.unit_vector(n);
        let v = s.unit_vector(n);
        let su = if s.uniform() < 0.5 { 1.0 } else { -1.0 };
        let sv = if s.uniform() < 0.5 { 1.0 } else { -1.0 };
        let mut r2 = SymmetricMatrix::outer(&u).scaled(su);
        r2.add_rank_one(sv, &v);
        let spectral = r2.spectral_norm()?;
        if spectral > 0.0 {
            lower_worst = lower_worst.min(l1(&r2)? / spectral);
        }
    }

    Ok(IsometryAudit {
        upper_worst,
        lower_worst,
    })
}

/// `‖((1/m) Σᵢ aᵢaᵢᵗ)_T‖_F` for the tangent space at `x₀`.
pub fn audit_wishart_t(ensemble: &SensingEnsemble, x0: &Signal) -> Result<f64> {
    let tangent = TangentSpace::new(x0.as_slice())?;
    let w = ensemble.adjoint(&vec![1.0 / ensemble.m() as f64; ensemble.m()])?;
    Ok(split_t(&w, &tangent)?.0.frobenius_norm())
}

/// Leading disjoint sets `S⁺ = {0..k}`, `S⁻ = {k..2k}`.
pub fn leading_sign_sets(k: usize) -> (Vec<usize>, Vec<usize>) {
    ((0..k).collect(), (k..2 * k).collect())
}

/// A gross-error vector that is `+1` on `S⁺` and `−1` on `S⁻`.
pub fn conforming_eps(m: usize, s_plus: &[usize], s_minus: &[usize]) -> Vec<f64> {
    let mut eps = vec![0.0; m];
    for &i in s_plus {
        eps[i] = 1.0;
    }
    for &i in s_minus {
        eps[i] = -1.0;
    }
    eps
}

pub fn certificate_csv(rows: &[(u64, usize, usize, usize, usize, CertificateReport)]) -> String {
    let mut out = String::from(CERTIFICATE_CSV_HEADER);
    out.push('\n');
    for (seed, n, m, sp, sm, report) in rows {
        let _ = writeln!(out, "{}", report.csv_row(*seed, *n, *m, *sp, *sm));
    }
    out
}
