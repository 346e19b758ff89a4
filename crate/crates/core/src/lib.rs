//! Robust phase retrieval by ℓ1 PhaseLift.
//!
//! A real signal `x₀ ∈ ℝⁿ` is observed through phaseless Gaussian
//! measurements `bᵢ = ⟨aᵢ, x₀⟩² + ηᵢ + εᵢ`, where `η` is small noise and `ε`
//! is an arbitrary gross error on a small support. Lifting `X = x₀x₀ᵗ`
//! makes the measurements linear, and `x₀x₀ᵗ` is recovered by
//!
//! ```text
//!     minimize  Σᵢ |aᵢᵗ X aᵢ − bᵢ|   subject to  X ⪰ 0
//! ```
//!
//! solved here by a primal-dual splitting method ([`solver`]). The crate also
//! builds and checks the inexact dual certificates that explain why this
//! works ([`certificate`]), and drives Monte-Carlo studies ([`experiments`]).
//!
//! ```
//! use phaselift_core::{apply_paper_simulation, metrics, solve, SensingEnsemble, Signal, SolverConfig, SolverMode};
//!
//! let ensemble = SensingEnsemble::generate(4, 48, 7).unwrap();
//! let x0 = Signal::basis(4, 0);
//! let ms = apply_paper_simulation(&ensemble, &x0, 0.05, 1e4, 7).unwrap();
//! let report = solve(&ensemble, &ms.b, &SolverConfig::for_ensemble(&ensemble, SolverMode::L1)).unwrap();
//! let err = metrics(&report.x_hat, &x0, ms.eta_l1(), ensemble.m()).unwrap();
//! assert!(err.capped_relative_error < 1e-3);
//! ```

pub mod certificate;
pub mod corruption;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod rng;
pub mod sensing;
pub mod solver;
pub mod symmat;

pub use certificate::{
    audit_l1_isometry, audit_wishart_t, build_certificate, check_certificate, compute_beta0,
    CertificateReport, DualCertificate, IsometryAudit,
};
pub use corruption::{
    apply_paper_simulation, apply_plan, CorruptionMode, CorruptionPlan, MeasurementSet, NoiseModel,
};
pub use error::{Error, Result};
pub use estimator::{extract_signal, metrics, RecoveryMetrics};
pub use experiments::{ExperimentConfig, GridResult};
pub use sensing::{SensingEnsemble, Signal};
pub use solver::{
    check_feasible_cone, estimate_operator_norm, solve, SolverConfig, SolverMode, SolverReport,
    Termination,
};
pub use symmat::{
    eig_sym, norms, psd_project, split_t, EigenDecomposition, MatrixNorms, SymmetricMatrix,
    TangentSpace,
};
