//! Monte-Carlo drivers: the phase-transition grid and the certificate,
//! isometry and Wishart audits, with their CSV and PGM outputs.

mod audit;
mod config;
mod format;
mod grid;

pub use audit::{
    emit_certificate_csv, emit_isometry_csv, run_certificate_audit, run_isometry_audit,
    CertificateAudit, CertificateRow, IsometryAuditTable, IsometryRow, ISOMETRY_CSV_HEADER,
};
pub use config::{parse_list, ExperimentConfig};
pub use format::fmt_sig6;
pub use grid::{
    emit_csv, emit_heatmap, pixel, run_phase_transition, run_trial, trial_seed, GridCell,
    GridResult, TrialOutcome, GRID_CSV_HEADER,
};
