use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::grid::{trial_seed, write_file};
use crate::certificate::{
    audit_l1_isometry, audit_wishart_t, build_certificate, certificate_csv, check_certificate,
    conforming_eps, leading_sign_sets, CertificateReport, IsometryAudit, WISHART_T_BOUND,
};
use crate::corruption::support_size;
use crate::error::Result;
use crate::sensing::{SensingEnsemble, Signal};

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub s_plus: usize,
    pub s_minus: usize,
    pub report: CertificateReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateAudit {
    pub rows: Vec<CertificateRow>,
}

impl CertificateAudit {
    fn fraction(&self, f: impl Fn(&CertificateReport) -> bool) -> f64 {
        self.rows.iter().filter(|r| f(&r.report)).count() as f64 / self.rows.len().max(1) as f64
    }

    pub fn pass_fraction_lemma5(&self) -> f64 {
        self.fraction(|r| r.passes_lemma5)
    }

    pub fn pass_fraction_conditions(&self) -> f64 {
        self.fraction(|r| r.passes_conditions_7_9)
    }

    pub fn pass_fraction_lambda(&self) -> f64 {
        self.fraction(|r| r.lambda_ok)
    }

    /// One row per seed, then a `summary` row carrying pass fractions in the
    /// three boolean columns.
    pub fn to_csv(&self) -> String {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| (r.seed, r.n, r.m, r.s_plus, r.s_minus, r.report))
            .collect();
        let mut out = certificate_csv(&rows);
        let _ = writeln!(
            out,
            "summary,,,,,,,,{:.6},{:.6},{:.6}",
            self.pass_fraction_lambda(),
            self.pass_fraction_lemma5(),
            self.pass_fraction_conditions()
        );
        out
    }
}

/// Certificate construction and checks for `x₀ = e₁` with leading sign sets
/// and a conforming `±1` gross-error pattern, over `audit_seeds` seeds per cell.
pub fn run_certificate_audit(cfg: &ExperimentConfig) -> Result<CertificateAudit> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize, usize)> = cells(cfg)
        .into_iter()
        .flat_map(|(n, m)| (0..cfg.audit_seeds).map(move |s| (n, m, s)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(n, m, s)| -> Result<CertificateRow> {
            let seed = trial_seed(cfg.base_seed, n, m, s);
            let k = cfg.sign_set_size.unwrap_or_else(|| support_size(0.001, m));
            let ensemble = SensingEnsemble::generate(n, m, seed)?;
            let x0 = Signal::basis(n, 0);
            let (sp, sm) = leading_sign_sets(k.min(m / 2));
            let cert = build_certificate(&ensemble, &x0, &sp, &sm)?;
            let report = check_certificate(&cert, &x0, &conforming_eps(m, &sp, &sm))?;
            Ok(CertificateRow {
                seed,
                n,
                m,
                s_plus: sp.len(),
                s_minus: sm.len(),
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificateAudit { rows })
}

pub const ISOMETRY_CSV_HEADER: &str =
    "seed,n,m,samples,upper_worst,lower_worst,upper_ok,lower_ok,wishart_t_frob,wishart_ok";

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub isometry: IsometryAudit,
    pub wishart_t_frob: f64,
}

impl IsometryRow {
    pub fn wishart_ok(&self) -> bool {
        self.wishart_t_frob <= WISHART_T_BOUND
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryAuditTable {
    pub rows: Vec<IsometryRow>,
}

impl IsometryAuditTable {
    fn fraction(&self, f: impl Fn(&IsometryRow) -> bool) -> f64 {
        self.rows.iter().filter(|r| f(r)).count() as f64 / self.rows.len().max(1) as f64
    }

    pub fn pass_fraction_upper(&self) -> f64 {
        self.fraction(|r| r.isometry.upper_ok())
    }

    pub fn pass_fraction_lower(&self) -> f64 {
        self.fraction(|r| r.isometry.lower_ok())
    }

    pub fn pass_fraction_wishart(&self) -> f64 {
        self.fraction(IsometryRow::wishart_ok)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(ISOMETRY_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.17e},{:.17e},{},{},{:.17e},{}",
                r.seed,
                r.n,
                r.m,
                r.samples,
                r.isometry.upper_worst,
                r.isometry.lower_worst,
                r.isometry.upper_ok() as u8,
                r.isometry.lower_ok() as u8,
                r.wishart_t_frob,
                r.wishart_ok() as u8
            );
        }
        let _ = writeln!(
            out,
            "summary,,,,,,{:.6},{:.6},,{:.6}",
            self.pass_fraction_upper(),
            self.pass_fraction_lower(),
            self.pass_fraction_wishart()
        );
        out
    }
}

/// ℓ1-isometry and Wishart tangent-space audits over `audit_seeds` seeds per cell.
pub fn run_isometry_audit(cfg: &ExperimentConfig) -> Result<IsometryAuditTable> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize, usize)> = cells(cfg)
        .into_iter()
        .flat_map(|(n, m)| (0..cfg.audit_seeds).map(move |s| (n, m, s)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(n, m, s)| -> Result<IsometryRow> {
            let seed = trial_seed(cfg.base_seed, n, m, s);
            let ensemble = SensingEnsemble::generate(n, m, seed)?;
            Ok(IsometryRow {
                seed,
                n,
                m,
                samples: cfg.isometry_samples,
                isometry: audit_l1_isometry(&ensemble, cfg.isometry_samples, seed)?,
                wishart_t_frob: audit_wishart_t(&ensemble, &Signal::basis(n, 0))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IsometryAuditTable { rows })
}

pub fn emit_certificate_csv(audit: &CertificateAudit, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &audit.to_csv())
}

pub fn emit_isometry_csv(table: &IsometryAuditTable, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &table.to_csv())
}

fn cells(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    let mut ns = cfg.n_range.clone();
    let mut ms = cfg.m_range.clone();
    ns.sort_unstable();
    ns.dedup();
    ms.sort_unstable();
    ms.dedup();
    ns.iter()
        .flat_map(|&n| ms.iter().map(move |&m| (n, m)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_certificate_audit_table() {
        let cfg = ExperimentConfig {
            n_range: vec![4],
            m_range: vec![400],
            audit_seeds: 3,
            ..ExperimentConfig::default()
        };
        let audit = run_certificate_audit(&cfg).unwrap();
        assert_eq!(audit.rows.len(), 3);
        assert!(audit.rows.iter().all(|r| r.s_plus == 1 && r.s_minus == 1));
        assert_eq!(audit.pass_fraction_lambda(), 1.0);
        let csv = audit.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().last().unwrap().starts_with("summary,"));
    }

    #[test]
    fn small_isometry_audit_table() {
        let cfg = ExperimentConfig {
            n_range: vec![3],
            m_range: vec![200],
            audit_seeds: 2,
            isometry_samples: 12,
            ..ExperimentConfig::default()
        };
        let table = run_isometry_audit(&cfg).unwrap();
        assert_eq!(table.rows.len(), 2);
        let csv = table.to_csv();
        let header_cols = ISOMETRY_CSV_HEADER.split(',').count();
        for line in csv.lines() {
            assert_eq!(line.split(',').count(), header_cols, "{line}");
        }
        assert_eq!(table.to_csv(), run_isometry_audit(&cfg).unwrap().to_csv());
    }
}
