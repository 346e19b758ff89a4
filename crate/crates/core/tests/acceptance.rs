//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fail.

use std::process::ExitCode;
use std::time::Instant;

use phaselift_core::corruption::{add_gaussian_noise, support_size};
use phaselift_core::experiments::{emit_heatmap, run_certificate_audit, run_isometry_audit, run_phase_transition};
use phaselift_core::rng::{Domain, NormalStream, Stream};
use phaselift_core::{
    apply_paper_simulation, apply_plan, compute_beta0, eig_sym, metrics, solve, CorruptionMode,
    CorruptionPlan, ExperimentConfig, NoiseModel, SensingEnsemble, Signal, SolverConfig, SolverMode,
    SymmetricMatrix,
};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn default_solve(e: &SensingEnsemble, b: &[f64]) -> SymmetricMatrix {
    solve(e, b, &SolverConfig::for_ensemble(e, SolverMode::L1)).unwrap().x_hat
}

fn random_signal(n: usize, seed: u64) -> Signal {
    let mut g = NormalStream::new(seed, 77);
    Signal((0..n).map(|_| g.next()).collect())
}

fn exact_recovery_clean() -> Outcome {
    let (n, m) = (10, 120);
    let start = Instant::now();
    let errs: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let e = SensingEnsemble::generate(n, m, seed).unwrap();
            let x0 = random_signal(n, seed);
            let x_hat = default_solve(&e, &e.clean_measurements(&x0).unwrap());
            metrics(&x_hat, &x0, 0.0, m).unwrap().capped_relative_error
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let ok = errs.iter().filter(|&&e| e <= 1e-4).count();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(
        ok >= 19 && secs <= 120.0,
        format!("{ok}/20 seeds with error <= 1e-4 (worst {worst:.2e}), {secs:.1}s"),
    )
}

fn robust_to_gross_errors() -> Outcome {
    let (n, m) = (10, 120);
    let errs: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let e = SensingEnsemble::generate(n, m, seed).unwrap();
            let x0 = Signal::basis(n, 0);
            let ms = apply_paper_simulation(&e, &x0, 0.05, 1e4, seed).unwrap();
            let x_hat = default_solve(&e, &ms.b);
            metrics(&x_hat, &x0, ms.eta_l1(), m).unwrap().capped_relative_error
        })
        .collect();
    let ok = errs.iter().filter(|&&e| e <= 1e-3).count();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(ok >= 18, format!("{ok}/20 seeds with error <= 1e-3 (worst {worst:.2e})"))
}

fn phase_transition_shape() -> Outcome {
    let cfg = ExperimentConfig {
        n_range: vec![10, 20],
        m_range: vec![20, 60, 120, 200],
        trials: 10,
        corruption_fraction: 0.05,
        record_timing: false,
        ..ExperimentConfig::default()
    };
    let grid = run_phase_transition(&cfg).unwrap();
    let err = |n, m| grid.cell(n, m).unwrap().mean_capped_error;
    let (dark, light_a, light_b) = (err(20, 20), err(10, 120), err(20, 200));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.pgm");
    emit_heatmap(&grid, &path).unwrap();
    let pgm = std::fs::read_to_string(&path).unwrap();
    let px: Vec<u32> = pgm.split_whitespace().skip(4).map(|t| t.parse().unwrap()).collect();
    // rows: n = 10, 20; columns: m = 20, 60, 120, 200
    let image_ok = px.len() == 8 && px[4] <= 26 && px[2] >= 252 && px[7] >= 252;

    outcome(
        dark >= 0.9 && light_a <= 0.01 && light_b <= 0.01 && image_ok,
        format!(
            "mean error {dark:.3} at (20,20), {light_a:.2e} at (10,120), {light_b:.2e} at (20,200); pixels {px:?}"
        ),
    )
}

fn noise_scaling() -> Outcome {
    let (n, m) = (10, 150);
    let sigmas = [0.01, 0.02, 0.04, 0.08];
    let ratios: Vec<f64> = sigmas
        .iter()
        .map(|&sigma| {
            let per_seed: Vec<f64> = (0..10u64)
                .into_par_iter()
                .map(|seed| {
                    let e = SensingEnsemble::generate(n, m, seed).unwrap();
                    let x0 = Signal::basis(n, 0);
                    let ms = apply_paper_simulation(&e, &x0, 0.05, 1e4, seed).unwrap();
                    let ms = add_gaussian_noise(ms, sigma, seed);
                    let x_hat = default_solve(&e, &ms.b);
                    let err = metrics(&x_hat, &x0, ms.eta_l1(), m).unwrap().matrix_error_frob;
                    err / (ms.eta_l1() / m as f64)
                })
                .collect();
            per_seed.iter().sum::<f64>() / per_seed.len() as f64
        })
        .collect();
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    outcome(
        hi / lo <= 1.5,
        format!("error/(|eta|_1/m) = {ratios:.3?}, spread {:.3}", hi / lo),
    )
}

fn beta0_constant() -> Outcome {
    let b = compute_beta0();
    outcome((b - 2.6728).abs() <= 1e-3, format!("beta0 = {b:.6}"))
}

fn certificate_audit() -> Outcome {
    let cfg = ExperimentConfig {
        n_range: vec![50],
        m_range: vec![4000],
        sign_set_size: Some(4),
        audit_seeds: 100,
        ..ExperimentConfig::default()
    };
    let audit = run_certificate_audit(&cfg).unwrap();
    let passing: Vec<_> = audit.rows.iter().filter(|r| r.report.passes_lemma5).collect();
    let implication = passing.iter().all(|r| r.report.passes_conditions_7_9);
    let mean = |f: fn(&phaselift_core::CertificateReport) -> f64| {
        audit.rows.iter().map(|r| f(&r.report)).sum::<f64>() / audit.rows.len() as f64
    };
    outcome(
        passing.len() >= 95 && implication,
        format!(
            "{}/100 seeds within both bounds (mean |Y_T|_F {:.3}, mean centered spectral {:.3}, mean min eig {:.3}); implication {}",
            passing.len(),
            mean(|r| r.y_t_frob),
            mean(|r| r.y_perp_centered_spectral),
            mean(|r| r.y_perp_min_eig),
            if implication { "holds" } else { "violated" }
        ),
    )
}

fn isometry_audit() -> Outcome {
    let cfg = ExperimentConfig {
        n_range: vec![10],
        m_range: vec![1000],
        audit_seeds: 50,
        isometry_samples: 500,
        ..ExperimentConfig::default()
    };
    let table = run_isometry_audit(&cfg).unwrap();
    let ok = table
        .rows
        .iter()
        .filter(|r| r.isometry.upper_ok() && r.isometry.lower_ok())
        .count();
    let upper = table.rows.iter().map(|r| r.isometry.upper_worst).fold(0.0, f64::max);
    let lower = table.rows.iter().map(|r| r.isometry.lower_worst).fold(f64::MAX, f64::min);
    outcome(
        ok * 100 >= 95 * table.rows.len(),
        format!(
            "{ok}/{} seeds within both bounds (upper pass {:.2}, lower pass {:.2}; worst ratios {upper:.4} / {lower:.4})",
            table.rows.len(),
            table.pass_fraction_upper(),
            table.pass_fraction_lower()
        ),
    )
}

fn wishart_restriction() -> Outcome {
    let cfg = ExperimentConfig {
        n_range: vec![20],
        m_range: vec![2000],
        audit_seeds: 100,
        isometry_samples: 1,
        ..ExperimentConfig::default()
    };
    let table = run_isometry_audit(&cfg).unwrap();
    let ok = table.rows.iter().filter(|r| r.wishart_ok()).count();
    let worst = table.rows.iter().map(|r| r.wishart_t_frob).fold(0.0, f64::max);
    outcome(ok >= 99, format!("{ok}/100 seeds with |W_T|_F <= 5 (worst {worst:.3})"))
}

/// Minimizer of the convex `f(X) = Σ |aᵢ² X − bᵢ|` over `X ≥ 0`, by a coarse
/// grid search followed by golden-section refinement of the best bracket.
fn grid_search_oracle(a2: &[f64], b: &[f64]) -> f64 {
    let f = |x: f64| a2.iter().zip(b).map(|(a, b)| (a * x - b).abs()).sum::<f64>();
    let hi = a2.iter().zip(b).map(|(a, b)| (b / a).max(0.0)).fold(0.0, f64::max) * 1.01 + 1e-12;
    let steps: usize = 20_000;
    let h = hi / steps as f64;
    let best = (0..=steps)
        .min_by(|&i, &j| f(i as f64 * h).total_cmp(&f(j as f64 * h)))
        .unwrap();
    let (mut lo, mut up) = (best.saturating_sub(1) as f64 * h, (best + 1) as f64 * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = up - g * (up - lo);
        let d = lo + g * (up - lo);
        if f(c) <= f(d) {
            up = d;
        } else {
            lo = c;
        }
    }
    0.5 * (lo + up)
}

fn scalar_oracle_equivalence() -> Outcome {
    let m = 30;
    let diffs: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let e = SensingEnsemble::generate(1, m, seed).unwrap();
            let mut s = Stream::new(Domain::Audit, seed, 0);
            let x0 = Signal(vec![0.2 + 2.0 * s.uniform()]);
            let fraction = [0.0, 0.05, 0.1, 0.2][seed as usize % 4];
            let sigma = [0.0, 0.01, 0.1][seed as usize % 3];
            let k = if fraction > 0.0 { support_size(fraction, m) } else { 0 };
            let plan = CorruptionPlan {
                support: (0..k).map(|i| (i * 7 + seed as usize) % m).collect(),
                mode: if k > 0 {
                    CorruptionMode::UniformLarge { bound: 100.0 }
                } else {
                    CorruptionMode::None
                },
                noise: if sigma > 0.0 {
                    NoiseModel::Gaussian { sigma }
                } else {
                    NoiseModel::None
                },
            };
            let ms = apply_plan(&e, &x0, &plan, seed).unwrap();
            let a2: Vec<f64> = (0..m).map(|i| e.vector(i)[0].powi(2)).collect();
            let want = grid_search_oracle(&a2, &ms.b);
            let mut cfg = SolverConfig::for_ensemble(&e, SolverMode::L1);
            cfg.tol_primal = 1e-10;
            cfg.tol_dual = 1e-10;
            cfg.max_iters = 1_000_000;
            (solve(&e, &ms.b, &cfg).unwrap().x_hat.get(0, 0) - want).abs()
        })
        .collect();
    let ok = diffs.iter().filter(|&&d| d <= 1e-6).count();
    let worst = diffs.iter().cloned().fold(0.0, f64::max);
    outcome(ok == 50, format!("{ok}/50 instances within 1e-6 of the oracle (worst {worst:.2e})"))
}

fn linear_algebra_residuals() -> Outcome {
    let eig_worst = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let n = 1 + (k as usize * 37) % 64;
            let mut g = NormalStream::new(k, 500);
            let a = SymmetricMatrix::from_upper_fn(n, |_, _| g.next());
            let eig = eig_sym(&a).unwrap();
            let rec = eig.reconstruct().sub(&a).frobenius_norm() / a.frobenius_norm();
            rec.max(eig.orthonormality_residual())
        })
        .reduce(|| 0.0, f64::max);
    let adj_worst = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let n = 1 + k as usize % 20;
            let m = 1 + (k as usize * 13) % 200;
            let e = SensingEnsemble::generate(n, m, k).unwrap();
            let mut g = NormalStream::new(k, 600);
            let lam: Vec<f64> = (0..m).map(|_| g.next()).collect();
            let x = SymmetricMatrix::from_upper_fn(n, |_, _| g.next());
            let lhs = e.adjoint(&lam).unwrap().dot(&x);
            let rhs: f64 = lam.iter().zip(e.forward(&x).unwrap()).map(|(l, v)| l * v).sum();
            (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        eig_worst <= 1e-10 && adj_worst <= 1e-10,
        format!("worst eigen residual {eig_worst:.2e}, worst adjoint residual {adj_worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact recovery on clean data", exact_recovery_clean),
        ("robustness to gross errors", robust_to_gross_errors),
        ("phase-transition shape", phase_transition_shape),
        ("noise scaling", noise_scaling),
        ("beta0 constant", beta0_constant),
        ("certificate audit", certificate_audit),
        ("isometry audit", isometry_audit),
        ("Wishart tangent restriction", wishart_restriction),
        ("scalar oracle equivalence", scalar_oracle_equivalence),
        ("eigen and adjoint residuals", linear_algebra_residuals),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {} ({name}): {} [{:.1}s]",
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
