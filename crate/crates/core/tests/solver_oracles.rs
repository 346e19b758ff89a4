use nalgebra::DMatrix;
use phaselift_core::corruption::add_gaussian_noise;
use phaselift_core::rng::NormalStream;
use phaselift_core::solver::objective;
use phaselift_core::{
    apply_paper_simulation, apply_plan, check_feasible_cone, estimate_operator_norm, extract_signal,
    metrics, solve, CorruptionMode, CorruptionPlan, NoiseModel, SensingEnsemble, Signal, SolverConfig,
    SolverMode, SymmetricMatrix, TangentSpace, Termination,
};
use rayon::prelude::*;

/// Largest singular value of the dense matrix of `A` in an orthonormal basis
/// of symmetric matrices (diagonal units, off-diagonal pairs scaled by `1/√2`).
fn dense_operator_norm(e: &SensingEnsemble) -> f64 {
    let n = e.n();
    let cols = n * (n + 1) / 2;
    let mut dense = DMatrix::zeros(e.m(), cols);
    for i in 0..e.m() {
        let a = e.vector(i);
        let mut c = 0;
        for j in 0..n {
            for k in j..n {
                dense[(i, c)] = if j == k { a[j] * a[j] } else { 2f64.sqrt() * a[j] * a[k] };
                c += 1;
            }
        }
    }
    dense.singular_values().max()
}

#[test]
fn operator_norm_estimate_brackets_dense_svd() {
    for (n, m, seed) in [(3, 20, 1), (5, 60, 2), (8, 100, 3), (12, 300, 4)] {
        let e = SensingEnsemble::generate(n, m, seed).unwrap();
        let ratio = estimate_operator_norm(&e) / dense_operator_norm(&e);
        assert!((1.0..=1.02).contains(&ratio), "n={n} m={m}: ratio {ratio}");
    }
}

/// Exact minimizer of `Σ |aᵢ² X − bᵢ|` over `X ≥ 0`: a weighted median of
/// `bᵢ / aᵢ²` with weights `aᵢ²`, clipped at zero.
fn scalar_oracle(e: &SensingEnsemble, b: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = (0..e.m())
        .map(|i| {
            let w = e.vector(i)[0].powi(2);
            (b[i] / w, w)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = pts.iter().map(|p| p.1).sum::<f64>() / 2.0;
    let mut acc = 0.0;
    for (r, w) in pts {
        acc += w;
        if acc >= half {
            return r.max(0.0);
        }
    }
    unreachable!()
}

#[test]
fn scalar_problem_matches_weighted_median() {
    for seed in 0..10u64 {
        let e = SensingEnsemble::generate(1, 30, seed).unwrap();
        let x0 = Signal(vec![0.5 + seed as f64 * 0.2]);
        let plan = CorruptionPlan {
            support: vec![0, 7, 19],
            mode: CorruptionMode::UniformLarge { bound: 50.0 },
            noise: NoiseModel::Gaussian { sigma: 0.05 },
        };
        let ms = apply_plan(&e, &x0, &plan, seed).unwrap();
        let r = solve(&e, &ms.b, &SolverConfig::for_ensemble(&e, SolverMode::L1)).unwrap();
        let want = scalar_oracle(&e, &ms.b);
        let got = r.x_hat.get(0, 0);
        assert!((got - want).abs() <= 1e-6, "seed {seed}: {got} vs {want}");
    }
}

#[test]
fn clean_recovery_on_most_seeds() {
    let ok = (0..20u64)
        .into_par_iter()
        .filter(|&seed| {
            let e = SensingEnsemble::generate(8, 96, seed).unwrap();
            let mut g = NormalStream::new(seed, 11);
            let x0 = Signal((0..8).map(|_| g.next()).collect());
            let b = e.clean_measurements(&x0).unwrap();
            let r = solve(&e, &b, &SolverConfig::for_ensemble(&e, SolverMode::L1)).unwrap();
            metrics(&r.x_hat, &x0, 0.0, 96).unwrap().capped_relative_error <= 1e-4
        })
        .count();
    assert!(ok >= 19, "{ok}/20");
}

fn tight_config(e: &SensingEnsemble) -> SolverConfig {
    let mut cfg = SolverConfig::for_ensemble(e, SolverMode::L1);
    cfg.tol_primal = 1e-10;
    cfg.tol_dual = 1e-10;
    cfg
}

fn cone_margin(e: &SensingEnsemble, x0: &Signal, b: &[f64], eta_l1: f64) -> f64 {
    let r = solve(e, b, &tight_config(e)).unwrap();
    let t = TangentSpace::new(x0.as_slice()).unwrap();
    check_feasible_cone(&r, x0, eta_l1, e.m(), &t).unwrap()
}

#[test]
fn clean_solution_lies_in_feasible_cone() {
    let e = SensingEnsemble::generate(8, 96, 21).unwrap();
    let x0 = Signal(vec![0.3, -1.0, 0.5, 0.0, 0.8, 0.1, -0.2, 0.6]);
    let b = e.clean_measurements(&x0).unwrap();
    let margin = cone_margin(&e, &x0, &b, 0.0);
    assert!(margin >= -1e-6, "{margin}");
}

#[test]
fn corrupted_solutions_lie_in_feasible_cone() {
    let ok = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let e = SensingEnsemble::generate(10, 120, seed).unwrap();
            let x0 = Signal::basis(10, 0);
            let ms = apply_paper_simulation(&e, &x0, 0.05, 1e4, seed).unwrap();
            cone_margin(&e, &x0, &ms.b, ms.eta_l1()) >= -1e-6
        })
        .count();
    assert!(ok >= 95, "{ok}/100");
}

#[test]
fn objective_trends_down() {
    let e = SensingEnsemble::generate(6, 60, 5).unwrap();
    let x0 = Signal::basis(6, 2);
    let ms = apply_paper_simulation(&e, &x0, 0.05, 100.0, 5).unwrap();
    let r = solve(&e, &ms.b, &SolverConfig::for_ensemble(&e, SolverMode::L1)).unwrap();
    let h = &r.objective_history;
    let w = 50;
    assert!(h.len() > 3 * w);
    let avg = |s: usize| h[s..s + w].iter().sum::<f64>() / w as f64;
    let first = avg(0);
    let last = avg(h.len() - w);
    assert!(last <= first, "{first} -> {last}");
    let zero = objective(&e, &ms.b, &SymmetricMatrix::zeros(6), SolverMode::L1).unwrap();
    assert!(r.objective <= zero);
}

#[test]
fn feasibility_mode_returns_psd_consistent_matrix() {
    let e = SensingEnsemble::generate(5, 60, 8).unwrap();
    let x0 = Signal(vec![1.0, -0.5, 0.25, 0.0, 2.0]);
    let b = e.clean_measurements(&x0).unwrap();
    let r = solve(&e, &b, &SolverConfig::for_ensemble(&e, SolverMode::Feasibility)).unwrap();
    assert_eq!(r.feasible, Some(true));
    assert!(r.x_hat.min_eigenvalue().unwrap() >= -1e-9);
}

#[test]
fn zero_trace_weight_matches_plain_mode() {
    let e = SensingEnsemble::generate(6, 72, 9).unwrap();
    let x0 = Signal::basis(6, 0);
    let ms = apply_paper_simulation(&e, &x0, 0.05, 1e4, 9).unwrap();
    let a = solve(&e, &ms.b, &SolverConfig::for_ensemble(&e, SolverMode::L1)).unwrap();
    let b = solve(
        &e,
        &ms.b,
        &SolverConfig::for_ensemble(&e, SolverMode::L1PlusTrace { lambda: 0.0 }),
    )
    .unwrap();
    assert!(a.x_hat.sub(&b.x_hat).frobenius_norm() <= 1e-6);
}

#[test]
fn scaling_measurements_scales_solution() {
    let e = SensingEnsemble::generate(6, 72, 10).unwrap();
    let x0 = Signal(vec![0.2, 1.0, -0.4, 0.0, 0.3, 0.5]);
    let doubled = Signal(x0.0.iter().map(|v| 2.0 * v).collect());
    let cfg = SolverConfig::for_ensemble(&e, SolverMode::L1);
    let base = solve(&e, &e.clean_measurements(&x0).unwrap(), &cfg).unwrap();
    let c = 4.0;
    let scaled = solve(&e, &e.clean_measurements(&doubled).unwrap(), &cfg).unwrap();
    let diff = scaled.x_hat.sub(&base.x_hat.scaled(c)).frobenius_norm();
    assert!(diff <= 1e-5 * c * base.x_hat.frobenius_norm(), "{diff}");
}

#[test]
fn noisy_error_scales_with_noise_level() {
    let e = SensingEnsemble::generate(6, 90, 12).unwrap();
    let x0 = Signal::basis(6, 0);
    let mut cfg = SolverConfig::for_ensemble(&e, SolverMode::L1);
    cfg.max_iters = 20_000;
    let errs: Vec<f64> = [0.01, 0.04]
        .par_iter()
        .map(|&sigma| {
            let clean = apply_paper_simulation(&e, &x0, 0.05, 1e4, 12).unwrap();
            let ms = add_gaussian_noise(clean, sigma, 12);
            let r = solve(&e, &ms.b, &cfg).unwrap();
            let met = metrics(&r.x_hat, &x0, ms.eta_l1(), 90).unwrap();
            assert!(met.signal_error <= 10.0 * met.theorem_bound_rhs);
            met.matrix_error_frob
        })
        .collect();
    let ratio = errs[1] / errs[0];
    assert!((2.0..=8.0).contains(&ratio), "{errs:?}");
}

#[test]
fn extraction_is_stable_under_small_perturbations() {
    for seed in 0..20u64 {
        let mut g = NormalStream::new(seed, 5);
        let n = 4 + seed as usize % 5;
        let x: Vec<f64> = (0..n).map(|_| g.next()).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let delta = 1e-3 * norm;
        let mut noise = SymmetricMatrix::from_upper_fn(n, |_, _| g.next());
        noise = noise.scaled(delta / noise.spectral_norm().unwrap());
        let x_hat = Signal(x.clone()).lifted().add(&noise);
        let est = extract_signal(&x_hat).unwrap();
        let dist = |s: f64| {
            est.iter().zip(&x).map(|(a, b)| (a - s * b).powi(2)).sum::<f64>().sqrt()
        };
        let err = dist(1.0).min(dist(-1.0));
        assert!(err <= 3.0 * delta / norm, "seed {seed}: {err}");
    }
}

#[test]
fn iteration_cap_is_honored() {
    let e = SensingEnsemble::generate(5, 50, 2).unwrap();
    let ms = apply_paper_simulation(&e, &Signal::basis(5, 0), 0.1, 1e4, 2).unwrap();
    let mut cfg = SolverConfig::for_ensemble(&e, SolverMode::L1);
    cfg.max_iters = 3;
    let r = solve(&e, &ms.b, &cfg).unwrap();
    assert_eq!(r.iterations, 3);
    assert_eq!(r.termination, Termination::MaxIters);
}

#[test]
fn returned_matrices_are_psd() {
    for seed in 0..10u64 {
        let e = SensingEnsemble::generate(7, 40 + 10 * seed as usize, seed).unwrap();
        let ms = apply_paper_simulation(&e, &Signal::basis(7, 3), 0.1, 1e3, seed).unwrap();
        let r = solve(&e, &ms.b, &SolverConfig::for_ensemble(&e, SolverMode::L1)).unwrap();
        let floor = -1e-8 * r.x_hat.frobenius_norm();
        assert!(r.x_hat.min_eigenvalue().unwrap() >= floor, "seed {seed}");
    }
}
