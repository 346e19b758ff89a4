use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use phaselift_core::corruption::add_gaussian_noise;
use phaselift_core::experiments::{
    emit_certificate_csv, emit_csv, emit_heatmap, emit_isometry_csv, parse_list,
    run_certificate_audit, run_isometry_audit, run_phase_transition,
};
use phaselift_core::rng::NormalStream;
use phaselift_core::{
    apply_paper_simulation, metrics, solve, ExperimentConfig, SensingEnsemble, Signal, SolverConfig,
    SolverMode,
};

#[derive(Parser, Debug)]
#[command(name = "phaselift", version, about = "Robust phase retrieval by l1 PhaseLift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one simulated instance and print recovery metrics.
    Solve(SolveArgs),
    /// Recovery error over an (n, m) grid; writes CSV and PGM.
    PhaseTransition(GridArgs),
    /// Dual-certificate checks over seeds; writes CSV.
    CertificateAudit(GridArgs),
    /// l1-isometry and Wishart tangent-space audits over seeds; writes CSV.
    IsometryAudit(GridArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    /// `key = value` config file, applied before command-line overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from the full 5..50 x 10..250 grid.
    #[arg(long)]
    paper_scale: bool,
    /// Signal lengths, e.g. `10,20` or `5..50:5`.
    #[arg(long)]
    n_range: Option<String>,
    /// Measurement counts, e.g. `20,60,120` or `10..250:10`.
    #[arg(long)]
    m_range: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Fraction of corrupted measurements.
    #[arg(long)]
    fraction: Option<f64>,
    /// Corrupted values are drawn from Uniform([0, bound]).
    #[arg(long)]
    bound: Option<f64>,
    /// Gaussian noise level on uncorrupted measurements.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Seeds per cell for the audits.
    #[arg(long)]
    audit_seeds: Option<usize>,
    /// Sampled matrices per seed in the isometry audit.
    #[arg(long)]
    samples: Option<usize>,
    /// |S+| = |S-| in the certificate audit (default ceil(0.001 m)).
    #[arg(long)]
    sign_set_size: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Write 0 instead of wall-clock seconds, for byte-identical reruns.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, env = "PHASELIFT_OUTPUT_DIR")]
    out: Option<PathBuf>,
}

impl GridArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = if self.paper_scale {
            ExperimentConfig::paper_scale()
        } else {
            ExperimentConfig::default()
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            cfg.apply_text(&text)
                .with_context(|| format!("in config {}", path.display()))?;
        }
        if let Some(v) = &self.n_range {
            cfg.n_range = parse_list(v).context("--n-range")?;
        }
        if let Some(v) = &self.m_range {
            cfg.m_range = parse_list(v).context("--m-range")?;
        }
        macro_rules! apply {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        apply!(
            trials => trials,
            fraction => corruption_fraction,
            bound => corruption_bound,
            sigma => noise_sigma,
            seed => base_seed,
            threshold => success_threshold,
            audit_seeds => audit_seeds,
            samples => isometry_samples,
            max_iters => max_iters
        );
        if self.sign_set_size.is_some() {
            cfg.sign_set_size = self.sign_set_size;
        }
        if self.no_timing {
            cfg.record_timing = false;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 120)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    #[arg(long, default_value_t = 1e4)]
    bound: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Use a random Gaussian signal instead of e1.
    #[arg(long)]
    random_signal: bool,
    /// `l1`, `trace:<lambda>` or `feasibility`.
    #[arg(long, default_value = "l1", value_parser = parse_mode)]
    mode: SolverMode,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the sensing vectors as text.
    #[arg(long)]
    dump_ensemble: Option<PathBuf>,
    /// Write b, clean, eta, eps and support membership as CSV.
    #[arg(long)]
    dump_measurements: Option<PathBuf>,
}

fn parse_mode(s: &str) -> std::result::Result<SolverMode, String> {
    match s {
        "l1" => Ok(SolverMode::L1),
        "feasibility" => Ok(SolverMode::Feasibility),
        _ => match s.strip_prefix("trace:") {
            Some(v) => v
                .parse::<f64>()
                .map(|lambda| SolverMode::L1PlusTrace { lambda })
                .map_err(|e| format!("bad trace weight {v:?}: {e}")),
            None => Err(format!("unknown mode {s:?} (expected l1, trace:<lambda>, feasibility)")),
        },
    }
}

fn run_solve(args: &SolveArgs) -> Result<()> {
    let ensemble = SensingEnsemble::generate(args.n, args.m, args.seed)?;
    let x0 = if args.random_signal {
        let mut g = NormalStream::new(args.seed, 1);
        Signal((0..args.n).map(|_| g.next()).collect())
    } else {
        Signal::basis(args.n, 0)
    };
    let mut ms = apply_paper_simulation(&ensemble, &x0, args.fraction, args.bound, args.seed)?;
    if args.sigma > 0.0 {
        ms = add_gaussian_noise(ms, args.sigma, args.seed);
    }
    if let Some(path) = &args.dump_ensemble {
        ensemble.save(path)?;
    }
    if let Some(path) = &args.dump_measurements {
        ms.save_csv(path)?;
    }

    let mut cfg = SolverConfig::for_ensemble(&ensemble, args.mode);
    if let Some(k) = args.max_iters {
        cfg.max_iters = k;
    }
    if let Some(t) = args.tol {
        cfg.tol_primal = t;
        cfg.tol_dual = t;
    }
    let report = solve(&ensemble, &ms.b, &cfg)?;
    let met = metrics(&report.x_hat, &x0, ms.eta_l1(), args.m)?;

    println!("n = {}", args.n);
    println!("m = {}", args.m);
    println!("corrupted = {}", ms.support.len());
    println!("termination = {:?}", report.termination);
    println!("iterations = {}", report.iterations);
    println!("objective = {:.10e}", report.objective);
    if let Some(feasible) = report.feasible {
        println!("feasible = {feasible}");
    }
    println!("matrix_error_frob = {:.6e}", met.matrix_error_frob);
    println!("capped_relative_error = {:.6e}", met.capped_relative_error);
    println!("signal_error = {:.6e}", met.signal_error);
    println!("theorem_bound_rhs = {:.6e}", met.theorem_bound_rhs);
    Ok(())
}

fn output_path(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

fn run_grid(args: &GridArgs) -> Result<()> {
    let cfg = args.config()?;
    let result = run_phase_transition(&cfg)?;
    let csv = output_path(&cfg, "phase_transition.csv");
    let pgm = output_path(&cfg, "phase_transition.pgm");
    emit_csv(&result, &csv)?;
    emit_heatmap(&result, &pgm)?;
    for c in &result.cells {
        println!(
            "n={:<3} m={:<4} mean_error={:.4} success={}/{}",
            c.n, c.m, c.mean_capped_error, c.success_count, c.trials
        );
    }
    announce(&csv);
    announce(&pgm);
    Ok(())
}

fn run_certificates(args: &GridArgs) -> Result<()> {
    let cfg = args.config()?;
    let audit = run_certificate_audit(&cfg)?;
    let path = output_path(&cfg, "certificate_audit.csv");
    emit_certificate_csv(&audit, &path)?;
    println!(
        "rows = {}, lambda_ok = {:.3}, lemma5 = {:.3}, conditions = {:.3}",
        audit.rows.len(),
        audit.pass_fraction_lambda(),
        audit.pass_fraction_lemma5(),
        audit.pass_fraction_conditions()
    );
    announce(&path);
    Ok(())
}

fn run_isometry(args: &GridArgs) -> Result<()> {
    let cfg = args.config()?;
    let table = run_isometry_audit(&cfg)?;
    let path = output_path(&cfg, "isometry_audit.csv");
    emit_isometry_csv(&table, &path)?;
    println!(
        "rows = {}, upper = {:.3}, lower = {:.3}, wishart = {:.3}",
        table.rows.len(),
        table.pass_fraction_upper(),
        table.pass_fraction_lower(),
        table.pass_fraction_wishart()
    );
    announce(&path);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::PhaseTransition(args) => run_grid(args),
        Command::CertificateAudit(args) => run_certificates(args),
        Command::IsometryAudit(args) => run_isometry(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
