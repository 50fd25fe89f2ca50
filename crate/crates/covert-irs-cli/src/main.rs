//! `covert-irs` — reproducible covert-communication experiments.
//!
//! Wires the library into seeded, deterministic runs: single-instance
//! solves with a covertness certificate, existence-probability
//! estimates, feasibility-bound statistics, parameter sweeps, and
//! gradient-descent convergence traces.  All data output is CSV with a
//! header row; identical configurations produce byte-identical files.

mod config;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use covert_irs::channel::{cascade_terms, sample_realization, ChannelParams, Receiver};
use covert_irs::covertness::{detection_error_bound, kl_divergence_willie};
use covert_irs::probability::{
    bounds_statistics, existence_probability_mc, existence_probability_n2_analytic,
    BoundsStatistics, EstimateMethod, ProbabilityEstimate,
};
use covert_irs::solve::{BobContext, SolveResult, SolveStatus};
use covert_irs::solver_gd::{solve_constructive_covert, solve_gd, solve_gd_traced, GdConfig, InitPolicy};
use covert_irs::solver_n2::solve_n2;

use config::{
    parse_metric, parse_solver, parse_sweep, CommandKind, ExperimentConfig, MetricKind,
    RawOptions, SolverKind, SweepSpec,
};
use report::{
    classification_name, num, param_cells, phase_cell, status_name, Csv, PARAM_COLUMNS,
};

/// Absolute tolerance for the analytic N = 2 probability quadrature.
const QUAD_TOL: f64 = 1e-4;

const SCHEMAS: &str = "\
CSV schemas (every row echoes the full parameter tuple first:
n_elements,sigma_as,sigma_sw,sigma_sb,sigma_aw,sigma_ab,noise_var_w,noise_var_b,tx_power,seed):

  solve        ...,solver,feasible,status,classification,iterations,
               residual_willie_power,willie_snr,bob_snr,kl_divergence,
               detection_error_bound,phases   (phases `;`-separated)
  prob-n2      ...,estimate,std_error,method,tolerance
  prob-mc      ...,n_trials,estimate,std_error,method
  bounds-stats ...,n_trials,mean_min,std_min,mean_max,std_max,mean_direct,std_direct
  sweep        ...,sweep_param,sweep_value,<metric columns as above>
  trace        ...,restart,iteration,objective,grad_norm,step

Config file: `key = value` lines, `#` comments, keys spelled like the
long flags (e.g. `n-elements = 8`); command-line flags override the file.
Without --out, CSV goes to stdout and notes go to stderr.";

#[derive(Parser)]
#[command(name = "covert-irs", version, about = "Covert-communication experiment driver", after_long_help = SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file supplying any of the long flags as `key = value` lines
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Number of reflecting elements N
    #[arg(long, global = true)]
    n_elements: Option<usize>,

    /// Per-component scale of the transmitter-to-surface coefficients
    #[arg(long, global = true)]
    sigma_as: Option<f64>,

    /// Per-component scale of the surface-to-warden coefficients
    #[arg(long, global = true)]
    sigma_sw: Option<f64>,

    /// Per-component scale of the surface-to-receiver coefficients
    #[arg(long, global = true)]
    sigma_sb: Option<f64>,

    /// Per-component scale of the direct transmitter-to-warden path
    #[arg(long, global = true)]
    sigma_aw: Option<f64>,

    /// Per-component scale of the direct transmitter-to-receiver path
    #[arg(long, global = true)]
    sigma_ab: Option<f64>,

    /// Warden noise variance
    #[arg(long, global = true)]
    noise_var_w: Option<f64>,

    /// Receiver noise variance
    #[arg(long, global = true)]
    noise_var_b: Option<f64>,

    /// Transmit power
    #[arg(long, global = true)]
    tx_power: Option<f64>,

    /// RNG seed; fixes the sampled channels and all estimates
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte-Carlo trial count
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Solver: closed-form-n2, gd, or constructive
    #[arg(long, global = true, value_parser = parse_solver)]
    solver: Option<SolverKind>,

    /// Sweep axis as <param>:<start>:<stop>:<points>[:log]
    #[arg(long, global = true, value_parser = parse_sweep)]
    sweep: Option<SweepSpec>,

    /// Metric evaluated along a sweep: prob-n2, prob-mc, or bounds-stats
    #[arg(long, global = true, value_parser = parse_metric)]
    metric: Option<MetricKind>,

    /// CSV output path (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one sampled instance and print its covertness certificate
    Solve,
    /// Analytic two-element existence probability (nested quadrature)
    ProbN2,
    /// Monte-Carlo existence probability for any element count
    ProbMc,
    /// Means and standard deviations of the feasibility interval
    BoundsStats,
    /// Evaluate a metric along a parameter grid
    Sweep,
    /// Per-iteration gradient-descent convergence trace
    Trace,
}

fn main() {
    let cli = Cli::parse();
    if let Err(message) = run(cli) {
        eprintln!("error: {message}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let file_opts = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            config::parse_config_file(&text)?
        }
        None => RawOptions::default(),
    };
    let kind = match cli.command {
        Command::Solve => CommandKind::Solve,
        Command::ProbN2 => CommandKind::ProbN2,
        Command::ProbMc => CommandKind::ProbMc,
        Command::BoundsStats => CommandKind::BoundsStats,
        Command::Sweep => CommandKind::Sweep,
        Command::Trace => CommandKind::Trace,
    };
    let flags = RawOptions {
        n_elements: cli.n_elements,
        sigma_as: cli.sigma_as,
        sigma_sw: cli.sigma_sw,
        sigma_sb: cli.sigma_sb,
        sigma_aw: cli.sigma_aw,
        sigma_ab: cli.sigma_ab,
        noise_var_w: cli.noise_var_w,
        noise_var_b: cli.noise_var_b,
        tx_power: cli.tx_power,
        seed: cli.seed,
        trials: cli.trials,
        solver: cli.solver,
        sweep: cli.sweep,
        metric: cli.metric,
        out: cli.out,
    };
    let cfg = config::build(kind, flags, file_opts)?;
    match cfg.command {
        CommandKind::Solve => run_solve(&cfg),
        CommandKind::ProbN2 => run_prob_n2(&cfg),
        CommandKind::ProbMc => run_prob_mc(&cfg),
        CommandKind::BoundsStats => run_bounds_stats(&cfg),
        CommandKind::Sweep => run_sweep(&cfg),
        CommandKind::Trace => run_trace(&cfg),
    }
}

/// Write the CSV to `--out` (noting the row count on stderr) or stdout.
fn emit(cfg: &ExperimentConfig, csv: &Csv) -> Result<(), String> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, csv.render())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("wrote {} rows to {}", csv.rows(), path.display());
            Ok(())
        }
        None => {
            print!("{}", csv.render());
            Ok(())
        }
    }
}

fn gd_config(params: &ChannelParams) -> GdConfig {
    GdConfig {
        init: InitPolicy::UniformRandom { seed: params.seed() },
        ..GdConfig::default()
    }
}

fn solver_name(solver: SolverKind) -> &'static str {
    match solver {
        SolverKind::ClosedFormN2 => "closed-form-n2",
        SolverKind::Gd => "gd",
        SolverKind::Constructive => "constructive",
    }
}

fn run_solve(cfg: &ExperimentConfig) -> Result<(), String> {
    let params = &cfg.params;
    let re = sample_realization(params);
    let willie_cascades = cascade_terms(&re, Receiver::Willie);
    let bob = BobContext::new(&re, params);
    let result: SolveResult = match cfg.solver {
        SolverKind::ClosedFormN2 => {
            let bob_cascades = cascade_terms(&re, Receiver::Bob);
            solve_n2(&willie_cascades, re.h_aw, &bob_cascades, re.h_ab, params)
        }
        SolverKind::Gd => solve_gd(&willie_cascades, re.h_aw, &gd_config(params), &bob),
        SolverKind::Constructive => match solve_constructive_covert(&willie_cascades, re.h_aw, &bob)
        {
            Ok(r) => Ok(r),
            Err(
                covert_irs::Error::ConstructionFailed
                | covert_irs::Error::ElementCount { .. }
                | covert_irs::Error::InfeasibleMagnitude { .. },
            ) => {
                eprintln!("note: construction not available here; falling back to gradient descent");
                solve_gd(&willie_cascades, re.h_aw, &gd_config(params), &bob)
            }
            Err(e) => Err(e),
        },
    }
    .map_err(|e| e.to_string())?;

    let kl = kl_divergence_willie(&result.phases, &re, params).map_err(|e| e.to_string())?;
    let bound = detection_error_bound(kl).clamp(0.0, 1.0);
    let feasible = result.status != SolveStatus::Infeasible;

    println!("feasible: {feasible}");
    println!("status: {}", status_name(result.status));
    println!("classification: {}", classification_name(result.classification));
    println!("iterations: {}", result.iterations);
    println!("residual willie power: {}", num(result.residual_power));
    println!("willie snr: {}", num(result.willie_snr));
    println!("bob snr: {}", num(result.bob_snr));
    println!("kl divergence: {}", num(kl));
    println!("alpha+beta >= {bound:.3}");

    if cfg.out.is_some() {
        let mut csv = Csv::new(format!(
            "{PARAM_COLUMNS},solver,feasible,status,classification,iterations,residual_willie_power,willie_snr,bob_snr,kl_divergence,detection_error_bound,phases"
        ));
        csv.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            param_cells(params),
            solver_name(cfg.solver),
            feasible,
            status_name(result.status),
            classification_name(result.classification),
            result.iterations,
            num(result.residual_power),
            num(result.willie_snr),
            num(result.bob_snr),
            num(kl),
            num(bound),
            phase_cell(&result.phases),
        ));
        emit(cfg, &csv)?;
    }
    Ok(())
}

fn analytic_estimate(params: &ChannelParams) -> Result<(ProbabilityEstimate, f64), String> {
    let sigma_x = params.sigma_as() * params.sigma_sw();
    let est = existence_probability_n2_analytic(sigma_x, sigma_x, params.sigma_aw(), QUAD_TOL)
        .map_err(|e| e.to_string())?;
    let tolerance = match est.method {
        EstimateMethod::AnalyticQuadrature { tolerance } => tolerance,
        EstimateMethod::MonteCarlo { .. } => unreachable!("analytic path"),
    };
    Ok((est, tolerance))
}

fn prob_n2_row(params: &ChannelParams, prefix: &str) -> Result<String, String> {
    let (est, tolerance) = analytic_estimate(params)?;
    Ok(format!(
        "{prefix},{},{},analytic-quadrature,{}",
        num(est.value),
        num(est.std_error),
        num(tolerance)
    ))
}

fn run_prob_n2(cfg: &ExperimentConfig) -> Result<(), String> {
    let (est, tolerance) = analytic_estimate(&cfg.params)?;
    eprintln!(
        "P(perfect covertness feasible) = {} (quadrature error <= {})",
        num(est.value),
        num(tolerance)
    );
    let mut csv = Csv::new(format!("{PARAM_COLUMNS},estimate,std_error,method,tolerance"));
    csv.push(prob_n2_row(&cfg.params, &param_cells(&cfg.params))?);
    emit(cfg, &csv)
}

fn prob_mc_row(params: &ChannelParams, n_trials: u64, prefix: &str) -> Result<String, String> {
    let est = existence_probability_mc(params, n_trials).map_err(|e| e.to_string())?;
    Ok(format!(
        "{prefix},{n_trials},{},{},monte-carlo",
        num(est.value),
        num(est.std_error)
    ))
}

fn run_prob_mc(cfg: &ExperimentConfig) -> Result<(), String> {
    let est = existence_probability_mc(&cfg.params, cfg.n_trials).map_err(|e| e.to_string())?;
    eprintln!(
        "P(perfect covertness feasible) = {} +/- {} ({} trials)",
        num(est.value),
        num(est.std_error),
        cfg.n_trials
    );
    let mut csv = Csv::new(format!("{PARAM_COLUMNS},n_trials,estimate,std_error,method"));
    csv.push(prob_mc_row(&cfg.params, cfg.n_trials, &param_cells(&cfg.params))?);
    emit(cfg, &csv)
}

fn bounds_row(stats: &BoundsStatistics, n_trials: u64, prefix: &str) -> String {
    format!(
        "{prefix},{n_trials},{},{},{},{},{},{}",
        num(stats.mean_min),
        num(stats.std_min),
        num(stats.mean_max),
        num(stats.std_max),
        num(stats.mean_direct),
        num(stats.std_direct),
    )
}

fn run_bounds_stats(cfg: &ExperimentConfig) -> Result<(), String> {
    let stats = bounds_statistics(&cfg.params, cfg.n_trials).map_err(|e| e.to_string())?;
    eprintln!(
        "bounds over {} trials: min {} +/- {}, max {} +/- {}, direct {} +/- {}",
        cfg.n_trials,
        num(stats.mean_min),
        num(stats.std_min),
        num(stats.mean_max),
        num(stats.std_max),
        num(stats.mean_direct),
        num(stats.std_direct),
    );
    let mut csv = Csv::new(format!(
        "{PARAM_COLUMNS},n_trials,mean_min,std_min,mean_max,std_max,mean_direct,std_direct"
    ));
    csv.push(bounds_row(&stats, cfg.n_trials, &param_cells(&cfg.params)));
    emit(cfg, &csv)
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<(), String> {
    let spec = cfg.sweep.as_ref().expect("validated by config::build");
    let metric = cfg.metric.expect("validated by config::build");
    let metric_columns = match metric {
        MetricKind::ProbN2 => "estimate,std_error,method,tolerance",
        MetricKind::ProbMc => "n_trials,estimate,std_error,method",
        MetricKind::BoundsStats => {
            "n_trials,mean_min,std_min,mean_max,std_max,mean_direct,std_direct"
        }
    };
    let mut csv = Csv::new(format!("{PARAM_COLUMNS},sweep_param,sweep_value,{metric_columns}"));
    // Points run in grid order so output assembly is deterministic; the
    // Monte-Carlo work inside a point is already parallel.
    for &value in &spec.grid {
        let params = config::params_at(&cfg.params, spec.param, value)?;
        let prefix = format!("{},{},{}", param_cells(&params), spec.param.name(), num(value));
        let row = match metric {
            MetricKind::ProbN2 => prob_n2_row(&params, &prefix)?,
            MetricKind::ProbMc => prob_mc_row(&params, cfg.n_trials, &prefix)?,
            MetricKind::BoundsStats => {
                let stats = bounds_statistics(&params, cfg.n_trials).map_err(|e| e.to_string())?;
                bounds_row(&stats, cfg.n_trials, &prefix)
            }
        };
        csv.push(row);
    }
    eprintln!(
        "swept {} over {} points ({})",
        spec.param.name(),
        spec.grid.len(),
        match metric {
            MetricKind::ProbN2 => "analytic probability",
            MetricKind::ProbMc => "monte-carlo probability",
            MetricKind::BoundsStats => "bounds statistics",
        }
    );
    emit(cfg, &csv)
}

fn run_trace(cfg: &ExperimentConfig) -> Result<(), String> {
    if cfg.solver != SolverKind::Gd {
        return Err("trace records gradient-descent iterations; use --solver gd".into());
    }
    let params = &cfg.params;
    let re = sample_realization(params);
    let cascades = cascade_terms(&re, Receiver::Willie);
    let bob = BobContext::new(&re, params);
    let mut csv = Csv::new(format!("{PARAM_COLUMNS},restart,iteration,objective,grad_norm,step"));
    let prefix = param_cells(params);
    let result = solve_gd_traced(&cascades, re.h_aw, &gd_config(params), &bob, &mut |row| {
        csv.push(format!(
            "{prefix},{},{},{},{},{}",
            row.restart,
            row.iteration,
            num(row.objective),
            num(row.grad_norm),
            num(row.step),
        ));
    })
    .map_err(|e| e.to_string())?;
    eprintln!(
        "{} after {} iterations; residual willie power {}",
        status_name(result.status),
        result.iterations,
        num(result.residual_power)
    );
    emit(cfg, &csv)
}
