//! The `vrtd` command-line tool.
//!
//! Every command reads an optional JSON config (`--config`), applies
//! `--set key.path=value` overrides, and writes plot-ready CSV plus a JSON
//! sidecar into `--out`. Floats in CSV and text output carry 17 significant
//! digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgAction, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{Error, Result};
use crate::experiments::{
    compare_batch_sizes, run_experiment, with_jobs, EnvironmentSpec, ExperimentResult, ExperimentSpec, Fingerprint,
    Sampler, SweepResult,
};
use crate::mdp::sample_iid;
use crate::metrics::{neu_exact, neu_sampled, squared_error};
use crate::rng::{stream, Lane};
use crate::theory::{
    corollary_schedule, counterexample_eval, lemma1_bias_bound, theorem1_from, theorem2_from, BoundsReport,
    ProblemConstants, ScheduleVariant, TdConstants,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_MODEL: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const CURVE_HEADER: &str = "run_id,pseudo_gradient_count,squared_error";
pub const SUMMARY_HEADER: &str = "batch_M,tail_mean_error,std_error,algorithm,sampler";
pub const PAIRED_HEADER: &str =
    "batch_M,iid_tail_mean_error,iid_std_error,markov_tail_mean_error,markov_std_error,iid_not_worse";

#[derive(Debug, Parser)]
#[command(name = "vrtd", version, about = "Vanilla and variance-reduced TD policy evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON config file for the command.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override a config value, e.g. `--set algorithm.alpha=0.05`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Shorthand for overriding the run seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Leave the timestamp out of JSON sidecars.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute θ*, λ_A and the mixing constants of an environment.
    Solve,
    /// Print the convergence constants and complexity schedules.
    Bounds,
    /// Run one experiment.
    Run {
        /// Use 1000 runs.
        #[arg(long)]
        full: bool,
    },
    /// Run an experiment for several batch sizes.
    Sweep {
        /// Use 1000 runs.
        #[arg(long)]
        full: bool,
    },
    /// Exact and sampled NEU at a parameter.
    Neu,
    /// Evaluate the conditional-moment counter-example.
    Counterexample {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        delta: f64,
    },
}

/// Maps an error to the process exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Invalid { .. } | Error::Dimension { .. } | Error::Precondition(_) => EXIT_CONFIG,
        Error::NotErgodic(_)
        | Error::DegenerateFeatures
        | Error::Singular { .. }
        | Error::NotNegativeDefinite { .. }
        | Error::Generation { .. } => EXIT_MODEL,
        Error::Diverged { .. } => EXIT_DIVERGENCE,
        Error::Io { .. } => EXIT_IO,
        Error::Run { .. } => unreachable!("root strips run wrappers"),
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve => cmd_solve(cli),
        Command::Bounds => cmd_bounds(cli),
        Command::Run { full } => cmd_run(cli, *full),
        Command::Sweep { full } => cmd_sweep(cli, *full),
        Command::Neu => cmd_neu(cli),
        Command::Counterexample { delta } => cmd_counterexample(cli, *delta),
    }
}

fn load<T: serde::de::DeserializeOwned>(cli: &Cli, prefix: &str, full: bool) -> Result<T> {
    let mut overrides = Vec::new();
    if full {
        overrides.push(format!("{prefix}n_runs=1000"));
    }
    if let Some(seed) = cli.seed {
        overrides.push(format!("{prefix}seed={seed}"));
    }
    overrides.extend(cli.overrides.iter().cloned());
    config::load(cli.config.as_deref(), &overrides)
}

fn timestamp(cli: &Cli) -> Option<u64> {
    if cli.no_timestamp {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `{:.16e}`: 17 significant digits, locale independent.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub environment: EnvironmentSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub env_fingerprint: Fingerprint,
    pub n_states: usize,
    pub dim: usize,
    pub gamma: f64,
    pub r_max: f64,
    pub theta_star: Vec<f64>,
    pub lambda_a: f64,
    pub lambda_a_doubled: f64,
    pub rho: f64,
    pub kappa: f64,
    pub residual: f64,
    pub condition: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

fn cmd_solve(cli: &Cli) -> Result<()> {
    let cfg: SolveConfig = load(cli, "", false)?;
    let env = cfg.environment.build()?;
    let m = &env.model;
    let report = SolveReport {
        env_fingerprint: env.fingerprint,
        n_states: env.mdp.n_states(),
        dim: m.dim(),
        gamma: m.gamma,
        r_max: m.r_max,
        theta_star: m.theta_star.iter().copied().collect(),
        lambda_a: m.lambda_a,
        lambda_a_doubled: m.lambda_a_doubled(),
        rho: m.mix.rho,
        kappa: m.mix.kappa,
        residual: m.residual(),
        condition: m.condition,
        timestamp: timestamp(cli),
    };
    let json = to_json(&report);
    print!("{json}");
    if cli.out.is_some() {
        write_file(&out_dir(cli)?.join("solve.json"), &json)?;
    }
    Ok(())
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-3]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub environment: EnvironmentSpec,
    /// Stepsize for the theorem constants; the corollary stepsize if absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub batch_size: Option<u64>,
    /// Radius `R_θ`; `2‖θ*‖` if absent.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default = "default_epsilons")]
    pub epsilon: Vec<f64>,
    /// `‖θ̃₀ − θ*‖²`; `‖θ*‖²` (zero start) if absent.
    #[serde(default)]
    pub theta0_error: Option<f64>,
    #[serde(default)]
    pub td_constants: TdConstants,
}

#[derive(Debug, Clone, Serialize)]
struct BoundsFile<'a> {
    env_fingerprint: Fingerprint,
    #[serde(flatten)]
    report: &'a BoundsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

/// Builds the `bounds` report for a solved environment.
pub fn bounds_report(cfg: &BoundsConfig, p: &ProblemConstants, theta_star_norm: f64) -> Result<BoundsReport> {
    if cfg.epsilon.is_empty() {
        return Err(Error::invalid("epsilon", "must list at least one accuracy"));
    }
    let radius = cfg.radius.unwrap_or(2.0 * theta_star_norm);
    let theta0_error = cfg.theta0_error.unwrap_or(theta_star_norm * theta_star_norm);
    let mut schedules = Vec::new();
    for &eps in &cfg.epsilon {
        for v in ScheduleVariant::ALL {
            schedules.push(corollary_schedule(eps, v, p, radius, theta0_error, cfg.td_constants)?);
        }
    }
    let pick = |v: ScheduleVariant| schedules.iter().find(|s| s.variant == v).expect("every variant scheduled");
    let iid = pick(ScheduleVariant::VrtdIid);
    let markov = pick(ScheduleVariant::VrtdMarkov);
    let theorem1 = theorem1_from(
        cfg.alpha.unwrap_or(iid.alpha),
        cfg.batch_size.unwrap_or(iid.batch_size.unwrap_or(1)),
        p,
        radius,
    )?;
    let theorem2 = theorem2_from(
        cfg.alpha.unwrap_or(markov.alpha),
        cfg.batch_size.unwrap_or(markov.batch_size.unwrap_or(1)),
        p,
        radius,
    )?;
    let bias = lemma1_bias_bound(p, theta0_error, theorem2.batch_size, radius);
    Ok(BoundsReport {
        problem: *p,
        theorem1,
        theorem2,
        lemma1_bias_bound: bias,
        schedules,
    })
}

fn cmd_bounds(cli: &Cli) -> Result<()> {
    let cfg: BoundsConfig = load(cli, "", false)?;
    let env = cfg.environment.build()?;
    let p = ProblemConstants::from(&env.model);
    let report = bounds_report(&cfg, &p, env.model.theta_star.norm())?;
    print!("{}", report.table());
    if cli.out.is_some() {
        let file = BoundsFile {
            env_fingerprint: env.fingerprint,
            report: &report,
            timestamp: timestamp(cli),
        };
        write_file(&out_dir(cli)?.join("bounds.json"), &to_json(&file))?;
    }
    Ok(())
}

/// Per-run curves in long format.
pub fn curve_csv(result: &ExperimentResult) -> String {
    let mut s = String::from(CURVE_HEADER);
    s.push('\n');
    for run in &result.runs {
        for (count, err) in result.counts.iter().zip(&run.curve) {
            let _ = writeln!(s, "{},{},{}", run.run_id, count, fmt_f64(*err));
        }
    }
    s
}

fn summary_line(s: &mut String, batch: Option<u64>, result: &ExperimentResult) {
    let batch = batch.map(|m| m.to_string()).unwrap_or_default();
    let _ = writeln!(
        s,
        "{},{},{},{},{}",
        batch,
        fmt_f64(result.tail_mean_error),
        fmt_f64(result.tail_std_error),
        result.spec.algorithm.name(),
        result.spec.algorithm.sampler().name()
    );
}

fn batch_of(spec: &ExperimentSpec) -> Option<u64> {
    use crate::experiments::AlgorithmSpec::*;
    match &spec.algorithm {
        Td(_) => None,
        VrtdIid(p) | VrtdMarkov(p) => Some(p.batch_size),
    }
}

pub fn summary_csv(results: &[&ExperimentResult]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in results {
        summary_line(&mut s, batch_of(&r.spec), r);
    }
    s
}

pub fn paired_csv(sweep: &SweepResult) -> String {
    let mut s = String::from(PAIRED_HEADER);
    s.push('\n');
    for p in &sweep.paired {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            p.batch_size,
            fmt_f64(p.iid),
            fmt_f64(p.iid_std_error),
            fmt_f64(p.markov),
            fmt_f64(p.markov_std_error),
            p.iid_not_worse
        );
    }
    s
}

#[derive(Debug, Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    spec: &'a ExperimentSpec,
    env_fingerprint: Fingerprint,
    theta_star: &'a [f64],
    lambda_a: f64,
    radius: Option<f64>,
    tail_mean_error: f64,
    tail_std_error: f64,
    per_run_tail_errors: &'a [f64],
    warnings: Vec<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

fn metadata<'a>(command: &'static str, r: &'a ExperimentResult, ts: Option<u64>) -> RunMetadata<'a> {
    let mut warnings: Vec<&str> = r.runs.iter().flat_map(|run| run.warnings.iter().map(String::as_str)).collect();
    warnings.sort_unstable();
    warnings.dedup();
    RunMetadata {
        tool: "vrtd",
        version: env!("CARGO_PKG_VERSION"),
        command,
        spec: &r.spec,
        env_fingerprint: r.env_fingerprint,
        theta_star: &r.theta_star,
        lambda_a: r.lambda_a,
        radius: r.radius,
        tail_mean_error: r.tail_mean_error,
        tail_std_error: r.tail_std_error,
        per_run_tail_errors: &r.per_run_tail_errors,
        warnings,
        timestamp: ts,
    }
}

fn cmd_run(cli: &Cli, full: bool) -> Result<()> {
    let spec: ExperimentSpec = load(cli, "", full)?;
    spec.validate()?;
    let result = with_jobs(cli.jobs, || run_experiment(&spec))??;
    let dir = out_dir(cli)?;
    write_file(&dir.join("curves.csv"), &curve_csv(&result))?;
    write_file(&dir.join("summary.csv"), &summary_csv(&[&result]))?;
    write_file(&dir.join("metadata.json"), &to_json(&metadata("run", &result, timestamp(cli))))?;
    println!(
        "{} ({}), {} runs: tail_mean_error = {} (std error {})",
        spec.algorithm.name(),
        spec.algorithm.sampler().name(),
        spec.n_runs,
        fmt_f64(result.tail_mean_error),
        fmt_f64(result.tail_std_error)
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: ExperimentSpec,
    pub batch_sizes: Vec<u64>,
    /// Samplers to run at each batch size; the experiment's own if empty.
    #[serde(default)]
    pub samplers: Vec<Sampler>,
}

#[derive(Debug, Serialize)]
struct SweepMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a SweepConfig,
    runs: Vec<RunMetadata<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

fn cmd_sweep(cli: &Cli, full: bool) -> Result<()> {
    let cfg: SweepConfig = load(cli, "experiment.", full)?;
    let sweep = with_jobs(cli.jobs, || compare_batch_sizes(&cfg.experiment, &cfg.batch_sizes, &cfg.samplers))??;
    let dir = out_dir(cli)?;
    let results: Vec<&ExperimentResult> = sweep.rows.iter().map(|r| &r.result).collect();
    write_file(&dir.join("summary.csv"), &summary_csv(&results))?;
    for row in &sweep.rows {
        let name = format!("curves_{}_M{}.csv", row.algorithm, row.batch_size);
        write_file(&dir.join(name), &curve_csv(&row.result))?;
    }
    if !sweep.paired.is_empty() {
        write_file(&dir.join("paired.csv"), &paired_csv(&sweep))?;
    }
    let ts = timestamp(cli);
    let meta = SweepMetadata {
        tool: "vrtd",
        version: env!("CARGO_PKG_VERSION"),
        command: "sweep",
        config: &cfg,
        runs: results.iter().map(|r| metadata("sweep", r, None)).collect(),
        timestamp: ts,
    };
    write_file(&dir.join("metadata.json"), &to_json(&meta))?;
    for row in &sweep.rows {
        println!(
            "M = {:>6} {:<6}: tail_mean_error = {} (std error {})",
            row.batch_size,
            row.sampler.name(),
            fmt_f64(row.tail_mean_error),
            fmt_f64(row.std_error)
        );
    }
    for p in &sweep.paired {
        let verdict = if p.iid_not_worse { "iid <= markov" } else { "iid > markov" };
        println!("M = {:>6}: {verdict}", p.batch_size);
    }
    Ok(())
}

fn default_test_samples() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuConfig {
    pub environment: EnvironmentSpec,
    /// Parameter to evaluate; zero if absent.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default = "default_test_samples")]
    pub test_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct NeuReport {
    env_fingerprint: Fingerprint,
    theta: Vec<f64>,
    squared_error: f64,
    neu_exact: f64,
    neu_sampled: f64,
    test_samples: usize,
}

fn cmd_neu(cli: &Cli) -> Result<()> {
    let cfg: NeuConfig = load(cli, "", false)?;
    let env = cfg.environment.build()?;
    let d = env.features.dim();
    let theta = cfg.theta.clone().unwrap_or_else(|| vec![0.0; d]);
    if theta.len() != d {
        return Err(Error::Dimension { expected: d, got: theta.len() });
    }
    let mut rng = stream(cfg.seed, 0, Lane::Evaluation);
    let samples: Vec<_> = (0..cfg.test_samples).map(|_| sample_iid(&env.mdp, &env.mu, &mut rng)).collect();
    let report = NeuReport {
        env_fingerprint: env.fingerprint,
        squared_error: squared_error(&theta, env.model.theta_star_slice())?,
        neu_exact: neu_exact(&env.model, &theta),
        neu_sampled: neu_sampled(&env.features, env.model.gamma, &theta, &samples)?,
        theta,
        test_samples: cfg.test_samples,
    };
    let json = to_json(&report);
    print!("{json}");
    if cli.out.is_some() {
        write_file(&out_dir(cli)?.join("neu.json"), &json)?;
    }
    Ok(())
}

fn cmd_counterexample(cli: &Cli, delta: f64) -> Result<()> {
    let c = counterexample_eval(delta);
    print!("{}", c.report());
    if cli.out.is_some() {
        write_file(&out_dir(cli)?.join("counterexample.json"), &to_json(&c))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invalid("a", "b")), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Singular { condition: 1e20 }), EXIT_MODEL);
        let wrapped = Error::Run {
            run: 3,
            source: Box::new(Error::Diverged { step: 9, norm: 1e13 }),
        };
        assert_eq!(exit_code(&wrapped), EXIT_DIVERGENCE);
        let io = Error::Io {
            path: "x".into(),
            source: std::io::Error::other("boom"),
        };
        assert_eq!(exit_code(&io), EXIT_IO);
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn counterexample_flag_parses_negative_delta() {
        let cli = Cli::try_parse_from(["vrtd", "counterexample", "--delta", "-2"]).unwrap();
        assert!(matches!(cli.command, Command::Counterexample { delta } if delta == -2.0));
    }
}
