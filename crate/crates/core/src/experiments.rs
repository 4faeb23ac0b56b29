//! Environment generators and the multi-run experiment harness.

use std::fmt;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::{
    vanilla_td, vrtd_iid, vrtd_markov, IidSource, RunTrace, StepSchedule, TdConfig, TrajectorySource, VrtdConfig,
    DEFAULT_TAIL_WINDOW,
};
use crate::error::{Error, Result};
use crate::mdp::{stationary_distribution, Mdp, MdpFile, StationaryDist};
use crate::model::{normalize_features, FeatureMap, TdModel};
use crate::rng::{stream, ChaCha8Rng, Lane};

/// Draws rejected before a generator gives up.
pub const MAX_GENERATION_ATTEMPTS: usize = 100;

pub const RANDOM_MDP_STATES: usize = 50;
pub const RANDOM_MDP_FEATURES: usize = 4;
pub const RANDOM_MDP_GAMMA: f64 = 0.95;

pub const FROZEN_LAKE_MAP: [&str; 4] = ["SFFF", "FHFH", "FFFH", "HFFG"];
pub const FROZEN_LAKE_FEATURES: usize = 4;
pub const FROZEN_LAKE_GAMMA: f64 = 0.95;

/// Default number of checkpoints per run when the experiment does not set a cadence.
pub const DEFAULT_CHECKPOINTS: u64 = 200;

/// A built environment with its exact model.
#[derive(Debug, Clone)]
pub struct Environment {
    pub mdp: Mdp,
    pub features: FeatureMap,
    pub mu: StationaryDist,
    pub model: TdModel,
    pub fingerprint: Fingerprint,
}

impl Environment {
    pub fn new(mdp: Mdp, features: FeatureMap) -> Result<Self> {
        if features.n_states() != mdp.n_states() {
            return Err(Error::invalid(
                "features",
                format!("{} feature rows for {} states", features.n_states(), mdp.n_states()),
            ));
        }
        let mu = stationary_distribution(&mdp)?;
        let model = TdModel::compute(&mdp, &mu, &features)?;
        let fingerprint = fingerprint(&mdp, &features);
        Ok(Self {
            mdp,
            features,
            mu,
            model,
            fingerprint,
        })
    }
}

/// 64-bit digest of the kernel, rewards, discount and features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub u64);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn fingerprint(mdp: &Mdp, features: &FeatureMap) -> Fingerprint {
    let mut h = Sha256::new();
    let n = mdp.n_states();
    h.update((n as u64).to_le_bytes());
    h.update((features.dim() as u64).to_le_bytes());
    for s in 0..n {
        for p in mdp.row(s) {
            h.update(p.to_le_bytes());
        }
    }
    for r in mdp.expected_reward() {
        h.update(r.to_le_bytes());
    }
    h.update(mdp.gamma().to_le_bytes());
    h.update(mdp.r_max().to_le_bytes());
    for s in 0..n {
        for x in features.row(s) {
            h.update(x.to_le_bytes());
        }
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    Fingerprint(u64::from_le_bytes(bytes))
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.random::<f64>()).collect()).collect()
}

fn normalize_row(row: &mut [f64]) {
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= sum);
}

/// Retries `draw` on fresh sub-streams until the model is usable.
fn generate(seed: u64, mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<(Mdp, FeatureMap)>) -> Result<Environment> {
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let mut rng = stream(seed, attempt as u64, Lane::Environment);
        match draw(&mut rng).and_then(|(mdp, f)| Environment::new(mdp, f)) {
            Ok(env) => return Ok(env),
            Err(
                e @ (Error::Singular { .. }
                | Error::NotNegativeDefinite { .. }
                | Error::NotErgodic(_)
                | Error::DegenerateFeatures),
            ) => {
                log::debug!("environment draw {attempt} for seed {seed} rejected: {e}");
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

/// 50-state chain with uniform-then-normalized rows, `U[0,1]` rewards and a
/// globally normalized `U[0,1]` 50×4 feature matrix, `γ = 0.95`.
pub fn random_mdp_env(seed: u64) -> Result<Environment> {
    generate(seed, |rng| {
        let n = RANDOM_MDP_STATES;
        let mut kernel = uniform_matrix(rng, n, n);
        kernel.iter_mut().for_each(|row| normalize_row(row));
        let reward: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let phi = uniform_matrix(rng, n, RANDOM_MDP_FEATURES);
        let mdp = Mdp::new(kernel, reward, RANDOM_MDP_GAMMA, Some(1.0))?;
        Ok((mdp, normalize_features(phi)?))
    })
}

fn lake_cell(s: usize) -> u8 {
    FROZEN_LAKE_MAP[s / 4].as_bytes()[s % 4]
}

/// 4×4 Frozen Lake under a random policy over grid moves.
///
/// Each non-terminal cell moves to one of its grid neighbours with weights
/// drawn from `U[0,1]` and normalized. Holes and the goal send the agent back
/// to the start. The reward of a state is the probability that its step
/// enters the goal.
pub fn frozen_lake_env(seed: u64, gamma: f64) -> Result<Environment> {
    generate(seed, |rng| {
        let n = 16;
        let mut kernel = vec![vec![0.0; n]; n];
        for (s, row) in kernel.iter_mut().enumerate() {
            match lake_cell(s) {
                b'H' | b'G' => row[0] = 1.0,
                _ => {
                    let (r, c) = (s / 4, s % 4);
                    if r > 0 {
                        row[s - 4] = rng.random::<f64>();
                    }
                    if r < 3 {
                        row[s + 4] = rng.random::<f64>();
                    }
                    if c > 0 {
                        row[s - 1] = rng.random::<f64>();
                    }
                    if c < 3 {
                        row[s + 1] = rng.random::<f64>();
                    }
                    normalize_row(row);
                }
            }
        }
        let goal = (0..n).find(|&s| lake_cell(s) == b'G').unwrap_or(n - 1);
        let reward: Vec<f64> = (0..n)
            .map(|s| if matches!(lake_cell(s), b'H' | b'G') { 0.0 } else { kernel[s][goal] })
            .collect();
        let phi = uniform_matrix(rng, n, FROZEN_LAKE_FEATURES);
        let mdp = Mdp::new(kernel, reward, gamma, Some(1.0))?;
        Ok((mdp, normalize_features(phi)?))
    })
}

fn default_lake_gamma() -> f64 {
    FROZEN_LAKE_GAMMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    RandomMdp {
        seed: u64,
    },
    FrozenLake {
        seed: u64,
        #[serde(default = "default_lake_gamma")]
        gamma: f64,
    },
    /// An MDP file plus a feature file.
    FromFile {
        mdp: PathBuf,
        features: PathBuf,
    },
    /// An MDP and feature matrix written directly into the config.
    Inline {
        mdp: MdpFile,
        phi: Vec<Vec<f64>>,
        #[serde(default)]
        pre_normalized: bool,
    },
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<Environment> {
        match self {
            Self::RandomMdp { seed } => random_mdp_env(*seed),
            Self::FrozenLake { seed, gamma } => frozen_lake_env(*seed, *gamma),
            Self::FromFile { mdp, features } => {
                let read = |p: &PathBuf| {
                    std::fs::read_to_string(p).map_err(|source| Error::Io {
                        path: p.display().to_string(),
                        source,
                    })
                };
                let mdp = Mdp::from_json_str(&read(mdp)?)?;
                let features = FeatureMap::from_json_str(&read(features)?)?;
                Environment::new(mdp, features)
            }
            Self::Inline {
                mdp,
                phi,
                pre_normalized,
            } => {
                let features = if *pre_normalized {
                    FeatureMap::new(phi.clone())?
                } else {
                    normalize_features(phi.clone())?
                };
                Environment::new(mdp.clone().into_mdp()?, features)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Iid,
    Markov,
}

impl Sampler {
    pub fn name(self) -> &'static str {
        match self {
            Self::Iid => "iid",
            Self::Markov => "markov",
        }
    }
}

/// Vanilla TD settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdParams {
    pub schedule: StepSchedule,
    pub steps: u64,
    #[serde(default = "default_sampler")]
    pub sampler: Sampler,
    /// Projection radius; unprojected when absent.
    #[serde(default)]
    pub radius: Option<f64>,
}

fn default_sampler() -> Sampler {
    Sampler::Iid
}

/// VRTD settings. Exactly one of `epochs` and `budget` (pseudo-gradient
/// computations, `2M` per epoch) must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VrtdParams {
    pub alpha: f64,
    pub batch_size: u64,
    #[serde(default)]
    pub epochs: Option<u64>,
    #[serde(default)]
    pub budget: Option<u64>,
    /// Projection radius for the Markovian variant; `2‖θ*‖` when absent.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub burn_in: u64,
}

impl VrtdParams {
    pub fn epochs(&self) -> Result<u64> {
        if self.batch_size == 0 {
            return Err(Error::invalid("algorithm.batch_size", "must be positive"));
        }
        match (self.epochs, self.budget) {
            (Some(e), None) => Ok(e),
            (None, Some(b)) => {
                let e = b / (2 * self.batch_size);
                if e == 0 {
                    return Err(Error::invalid(
                        "algorithm.budget",
                        format!("budget {b} is below one epoch (2M = {})", 2 * self.batch_size),
                    ));
                }
                Ok(e)
            }
            _ => Err(Error::invalid("algorithm", "set exactly one of `epochs` and `budget`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    Td(TdParams),
    VrtdIid(VrtdParams),
    VrtdMarkov(VrtdParams),
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Td(_) => "td",
            Self::VrtdIid(_) => "vrtd_iid",
            Self::VrtdMarkov(_) => "vrtd_markov",
        }
    }

    pub fn sampler(&self) -> Sampler {
        match self {
            Self::Td(p) => p.sampler,
            Self::VrtdIid(_) => Sampler::Iid,
            Self::VrtdMarkov(_) => Sampler::Markov,
        }
    }

    /// Parameter updates per run.
    pub fn iterations(&self) -> Result<u64> {
        match self {
            Self::Td(p) => Ok(p.steps),
            Self::VrtdIid(p) | Self::VrtdMarkov(p) => Ok(p.epochs()? * p.batch_size),
        }
    }

    /// Pseudo-gradient computations per run.
    pub fn cost(&self) -> Result<u64> {
        match self {
            Self::Td(p) => Ok(p.steps),
            Self::VrtdIid(p) | Self::VrtdMarkov(p) => Ok(2 * p.epochs()? * p.batch_size),
        }
    }
}

fn default_runs() -> usize {
    100
}

fn default_tail() -> u64 {
    DEFAULT_TAIL_WINDOW
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub environment: EnvironmentSpec,
    pub algorithm: AlgorithmSpec,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    /// Trailing parameter updates averaged into the tail error.
    #[serde(default = "default_tail")]
    pub tail_window: u64,
    /// Seed for the runs; run `i` uses stream `i`.
    #[serde(default)]
    pub seed: u64,
    /// Checkpoint cadence in pseudo-gradient computations; defaults to
    /// roughly 200 checkpoints per run.
    #[serde(default)]
    pub checkpoint_every: Option<u64>,
    #[serde(default)]
    pub theta0: Option<Vec<f64>>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::invalid("n_runs", "must be at least 1"));
        }
        if self.tail_window == 0 {
            return Err(Error::invalid("tail_window", "must be at least 1"));
        }
        if self.checkpoint_every == Some(0) {
            return Err(Error::invalid("checkpoint_every", "must be positive"));
        }
        match &self.algorithm {
            AlgorithmSpec::Td(p) => {
                if p.steps == 0 {
                    return Err(Error::invalid("algorithm.steps", "must be at least 1"));
                }
            }
            AlgorithmSpec::VrtdIid(p) | AlgorithmSpec::VrtdMarkov(p) => {
                p.epochs()?;
                if !(p.alpha > 0.0 && p.alpha.is_finite()) {
                    return Err(Error::invalid("algorithm.alpha", format!("must be positive, got {}", p.alpha)));
                }
            }
        }
        Ok(())
    }

    pub fn checkpoint_every(&self) -> Result<u64> {
        match self.checkpoint_every {
            Some(c) => Ok(c),
            None => Ok(self.algorithm.cost()?.div_ceil(DEFAULT_CHECKPOINTS).max(1)),
        }
    }
}

/// One run's contribution to a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub run_id: usize,
    /// Squared error at each checkpoint of the shared grid.
    pub curve: Vec<f64>,
    pub tail_mean_error: f64,
    pub final_theta: Vec<f64>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    fn from_trace(run_id: usize, trace: RunTrace) -> (Self, Vec<u64>) {
        let counts = trace.checkpoints.iter().map(|c| c.pseudo_gradients).collect();
        let curve = trace.checkpoints.iter().map(|c| c.squared_error).collect();
        (
            Self {
                run_id,
                curve,
                tail_mean_error: trace.tail_mean_error,
                final_theta: trace.final_theta,
                warnings: trace.warnings,
            },
            counts,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub pseudo_gradients: u64,
    pub mean_squared_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub env_fingerprint: Fingerprint,
    pub theta_star: Vec<f64>,
    pub lambda_a: f64,
    pub radius: Option<f64>,
    pub counts: Vec<u64>,
    pub mean_curve: Vec<CurvePoint>,
    pub tail_mean_error: f64,
    pub tail_std_error: f64,
    pub per_run_tail_errors: Vec<f64>,
    pub runs: Vec<RunSummary>,
}

/// Entrywise mean of equal-length curves, summed in the given order.
pub fn mean_curve(curves: &[&[f64]]) -> Vec<f64> {
    let Some(first) = curves.first() else { return Vec::new() };
    let mut sum = vec![0.0; first.len()];
    for c in curves {
        sum.iter_mut().zip(c.iter()).for_each(|(s, v)| *s += v);
    }
    let n = curves.len() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    sum
}

/// Mean and standard error of the mean.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `f` on a pool with `jobs` workers (`None` keeps the global pool).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Precondition(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Projection radius used by a spec on this environment.
pub fn resolved_radius(algorithm: &AlgorithmSpec, env: &Environment) -> Option<f64> {
    match algorithm {
        AlgorithmSpec::Td(p) => p.radius,
        AlgorithmSpec::VrtdIid(_) => None,
        AlgorithmSpec::VrtdMarkov(p) => Some(p.radius.unwrap_or(2.0 * env.model.theta_star.norm())),
    }
}

fn single_run(spec: &ExperimentSpec, env: &Environment, run: usize, every: u64) -> Result<RunTrace> {
    let (mdp, mu, features, model) = (&env.mdp, &env.mu, &env.features, &env.model);
    let index = run as u64;
    let start = || mu.sample(&mut stream(spec.seed, index, Lane::Start));
    match &spec.algorithm {
        AlgorithmSpec::Td(p) => {
            let config = TdConfig {
                schedule: p.schedule,
                steps: p.steps,
                checkpoint_every: every,
                tail_window: spec.tail_window,
                radius: p.radius,
                theta0: spec.theta0.clone(),
            };
            let samples = stream(spec.seed, index, Lane::Samples);
            match p.sampler {
                Sampler::Iid => vanilla_td(model, features, &mut IidSource::new(mdp, mu, samples), &config),
                Sampler::Markov => {
                    vanilla_td(model, features, &mut TrajectorySource::new(mdp, start(), samples), &config)
                }
            }
        }
        AlgorithmSpec::VrtdIid(p) | AlgorithmSpec::VrtdMarkov(p) => {
            let config = VrtdConfig {
                alpha: p.alpha,
                batch_size: p.batch_size,
                epochs: p.epochs()?,
                radius: resolved_radius(&spec.algorithm, env),
                seed: spec.seed,
                stream: index,
                checkpoint_every: every,
                tail_window: spec.tail_window,
                theta0: spec.theta0.clone(),
                burn_in: p.burn_in,
            };
            match spec.algorithm {
                AlgorithmSpec::VrtdIid(_) => vrtd_iid(model, mdp, mu, features, &config),
                _ => vrtd_markov(model, mdp, features, &config, start()),
            }
        }
    }
}

/// Builds the environment and runs the experiment.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let env = spec.environment.build()?;
    run_experiment_on(spec, &env)
}

/// Runs `spec` on an already-built environment (its `environment` field is
/// only echoed).
///
/// Runs execute in parallel; results are reduced in run order, so the
/// outcome does not depend on the number of workers.
pub fn run_experiment_on(spec: &ExperimentSpec, env: &Environment) -> Result<ExperimentResult> {
    spec.validate()?;
    let every = spec.checkpoint_every()?;
    let outcomes: Vec<Result<RunTrace>> =
        (0..spec.n_runs).into_par_iter().map(|run| single_run(spec, env, run, every)).collect();

    let mut runs = Vec::with_capacity(spec.n_runs);
    let mut counts: Option<Vec<u64>> = None;
    for (run, outcome) in outcomes.into_iter().enumerate() {
        let trace = outcome.map_err(|e| Error::Run {
            run,
            source: Box::new(e),
        })?;
        let (summary, c) = RunSummary::from_trace(run, trace);
        match &counts {
            None => counts = Some(c),
            Some(prev) if *prev != c => {
                return Err(Error::Precondition(format!("run {run} checkpointed on a different grid")));
            }
            Some(_) => {}
        }
        runs.push(summary);
    }
    let counts = counts.unwrap_or_default();
    let curves: Vec<&[f64]> = runs.iter().map(|r| r.curve.as_slice()).collect();
    let mean = mean_curve(&curves);
    let mean_curve = counts
        .iter()
        .zip(mean)
        .map(|(&pseudo_gradients, mean_squared_error)| CurvePoint {
            pseudo_gradients,
            mean_squared_error,
        })
        .collect();
    let per_run_tail_errors: Vec<f64> = runs.iter().map(|r| r.tail_mean_error).collect();
    let (tail_mean_error, tail_std_error) = mean_and_std_error(&per_run_tail_errors);
    Ok(ExperimentResult {
        spec: spec.clone(),
        env_fingerprint: env.fingerprint,
        theta_star: env.model.theta_star.iter().copied().collect(),
        lambda_a: env.model.lambda_a,
        radius: resolved_radius(&spec.algorithm, env),
        counts,
        mean_curve,
        tail_mean_error,
        tail_std_error,
        per_run_tail_errors,
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub batch_size: u64,
    pub algorithm: &'static str,
    pub sampler: Sampler,
    pub tail_mean_error: f64,
    pub std_error: f64,
    pub result: ExperimentResult,
}

/// I.i.d. and Markovian tail errors at one batch size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedRow {
    pub batch_size: u64,
    pub iid: f64,
    pub iid_std_error: f64,
    pub markov: f64,
    pub markov_std_error: f64,
    /// `iid ≤ markov` allowing two combined standard errors.
    pub iid_not_worse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub paired: Vec<PairedRow>,
}

/// Runs `base` once per batch size and sampler on one shared environment.
///
/// `base.algorithm` must be a VRTD variant; its stepsize, length and radius
/// are reused. `samplers` defaults to the base sampler when empty.
pub fn compare_batch_sizes(base: &ExperimentSpec, batch_sizes: &[u64], samplers: &[Sampler]) -> Result<SweepResult> {
    if batch_sizes.is_empty() {
        return Err(Error::invalid("batch_sizes", "must not be empty"));
    }
    let params = match &base.algorithm {
        AlgorithmSpec::VrtdIid(p) | AlgorithmSpec::VrtdMarkov(p) => p.clone(),
        AlgorithmSpec::Td(_) => return Err(Error::invalid("algorithm.kind", "batch sweeps need a VRTD algorithm")),
    };
    let samplers = if samplers.is_empty() {
        vec![base.algorithm.sampler()]
    } else {
        samplers.to_vec()
    };
    base.validate()?;
    let env = base.environment.build()?;
    let mut rows = Vec::new();
    for &m in batch_sizes {
        for &sampler in &samplers {
            let p = VrtdParams {
                batch_size: m,
                ..params.clone()
            };
            let algorithm = match sampler {
                Sampler::Iid => AlgorithmSpec::VrtdIid(p),
                Sampler::Markov => AlgorithmSpec::VrtdMarkov(p),
            };
            let spec = ExperimentSpec {
                algorithm,
                ..base.clone()
            };
            log::info!("sweep: M = {m}, sampler = {}", sampler.name());
            let result = run_experiment_on(&spec, &env)?;
            rows.push(SweepRow {
                batch_size: m,
                algorithm: spec.algorithm.name(),
                sampler,
                tail_mean_error: result.tail_mean_error,
                std_error: result.tail_std_error,
                result,
            });
        }
    }
    let paired = batch_sizes
        .iter()
        .filter_map(|&m| {
            let find = |s: Sampler| rows.iter().find(|r| r.batch_size == m && r.sampler == s);
            let (i, k) = (find(Sampler::Iid)?, find(Sampler::Markov)?);
            let slack = 2.0 * (i.std_error.powi(2) + k.std_error.powi(2)).sqrt();
            Some(PairedRow {
                batch_size: m,
                iid: i.tail_mean_error,
                iid_std_error: i.std_error,
                markov: k.tail_mean_error,
                markov_std_error: k.std_error,
                iid_not_worse: i.tail_mean_error <= k.tail_mean_error + slack,
            })
        })
        .collect();
    Ok(SweepResult { rows, paired })
}
