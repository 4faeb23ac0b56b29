//! Vanilla TD and the two variance-reduced TD procedures.
//!
//! Cost is measured in pseudo-gradient computations. Vanilla TD spends one
//! per step. Both VRTD variants spend `M` on the epoch's batch pass and one
//! per inner update, i.e. `2M` per epoch; the i.i.d. variant additionally
//! re-evaluates the anchor on each fresh sample, which is tracked separately
//! in [`RunTrace::raw_evaluations`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{sample_iid, sample_trajectory_step, Mdp, StationaryDist, Transition};
use crate::model::{dot, FeatureMap, TdModel};
use crate::rng::{stream, ChaCha8Rng, Lane};

/// Iterates above this norm abort an unprojected run.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// Default number of trailing inner iterations averaged into the tail error.
pub const DEFAULT_TAIL_WINDOW: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    InverseT,
}

/// Step sizes for vanilla TD: `α_t = α₀` or `α_t = α₀ / (t + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSchedule {
    pub kind: ScheduleKind,
    pub alpha0: f64,
}

impl StepSchedule {
    pub fn constant(alpha0: f64) -> Self {
        Self {
            kind: ScheduleKind::Constant,
            alpha0,
        }
    }

    pub fn inverse_t(alpha0: f64) -> Self {
        Self {
            kind: ScheduleKind::InverseT,
            alpha0,
        }
    }

    #[inline]
    pub fn alpha(&self, t: u64) -> f64 {
        match self.kind {
            ScheduleKind::Constant => self.alpha0,
            ScheduleKind::InverseT => self.alpha0 / (t + 1) as f64,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha0 >= 0.0 && self.alpha0.is_finite()) {
            return Err(Error::invalid("schedule.alpha0", format!("must be finite and non-negative, got {}", self.alpha0)));
        }
        Ok(())
    }
}

/// Settings for a vanilla TD run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdConfig {
    pub schedule: StepSchedule,
    pub steps: u64,
    pub checkpoint_every: u64,
    #[serde(default = "default_tail_window")]
    pub tail_window: u64,
    /// Projection radius; `None` runs the unprojected update.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub theta0: Option<Vec<f64>>,
}

fn default_tail_window() -> u64 {
    DEFAULT_TAIL_WINDOW
}

/// Settings for either VRTD variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VrtdConfig {
    pub alpha: f64,
    pub batch_size: u64,
    pub epochs: u64,
    /// Projection radius `R_θ`; required by the Markovian variant, ignored by
    /// the i.i.d. one.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Stream index within `seed`; experiments use the run number.
    #[serde(default)]
    pub stream: u64,
    pub checkpoint_every: u64,
    #[serde(default = "default_tail_window")]
    pub tail_window: u64,
    /// Initial `θ̃₀`; zero when absent.
    #[serde(default)]
    pub theta0: Option<Vec<f64>>,
    /// Trajectory steps discarded before the first epoch (Markovian only).
    #[serde(default)]
    pub burn_in: u64,
}

impl VrtdConfig {
    pub fn new(alpha: f64, batch_size: u64, epochs: u64) -> Self {
        Self {
            alpha,
            batch_size,
            epochs,
            radius: None,
            seed: 0,
            stream: 0,
            checkpoint_every: 2 * batch_size,
            tail_window: DEFAULT_TAIL_WINDOW,
            theta0: None,
            burn_in: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs", "must be positive"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::invalid("checkpoint_every", "must be positive"));
        }
        if self.tail_window == 0 {
            return Err(Error::invalid("tail_window", "must be positive"));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("radius", format!("must be positive and finite, got {r}")));
            }
        }
        Ok(())
    }

    /// Pseudo-gradient computations the run will perform.
    pub fn total_pseudo_gradients(&self) -> u64 {
        2 * self.batch_size * self.epochs
    }
}

/// Parameter snapshot taken at a fixed pseudo-gradient count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub pseudo_gradients: u64,
    pub theta: Vec<f64>,
    pub squared_error: f64,
}

/// Everything recorded during one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub final_theta: Vec<f64>,
    /// Headline cost: one per TD step, `2M` per VRTD epoch.
    pub total_pseudo_gradients: u64,
    /// Every `g_x` evaluation actually performed.
    pub raw_evaluations: u64,
    /// Parameter updates (TD steps or VRTD inner iterations).
    pub iterations: u64,
    /// Mean of `‖θ − θ*‖²` over the last `tail_len` parameter updates.
    pub tail_mean_error: f64,
    pub tail_len: u64,
    pub warnings: Vec<String>,
}

/// Anything that yields a stream of transitions.
pub trait TransitionSource {
    fn next_transition(&mut self) -> Transition;
}

impl<F: FnMut() -> Transition> TransitionSource for F {
    fn next_transition(&mut self) -> Transition {
        self()
    }
}

/// Independent draws `s ~ μ`, `s' ~ p(·|s)`.
#[derive(Debug)]
pub struct IidSource<'a, R> {
    mdp: &'a Mdp,
    mu: &'a StationaryDist,
    rng: R,
}

impl<'a, R: Rng> IidSource<'a, R> {
    pub fn new(mdp: &'a Mdp, mu: &'a StationaryDist, rng: R) -> Self {
        Self { mdp, mu, rng }
    }
}

impl<R: Rng> TransitionSource for IidSource<'_, R> {
    fn next_transition(&mut self) -> Transition {
        sample_iid(self.mdp, self.mu, &mut self.rng)
    }
}

/// Consecutive transitions of one trajectory.
#[derive(Debug)]
pub struct TrajectorySource<'a, R> {
    mdp: &'a Mdp,
    state: usize,
    rng: R,
}

impl<'a, R: Rng> TrajectorySource<'a, R> {
    pub fn new(mdp: &'a Mdp, start: usize, rng: R) -> Self {
        Self { mdp, state: start, rng }
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn skip(&mut self, steps: u64) {
        for _ in 0..steps {
            self.next_transition();
        }
    }
}

impl<R: Rng> TransitionSource for TrajectorySource<'_, R> {
    fn next_transition(&mut self) -> Transition {
        let (x, next) = sample_trajectory_step(self.mdp, self.state, &mut self.rng);
        self.state = next;
        x
    }
}

/// Replays a recorded list of transitions. Panics when exhausted.
#[derive(Debug)]
pub struct ReplaySource<'a> {
    items: &'a [Transition],
    pos: usize,
}

impl<'a> ReplaySource<'a> {
    pub fn new(items: &'a [Transition]) -> Self {
        Self { items, pos: 0 }
    }
}

impl TransitionSource for ReplaySource<'_> {
    fn next_transition(&mut self) -> Transition {
        let x = *self
            .items
            .get(self.pos)
            .unwrap_or_else(|| panic!("replay exhausted after {} transitions", self.items.len()));
        self.pos += 1;
        x
    }
}

/// Euclidean projection onto the ball of radius `radius`.
pub fn project(theta: &[f64], radius: f64) -> Vec<f64> {
    let mut out = theta.to_vec();
    project_in_place(&mut out, radius);
    out
}

#[inline]
pub fn project_in_place(theta: &mut [f64], radius: f64) {
    let norm = dot(theta, theta).sqrt();
    if norm > radius {
        let scale = radius / norm;
        theta.iter_mut().for_each(|x| *x *= scale);
        // Rounding can leave the norm an ulp or two above the radius, which
        // would make a second projection move the point again.
        while dot(theta, theta).sqrt() > radius {
            theta.iter_mut().for_each(|x| *x *= 1.0 - f64::EPSILON);
        }
    }
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Records checkpoints on the grid `k · every` and the tail error.
struct Recorder<'a> {
    theta_star: &'a [f64],
    every: u64,
    next_mark: u64,
    checkpoints: Vec<Checkpoint>,
    tail_start: u64,
    tail_sum: f64,
    tail_len: u64,
}

impl<'a> Recorder<'a> {
    fn new(theta_star: &'a [f64], every: u64, total_iterations: u64, tail_window: u64) -> Self {
        Self {
            theta_star,
            every,
            next_mark: every,
            checkpoints: Vec::new(),
            tail_start: total_iterations.saturating_sub(tail_window),
            tail_sum: 0.0,
            tail_len: 0,
        }
    }

    /// The cost counter has reached `count` and the current parameter is `theta`.
    #[inline]
    fn reach(&mut self, count: u64, theta: &[f64]) {
        while self.next_mark <= count {
            self.checkpoints.push(Checkpoint {
                pseudo_gradients: self.next_mark,
                theta: theta.to_vec(),
                squared_error: squared_distance(theta, self.theta_star),
            });
            self.next_mark += self.every;
        }
    }

    /// Parameter update number `iteration` (0-based) produced `theta`.
    #[inline]
    fn iterate(&mut self, iteration: u64, theta: &[f64]) {
        if iteration >= self.tail_start {
            self.tail_sum += squared_distance(theta, self.theta_star);
            self.tail_len += 1;
        }
    }

    fn finish(self, final_theta: Vec<f64>, total: u64, raw: u64, iterations: u64, warnings: Vec<String>) -> RunTrace {
        RunTrace {
            checkpoints: self.checkpoints,
            final_theta,
            total_pseudo_gradients: total,
            raw_evaluations: raw,
            iterations,
            tail_mean_error: self.tail_sum / self.tail_len.max(1) as f64,
            tail_len: self.tail_len,
            warnings,
        }
    }
}

fn initial_theta(theta0: &Option<Vec<f64>>, d: usize) -> Result<Vec<f64>> {
    match theta0 {
        None => Ok(vec![0.0; d]),
        Some(t) if t.len() == d => Ok(t.clone()),
        Some(t) => Err(Error::Dimension { expected: d, got: t.len() }),
    }
}

fn check_divergence(theta: &[f64], step: u64) -> Result<()> {
    let norm = dot(theta, theta).sqrt();
    if !(norm <= DIVERGENCE_NORM) {
        return Err(Error::Diverged { step, norm });
    }
    Ok(())
}

fn radius_warning(model: &TdModel, radius: f64) -> Option<String> {
    let norm = model.theta_star.norm();
    (radius < norm).then(|| {
        let msg = format!("projection radius {radius} is below ‖θ*‖ = {norm}; the fixed point is unreachable");
        log::warn!("{msg}");
        msg
    })
}

/// Vanilla TD: `θ_{t+1} = θ_t + α_t g_{x_t}(θ_t)`, optionally projected.
pub fn vanilla_td(
    model: &TdModel,
    features: &FeatureMap,
    source: &mut impl TransitionSource,
    config: &TdConfig,
) -> Result<RunTrace> {
    config.schedule.validate()?;
    if config.steps == 0 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    if config.checkpoint_every == 0 {
        return Err(Error::invalid("checkpoint_every", "must be positive"));
    }
    let d = features.dim();
    let gamma = model.gamma;
    let mut theta = initial_theta(&config.theta0, d)?;
    let mut warnings = Vec::new();
    if let Some(r) = config.radius {
        warnings.extend(radius_warning(model, r));
    }
    let mut rec = Recorder::new(model.theta_star_slice(), config.checkpoint_every, config.steps, config.tail_window);
    let mut g = vec![0.0; d];
    for t in 0..config.steps {
        let x = source.next_transition();
        features.pseudo_gradient_into(&x, gamma, &theta, &mut g);
        let alpha = config.schedule.alpha(t);
        for (th, gi) in theta.iter_mut().zip(&g) {
            *th += alpha * gi;
        }
        match config.radius {
            Some(r) => project_in_place(&mut theta, r),
            None => check_divergence(&theta, t + 1)?,
        }
        rec.iterate(t, &theta);
        rec.reach(t + 1, &theta);
    }
    Ok(rec.finish(theta, config.steps, config.steps, config.steps, warnings))
}

/// VRTD with i.i.d. samples: each epoch draws a fresh batch for the anchor
/// pseudo-gradient and a fresh sample for every inner update. No projection.
pub fn vrtd_iid(
    model: &TdModel,
    mdp: &Mdp,
    mu: &StationaryDist,
    features: &FeatureMap,
    config: &VrtdConfig,
) -> Result<RunTrace> {
    let mut source = IidSource::new(mdp, mu, stream(config.seed, config.stream, Lane::Samples));
    let mut rng = stream(config.seed, config.stream, Lane::Algorithm);
    vrtd_iid_with_source(model, features, config, &mut source, &mut rng)
}

/// [`vrtd_iid`] over an arbitrary sample source.
pub fn vrtd_iid_with_source(
    model: &TdModel,
    features: &FeatureMap,
    config: &VrtdConfig,
    source: &mut impl TransitionSource,
    rng: &mut ChaCha8Rng,
) -> Result<RunTrace> {
    config.validate()?;
    let d = features.dim();
    let gamma = model.gamma;
    let m_size = config.batch_size;
    let alpha = config.alpha;
    let mut anchor = initial_theta(&config.theta0, d)?;
    let mut theta = anchor.clone();
    let mut chosen = anchor.clone();
    let mut batch_mean = vec![0.0; d];
    let (mut g_cur, mut g_anchor) = (vec![0.0; d], vec![0.0; d]);
    let iterations = m_size * config.epochs;
    let mut rec = Recorder::new(model.theta_star_slice(), config.checkpoint_every, iterations, config.tail_window);
    let (mut count, mut raw, mut iteration) = (0u64, 0u64, 0u64);

    for _ in 0..config.epochs {
        batch_mean.iter_mut().for_each(|x| *x = 0.0);
        for _ in 0..m_size {
            let x = source.next_transition();
            features.pseudo_gradient_into(&x, gamma, &anchor, &mut g_anchor);
            batch_mean.iter_mut().zip(&g_anchor).for_each(|(s, g)| *s += g);
        }
        batch_mean.iter_mut().for_each(|s| *s /= m_size as f64);
        count += m_size;
        raw += m_size;
        rec.reach(count, &anchor);

        theta.copy_from_slice(&anchor);
        let pick = rng.random_range(1..=m_size);
        for t in 1..=m_size {
            let x = source.next_transition();
            features.pseudo_gradient_into(&x, gamma, &theta, &mut g_cur);
            features.pseudo_gradient_into(&x, gamma, &anchor, &mut g_anchor);
            for i in 0..d {
                theta[i] += alpha * ((g_cur[i] - g_anchor[i]) + batch_mean[i]);
            }
            count += 1;
            raw += 2;
            check_divergence(&theta, iteration + 1)?;
            rec.iterate(iteration, &theta);
            rec.reach(count, &theta);
            iteration += 1;
            if t == pick {
                chosen.copy_from_slice(&theta);
            }
        }
        anchor.copy_from_slice(&chosen);
    }
    Ok(rec.finish(anchor, count, raw, iterations, Vec::new()))
}

/// VRTD with Markovian samples: epoch `m` consumes the trajectory segment
/// `(m−1)M .. mM−1`; inner updates resample that segment with replacement
/// and project onto the `R_θ` ball.
pub fn vrtd_markov(
    model: &TdModel,
    mdp: &Mdp,
    features: &FeatureMap,
    config: &VrtdConfig,
    start_state: usize,
) -> Result<RunTrace> {
    if start_state >= mdp.n_states() {
        return Err(Error::invalid("start_state", format!("{start_state} is not a state")));
    }
    let mut source = TrajectorySource::new(mdp, start_state, stream(config.seed, config.stream, Lane::Samples));
    source.skip(config.burn_in);
    let mut rng = stream(config.seed, config.stream, Lane::Algorithm);
    vrtd_markov_with_source(model, features, config, &mut source, &mut rng)
}

/// [`vrtd_markov`] over an arbitrary sample source (burn-in is the caller's
/// business here).
pub fn vrtd_markov_with_source(
    model: &TdModel,
    features: &FeatureMap,
    config: &VrtdConfig,
    source: &mut impl TransitionSource,
    rng: &mut ChaCha8Rng,
) -> Result<RunTrace> {
    config.validate()?;
    let radius = config
        .radius
        .ok_or_else(|| Error::invalid("radius", "the Markovian variant needs a projection radius"))?;
    let mut warnings = Vec::new();
    warnings.extend(radius_warning(model, radius));

    let d = features.dim();
    let gamma = model.gamma;
    let m_size = config.batch_size as usize;
    let alpha = config.alpha;
    let mut anchor = initial_theta(&config.theta0, d)?;
    project_in_place(&mut anchor, radius);
    let mut theta = anchor.clone();
    let mut chosen = anchor.clone();
    let mut batch_mean = vec![0.0; d];
    let mut g_cur = vec![0.0; d];
    let mut segment = Vec::with_capacity(m_size);
    // g_{x_i}(θ̃_{m−1}) for every sample of the segment, row-major.
    let mut cached = vec![0.0; m_size * d];
    let iterations = config.batch_size * config.epochs;
    let mut rec = Recorder::new(model.theta_star_slice(), config.checkpoint_every, iterations, config.tail_window);
    let (mut count, mut iteration) = (0u64, 0u64);

    for _ in 0..config.epochs {
        segment.clear();
        batch_mean.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..m_size {
            let x = source.next_transition();
            let slot = &mut cached[i * d..(i + 1) * d];
            features.pseudo_gradient_into(&x, gamma, &anchor, slot);
            batch_mean.iter_mut().zip(slot.iter()).for_each(|(s, g)| *s += g);
            segment.push(x);
        }
        batch_mean.iter_mut().for_each(|s| *s /= m_size as f64);
        count += m_size as u64;
        rec.reach(count, &anchor);

        theta.copy_from_slice(&anchor);
        let pick = rng.random_range(1..=m_size);
        for t in 1..=m_size {
            let j = rng.random_range(0..m_size);
            features.pseudo_gradient_into(&segment[j], gamma, &theta, &mut g_cur);
            let g_anchor = &cached[j * d..(j + 1) * d];
            for i in 0..d {
                theta[i] += alpha * ((g_cur[i] - g_anchor[i]) + batch_mean[i]);
            }
            project_in_place(&mut theta, radius);
            count += 1;
            rec.iterate(iteration, &theta);
            rec.reach(count, &theta);
            iteration += 1;
            if t == pick {
                chosen.copy_from_slice(&theta);
            }
        }
        anchor.copy_from_slice(&chosen);
    }
    Ok(rec.finish(anchor, count, count, iterations, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::stationary_distribution;

    fn scalar() -> (Mdp, StationaryDist, FeatureMap, TdModel) {
        let mdp = Mdp::new(vec![vec![1.0]], vec![1.0], 0.5, None).unwrap();
        let mu = stationary_distribution(&mdp).unwrap();
        let f = FeatureMap::new(vec![vec![1.0]]).unwrap();
        let m = TdModel::compute(&mdp, &mu, &f).unwrap();
        (mdp, mu, f, m)
    }

    fn td_config(alpha: f64, steps: u64) -> TdConfig {
        TdConfig {
            schedule: StepSchedule::constant(alpha),
            steps,
            checkpoint_every: 1,
            tail_window: 10,
            radius: None,
            theta0: None,
        }
    }

    #[test]
    fn projection_examples() {
        let p = project(&[6.0, 8.0], 5.0);
        assert!((p[0] - 3.0).abs() < 1e-15 && (p[1] - 4.0).abs() < 1e-15);
        assert_eq!(project(&[1.0, 1.0], 5.0), vec![1.0, 1.0]);
        assert_eq!(project(&p, 5.0), p);
    }

    #[test]
    fn scalar_td_recursion() {
        let (mdp, mu, f, m) = scalar();
        let mut src = IidSource::new(&mdp, &mu, stream(0, 0, Lane::Samples));
        let trace = vanilla_td(&m, &f, &mut src, &td_config(0.5, 40)).unwrap();
        // θ ← θ + 0.5 (1 − 0.5 θ) = 0.75 θ + 0.5 from θ₀ = 0.
        let mut expected = 0.0;
        let mut prev_err = f64::INFINITY;
        for c in &trace.checkpoints {
            expected = 0.75 * expected + 0.5;
            assert!((c.theta[0] - expected).abs() < 1e-14);
            assert!(c.squared_error < prev_err);
            prev_err = c.squared_error;
        }
        assert_eq!(trace.checkpoints[0].theta, vec![0.5]);
        assert_eq!(trace.checkpoints[1].theta, vec![0.875]);
    }

    #[test]
    fn zero_step_freezes_and_fixed_point_is_stationary() {
        let (mdp, mu, f, m) = scalar();
        let mut src = IidSource::new(&mdp, &mu, stream(0, 0, Lane::Samples));
        let mut cfg = td_config(0.0, 5);
        cfg.theta0 = Some(vec![0.3]);
        let trace = vanilla_td(&m, &f, &mut src, &cfg).unwrap();
        assert!(trace.checkpoints.iter().all(|c| c.theta == vec![0.3]));

        let mut cfg = td_config(0.5, 5);
        cfg.theta0 = Some(vec![2.0]);
        let trace = vanilla_td(&m, &f, &mut src, &cfg).unwrap();
        assert!(trace.checkpoints.iter().all(|c| c.theta == vec![2.0]));
    }

    #[test]
    fn divergence_is_reported() {
        let (mdp, mu, f, m) = scalar();
        let mut src = IidSource::new(&mdp, &mu, stream(0, 0, Lane::Samples));
        // θ ← θ + 10 (1 − 0.5 θ) = −4 θ + 10 blows up.
        let err = vanilla_td(&m, &f, &mut src, &td_config(10.0, 100)).unwrap_err();
        assert!(matches!(err, Error::Diverged { step, .. } if step < 100));
    }

    #[test]
    fn iid_batch_of_one_is_a_td_step() {
        let (mdp, mu, f, m) = scalar();
        let mut cfg = VrtdConfig::new(0.5, 1, 6);
        cfg.checkpoint_every = 2;
        let trace = vrtd_iid(&m, &mdp, &mu, &f, &cfg).unwrap();
        let mut expected = 0.0;
        for c in &trace.checkpoints {
            expected = 0.75 * expected + 0.5;
            assert!((c.theta[0] - expected).abs() < 1e-14);
        }
        assert_eq!(trace.total_pseudo_gradients, 12);
        assert_eq!(trace.raw_evaluations, 18);
    }

    #[test]
    fn markov_requires_radius_and_warns_when_small() {
        let (mdp, _, f, m) = scalar();
        let cfg = VrtdConfig::new(0.1, 2, 2);
        assert!(vrtd_markov(&m, &mdp, &f, &cfg, 0).is_err());
        let mut cfg = cfg;
        cfg.radius = Some(1.0);
        let trace = vrtd_markov(&m, &mdp, &f, &cfg, 0).unwrap();
        assert_eq!(trace.warnings.len(), 1);
        assert!(trace.checkpoints.iter().all(|c| c.theta[0].abs() <= 1.0));
    }

    #[test]
    fn checkpoint_grid_and_counts() {
        let (mdp, mu, f, m) = scalar();
        let mut cfg = VrtdConfig::new(0.1, 50, 10);
        cfg.checkpoint_every = 30;
        cfg.radius = Some(10.0);
        for trace in [
            vrtd_iid(&m, &mdp, &mu, &f, &cfg).unwrap(),
            vrtd_markov(&m, &mdp, &f, &cfg, 0).unwrap(),
        ] {
            assert_eq!(trace.total_pseudo_gradients, 1000);
            assert_eq!(trace.checkpoints.len(), 1000 / 30);
            assert!(trace.checkpoints.iter().enumerate().all(|(k, c)| c.pseudo_gradients == 30 * (k as u64 + 1)));
            assert_eq!(trace.tail_len, 500);
        }
    }
}
