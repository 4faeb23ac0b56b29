//! Error metrics: squared distance to the fixed point, NEU, and the
//! Monte-Carlo bias of a batch pseudo-gradient.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{IidSource, TrajectorySource, TransitionSource};
use crate::error::{Error, Result};
use crate::mdp::{Mdp, StationaryDist, Transition};
use crate::model::{dot, mean_pseudo_gradient, FeatureMap, TdModel};
use crate::rng::{stream, Lane};

/// `‖θ − θ*‖₂²`.
pub fn squared_error(theta: &[f64], theta_star: &[f64]) -> Result<f64> {
    if theta.len() != theta_star.len() {
        return Err(Error::Dimension {
            expected: theta_star.len(),
            got: theta.len(),
        });
    }
    Ok(theta.iter().zip(theta_star).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Exact NEU, `‖E_μ[δφ]‖² = ‖Aθ + b‖²`.
pub fn neu_exact(model: &TdModel, theta: &[f64]) -> f64 {
    mean_pseudo_gradient(model, theta).norm_squared()
}

/// NEU estimated from a sample: `‖(1/N) Σ g_x(θ)‖²`.
pub fn neu_sampled(features: &FeatureMap, gamma: f64, theta: &[f64], transitions: &[Transition]) -> Result<f64> {
    if transitions.is_empty() {
        return Err(Error::invalid("transitions", "NEU needs at least one sample"));
    }
    let mean = average_pseudo_gradient(features, gamma, theta, transitions.iter().copied());
    Ok(dot(&mean, &mean))
}

fn average_pseudo_gradient(
    features: &FeatureMap,
    gamma: f64,
    theta: &[f64],
    transitions: impl ExactSizeIterator<Item = Transition>,
) -> Vec<f64> {
    let d = features.dim();
    let n = transitions.len();
    let mut sum = vec![0.0; d];
    let mut g = vec![0.0; d];
    for x in transitions {
        features.pseudo_gradient_into(&x, gamma, theta, &mut g);
        sum.iter_mut().zip(&g).for_each(|(s, gi)| *s += gi);
    }
    sum.iter_mut().for_each(|s| *s /= n as f64);
    sum
}

/// Batch pseudo-gradient `g_M(θ) = (1/M) Σ g_{x_i}(θ)` over the next `batch`
/// transitions of `source`.
pub fn batch_pseudo_gradient(
    features: &FeatureMap,
    gamma: f64,
    theta: &[f64],
    source: &mut impl TransitionSource,
    batch: usize,
) -> Vec<f64> {
    average_pseudo_gradient(features, gamma, theta, (0..batch).map(|_| source.next_transition()))
}

/// Where each bias trial's batch comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "state")]
pub enum SegmentStart {
    /// Trajectory segment whose first state is drawn from `μ`.
    Stationary,
    /// Trajectory segment started from a fixed state.
    State(usize),
    /// Independent draws from `μ` instead of a trajectory.
    Iid,
}

/// Monte-Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Settings for [`bias_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct BiasSettings {
    pub batch: usize,
    pub trials: usize,
    pub seed: u64,
    pub start: SegmentStart,
}

/// Estimates `E[(θ − θ*)ᵀ(g_M(θ) − g(θ))]` over fresh length-`M` segments.
///
/// Trials run in parallel on per-trial streams and are reduced in trial
/// order, so the result does not depend on the thread count.
pub fn bias_estimate(
    model: &TdModel,
    mdp: &Mdp,
    mu: &StationaryDist,
    features: &FeatureMap,
    theta: &[f64],
    settings: BiasSettings,
) -> Result<BiasEstimate> {
    if settings.trials == 0 {
        return Err(Error::invalid("n_trials", "must be at least 1"));
    }
    if settings.batch == 0 {
        return Err(Error::invalid("batch", "must be at least 1"));
    }
    if let SegmentStart::State(s) = settings.start {
        if s >= mdp.n_states() {
            return Err(Error::invalid("start", format!("{s} is not a state")));
        }
    }
    let diff: Vec<f64> = theta.iter().zip(model.theta_star_slice()).map(|(a, b)| a - b).collect();
    let mean_g = mean_pseudo_gradient(model, theta).0;
    let gamma = model.gamma;

    let values: Vec<f64> = (0..settings.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(settings.seed, trial as u64, Lane::Samples);
            let g_m = match settings.start {
                SegmentStart::Iid => {
                    let mut src = IidSource::new(mdp, mu, &mut rng);
                    batch_pseudo_gradient(features, gamma, theta, &mut src, settings.batch)
                }
                SegmentStart::Stationary | SegmentStart::State(_) => {
                    let start = match settings.start {
                        SegmentStart::State(s) => s,
                        _ => mu.sample(&mut rng),
                    };
                    let mut src = TrajectorySource::new(mdp, start, &mut rng);
                    batch_pseudo_gradient(features, gamma, theta, &mut src, settings.batch)
                }
            };
            diff.iter().zip(g_m.iter().zip(&mean_g)).map(|(u, (a, b))| u * (a - b)).sum()
        })
        .collect();

    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(BiasEstimate {
        mean,
        std_error: (var / n).sqrt(),
        trials: values.len(),
    })
}

/// Exact value of the quantity [`bias_estimate`] samples, obtained by
/// propagating the start distribution through the kernel.
///
/// For [`SegmentStart::Stationary`] and [`SegmentStart::Iid`] every sample is
/// marginally `μ`-distributed and the result is zero up to rounding.
pub fn bias_exact(
    model: &TdModel,
    mdp: &Mdp,
    mu: &StationaryDist,
    features: &FeatureMap,
    theta: &[f64],
    batch: usize,
    start: SegmentStart,
) -> Result<f64> {
    if batch == 0 {
        return Err(Error::invalid("batch", "must be at least 1"));
    }
    let n = mdp.n_states();
    let d = features.dim();
    let gamma = model.gamma;
    // E[g_x(θ) | s] for every state.
    let per_state: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let next: f64 = mdp.row(s).iter().enumerate().map(|(t, p)| p * dot(features.row(t), theta)).sum();
            let delta = mdp.expected_reward()[s] + gamma * next - dot(features.row(s), theta);
            features.row(s).iter().map(|f| f * delta).collect()
        })
        .collect();
    let mut dist = match start {
        SegmentStart::State(s) if s < n => {
            let mut e = vec![0.0; n];
            e[s] = 1.0;
            e
        }
        SegmentStart::State(s) => return Err(Error::invalid("start", format!("{s} is not a state"))),
        SegmentStart::Stationary | SegmentStart::Iid => mu.probs().to_vec(),
    };
    let mut occupancy = vec![0.0; n];
    for _ in 0..batch {
        occupancy.iter_mut().zip(&dist).for_each(|(o, p)| *o += p);
        let mut next = vec![0.0; n];
        for (s, p) in dist.iter().enumerate() {
            if *p != 0.0 {
                next.iter_mut().zip(mdp.row(s)).for_each(|(x, k)| *x += p * k);
            }
        }
        dist = next;
    }
    let mut g_m = vec![0.0; d];
    for (s, w) in occupancy.iter().enumerate() {
        g_m.iter_mut().zip(&per_state[s]).for_each(|(g, v)| *g += w / batch as f64 * v);
    }
    let g = mean_pseudo_gradient(model, theta).0;
    Ok(theta
        .iter()
        .zip(model.theta_star_slice())
        .zip(g_m.iter().zip(&g))
        .map(|((t, ts), (a, b))| (t - ts) * (a - b))
        .sum())
}
