#![allow(dead_code)]

use rand::Rng;
use vrtd::experiments::Environment;
use vrtd::model::normalize_features;
use vrtd::rng::{stream, Lane};
use vrtd::Mdp;

/// A random dense chain with `n ≤ 10` states and up to four features,
/// redrawn until the model is well posed.
pub fn small_env(rng: &mut impl Rng) -> Environment {
    loop {
        let n = rng.random_range(2..=10);
        let d = rng.random_range(1..=n.min(4));
        let kernel: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let row: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let total: f64 = row.iter().sum();
                row.into_iter().map(|p| p / total).collect()
            })
            .collect();
        let reward: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gamma = rng.random_range(0.5..0.99);
        let phi: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let built = Mdp::new(kernel, reward, gamma, None)
            .and_then(|mdp| Ok((mdp, normalize_features(phi)?)))
            .and_then(|(mdp, f)| Environment::new(mdp, f));
        if let Ok(env) = built {
            return env;
        }
    }
}

pub fn small_env_from_seed(seed: u64) -> Environment {
    small_env(&mut stream(seed, 0, Lane::Environment))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
