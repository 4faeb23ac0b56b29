//! Batch bias of trajectory segments: Monte Carlo, exact value and bound.

use vrtd::experiments::random_mdp_env;
use vrtd::metrics::{bias_estimate, bias_exact, BiasSettings, SegmentStart};
use vrtd::theory::{lemma1_bias_bound, ProblemConstants};

fn main() -> vrtd::Result<()> {
    let env = random_mdp_env(1)?;
    let p = ProblemConstants::from(&env.model);
    let radius = 2.0 * env.model.theta_star.norm();
    // A unit step away from the fixed point along the first axis.
    let mut theta = env.model.theta_star_slice().to_vec();
    theta[0] += 1.0;
    for start in [SegmentStart::State(0), SegmentStart::Stationary, SegmentStart::Iid] {
        for m in [10, 100, 1000] {
            let settings = BiasSettings { batch: m, trials: 10_000, seed: 1, start };
            let est = bias_estimate(&env.model, &env.mdp, &env.mu, &env.features, &theta, settings)?;
            let exact = bias_exact(&env.model, &env.mdp, &env.mu, &env.features, &theta, m, start)?;
            let bound = lemma1_bias_bound(&p, 1.0, m as u64, radius);
            println!(
                "{start:?} M={m:>4}: estimate {:>11.4e} ± {:.1e}, exact {exact:>11.4e}, bound {bound:.4e}",
                est.mean, est.std_error
            );
        }
    }
    Ok(())
}
