//! NEU from the exact model and from held-out samples along a TD run.

use vrtd::algorithms::{vanilla_td, IidSource, StepSchedule, TdConfig};
use vrtd::experiments::random_mdp_env;
use vrtd::mdp::sample_iid;
use vrtd::metrics::{neu_exact, neu_sampled};
use vrtd::rng::{stream, Lane};

fn main() -> vrtd::Result<()> {
    let env = random_mdp_env(1)?;
    let mut rng = stream(0, 0, Lane::Evaluation);
    let test: Vec<_> = (0..1000).map(|_| sample_iid(&env.mdp, &env.mu, &mut rng)).collect();
    let config = TdConfig {
        schedule: StepSchedule::constant(0.05),
        steps: 100_000,
        checkpoint_every: 20_000,
        tail_window: 1000,
        radius: None,
        theta0: None,
    };
    let mut source = IidSource::new(&env.mdp, &env.mu, stream(0, 0, Lane::Samples));
    let trace = vanilla_td(&env.model, &env.features, &mut source, &config)?;
    for c in &trace.checkpoints {
        let sampled = neu_sampled(&env.features, env.mdp.gamma(), &c.theta, &test)?;
        println!(
            "step {:>6}: squared error {:.4e}, NEU exact {:.4e}, NEU on 1000 samples {:.4e}",
            c.pseudo_gradients,
            c.squared_error,
            neu_exact(&env.model, &c.theta),
            sampled
        );
    }
    Ok(())
}
