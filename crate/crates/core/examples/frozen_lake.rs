//! VRTD with Markovian samples on the randomized 4x4 Frozen Lake chain.

use vrtd::experiments::{
    frozen_lake_env, run_experiment_on, AlgorithmSpec, EnvironmentSpec, ExperimentSpec, VrtdParams,
    FROZEN_LAKE_GAMMA, FROZEN_LAKE_MAP,
};

fn main() -> vrtd::Result<()> {
    let env = frozen_lake_env(0, FROZEN_LAKE_GAMMA)?;
    for line in FROZEN_LAKE_MAP {
        println!("{line}");
    }
    println!("rewarded states: {:?}", (0..16).filter(|&s| env.mdp.expected_reward()[s] > 0.0).collect::<Vec<_>>());
    println!("lambda_A {:.4e}, rho {:.4}, |theta*| {:.4}", env.model.lambda_a, env.model.mix.rho, env.model.theta_star.norm());

    for m in [10, 100, 1000] {
        let spec = ExperimentSpec {
            environment: EnvironmentSpec::FrozenLake { seed: 0, gamma: FROZEN_LAKE_GAMMA },
            algorithm: AlgorithmSpec::VrtdMarkov(VrtdParams {
                alpha: 0.1,
                batch_size: m,
                epochs: None,
                budget: Some(200_000),
                radius: None,
                burn_in: 0,
            }),
            n_runs: 20,
            tail_window: 10_000,
            seed: 0,
            checkpoint_every: None,
            theta0: None,
        };
        let r = run_experiment_on(&spec, &env)?;
        println!("M = {m:>4}: tail error {:.4e} ± {:.1e}", r.tail_mean_error, r.tail_std_error);
    }
    Ok(())
}
