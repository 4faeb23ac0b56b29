//! Tail error against batch size for both samplers on one shared chain.

use vrtd::experiments::{compare_batch_sizes, AlgorithmSpec, EnvironmentSpec, ExperimentSpec, Sampler, VrtdParams};

fn main() -> vrtd::Result<()> {
    let base = ExperimentSpec {
        environment: EnvironmentSpec::RandomMdp { seed: 1 },
        algorithm: AlgorithmSpec::VrtdIid(VrtdParams {
            alpha: 0.1,
            batch_size: 1,
            epochs: None,
            budget: Some(200_000),
            radius: None,
            burn_in: 0,
        }),
        n_runs: 20,
        tail_window: 10_000,
        seed: 1,
        checkpoint_every: None,
        theta0: None,
    };
    let sweep = compare_batch_sizes(&base, &[1, 50, 500, 2000], &[Sampler::Iid, Sampler::Markov])?;
    println!("{:>6} {:>12} {:>12}", "M", "iid", "markov");
    for p in &sweep.paired {
        println!("{:>6} {:>12.4e} {:>12.4e}", p.batch_size, p.iid, p.markov);
    }
    Ok(())
}
