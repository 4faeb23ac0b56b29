//! Vanilla TD against both VRTD variants at the same pseudo-gradient budget.

use vrtd::algorithms::{StepSchedule, DEFAULT_TAIL_WINDOW};
use vrtd::experiments::{
    run_experiment, AlgorithmSpec, EnvironmentSpec, ExperimentSpec, Sampler, TdParams, VrtdParams,
};

fn main() -> vrtd::Result<()> {
    let budget = 200_000;
    let vrtd = |alpha, batch_size| VrtdParams { alpha, batch_size, epochs: None, budget: Some(budget), radius: None, burn_in: 0 };
    let algorithms = [
        AlgorithmSpec::Td(TdParams { schedule: StepSchedule::constant(0.05), steps: budget, sampler: Sampler::Iid, radius: None }),
        AlgorithmSpec::Td(TdParams { schedule: StepSchedule::constant(0.05), steps: budget, sampler: Sampler::Markov, radius: None }),
        AlgorithmSpec::VrtdIid(vrtd(0.1, 500)),
        AlgorithmSpec::VrtdMarkov(vrtd(0.1, 500)),
    ];
    for algorithm in algorithms {
        let spec = ExperimentSpec {
            environment: EnvironmentSpec::RandomMdp { seed: 1 },
            algorithm,
            n_runs: 20,
            tail_window: DEFAULT_TAIL_WINDOW,
            seed: 3,
            checkpoint_every: None,
            theta0: None,
        };
        let r = run_experiment(&spec)?;
        println!(
            "{:<12} {:<7} tail error {:.4e} ± {:.1e}",
            spec.algorithm.name(),
            spec.algorithm.sampler().name(),
            r.tail_mean_error,
            r.tail_std_error
        );
    }
    Ok(())
}
