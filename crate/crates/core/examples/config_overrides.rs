//! Loads an experiment from JSON text plus command-line style overrides.

use vrtd::config::{apply_override, from_document, parse_document};
use vrtd::experiments::{run_experiment, ExperimentSpec};

fn main() -> vrtd::Result<()> {
    let mut doc = parse_document(
        r#"{"environment": {"kind": "random_mdp", "seed": 1},
            "algorithm": {"kind": "vrtd_markov", "alpha": 0.1, "batch_size": 50, "budget": 100000},
            "n_runs": 10}"#,
    )?;
    for o in ["algorithm.batch_size=200", "seed=42", "tail_window=5000"] {
        apply_override(&mut doc, o)?;
    }
    let spec: ExperimentSpec = from_document(doc)?;
    let r = run_experiment(&spec)?;
    println!("M = 200, seed 42: tail error {:.4e} ± {:.1e}", r.tail_mean_error, r.tail_std_error);

    let mut bad = parse_document(r#"{"environment": {"kind": "random_mdp", "seed": 1}}"#)?;
    apply_override(&mut bad, "algorithm.kind=td")?;
    match from_document::<ExperimentSpec>(bad) {
        Err(e) => println!("rejected as expected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
