//! Folds a two-action policy into a chain, attaches features and solves it.

use vrtd::experiments::Environment;
use vrtd::model::normalize_features;
use vrtd::ControlledMdp;

fn main() -> vrtd::Result<()> {
    // Three states on a ring; action 0 stays, action 1 moves clockwise.
    let stay = |s: usize| (0..3).map(|t| if t == s { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let step = |s: usize| (0..3).map(|t| if t == (s + 1) % 3 { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let kernel = (0..3).map(|s| vec![stay(s), step(s)]).collect();
    // Moving out of state 2 pays 1.
    let reward = (0..3)
        .map(|s| vec![vec![0.0; 3], (0..3).map(|_| if s == 2 { 1.0 } else { 0.0 }).collect()])
        .collect();
    let policy = vec![vec![0.3, 0.7]; 3];
    let cmdp = ControlledMdp::new(kernel, reward, policy, 0.9, None)?;
    let mdp = cmdp.fold_policy()?;
    println!("folded kernel row 0: {:?}", mdp.row(0));
    println!("expected rewards:    {:?}", mdp.expected_reward());

    let features = normalize_features(vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]])?;
    let env = Environment::new(mdp, features)?;
    println!("stationary mu:       {:?}", env.mu.probs());
    println!("theta*:              {:?}", env.model.theta_star.as_slice());
    println!("lambda_A:            {:.6}", env.model.lambda_a);
    Ok(())
}
