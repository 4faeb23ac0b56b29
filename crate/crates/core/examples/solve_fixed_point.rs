//! Builds the 50-state random chain and prints its exact TD quantities.
//!
//! cargo run --example solve_fixed_point -- 7

use vrtd::experiments::random_mdp_env;

fn main() -> vrtd::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let env = random_mdp_env(seed)?;
    let m = &env.model;
    println!("environment     random_mdp seed {seed} ({})", env.fingerprint);
    println!("theta*          {:?}", m.theta_star.as_slice());
    println!("|theta*|        {:.6}", m.theta_star.norm());
    println!("lambda_A        {:.6e}", m.lambda_a);
    println!("rho, kappa      {:.6}, {:.6}", m.mix.rho, m.mix.kappa);
    println!("|A theta* + b|  {:.3e}", m.residual());
    println!("cond(A)         {:.3e}", m.condition);
    Ok(())
}
