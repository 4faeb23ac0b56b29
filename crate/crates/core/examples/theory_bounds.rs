//! Convergence constants and complexity schedules for one chain.

use vrtd::experiments::random_mdp_env;
use vrtd::theory::{corollary_schedule, theorem1_constants, ProblemConstants, ScheduleVariant, TdConstants};

fn main() -> vrtd::Result<()> {
    let env = random_mdp_env(1)?;
    let p = ProblemConstants::from(&env.model);
    let norm = env.model.theta_star.norm();
    let radius = 2.0 * norm;

    for (alpha, m) in [(1e-3, 100_000), (1e-2, 100_000), (7e-4, 60_000)] {
        let k = theorem1_constants(alpha, m, &env.model, radius)?;
        let broken: Vec<&str> = k.violated().iter().map(|c| c.name.as_str()).collect();
        println!("iid alpha={alpha:e} M={m}: C1={:.4} floor={:.4e} violated={broken:?}", k.c1, k.error_floor);
    }
    for eps in [1e-1, 1e-2, 1e-3] {
        for v in ScheduleVariant::ALL {
            let s = corollary_schedule(eps, v, &p, radius, norm * norm, TdConstants::default())?;
            println!(
                "eps={eps:e} {:<12} alpha={:.3e} M={:>12} iterations={:>10} total={:.3e}",
                v.name(),
                s.alpha,
                s.batch_size.map_or("-".into(), |m| m.to_string()),
                s.iterations,
                s.total_pseudo_gradients as f64
            );
        }
    }
    Ok(())
}
