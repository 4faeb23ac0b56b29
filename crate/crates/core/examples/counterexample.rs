//! Conditional batch moments that break the i.i.d. variance argument.

use vrtd::theory::counterexample_eval;

fn main() {
    print!("{}", counterexample_eval(1.0).report());
    for delta in [0.0, 0.5, -2.0] {
        let c = counterexample_eval(delta);
        println!("delta {delta:>4}: lhs {:.6} rhs {} violated {}", c.lhs, c.rhs, c.violated);
    }
}
