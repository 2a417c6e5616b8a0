//! The asymmetry measure `α = ‖A_s^{-1/2} A_a A_s^{-1/2}‖` as a function of `ε`,
//! with and without reaction, and the resulting norm-equivalence constant.
//!
//! ```text
//! cargo run --release --example asymmetry
//! ```

use spacetime_mr::assembly::{ForcingDescriptor, InitialDescriptor, ProblemSpec};
use spacetime_mr::diagnostics::{alpha, norm_equivalence_bound, TruthSpace};
use spacetime_mr::spaces::BoundarySet;

fn main() -> spacetime_mr::Result<()> {
    println!("{:>8} {:>4} {:>14} {:>14} {:>14}", "eps", "e", "alpha", "alpha*eps", "bound");
    for e in [0.0, 1.0] {
        for eps in [1.0, 1e-1, 1e-2, 1e-3] {
            let p = ProblemSpec::new(eps, 1.0, e, BoundarySet::BOTH, None, ForcingDescriptor::Zero, InitialDescriptor::Zero)?;
            let a = alpha(&p, &TruthSpace::new(&p, 8, 1)?)?;
            println!("{eps:>8.0e} {e:>4} {a:>14.6e} {:>14.6e} {:>14.6e}", a * eps, norm_equivalence_bound(a));
        }
    }
    Ok(())
}
