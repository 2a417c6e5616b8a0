//! Energy norm `|||w|||² = ‖Bw‖²_{Y'} + β‖w(0)‖²` against the natural norm
//! `‖w‖²_X` on random trial functions, with the asymmetry-dependent bounds.
//!
//! ```text
//! cargo run --release --example norm_equivalence
//! ```

use spacetime_mr::assembly::{ForcingDescriptor, InitialDescriptor, ProblemSpec};
use spacetime_mr::diagnostics::{check_norm_equivalence, TruthSpace};
use spacetime_mr::solver::trial_space;
use spacetime_mr::spaces::BoundarySet;

fn main() -> spacetime_mr::Result<()> {
    let n = 8;
    println!("{:>6} {:>4} {:>4} {:>10} {:>22} {:>22} {:>6}", "eps", "e", "b", "alpha", "observed ratios", "bounds", "pass");
    for eps in [1.0, 1e-1, 1e-2] {
        for e in [0.0, 1.0] {
            for b in [0.0, 1.0] {
                let p = ProblemSpec::new(eps, b, e, BoundarySet::BOTH, None, ForcingDescriptor::Zero, InitialDescriptor::Zero)?;
                let c = check_norm_equivalence(&p, &trial_space(&p, n)?, &TruthSpace::new(&p, n, 1)?, 100, 1)?;
                println!(
                    "{eps:>6.0e} {e:>4} {b:>4} {:>10.4} {:>22} {:>22} {:>6}",
                    c.alpha,
                    format!("[{:.4}, {:.4}]", c.min_ratio, c.max_ratio),
                    format!("[{:.4}, {:.4}]", c.lower_bound, c.upper_bound),
                    c.passed
                );
            }
        }
    }
    Ok(())
}
