//! Discrete inf-sup constants of `∂t`, `C = ∂t + A_a` and `B` for both test-space
//! options, measured against a truth space, plus the one-dimensional temporal factor.
//!
//! The refined test space keeps `γ^C` bounded away from zero uniformly in `ε`; the
//! same-mesh option does not.
//!
//! ```text
//! cargo run --release --example inf_sup
//! ```

use spacetime_mr::diagnostics::{inf_sup, time_factor_dyadic, InfSupKind, TruthSpace};
use spacetime_mr::experiment::Preset;
use spacetime_mr::solver::{test_space, trial_space, TestOption};

fn main() -> spacetime_mr::Result<()> {
    println!("temporal factor, C0(h) against C0(h/2):");
    for n in [4, 8, 16, 32] {
        println!("  h = 1/{n:<3} {:.6}   (lower bound sqrt(3/4) = {:.6})", time_factor_dyadic(n)?, 0.75f64.sqrt());
    }
    let n = 8;
    println!("\nsmooth preset, h = 1/{n}, truth space refined once:");
    println!("{:>8} {:>6} {:>12} {:>12} {:>12}", "eps", "option", "gamma_dt", "gamma_C", "gamma_B");
    for eps in [1.0, 1e-3, 1e-6] {
        let p = Preset::Smooth.problem(eps, None)?;
        let x = trial_space(&p, n)?;
        let truth = TruthSpace::new(&p, n, 1)?;
        for option in [TestOption::I, TestOption::Ii] {
            let y = test_space(&p, n, option)?;
            let g = |k| inf_sup(k, &x, &y, &truth, &p);
            println!(
                "{eps:>8.0e} {:>6} {:>12.6} {:>12.6} {:>12.6}",
                option.label(),
                g(InfSupKind::Dt)?,
                g(InfSupKind::C)?,
                g(InfSupKind::B)?
            );
        }
    }
    Ok(())
}
