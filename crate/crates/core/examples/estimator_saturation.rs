//! How much the a posteriori estimator changes when its test space is refined beyond
//! the standard spatial `h/3` mesh.
//!
//! ```text
//! cargo run --release --example estimator_saturation
//! ```

use spacetime_mr::diagnostics::{estimator, Estimator};
use spacetime_mr::experiment::Preset;
use spacetime_mr::solver::{build_system, refined_test_space, solve_mr, test_space, trial_space, SolverOptions, TestOption};

fn main() -> spacetime_mr::Result<()> {
    println!("{:<16} {:>6} {:>6} {:>14} {:>14} {:>14} {:>9}", "preset", "eps", "h", "h/3", "h/9", "h/27", "change");
    for preset in [Preset::BoundaryLayer, Preset::Smooth, Preset::InternalLayer] {
        for eps in [1.0, 1e-3] {
            let p = preset.problem(eps, None)?;
            for n in [16, 32] {
                let sys = build_system(&p, &trial_space(&p, n)?, &test_space(&p, n, TestOption::Ii)?)?;
                let w = solve_mr(&sys, &SolverOptions::default())?.coefficients;
                let e3 = Estimator::standard(&sys)?.evaluate(&sys, &w);
                let e9 = estimator(&sys, &w, &refined_test_space(&p, n, 1, 9)?)?;
                let e27 = estimator(&sys, &w, &refined_test_space(&p, n, 1, 27)?)?;
                println!(
                    "{:<16} {eps:>6.0e} {:>6} {e3:>14.6e} {e9:>14.6e} {e27:>14.6e} {:>8.2}%",
                    preset.label(),
                    format!("1/{n}"),
                    100.0 * (e9 - e3) / e3
                );
            }
        }
    }
    Ok(())
}
