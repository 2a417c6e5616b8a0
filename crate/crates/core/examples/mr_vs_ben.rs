//! With the trial space contained in the test space, the minimal residual solution
//! and the Brezis–Ekeland–Nayroles saddle-point solution coincide.
//!
//! ```text
//! cargo run --release --example mr_vs_ben
//! ```

use spacetime_mr::experiment::Preset;
use spacetime_mr::linops::norm;
use spacetime_mr::solver::{build_system, solve_ben, solve_mr, test_space, trial_space, SolverOptions, TestOption};

fn main() -> spacetime_mr::Result<()> {
    for preset in [Preset::Smooth, Preset::InternalLayer, Preset::BoundaryLayer] {
        for eps in [1.0, 1e-3] {
            let p = preset.problem(eps, None)?;
            let n = 16;
            let sys = build_system(&p, &trial_space(&p, n)?, &test_space(&p, n, TestOption::I)?)?;
            let mr = solve_mr(&sys, &SolverOptions::default())?;
            let ben = solve_ben(&sys)?;
            let diff: Vec<f64> = mr.coefficients.iter().zip(&ben.coefficients).map(|(a, b)| a - b).collect();
            println!(
                "{:<16} eps = {eps:<6e} |w_MR - w_BEN| / |w_MR| = {:.2e}",
                preset.label(),
                norm(&diff) / norm(&mr.coefficients)
            );
        }
    }
    Ok(())
}
