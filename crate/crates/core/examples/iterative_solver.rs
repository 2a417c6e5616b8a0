//! Preconditioned CG on the normal equations next to the block-tridiagonal direct
//! solver. The X-norm preconditioner keeps iteration counts flat in `h` for moderate
//! `ε`; for small `ε` the direct solver is the robust choice.
//!
//! ```text
//! cargo run --release --example iterative_solver
//! ```

use spacetime_mr::experiment::Preset;
use spacetime_mr::linops::norm;
use spacetime_mr::solver::{build_system, solve_mr, test_space, trial_space, SolverMethod, SolverOptions, TestOption};

fn main() -> spacetime_mr::Result<()> {
    println!("{:>6} {:>6} {:>6} {:>12} {:>12}", "eps", "h", "iters", "cg time", "|cg - lu|");
    for eps in [1.0, 1e-1, 1e-2] {
        for n in [8, 16, 32, 64] {
            let p = Preset::Smooth.problem(eps, None)?;
            let sys = build_system(&p, &trial_space(&p, n)?, &test_space(&p, n, TestOption::Ii)?)?;
            let direct = solve_mr(&sys, &SolverOptions::default())?;
            let cg_opts = SolverOptions { method: SolverMethod::Cg, tol: 1e-10, max_iter: Some(2000) };
            match solve_mr(&sys, &cg_opts) {
                Ok(cg) => {
                    let d: Vec<f64> = cg.coefficients.iter().zip(&direct.coefficients).map(|(a, b)| a - b).collect();
                    println!(
                        "{eps:>6.0e} {:>6} {:>6} {:>11.3}s {:>12.2e}",
                        format!("1/{n}"),
                        cg.iterations,
                        cg.wall_time,
                        norm(&d) / norm(&direct.coefficients)
                    );
                }
                Err(e) => println!("{eps:>6.0e} {:>6} {e}", format!("1/{n}")),
            }
        }
    }
    Ok(())
}
