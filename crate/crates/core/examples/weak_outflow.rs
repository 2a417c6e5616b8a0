//! Imposing the outflow condition through the penalty `ε‖w(·,1)‖²` instead of
//! essentially: compares strong and weak variants of the boundary-layer problem at
//! `ε = 1e-6` and samples the outflow trace of both solutions.
//!
//! ```text
//! cargo run --release --example weak_outflow
//! ```

use spacetime_mr::experiment::{denominator, solve_cell, Cell, Preset, RunConfig};
use spacetime_mr::solver::TestOption;

fn main() -> spacetime_mr::Result<()> {
    let config = RunConfig::default();
    let eps = 1e-6;
    for preset in [Preset::BoundaryLayer, Preset::BoundaryLayerWeak] {
        let den = denominator(preset, eps, &config)?;
        println!("{}", preset.label());
        for n in [8, 16, 32, 64] {
            let sol = solve_cell(Cell { preset, option: TestOption::Ii, epsilon: eps, n }, &config, den)?;
            let x = &sol.system.trial;
            // near x = 1 the transported profile sin(π(x − t))e^{−t} is what we hope to see
            let probe: Vec<String> = [0.25, 0.5, 0.75]
                .iter()
                .map(|&t| format!("{:+.3}", x.evaluate(&sol.coefficients, t, 1.0 - 1.0 / n as f64).unwrap()))
                .collect();
            println!(
                "  h = 1/{n:<3} relative error {:.4e}  w(t, 1-h) at t = 1/4, 1/2, 3/4: {}",
                sol.row.relative_error,
                probe.join(" ")
            );
        }
    }
    Ok(())
}
