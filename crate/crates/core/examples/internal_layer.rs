//! Discontinuous forcing `1_{x>t}` with a Neumann outflow: the solution develops an
//! internal layer along the diagonal. Prints errors for both test-space options and
//! writes a 129×129 heightfield of the finest Option (ii) solution.
//!
//! ```text
//! cargo run --release --example internal_layer [out.csv]
//! ```

use std::path::PathBuf;

use spacetime_mr::experiment::{denominator, solve_cell, write_heightfield, Cell, Preset, RunConfig};
use spacetime_mr::solver::TestOption;

fn main() -> spacetime_mr::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("internal_layer.csv"), PathBuf::from);
    let config = RunConfig::default();
    let eps = 1e-3;
    let den = denominator(Preset::InternalLayer, eps, &config)?;
    let mut last = None;
    for option in [TestOption::I, TestOption::Ii] {
        for n in [8, 16, 32, 64] {
            let sol = solve_cell(Cell { preset: Preset::InternalLayer, option, epsilon: eps, n }, &config, den)?;
            println!("option {:>2} h = 1/{n:<3} relative error {:.4e}", option.label(), sol.row.relative_error);
            last = Some(sol);
        }
    }
    let sol = last.expect("at least one cell");
    write_heightfield(&sol.system.trial, &sol.coefficients, &out)?;
    println!("heightfield: {}", out.display());
    Ok(())
}
