//! Boundary layer at the outflow with strong Dirichlet conditions: for small `ε` the
//! unresolved layer's error is spread along the streamlines and refinement stalls.
//!
//! ```text
//! cargo run --release --example boundary_layer
//! ```

use spacetime_mr::experiment::{run, Preset, RunConfig};
use spacetime_mr::solver::TestOption;

fn main() -> spacetime_mr::Result<()> {
    let config = RunConfig {
        presets: vec![Preset::BoundaryLayer],
        options: vec![TestOption::Ii],
        epsilons: vec![1e-1, 1e-3, 1e-6],
        mesh_cells: vec![8, 16, 32, 64],
        ..RunConfig::default()
    };
    let rows = run(&config)?;
    println!("{:>8} {:>8} {:>14}", "eps", "h", "rel. error");
    for r in &rows {
        println!("{:>8.0e} {:>8} {:>14.6e}", r.epsilon, format!("1/{}", (1.0 / r.h).round()), r.relative_error);
    }
    Ok(())
}
