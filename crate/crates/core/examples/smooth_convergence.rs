//! Convergence of the minimal residual method on the manufactured smooth problem.
//!
//! Solves with the refined (Option ii) test space for four diffusion rates and prints
//! the relative estimated error against `dim X`, with the fitted log-log slope.
//!
//! ```text
//! cargo run --release --example smooth_convergence [max_cells]
//! ```

use spacetime_mr::experiment::{loglog_slope, run, Preset, RunConfig};
use spacetime_mr::solver::TestOption;

fn main() -> spacetime_mr::Result<()> {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let epsilons = [1.0, 1e-1, 1e-3, 1e-6];
    let config = RunConfig {
        presets: vec![Preset::Smooth],
        options: vec![TestOption::Ii],
        epsilons: epsilons.to_vec(),
        mesh_cells: (2..=9).map(|k| 1usize << k).filter(|n| *n <= max).collect(),
        ..RunConfig::default()
    };
    let rows = run(&config)?;
    for eps in epsilons {
        println!("eps = {eps:e}");
        println!("{:>8} {:>10} {:>14}", "h", "dim X", "rel. error");
        let mut pts = Vec::new();
        for r in rows.iter().filter(|r| r.epsilon == eps) {
            println!("{:>8} {:>10} {:>14.6e}", format!("1/{}", (1.0 / r.h).round()), r.dim_x, r.relative_error);
            pts.push((r.dim_x as f64, r.relative_error));
        }
        println!("slope vs dim X: {:.3}\n", loglog_slope(&pts));
    }
    Ok(())
}
