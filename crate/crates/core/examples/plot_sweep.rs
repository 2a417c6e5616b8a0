//! Runs a small sweep from a TOML configuration and renders it: CSV, gnuplot data and
//! an SVG with a slope −1/2 guide.
//!
//! ```text
//! cargo run --release --example plot_sweep [config.toml] [out_dir]
//! ```

use std::path::PathBuf;

use spacetime_mr::experiment::{emit_plot, run, write_csv, PlotStyle, RunConfig};

fn main() -> spacetime_mr::Result<()> {
    let mut args = std::env::args().skip(1);
    let config_path = args.next().map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/smooth_quick.toml"),
        PathBuf::from,
    );
    let out_dir = args.next().map_or_else(std::env::temp_dir, PathBuf::from);
    let config = RunConfig::load(&config_path)?;
    let rows = run(&config)?;
    let csv = out_dir.join("sweep.csv");
    write_csv(&rows, &config, &csv)?;
    let files = emit_plot(&rows, PlotStyle::LogLog, &out_dir.join("sweep"))?;
    println!("{}\n{}\n{}", csv.display(), files.data.display(), files.svg.display());
    Ok(())
}
