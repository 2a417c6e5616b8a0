//! Command-line front end for the experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spacetime_mr::experiment::{self, parse_mesh_size, Cell, PlotStyle, Preset, RunConfig};
use spacetime_mr::solver::{SolverMethod, TestOption};
use spacetime_mr::Result;

#[derive(Parser)]
#[command(name = "stmr", version, about = "Space-time minimal residual experiments for 1D convection-diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single cell and optionally write a 129x129 solution heightfield.
    Solve(MatrixArgs),
    /// Run a convergence sweep and write the CSV.
    Sweep(MatrixArgs),
    /// Compute inf-sup constants, alpha and the norm-equivalence check (h >= 1/32).
    Diagnose(MatrixArgs),
    /// Turn a sweep CSV into gnuplot data and an SVG.
    Plot {
        /// Sweep CSV to read.
        input: PathBuf,
        /// Output stem; `.dat` and `.svg` are appended.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MatrixArgs {
    /// TOML run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    preset: Vec<Preset>,
    #[arg(long, value_delimiter = ',')]
    option: Vec<TestOption>,
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Mesh sizes as `1/64`, `64` or `0.015625`.
    #[arg(long, value_delimiter = ',', value_parser = parse_mesh_size)]
    h: Vec<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    solver: Option<SolverMethod>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow h = 1/512.
    #[arg(long)]
    deep: bool,
    /// Record wall times (the CSV is then no longer byte-stable).
    #[arg(long)]
    timings: bool,
}

impl MatrixArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if !self.preset.is_empty() {
            c.presets = self.preset;
        }
        if !self.option.is_empty() {
            c.options = self.option;
        }
        if !self.eps.is_empty() {
            c.epsilons = self.eps;
        }
        if !self.h.is_empty() {
            c.mesh_cells = self.h;
        }
        c.beta_override = self.beta.or(c.beta_override);
        c.solver = self.solver.unwrap_or(c.solver);
        c.tol = self.tol.unwrap_or(c.tol);
        c.output_path = self.out.or(c.output_path);
        c.deep |= self.deep;
        c.record_wall_time |= self.timings;
        c.validate()?;
        Ok(c)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stmr: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let c = args.into_config()?;
            let cell = Cell {
                preset: c.presets[0],
                option: c.options[0],
                epsilon: c.epsilons[0],
                n: c.mesh_cells[0],
            };
            let den = experiment::denominator(cell.preset, cell.epsilon, &c)?;
            let sol = experiment::solve_cell(cell, &c, den)?;
            let r = &sol.row;
            println!(
                "{} option {} eps={:e} h=1/{}: dim X = {}, dim Y = {}, estimator = {:.6e}, relative error = {:.6e}, iterations = {}",
                r.preset.label(),
                r.option.label(),
                r.epsilon,
                cell.n,
                r.dim_x,
                r.dim_y,
                r.estimator,
                r.relative_error,
                r.iterations
            );
            if let Some(path) = &c.output_path {
                experiment::write_heightfield(&sol.system.trial, &sol.coefficients, path)?;
                eprintln!("heightfield written to {}", path.display());
            }
        }
        Command::Sweep(args) => {
            let c = args.into_config()?;
            let rows = experiment::run(&c)?;
            emit(&experiment::to_csv(&rows, &c), c.output_path.as_ref())?;
        }
        Command::Diagnose(args) => {
            let mut c = args.into_config()?;
            c.mesh_cells.retain(|n| *n <= experiment::DIAGNOSTICS_MAX_CELLS);
            let rows = experiment::diagnose(&c)?;
            emit(&experiment::diagnostics_csv(&rows, &c), c.output_path.as_ref())?;
        }
        Command::Plot { input, out } => {
            let rows = experiment::read_csv(&input)?;
            let files = experiment::emit_plot(&rows, PlotStyle::LogLog, &out)?;
            eprintln!("wrote {} and {}", files.data.display(), files.svg.display());
        }
    }
    Ok(())
}
