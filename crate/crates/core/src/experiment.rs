//! Experiment runner: problem presets, convergence sweeps, stability diagnostics,
//! CSV output and plot data.
//!
//! A sweep is a matrix of cells `(preset, option, ε, h)`. Cells run on a rayon pool
//! and are reported in that lexicographic order regardless of completion order.
//! Every cell estimates its error on the Option-(ii) test space (time DG on the
//! trial mesh, spatial mesh refined by 3), whatever space it was solved with.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{ForcingDescriptor, InitialDescriptor, ProblemSpec};
use crate::diagnostics::{self, Estimator, TruthSpace};
use crate::error::{Error, Result};
use crate::solver::{
    build_system, solve_mr, test_space, trial_space, DiscreteSystem, SolverMethod, SolverOptions, TestOption,
};
use crate::spaces::{BoundarySet, TensorSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Manufactured `u = (t²+1) sin πx`, Dirichlet at both ends, `e = 0`, `β = 1/ε`.
    Smooth,
    /// `g = 1_{x>t}`, `u0 = 0`, Dirichlet at the inflow only, `e = 0`, `β = 1/ε`.
    InternalLayer,
    /// `g = 0`, `u0 = sin πx`, Dirichlet at both ends, `e = 1`, `β = 1`.
    BoundaryLayer,
    /// As [`Preset::BoundaryLayer`] with the outflow condition imposed weakly.
    BoundaryLayerWeak,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Smooth,
        Preset::InternalLayer,
        Preset::BoundaryLayer,
        Preset::BoundaryLayerWeak,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Smooth => "smooth",
            Self::InternalLayer => "internal_layer",
            Self::BoundaryLayer => "boundary_layer",
            Self::BoundaryLayerWeak => "boundary_layer_weak",
        }
    }

    /// The problem for this preset at diffusion `ε`, with `b = 1`.
    pub fn problem(self, epsilon: f64, beta_override: Option<f64>) -> Result<ProblemSpec> {
        use ForcingDescriptor as F;
        use InitialDescriptor as U;
        let p = match self {
            Self::Smooth => ProblemSpec::new(epsilon, 1.0, 0.0, BoundarySet::BOTH, beta_override, F::SmoothManufactured, U::SinPi)?,
            Self::InternalLayer => ProblemSpec::new(epsilon, 1.0, 0.0, BoundarySet::LEFT, beta_override, F::IndicatorDiagonal, U::Zero)?,
            Self::BoundaryLayer => ProblemSpec::new(epsilon, 1.0, 1.0, BoundarySet::BOTH, beta_override, F::Zero, U::SinPi)?,
            Self::BoundaryLayerWeak => {
                ProblemSpec::new(epsilon, 1.0, 1.0, BoundarySet::BOTH, beta_override, F::Zero, U::SinPi)?.with_weak_outflow()?
            }
        };
        Ok(p)
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}

/// Parse a mesh size given as `1/64`, `64` (cells) or `0.015625`, returning the cell count.
pub fn parse_mesh_size(s: &str) -> Result<usize> {
    let bad = || Error::Config(format!("cannot read mesh size {s:?}"));
    let s = s.trim();
    let n = if let Some(d) = s.strip_prefix("1/") {
        d.trim().parse::<usize>().map_err(|_| bad())?
    } else if let Ok(n) = s.parse::<usize>() {
        n
    } else {
        let h: f64 = s.parse().map_err(|_| bad())?;
        cells_from_h(h)?
    };
    Ok(n)
}

fn cells_from_h(h: f64) -> Result<usize> {
    let n = (1.0 / h).round();
    if !(h > 0.0) || ((1.0 / h) - n).abs() > 1e-9 * n {
        return Err(Error::Config(format!("mesh size {h} is not the reciprocal of an integer")));
    }
    Ok(n as usize)
}

/// Finest sweep point without `deep`.
pub const DEFAULT_MAX_CELLS: usize = 256;
/// Finest admissible sweep point.
pub const DEEP_MAX_CELLS: usize = 512;

/// A sweep or diagnostics matrix. Read from TOML; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub presets: Vec<Preset>,
    pub options: Vec<TestOption>,
    pub epsilons: Vec<f64>,
    /// Mesh sizes `h = 1/n`, stored as the cell counts `n`.
    pub mesh_cells: Vec<usize>,
    pub beta_override: Option<f64>,
    pub solver: SolverMethod,
    pub tol: f64,
    /// CG iteration budget; `None` means `10 · dim X`.
    pub max_iter: Option<usize>,
    pub output_path: Option<PathBuf>,
    /// Allow `h = 1/512`.
    pub deep: bool,
    /// Record measured wall times; off by default so the CSV is byte-stable.
    pub record_wall_time: bool,
    /// Trial cells of the truth space used for relative-error denominators.
    pub denominator_cells: usize,
    pub truth_level: u32,
    /// Random trial functions per cell in `diagnose`.
    pub norm_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            presets: Preset::ALL.to_vec(),
            options: vec![TestOption::I, TestOption::Ii],
            epsilons: vec![1.0, 1e-1, 1e-3, 1e-6],
            mesh_cells: vec![4, 8, 16, 32, 64, 128, 256],
            beta_override: None,
            solver: SolverMethod::Direct,
            tol: 1e-10,
            max_iter: None,
            output_path: None,
            deep: false,
            record_wall_time: false,
            denominator_cells: 64,
            truth_level: 1,
            norm_samples: 100,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.presets.is_empty() || self.options.is_empty() || self.epsilons.is_empty() || self.mesh_cells.is_empty() {
            return bad("presets, options, epsilons and mesh sizes must be nonempty".into());
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("epsilon {e} is not positive"));
        }
        let max = if self.deep { DEEP_MAX_CELLS } else { DEFAULT_MAX_CELLS };
        for &n in &self.mesh_cells {
            if !n.is_power_of_two() || !(4..=DEEP_MAX_CELLS).contains(&n) {
                return bad(format!("mesh size 1/{n} is not a power-of-two reciprocal between 1/4 and 1/512"));
            }
            if n > max {
                return bad(format!("mesh size 1/{n} requires deep mode"));
            }
        }
        if let Some(b) = self.beta_override {
            if !(b >= 1.0) {
                return bad(format!("beta override {b} is below 1"));
            }
        }
        if !(self.tol > 0.0) {
            return bad("tolerance must be positive".into());
        }
        if self.denominator_cells == 0 || self.norm_samples == 0 {
            return bad("denominator cells and norm samples must be positive".into());
        }
        Ok(())
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            method: self.solver,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    /// Cells in report order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &preset in &self.presets {
            for &option in &self.options {
                for &epsilon in &self.epsilons {
                    for &n in &self.mesh_cells {
                        cells.push(Cell { preset, option, epsilon, n });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub preset: Preset,
    pub option: TestOption,
    pub epsilon: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub preset: Preset,
    pub option: TestOption,
    pub epsilon: f64,
    pub h: f64,
    pub dim_x: usize,
    pub dim_y: usize,
    pub estimator: f64,
    pub relative_error: f64,
    pub iterations: usize,
    pub wall_time: f64,
    /// Why the cell failed; its numeric fields are then NaN.
    #[serde(skip)]
    pub failure: Option<String>,
}

pub const CSV_HEADER: &str = "preset,option,epsilon,h,dim_X,dim_Y,estimator,relative_error,iterations,wall_time";

/// Floats with 12 significant digits.
fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.11e}")
    }
}

/// Result of one solved cell, keeping the discrete solution for post-processing.
#[derive(Debug, Clone)]
pub struct CellSolution {
    pub row: SweepRow,
    pub system: DiscreteSystem,
    pub coefficients: Vec<f64>,
}

/// `sqrt(‖g‖²_{Y'} + β‖u0‖²)` for one `(preset, ε)`; independent of the working mesh.
pub fn denominator(preset: Preset, epsilon: f64, config: &RunConfig) -> Result<f64> {
    let p = preset.problem(epsilon, config.beta_override)?;
    diagnostics::relative_denominator(&p, &TruthSpace::new(&p, config.denominator_cells, config.truth_level)?)
}

/// Solve one cell. `denominator` turns the estimator into a relative error.
pub fn solve_cell(cell: Cell, config: &RunConfig, denominator: f64) -> Result<CellSolution> {
    let start = Instant::now();
    let p = cell.preset.problem(cell.epsilon, config.beta_override)?;
    let x = trial_space(&p, cell.n)?;
    let y = test_space(&p, cell.n, cell.option)?;
    let sys = build_system(&p, &x, &y)?;
    let report = solve_mr(&sys, &config.solver_options())?;
    let estimator = match cell.option {
        // the system's own test space already is the estimation space
        TestOption::Ii => report.estimator,
        TestOption::I => Estimator::standard(&sys)?.evaluate(&sys, &report.coefficients),
    };
    let row = SweepRow {
        preset: cell.preset,
        option: cell.option,
        epsilon: cell.epsilon,
        h: 1.0 / cell.n as f64,
        dim_x: x.dim(),
        dim_y: y.dim(),
        estimator,
        relative_error: estimator / denominator,
        iterations: report.iterations,
        wall_time: if config.record_wall_time { start.elapsed().as_secs_f64() } else { f64::NAN },
        failure: None,
    };
    Ok(CellSolution {
        row,
        system: sys,
        coefficients: report.coefficients,
    })
}

fn failed_row(cell: Cell, err: &Error) -> SweepRow {
    let dims = cell.preset.problem(cell.epsilon, None).ok().map(|p| {
        let d = |s: Result<TensorSpace>| s.map_or(0, |s| s.dim());
        (d(trial_space(&p, cell.n)), d(test_space(&p, cell.n, cell.option)))
    });
    let (dim_x, dim_y) = dims.unwrap_or((0, 0));
    SweepRow {
        preset: cell.preset,
        option: cell.option,
        epsilon: cell.epsilon,
        h: 1.0 / cell.n as f64,
        dim_x,
        dim_y,
        estimator: f64::NAN,
        relative_error: f64::NAN,
        iterations: 0,
        wall_time: f64::NAN,
        failure: Some(err.to_string()),
    }
}

/// Run every cell of the matrix. Failures are recorded in their rows; the run continues.
pub fn run(config: &RunConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let keys: Vec<(Preset, u64)> = {
        let mut k: Vec<_> = config
            .presets
            .iter()
            .flat_map(|&p| config.epsilons.iter().map(move |e| (p, e.to_bits())))
            .collect();
        k.dedup();
        k
    };
    let denominators: BTreeMap<(Preset, u64), Result<f64>> = keys
        .par_iter()
        .map(|&(p, e)| ((p, e), denominator(p, f64::from_bits(e), config)))
        .collect();
    let rows = config
        .cells()
        .into_par_iter()
        .map(|cell| {
            let den = match &denominators[&(cell.preset, cell.epsilon.to_bits())] {
                Ok(d) => *d,
                Err(e) => return failed_row(cell, e),
            };
            solve_cell(cell, config, den).map_or_else(|e| failed_row(cell, &e), |s| s.row)
        })
        .collect();
    Ok(rows)
}

fn config_echo(config: &RunConfig, out: &mut String) {
    let list = |v: Vec<String>| v.join(" ");
    let _ = writeln!(out, "# presets = {}", list(config.presets.iter().map(|p| p.label().into()).collect()));
    let _ = writeln!(out, "# options = {}", list(config.options.iter().map(|o| o.label().into()).collect()));
    let _ = writeln!(out, "# epsilons = {}", list(config.epsilons.iter().map(|e| format!("{e:e}")).collect()));
    let _ = writeln!(out, "# mesh_sizes = {}", list(config.mesh_cells.iter().map(|n| format!("1/{n}")).collect()));
    let beta = config.beta_override.map_or("default (1/eps if e = 0, else 1)".into(), |b| format!("{b:e}"));
    let _ = writeln!(out, "# beta = {beta}");
    let _ = writeln!(out, "# solver = {:?}, tol = {:e}", config.solver, config.tol);
    let _ = writeln!(
        out,
        "# estimation_space = option ii: time DG-P1 on the trial mesh x space C0-P1 on the trial mesh refined by 3"
    );
    let _ = writeln!(
        out,
        "# denominator = sqrt(|g|^2_Y' + beta |u0|^2) on the truth space of 1/{} refined {} time(s)",
        config.denominator_cells, config.truth_level
    );
    let _ = writeln!(out, "# wall_time = {}", if config.record_wall_time { "seconds" } else { "not recorded" });
}

/// CSV text: `#` lines echoing the configuration, the header, one line per row,
/// and `#` lines describing failed cells.
pub fn to_csv(rows: &[SweepRow], config: &RunConfig) -> String {
    let mut out = String::new();
    config_echo(config, &mut out);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.preset.label(),
            r.option.label(),
            fmt_f(r.epsilon),
            fmt_f(r.h),
            r.dim_x,
            r.dim_y,
            fmt_f(r.estimator),
            fmt_f(r.relative_error),
            r.iterations,
            fmt_f(r.wall_time)
        );
    }
    for r in rows.iter().filter(|r| r.failure.is_some()) {
        let msg = r.failure.as_deref().unwrap_or_default().replace('\n', " ");
        let _ = writeln!(out, "# failed: {} {} eps={:e} h=1/{}: {msg}", r.preset.label(), r.option.label(), r.epsilon, (1.0 / r.h).round());
    }
    out
}

pub fn write_csv(rows: &[SweepRow], config: &RunConfig, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(rows, config))?;
    Ok(())
}

/// Parse sweep CSV text (as produced by [`to_csv`]).
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Config("missing sweep CSV header".into())),
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(Error::Config(format!("malformed CSV line {line:?}")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?}")));
            let int = |s: &str| s.parse::<usize>().map_err(|_| Error::Config(format!("bad integer {s:?}")));
            Ok(SweepRow {
                preset: f[0].parse()?,
                option: f[1].parse()?,
                epsilon: num(f[2])?,
                h: num(f[3])?,
                dim_x: int(f[4])?,
                dim_y: int(f[5])?,
                estimator: num(f[6])?,
                relative_error: num(f[7])?,
                iterations: int(f[8])?,
                wall_time: num(f[9])?,
                failure: None,
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    parse_csv(&std::fs::read_to_string(path)?)
}

/// Least-squares slope of `log y` against `log x`, skipping non-finite points.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

/// One row of `diagnose` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub preset: Preset,
    pub option: TestOption,
    pub epsilon: f64,
    pub h: f64,
    pub gamma_dt: f64,
    pub gamma_c: f64,
    pub gamma_b: f64,
    pub alpha: f64,
    pub bounds_passed: bool,
    pub worst_ratio: f64,
    #[serde(skip)]
    pub failure: Option<String>,
}

pub const DIAGNOSTICS_HEADER: &str = "preset,option,epsilon,h,gamma_dt,gamma_C,gamma_B,alpha,bounds_passed,worst_ratio";

/// Coarsest admissible cell count for the dense diagnostics.
pub const DIAGNOSTICS_MAX_CELLS: usize = 32;

/// Stability constants per cell, on small meshes only (`h ≥ 1/32`).
pub fn diagnose(config: &RunConfig) -> Result<Vec<DiagnosticsRow>> {
    config.validate()?;
    if let Some(n) = config.mesh_cells.iter().find(|n| **n > DIAGNOSTICS_MAX_CELLS) {
        return Err(Error::Config(format!("diagnostics are dense; h = 1/{n} is finer than 1/32")));
    }
    let rows = config
        .cells()
        .into_par_iter()
        .map(|cell| {
            let eval = || -> Result<diagnostics::DiagnosticsReport> {
                let p = cell.preset.problem(cell.epsilon, config.beta_override)?;
                let x = trial_space(&p, cell.n)?;
                let y = test_space(&p, cell.n, cell.option)?;
                let truth = TruthSpace::new(&p, cell.n, config.truth_level)?;
                diagnostics::diagnose(&p, &x, &y, &truth, config.norm_samples)
            };
            let base = DiagnosticsRow {
                preset: cell.preset,
                option: cell.option,
                epsilon: cell.epsilon,
                h: 1.0 / cell.n as f64,
                gamma_dt: f64::NAN,
                gamma_c: f64::NAN,
                gamma_b: f64::NAN,
                alpha: f64::NAN,
                bounds_passed: false,
                worst_ratio: f64::NAN,
                failure: None,
            };
            match eval() {
                Ok(r) => DiagnosticsRow {
                    gamma_dt: r.gamma_dt,
                    gamma_c: r.gamma_c,
                    gamma_b: r.gamma_b,
                    alpha: r.alpha,
                    bounds_passed: r.bounds_check.passed,
                    worst_ratio: r.bounds_check.worst_ratio,
                    ..base
                },
                Err(e) => DiagnosticsRow {
                    failure: Some(e.to_string()),
                    ..base
                },
            }
        })
        .collect();
    Ok(rows)
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow], config: &RunConfig) -> String {
    let mut out = String::new();
    config_echo(config, &mut out);
    let _ = writeln!(out, "# truth space = option ii test space refined {} time(s)", config.truth_level);
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.preset.label(),
            r.option.label(),
            fmt_f(r.epsilon),
            fmt_f(r.h),
            fmt_f(r.gamma_dt),
            fmt_f(r.gamma_c),
            fmt_f(r.gamma_b),
            fmt_f(r.alpha),
            r.bounds_passed,
            fmt_f(r.worst_ratio)
        );
    }
    for r in rows.iter().filter(|r| r.failure.is_some()) {
        let msg = r.failure.as_deref().unwrap_or_default().replace('\n', " ");
        let _ = writeln!(out, "# failed: {} {} eps={:e} h={}: {msg}", r.preset.label(), r.option.label(), r.epsilon, r.h);
    }
    out
}

/// Paths written by [`emit_plot`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFiles {
    pub data: PathBuf,
    pub svg: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotStyle {
    #[default]
    LogLog,
}

type CurveKey = (Preset, TestOption, u64);

fn curves(rows: &[SweepRow]) -> BTreeMap<CurveKey, Vec<(f64, f64)>> {
    let mut map: BTreeMap<CurveKey, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        map.entry((r.preset, r.option, r.epsilon.to_bits()))
            .or_default()
            .push((r.dim_x as f64, r.relative_error));
    }
    for pts in map.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    map
}

/// Write `<stem>.dat` (gnuplot blocks, one per curve) and `<stem>.svg` (log-log plot of
/// relative error against `dim X` with a slope −1/2 guide).
pub fn emit_plot(rows: &[SweepRow], style: PlotStyle, stem: &Path) -> Result<PlotFiles> {
    let PlotStyle::LogLog = style;
    if rows.is_empty() {
        return Err(Error::Config("nothing to plot".into()));
    }
    let curves = curves(rows);
    let data = stem.with_extension("dat");
    let svg = stem.with_extension("svg");

    let mut dat = String::from("# dim_X relative_error\n");
    for (i, ((preset, option, eps), pts)) in curves.iter().enumerate() {
        if i > 0 {
            dat.push_str("\n\n");
        }
        let _ = writeln!(dat, "# {} option {} eps {:e}", preset.label(), option.label(), f64::from_bits(*eps));
        for (x, y) in pts {
            let _ = writeln!(dat, "{x} {}", fmt_f(*y));
        }
    }
    std::fs::write(&data, dat)?;
    std::fs::write(&svg, render_svg(&curves))?;
    Ok(PlotFiles { data, svg })
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn render_svg(curves: &BTreeMap<CurveKey, Vec<(f64, f64)>>) -> String {
    let (w, hgt, margin) = (640.0, 480.0, 70.0);
    let finite: Vec<(f64, f64)> = curves
        .values()
        .flatten()
        .copied()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = finite.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), (x, y)| (a.min(x.log10()), b.max(x.log10()), c.min(y.log10()), d.max(y.log10())),
    );
    if finite.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    // whole decades, at least one wide
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |lx: f64| margin + (lx - x0) / (x1 - x0) * (w - 2.0 * margin);
    let py = |ly: f64| hgt - margin - (ly - y0) / (y1 - y0) * (hgt - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * margin,
        hgt - 2.0 * margin
    );
    for d in (x0 as i32)..=(x1 as i32) {
        let x = px(f64::from(d));
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{margin}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##, hgt - margin);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, hgt - margin + 18.0);
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = py(f64::from(d));
        let _ = writeln!(s, r##"<line x1="{margin}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, w - margin);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, margin - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">dim X</text>"#, w / 2.0, hgt - 20.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">relative error</text>"#,
        hgt / 2.0,
        hgt / 2.0
    );

    // slope −1/2 guide through the upper left region
    let gx0 = x0 + 0.1 * (x1 - x0);
    let gy0 = y1 - 0.1 * (y1 - y0);
    let gx1 = (gx0 + 2.0 * (gy0 - y0) * 0.8).min(x1);
    let gy1 = gy0 - 0.5 * (gx1 - gx0);
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-dasharray="6 4"/>"#,
        px(gx0),
        py(gy0),
        px(gx1),
        py(gy1)
    );
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">slope -1/2</text>"#, px(gx1) + 4.0, py(gy1));

    for (i, ((preset, option, eps), pts)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
            .map(|(x, y)| format!("{:.1},{:.1}", px(x.log10()), py(y.log10())))
            .collect();
        if coords.len() > 1 {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, coords.join(" "));
        }
        for c in &coords {
            let (cx, cy) = c.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = margin + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{color}" text-anchor="end">{} ({}) eps={:e}</text>"#,
            w - margin - 8.0,
            preset.label(),
            option.label(),
            f64::from_bits(*eps)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Samples `(t, x, w(t, x))` of a trial function on an `m × m` uniform grid, time-major.
pub fn sample_solution(space: &TensorSpace, w: &[f64], m: usize) -> Result<Vec<[f64; 3]>> {
    let m = m.max(2);
    let grid: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
    let mut out = Vec::with_capacity(m * m);
    for &t in &grid {
        for &x in &grid {
            out.push([t, x, space.evaluate(w, t, x)?]);
        }
    }
    Ok(out)
}

/// Grid resolution of solution heightfields.
pub const HEIGHTFIELD_POINTS: usize = 129;

/// Write a `t,x,u` heightfield CSV on the 129 × 129 grid.
pub fn write_heightfield(space: &TensorSpace, w: &[f64], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "t,x,u")?;
    for [t, x, u] in sample_solution(space, w, HEIGHTFIELD_POINTS)? {
        writeln!(f, "{},{},{}", fmt_f(t), fmt_f(x), fmt_f(u))?;
    }
    f.flush()?;
    Ok(())
}
