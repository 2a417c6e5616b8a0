//! A posteriori estimation and stability diagnostics.
//!
//! Continuous dual norms `‖·‖_{Y'}` are replaced by discrete ones on a *truth
//! space*: a discontinuous-in-time tensor space refined beyond every working test
//! space. All quantities here are evaluated exactly on the chosen spaces (Gram
//! matrices are factored, never approximated).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::operators::{assemble_aa, assemble_as, assemble_as_pair, assemble_b, assemble_c, assemble_dt};
use crate::assembly::{assemble_load, mass_1d, stiffness_1d, KroneckerOp, ProblemSpec};
use crate::error::{Error, Result};
use crate::linops::{dot, gen_eig_dense, gen_eig_extremal, CsrMatrix, KronSpdSolver, Which};
use crate::solver::{refined_test_space, DiscreteSystem};
use crate::spaces::{BoundarySet, Endpoint, FESpace1D, Partition1D, TensorSpace};

/// A deliberately over-refined test space standing in for the continuous `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSpace {
    pub space: TensorSpace,
    pub refinement_level: u32,
}

impl TruthSpace {
    /// For trial meshes with `n` cells: `n·2^level` temporal DG cells and
    /// `3n·3^level` spatial cells (Option-(ii) test space refined `level` more times).
    pub fn new(p: &ProblemSpec, n: usize, level: u32) -> Result<Self> {
        Ok(Self {
            space: refined_test_space(p, n, 2usize.pow(level), 3 * 3usize.pow(level))?,
            refinement_level: level,
        })
    }
}

/// Residual evaluation on a dedicated estimation test space.
#[derive(Debug, Clone)]
pub struct Estimator {
    pub space: TensorSpace,
    b: KroneckerOp,
    gram: KronSpdSolver,
    load: Vec<f64>,
}

impl Estimator {
    /// Estimation space for a system: its trial space paired with `y_est`, which must
    /// refine the system's test space.
    pub fn new(sys: &DiscreteSystem, y_est: &TensorSpace) -> Result<Self> {
        let (y, ye) = (&sys.test, y_est);
        let nested = ye.space.partition().refinement_ratio(y.space.partition()).is_some()
            && ye.time.partition().refinement_ratio(y.time.partition()).is_some()
            && ye.time.continuity() == y.time.continuity()
            && ye.space.essential_bc() == y.space.essential_bc();
        if !nested {
            return Err(Error::IncompatibleSpaces("the estimation space must contain the test space".into()));
        }
        Self::for_spaces(&sys.problem, &sys.trial, y_est)
    }

    /// Estimation space for arbitrary compatible trial and test spaces.
    pub fn for_spaces(p: &ProblemSpec, x: &TensorSpace, y_est: &TensorSpace) -> Result<Self> {
        Ok(Self {
            space: *y_est,
            b: assemble_b(p, x, y_est)?,
            gram: assemble_as(p, y_est)?.solver()?,
            load: assemble_load(p, y_est)?,
        })
    }

    /// The Option-(ii)-type estimation space of a trial space on `n` cells.
    pub fn standard(sys: &DiscreteSystem) -> Result<Self> {
        let n = sys.trial.space.partition().n_cells();
        Self::for_spaces(&sys.problem, &sys.trial, &refined_test_space(&sys.problem, n, 1, 3)?)
    }

    /// `‖g − B w‖²` in the dual norm of the estimation space.
    pub fn residual_dual_norm2(&self, w: &[f64]) -> f64 {
        let bw = self.b.apply(w);
        let r: Vec<f64> = self.load.iter().zip(&bw).map(|(g, v)| g - v).collect();
        dot(&r, &self.gram.solve(&r)).max(0.0)
    }

    /// `sqrt(‖g − Bw‖²_{Yest'} + β‖u₀ − γ₀w‖² (+ ε‖w(·,1)‖²))` with the initial and
    /// penalty terms taken from `sys`.
    pub fn evaluate(&self, sys: &DiscreteSystem, w: &[f64]) -> f64 {
        let pen = sys.penalty.as_ref().map_or(0.0, |p| p.value(w));
        (self.residual_dual_norm2(w) + sys.initial.misfit(w) + pen).sqrt()
    }
}

/// A posteriori estimator of `w` evaluated on `y_est`.
pub fn estimator(sys: &DiscreteSystem, w: &[f64], y_est: &TensorSpace) -> Result<f64> {
    Ok(Estimator::new(sys, y_est)?.evaluate(sys, w))
}

/// `sqrt(‖g‖²_{Y'} + β‖u₀‖²)` on the truth space, the energy norm of the exact solution.
pub fn relative_denominator(p: &ProblemSpec, truth: &TruthSpace) -> Result<f64> {
    let g = assemble_load(p, &truth.space)?;
    let gram = assemble_as(p, &truth.space)?.solver()?;
    let g2 = if g.iter().all(|v| *v == 0.0) { 0.0 } else { dot(&g, &gram.solve(&g)) };
    Ok((g2 + p.beta * p.u0.norm_squared()).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InfSupKind {
    Dt,
    C,
    B,
}

fn operator(kind: InfSupKind, p: &ProblemSpec, x: &TensorSpace, y: &TensorSpace) -> Result<KroneckerOp> {
    match kind {
        InfSupKind::Dt => assemble_dt(x, y),
        InfSupKind::C => assemble_c(p, x, y),
        InfSupKind::B => assemble_b(p, x, y),
    }
}

/// `Oᵀ G⁻¹ O` as a dense matrix over the trial space.
fn dual_gram(op: &KroneckerOp, gram: &KronSpdSolver) -> DMatrix<f64> {
    let n = op.ncols();
    let mut out = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let z = gram.solve(&op.apply(&e));
        let col = op.apply_transpose(&z);
        out.set_column(j, &nalgebra::DVector::from_vec(col));
        e[j] = 0.0;
    }
    (&out + out.transpose()) * 0.5
}

/// Time-constant functions of a trial space (the kernel of `∂t`), as columns.
pub fn time_constants(x: &TensorSpace) -> DMatrix<f64> {
    let (nt, ns) = (x.time.dim(), x.space.dim());
    DMatrix::from_fn(nt * ns, ns, |r, c| if r % ns == c { 1.0 } else { 0.0 })
}

/// Discrete inf-sup constant of `O ∈ {∂t, C, B}` from `x` into the dual of `y`,
/// relative to the dual norm on the truth space:
/// `inf_w ‖O w‖_{Y'} / ‖O w‖_{truth'}`, computed as the square root of the smallest
/// generalized eigenvalue of `(O_Yᵀ G_Y⁻¹ O_Y, O_Tᵀ G_T⁻¹ O_T)` with the kernel of
/// `O` removed.
pub fn inf_sup(kind: InfSupKind, x: &TensorSpace, y: &TensorSpace, truth: &TruthSpace, p: &ProblemSpec) -> Result<f64> {
    let a = dual_gram(&operator(kind, p, x, y)?, &assemble_as(p, y)?.solver()?);
    let m = dual_gram(&operator(kind, p, x, &truth.space)?, &assemble_as(p, &truth.space)?.solver()?);
    let deflation = (kind == InfSupKind::Dt).then(|| time_constants(x));
    let pair = gen_eig_dense(&a, &m, Which::Smallest, deflation.as_ref())?;
    Ok(pair.value.max(0.0).sqrt())
}

/// Temporal inf-sup constant
/// `inf_{w ∈ X_t, w' ≠ 0} sup_{v ∈ Y_t} ∫ w'v / (‖w'‖ ‖v‖)` for given 1D spaces.
pub fn time_factor_inf_sup(x_t: &FESpace1D, y_t: &FESpace1D) -> Result<f64> {
    let c = crate::assembly::convection_1d(y_t, x_t)?.to_dense();
    let m_y = mass_1d(y_t, y_t)?.to_dense();
    let s_x = stiffness_1d(x_t, x_t)?.to_dense();
    let chol = m_y.cholesky().ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?;
    let a = c.transpose() * chol.solve(&c);
    let a = (&a + a.transpose()) * 0.5;
    let ones = DMatrix::from_element(x_t.dim(), 1, 1.0);
    let defl = x_t.essential_bc().is_empty().then_some(ones);
    let pair = gen_eig_dense(&a, &s_x, Which::Smallest, defl.as_ref())?;
    Ok(pair.value.max(0.0).sqrt())
}

/// Time-factor experiment: continuous piecewise linears on `n` cells against those on `2n` cells.
pub fn time_factor_dyadic(n: usize) -> Result<f64> {
    let xt = FESpace1D::continuous(Partition1D::uniform(n)?, BoundarySet::NONE);
    let yt = FESpace1D::continuous(Partition1D::uniform(2 * n)?, BoundarySet::NONE);
    time_factor_inf_sup(&xt, &yt)
}

/// Asymmetry `α = ‖A_a‖` measured against `A_s` on the truth space: the square root
/// of the largest eigenvalue of `A_aᵀ G⁻¹ A_a v = λ G v`.
pub fn alpha(p: &ProblemSpec, truth: &TruthSpace) -> Result<f64> {
    if p.b == 0.0 {
        return Ok(0.0);
    }
    let t = &truth.space;
    let aa = assemble_aa(p, t, t)?;
    let gram = assemble_as(p, t)?;
    let g_inv = gram.solver()?;
    let g_op = gram.to_kronecker();
    let a_op = crate::linops::FnOperator::new(t.dim(), |x: &[f64], y: &mut [f64]| {
        let z = g_inv.solve(&aa.apply(x));
        y.copy_from_slice(&aa.apply_transpose(&z));
    });
    let pair = gen_eig_extremal(&a_op, &g_op, &g_inv, Which::Largest, &[], 1e-10, t.dim())?;
    Ok(pair.value.max(0.0).sqrt())
}

/// Spatial reduction of [`alpha`]: the time factors cancel, leaving the pencil
/// `(Nᵀ K⁻¹ N, K)` on the spatial truth space.
pub fn alpha_spatial(p: &ProblemSpec, truth: &TruthSpace) -> Result<f64> {
    let s = &truth.space.space;
    let k = CsrMatrix::linear_combination(&[(p.epsilon, &stiffness_1d(s, s)?), (p.e, &mass_1d(s, s)?)]).to_dense();
    let n = crate::assembly::convection_1d(s, s)?.to_dense() * p.b;
    let chol = k.clone().cholesky().ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?;
    let a = n.transpose() * chol.solve(&n);
    let a = (&a + a.transpose()) * 0.5;
    Ok(gen_eig_dense(&a, &k, Which::Largest, None)?.value.max(0.0).sqrt())
}

/// `(1 + α(α + √(α²+4))/2)`, the two-sided bound between the energy and natural norms.
pub fn norm_equivalence_bound(alpha: f64) -> f64 {
    1.0 + 0.5 * alpha * (alpha + (alpha * alpha + 4.0).sqrt())
}

/// Relative slack applied to both sides of the norm-equivalence bounds.
pub const NORM_EQUIVALENCE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct NormEquivalenceCheck {
    pub passed: bool,
    pub alpha: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Sample index and ratio farthest outside (or closest to) the bounds.
    pub worst_sample: usize,
    pub worst_ratio: f64,
    pub samples: usize,
}

/// Both squared norms of trial functions, with dual norms on a truth space.
#[derive(Debug, Clone)]
pub struct NormPair {
    b: KroneckerOp,
    dt: KroneckerOp,
    gram: KronSpdSolver,
    a_s: CsrMatrix,
    gamma0: CsrMatrix,
    gamma_t: CsrMatrix,
    h_mass: CsrMatrix,
    beta: f64,
}

impl NormPair {
    pub fn new(p: &ProblemSpec, x: &TensorSpace, truth: &TruthSpace) -> Result<Self> {
        let ns = x.space.dim();
        let trace = |e: Endpoint| {
            let v = x.time.trace_vector(e);
            let row = CsrMatrix::from_triplets(1, v.len(), v.iter().enumerate().map(|(j, a)| (0, j, *a)));
            CsrMatrix::kron(&row, &CsrMatrix::identity(ns))
        };
        Ok(Self {
            b: assemble_b(p, x, &truth.space)?,
            dt: assemble_dt(x, &truth.space)?,
            gram: assemble_as(p, &truth.space)?.solver()?,
            a_s: assemble_as_pair(p, x, x)?.to_csr(),
            gamma0: trace(Endpoint::Left),
            gamma_t: trace(Endpoint::Right),
            h_mass: mass_1d(&x.space, &x.space)?,
            beta: p.beta,
        })
    }

    fn dual2(&self, op: &KroneckerOp, w: &[f64]) -> f64 {
        let r = op.apply(w);
        dot(&r, &self.gram.solve(&r))
    }

    fn l2_trace2(&self, trace: &CsrMatrix, w: &[f64]) -> f64 {
        let v = trace.mul_vec(w);
        dot(&v, &self.h_mass.mul_vec(&v))
    }

    /// `|||w|||² = ‖Bw‖²_{Y'} + β‖w(0)‖²`.
    pub fn energy2(&self, w: &[f64]) -> f64 {
        self.dual2(&self.b, w) + self.beta * self.l2_trace2(&self.gamma0, w)
    }

    /// `‖w‖²_X = ‖w‖²_Y + ‖∂t w‖²_{Y'} + ‖w(T)‖² + (β−1)‖w(0)‖²`.
    pub fn natural2(&self, w: &[f64]) -> f64 {
        dot(w, &self.a_s.mul_vec(w))
            + self.dual2(&self.dt, w)
            + self.l2_trace2(&self.gamma_t, w)
            + (self.beta - 1.0) * self.l2_trace2(&self.gamma0, w)
    }
}

/// Check `bound⁻¹ ≤ |||w|||²/‖w‖²_X ≤ bound` with 5% slack on `n_samples` random
/// trial functions (seeded, so the check is reproducible).
pub fn check_norm_equivalence(
    p: &ProblemSpec,
    x: &TensorSpace,
    truth: &TruthSpace,
    n_samples: usize,
    seed: u64,
) -> Result<NormEquivalenceCheck> {
    let a = alpha(p, truth)?;
    let bound = norm_equivalence_bound(a);
    let (lo, hi) = (1.0 / bound / (1.0 + NORM_EQUIVALENCE_SLACK), bound * (1.0 + NORM_EQUIVALENCE_SLACK));
    let norms = NormPair::new(p, x, truth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = NormEquivalenceCheck {
        passed: true,
        alpha: a,
        lower_bound: 1.0 / bound,
        upper_bound: bound,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        worst_sample: 0,
        worst_ratio: f64::NAN,
        samples: n_samples,
    };
    let mut worst_margin = f64::INFINITY;
    for k in 0..n_samples {
        let w: Vec<f64> = (0..x.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ratio = norms.energy2(&w) / norms.natural2(&w);
        out.min_ratio = out.min_ratio.min(ratio);
        out.max_ratio = out.max_ratio.max(ratio);
        // logarithmic distance to the nearer bound; negative means violated
        let margin = (ratio / lo).ln().min((hi / ratio).ln());
        if margin < worst_margin {
            worst_margin = margin;
            out.worst_sample = k;
            out.worst_ratio = ratio;
        }
        if !(ratio >= lo && ratio <= hi) {
            out.passed = false;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub gamma_dt: f64,
    pub gamma_c: f64,
    pub gamma_b: f64,
    pub alpha: f64,
    pub bounds_check: NormEquivalenceCheck,
}

/// All stability diagnostics for one working pair `(x, y)` against `truth`.
pub fn diagnose(
    p: &ProblemSpec,
    x: &TensorSpace,
    y: &TensorSpace,
    truth: &TruthSpace,
    n_samples: usize,
) -> Result<DiagnosticsReport> {
    Ok(DiagnosticsReport {
        gamma_dt: inf_sup(InfSupKind::Dt, x, y, truth, p)?,
        gamma_c: inf_sup(InfSupKind::C, x, y, truth, p)?,
        gamma_b: inf_sup(InfSupKind::B, x, y, truth, p)?,
        alpha: alpha(p, truth)?,
        bounds_check: check_norm_equivalence(p, x, truth, n_samples, 0)?,
    })
}
