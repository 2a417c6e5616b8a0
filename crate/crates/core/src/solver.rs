//! Minimal-residual and BEN solves on a pair of tensor trial/test spaces.
//!
//! The MR approximation minimizes
//!
//! ```text
//! ‖g − B w‖²_{Y'} + β ‖γ₀ w − u₀‖² (+ ε ‖w(·, 1)‖²_{L₂(I)} under weak outflow)
//! ```
//!
//! over the trial space, with the dual norm evaluated exactly through the Gram
//! matrix `G_Y` of the energy inner product on the test space. Its normal
//! equations are `N w = Bᵀ G_Y⁻¹ g + β γ₀ᵀ m₀` with
//! `N = Bᵀ G_Y⁻¹ B + β γ₀ᵀ M_H γ₀ (+ penalty)`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::assembly::operators::{assemble_aa, assemble_as, assemble_as_pair, assemble_b, assemble_c, GramOperator};
use crate::assembly::{assemble_load, mass_1d, InitialTrace, KroneckerOp, OutflowPenalty, ProblemSpec};
use crate::error::{Error, Result};
use crate::linops::{
    cg_solve, dot, factor_spd, factor_symmetric_indefinite, BlockTridiagonal, CsrMatrix, KronSpdSolver, LinearOperator,
};
use crate::spaces::{BoundarySet, Continuity, Endpoint, FESpace1D, Partition1D, TensorSpace};

/// Test-space choice: spatial test mesh equal to the trial mesh, or refined by 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestOption {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    Ii,
}

impl TestOption {
    pub fn spatial_refinement(self) -> usize {
        match self {
            Self::I => 1,
            Self::Ii => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::I => "i",
            Self::Ii => "ii",
        }
    }
}

impl std::str::FromStr for TestOption {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" | "I" | "1" => Ok(Self::I),
            "ii" | "II" | "2" => Ok(Self::Ii),
            other => Err(Error::Config(format!("unknown test-space option {other:?}"))),
        }
    }
}

/// `C0-P1(time) ⊗ C0-P1(space)` on `n` cells per direction, with the problem's trial BCs.
pub fn trial_space(p: &ProblemSpec, n: usize) -> Result<TensorSpace> {
    let part = Partition1D::uniform(n)?;
    Ok(TensorSpace::new(
        FESpace1D::continuous(part, BoundarySet::NONE),
        FESpace1D::continuous(part, p.trial_bc()),
    ))
}

/// `DG-P1(time, n cells) ⊗ C0-P1(space, n·r cells)` with the full Dirichlet set.
pub fn test_space(p: &ProblemSpec, n: usize, option: TestOption) -> Result<TensorSpace> {
    refined_test_space(p, n, 1, option.spatial_refinement())
}

/// Discontinuous-in-time test space with `n·time_ratio` temporal and `n·space_ratio` spatial cells.
pub fn refined_test_space(p: &ProblemSpec, n: usize, time_ratio: usize, space_ratio: usize) -> Result<TensorSpace> {
    Ok(TensorSpace::new(
        FESpace1D::discontinuous(Partition1D::uniform(n * time_ratio)?),
        FESpace1D::continuous(Partition1D::uniform(n * space_ratio)?, p.gamma),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Direct,
    Cg,
}

impl std::str::FromStr for SolverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "cg" => Ok(Self::Cg),
            other => Err(Error::Config(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub method: SolverMethod,
    pub tol: f64,
    /// `None` means `10 · dim X`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Direct,
            tol: 1e-10,
            max_iter: None,
        }
    }
}

/// Everything needed to form and solve the MR normal equations.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub problem: ProblemSpec,
    pub trial: TensorSpace,
    pub test: TensorSpace,
    pub b: KroneckerOp,
    pub gram: GramOperator,
    pub gram_solver: KronSpdSolver,
    pub initial: InitialTrace,
    pub penalty: Option<OutflowPenalty>,
    /// Forcing tested against the test space.
    pub load: Vec<f64>,
}

pub fn build_system(p: &ProblemSpec, x: &TensorSpace, y: &TensorSpace) -> Result<DiscreteSystem> {
    p.validate()?;
    if y.space.partition().refinement_ratio(x.space.partition()).is_none()
        || y.time.partition().refinement_ratio(x.time.partition()).is_none()
    {
        return Err(Error::IncompatibleSpaces("test meshes must refine the trial meshes".into()));
    }
    let gram = assemble_as(p, y)?;
    let penalty = if p.weak_outflow {
        Some(OutflowPenalty::new(p, x)?)
    } else {
        None
    };
    Ok(DiscreteSystem {
        problem: *p,
        trial: *x,
        test: *y,
        b: assemble_b(p, x, y)?,
        gram_solver: gram.solver()?,
        gram,
        initial: InitialTrace::new(p, x)?,
        penalty,
        load: assemble_load(p, y)?,
    })
}

impl DiscreteSystem {
    pub fn trial_dim(&self) -> usize {
        self.trial.dim()
    }

    pub fn test_dim(&self) -> usize {
        self.test.dim()
    }

    /// The same system with data `g = B w`, `u₀ = γ₀ w` generated from a trial function.
    pub fn with_discrete_data(&self, w: &[f64]) -> Self {
        let u0h = self.initial.gamma0.mul_vec(w);
        Self {
            load: self.b.apply(w),
            initial: self.initial.with_discrete_data(&u0h),
            ..self.clone()
        }
    }

    /// The same system with all data set to zero.
    pub fn with_zero_data(&self) -> Self {
        let zero = vec![0.0; self.trial.dim()];
        self.with_discrete_data(&zero)
    }

    /// `N w`.
    pub fn normal_apply(&self, w: &[f64]) -> Vec<f64> {
        let bw = self.b.apply(w);
        let z = self.gram_solver.solve(&bw);
        let mut y = self.b.apply_transpose(&z);
        let g0w = self.initial.gamma0.mul_vec(w);
        let m = self.initial.h_mass.mul_vec(&g0w);
        let t = self.initial.gamma0.transpose_mul_vec(&m);
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi += self.problem.beta * ti;
        }
        if let Some(pen) = &self.penalty {
            pen.matrix.mul_vec_add(1.0, w, &mut y);
        }
        y
    }

    pub fn normal_rhs(&self) -> Vec<f64> {
        let z = self.gram_solver.solve(&self.load);
        let mut rhs = self.b.apply_transpose(&z);
        for (r, v) in rhs.iter_mut().zip(self.initial.normal_rhs()) {
            *r += v;
        }
        rhs
    }

    /// `‖g − B w‖²_{Y'}` on this system's test space.
    pub fn residual_dual_norm2(&self, w: &[f64]) -> f64 {
        let bw = self.b.apply(w);
        let r: Vec<f64> = self.load.iter().zip(&bw).map(|(g, v)| g - v).collect();
        dot(&r, &self.gram_solver.solve(&r)).max(0.0)
    }

    /// Value of the minimized functional at `w`.
    pub fn objective(&self, w: &[f64]) -> f64 {
        self.residual_dual_norm2(w) + self.initial.misfit(w) + self.penalty.as_ref().map_or(0.0, |p| p.value(w))
    }

    /// Assemble `N` as a symmetric block-tridiagonal matrix in time.
    pub fn normal_block_tridiagonal(&self) -> Result<BlockTridiagonal> {
        let nt = self.trial.time.dim();
        let ns = self.trial.space.dim();
        let m_y = self.gram.m_t.to_dense();
        let m_y_chol = m_y
            .cholesky()
            .ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?;
        let k_fac = factor_spd(&self.gram.k_x)?;

        // time couplings T_kl = A_kᵀ M_Y⁻¹ A_l and spatial couplings Q_kl = B_kᵀ K⁻¹ B_l
        let terms = &self.b.terms;
        let a_inv: Vec<DMatrix<f64>> = terms.iter().map(|(a, _)| m_y_chol.solve(&a.to_dense())).collect();
        let k_inv_b: Vec<DMatrix<f64>> = terms
            .iter()
            .map(|(_, b)| {
                let mut out = DMatrix::zeros(b.nrows(), b.ncols());
                let bt = b.transpose();
                for j in 0..b.ncols() {
                    let col: Vec<f64> = {
                        let mut c = vec![0.0; b.nrows()];
                        for (i, v) in bt.row(j) {
                            c[i] = v;
                        }
                        c
                    };
                    out.set_column(j, &DVector::from_vec(k_fac.solve(&col)));
                }
                out
            })
            .collect();

        let mut diag = vec![DMatrix::zeros(ns, ns); nt];
        let mut lower = vec![DMatrix::zeros(ns, ns); nt.saturating_sub(1)];
        for (ak, bk) in terms {
            let akt = ak.to_dense().transpose();
            for l in 0..terms.len() {
                let t = &akt * &a_inv[l];
                let tmax = t.amax();
                for i in 0..nt {
                    for j in 0..nt {
                        if i.abs_diff(j) > 1 && t[(i, j)].abs() > 1e-12 * tmax {
                            return Err(Error::IncompatibleSpaces(
                                "normal matrix is not block tridiagonal in time".into(),
                            ));
                        }
                    }
                }
                let q = sparse_t_dense(bk, &k_inv_b[l]);
                for i in 0..nt {
                    let (d, o) = (t[(i, i)], if i + 1 < nt { t[(i + 1, i)] } else { 0.0 });
                    if d != 0.0 {
                        diag[i].zip_apply(&q, |a, b| *a += d * b);
                    }
                    if o != 0.0 {
                        lower[i].zip_apply(&q, |a, b| *a += o * b);
                    }
                }
            }
        }
        // initial misfit lives on the first time node
        let e0 = self.trial.time.trace_dof(Endpoint::Left).expect("unconstrained in time");
        diag[e0] += self.initial.h_mass.to_dense() * self.problem.beta;
        if let Some(pen) = &self.penalty {
            // ε M_t ⊗ e_R e_Rᵀ
            for (r, c, v) in pen.matrix.triplets() {
                let (ti, si) = (r / ns, r % ns);
                let (tj, sj) = (c / ns, c % ns);
                match ti.cmp(&tj) {
                    std::cmp::Ordering::Equal => diag[ti][(si, sj)] += v,
                    std::cmp::Ordering::Greater => lower[tj][(si, sj)] += v,
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        for d in &mut diag {
            *d = (&*d + d.transpose()) * 0.5;
        }
        Ok(BlockTridiagonal { diag, lower })
    }
}

/// `Bᵀ Z` for sparse `B` and dense `Z`.
fn sparse_t_dense(b: &CsrMatrix, z: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(b.ncols(), z.ncols());
    for i in 0..b.nrows() {
        for (j, v) in b.row(i) {
            for c in 0..z.ncols() {
                out[(j, c)] += v * z[(i, c)];
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub coefficients: Vec<f64>,
    /// Square root of the minimized functional on the solve's own test space until
    /// replaced by an estimate on a dedicated estimation space.
    pub estimator: f64,
    /// `estimator / ‖data‖`; `NaN` until a denominator is supplied.
    pub relative_error: f64,
    pub iterations: usize,
    pub final_residual: f64,
    pub wall_time: f64,
    /// Multiplier block of the BEN saddle system.
    pub multiplier: Option<Vec<f64>>,
}

impl SolveReport {
    fn new(sys: &DiscreteSystem, coefficients: Vec<f64>, iterations: usize, final_residual: f64, start: Instant) -> Self {
        let estimator = sys.objective(&coefficients).sqrt();
        Self {
            coefficients,
            estimator,
            relative_error: f64::NAN,
            iterations,
            final_residual,
            wall_time: start.elapsed().as_secs_f64(),
            multiplier: None,
        }
    }
}

/// Solve the MR normal equations.
pub fn solve_mr(sys: &DiscreteSystem, opts: &SolverOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let rhs = sys.normal_rhs();
    match opts.method {
        SolverMethod::Direct => {
            let factor = sys.normal_block_tridiagonal()?.factor()?;
            let w = factor.solve(&rhs);
            let r: Vec<f64> = sys.normal_apply(&w).iter().zip(&rhs).map(|(a, b)| a - b).collect();
            let rn = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
            let res = if rn > 0.0 { dot(&r, &r).sqrt() / rn } else { 0.0 };
            Ok(SolveReport::new(sys, w, 1, res, start))
        }
        SolverMethod::Cg => {
            let n = sys.trial_dim();
            let op = NormalOperator(sys);
            let pre = XNormPreconditioner::new(sys)?;
            let out = cg_solve(&op, &rhs, &pre, opts.tol, opts.max_iter.unwrap_or(10 * n), None)?;
            Ok(SolveReport::new(sys, out.solution, out.iterations, out.residual, start))
        }
    }
}

/// MR with the outflow condition imposed by the `ε`-weighted penalty; the system must
/// have been built for a problem with `weak_outflow` set.
pub fn solve_mr_weak_outflow(sys: &DiscreteSystem, opts: &SolverOptions) -> Result<SolveReport> {
    if !sys.problem.weak_outflow || sys.penalty.is_none() {
        return Err(Error::InvalidProblem("system was not built for weak outflow".into()));
    }
    solve_mr(sys, opts)
}

/// The normal operator `N` as a matrix-free operator.
pub struct NormalOperator<'a>(pub &'a DiscreteSystem);

impl LinearOperator for NormalOperator<'_> {
    fn nrows(&self) -> usize {
        self.0.trial_dim()
    }
    fn ncols(&self) -> usize {
        self.0.trial_dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.0.normal_apply(x));
    }
}

/// Inverse of the discrete Riesz map of
/// `‖w‖²_X = ‖w‖²_Y + ‖∂t w‖²_{Y'} + ‖w(T)‖² + (β−1)‖w(0)‖²` on the trial space,
/// with `‖∂t w‖_{Y'}` measured on the spatial trial space.
///
/// The spatial pencil `(K, M)` is diagonalized once; each spatial mode then needs a
/// tridiagonal solve in time with `λ M_t + λ⁻¹ S_t + e_T e_Tᵀ + (β−1) e_0 e_0ᵀ`.
pub struct XNormPreconditioner {
    nt: usize,
    ns: usize,
    /// `M`-orthonormal eigenvectors (columns) of `K v = λ M v`.
    modes: DMatrix<f64>,
    /// Per mode: tridiagonal (sub, diag, super) after LU elimination, stored as Thomas coefficients.
    thomas: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

impl XNormPreconditioner {
    pub fn new(sys: &DiscreteSystem) -> Result<Self> {
        let p = &sys.problem;
        let xs = &sys.trial.space;
        let xt = &sys.trial.time;
        let m = mass_1d(xs, xs)?.to_dense();
        let k = {
            let s = crate::assembly::stiffness_1d(xs, xs)?;
            let mm = mass_1d(xs, xs)?;
            CsrMatrix::linear_combination(&[(p.epsilon, &s), (p.e, &mm)]).to_dense()
        };
        // generalized eigenproblem through the Cholesky factor of M
        let chol = m.clone().cholesky().ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?;
        let l = chol.l();
        let linv = l.clone().try_inverse().ok_or(Error::SingularPivot(0))?;
        let c = &linv * &k * linv.transpose();
        let eig = SymmetricEigen::new((&c + c.transpose()) * 0.5);
        let modes = linv.transpose() * &eig.eigenvectors;
        let mt = mass_1d(xt, xt)?.to_dense();
        let st = crate::assembly::stiffness_1d(xt, xt)?.to_dense();
        let nt = xt.dim();
        let (i0, it) = (0, nt - 1);
        let mut thomas = Vec::with_capacity(eig.eigenvalues.len());
        for &lam in eig.eigenvalues.iter() {
            if !(lam > 0.0) {
                return Err(Error::NotSpd { row: 0, pivot: lam });
            }
            let mut sub = vec![0.0; nt];
            let mut dia = vec![0.0; nt];
            let mut sup = vec![0.0; nt];
            for i in 0..nt {
                dia[i] = lam * mt[(i, i)] + st[(i, i)] / lam;
                if i + 1 < nt {
                    sup[i] = lam * mt[(i, i + 1)] + st[(i, i + 1)] / lam;
                    sub[i + 1] = sup[i];
                }
            }
            dia[it] += 1.0;
            dia[i0] += p.beta - 1.0;
            // forward elimination
            for i in 1..nt {
                let f = sub[i] / dia[i - 1];
                dia[i] -= f * sup[i - 1];
                sub[i] = f;
            }
            thomas.push((sub, dia, sup));
        }
        Ok(Self {
            nt,
            ns: xs.dim(),
            modes,
            thomas,
        })
    }
}

impl LinearOperator for XNormPreconditioner {
    fn nrows(&self) -> usize {
        self.nt * self.ns
    }
    fn ncols(&self) -> usize {
        self.nt * self.ns
    }
    fn apply_into(&self, r: &[f64], out: &mut [f64]) {
        let (nt, ns) = (self.nt, self.ns);
        // r in mode coordinates: r̂_t = Vᵀ r_t
        let rm = DMatrix::from_row_slice(nt, ns, r);
        let mut z = rm * &self.modes;
        for (mode, (sub, dia, sup)) in self.thomas.iter().enumerate() {
            let mut y: Vec<f64> = (0..nt).map(|t| z[(t, mode)]).collect();
            for i in 1..nt {
                y[i] -= sub[i] * y[i - 1];
            }
            y[nt - 1] /= dia[nt - 1];
            for i in (0..nt - 1).rev() {
                y[i] = (y[i] - sup[i] * y[i + 1]) / dia[i];
            }
            for t in 0..nt {
                z[(t, mode)] = y[t];
            }
        }
        let w = z * self.modes.transpose();
        for t in 0..nt {
            for s in 0..ns {
                out[t * ns + s] = w[(t, s)];
            }
        }
    }
}

/// BEN saddle-point solve.
///
/// With `C = B − A_s` and the trial space contained in the test space, solves
///
/// ```text
/// [ G_Y   C                                   ] [λ]   [ g_Y           ]
/// [ Cᵀ   −(A_s + A_a + A_aᵀ + γ_Tᵀγ_T + (β−1)γ₀ᵀγ₀) ] [u] = [ −(g_X + β γ₀ᵀ m₀) ]
/// ```
///
/// where `A_a + A_aᵀ` vanishes when the convection form is skew (Dirichlet data at
/// both ends). The `u` block coincides with the MR solution.
pub fn solve_ben(sys: &DiscreteSystem) -> Result<SolveReport> {
    let start = Instant::now();
    let p = &sys.problem;
    if p.weak_outflow {
        return Err(Error::InvalidProblem("BEN is formulated for essential boundary conditions only".into()));
    }
    let (x, y) = (&sys.trial, &sys.test);
    let g_y = sys.gram.to_csr();
    let c = assemble_c(p, x, y)?.to_csr();
    let as_x = assemble_as_pair(p, x, x)?.to_csr();
    let aa_x = assemble_aa(p, x, x)?.to_csr();
    let aa_sym = CsrMatrix::linear_combination(&[(1.0, &aa_x), (1.0, &aa_x.transpose())]);
    let ns = x.space.dim();
    let nt = x.time.dim();
    let mh = &sys.initial.h_mass;
    let trace_block = |i: usize, s: f64| CsrMatrix::kron(&CsrMatrix::from_triplets(nt, nt, [(i, i, s)]), mh);
    let e0 = x.time.trace_dof(Endpoint::Left).expect("free in time");
    let et = x.time.trace_dof(Endpoint::Right).expect("free in time");
    let lower_right = CsrMatrix::linear_combination(&[
        (-1.0, &as_x),
        (-1.0, &aa_sym),
        (-1.0, &trace_block(et, 1.0)),
        (-1.0, &trace_block(e0, p.beta - 1.0)),
    ]);
    let saddle = CsrMatrix::block2x2(&g_y, &c, &c.transpose(), &lower_right)?;

    // g_X: the forcing tested with trial functions, through the inclusion X ⊆ Y
    let g_x = embedding(x, y)?.transpose_mul_vec(&sys.load);
    let init = sys.initial.normal_rhs();
    let mut rhs = sys.load.clone();
    rhs.extend(g_x.iter().zip(&init).map(|(a, b)| -(a + b)));
    let fac = factor_symmetric_indefinite(&saddle)?;
    let sol = fac.solve(&rhs);
    let ny = y.dim();
    let u = sol[ny..].to_vec();
    debug_assert_eq!(u.len(), nt * ns);
    let mut report = SolveReport::new(sys, u, 1, 0.0, start);
    report.multiplier = Some(sol[..ny].to_vec());
    Ok(report)
}

/// Coefficient map of the inclusion `X ⊆ Y` (rows: test dofs, columns: trial dofs).
pub fn embedding(x: &TensorSpace, y: &TensorSpace) -> Result<CsrMatrix> {
    let et = embedding_1d(&x.time, &y.time)?;
    let es = embedding_1d(&x.space, &y.space)?;
    Ok(CsrMatrix::kron(&et, &es))
}

fn embedding_1d(coarse: &FESpace1D, fine: &FESpace1D) -> Result<CsrMatrix> {
    let ratio = fine
        .partition()
        .refinement_ratio(coarse.partition())
        .ok_or(Error::NonNestedMeshes(coarse.partition().n_cells(), fine.partition().n_cells()))?;
    let c0 = fine.continuity() == Continuity::C0;
    if coarse.continuity() == Continuity::Dg && c0 {
        return Err(Error::IncompatibleSpaces("discontinuous functions do not embed into C0".into()));
    }
    if c0 && !coarse.essential_bc().is_superset_of(&fine.essential_bc()) {
        return Err(Error::IncompatibleSpaces("trial functions violate test-space boundary conditions".into()));
    }
    let fp = fine.partition();
    let mut trips = Vec::new();
    for fc in 0..fp.n_cells() {
        let cc = fc / ratio;
        let (a, b) = fp.cell(fc);
        for (loc, xv) in [a, b].into_iter().enumerate() {
            // C0 nodes shared by two fine cells are visited once
            if c0 && loc == 0 && fc > 0 {
                continue;
            }
            let Some(i) = fine.local_dof(fc, loc) else { continue };
            let vals = coarse.local_basis(cc, xv);
            for (cl, v) in vals.iter().enumerate() {
                if let Some(j) = coarse.local_dof(cc, cl) {
                    if *v != 0.0 {
                        trips.push((i, j, *v));
                    }
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(fine.dim(), coarse.dim(), trips))
}
