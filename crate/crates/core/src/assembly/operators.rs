//! Global space-time operators in Kronecker form.
//!
//! With `a(w, v) = ∫ ε w'v' + b w'v + e wv`, the operators on trial space `X` and
//! test space `Y` are
//!
//! * `B   = C_t ⊗ M_x + M_t ⊗ (ε S_x + b N_x + e M_x)`
//! * `A_s = M_t ⊗ (ε S_x + e M_x)`
//! * `A_a = M_t ⊗ b N_x`
//! * `C   = B − A_s = C_t ⊗ M_x + M_t ⊗ b N_x`
//! * `∂t  = C_t ⊗ M_x`
//!
//! where `C_t[i, j] = ∫ φ_j′ ψ_i` couples temporal trial and test functions.

use crate::assembly::kron::KroneckerOp;
use crate::assembly::matrices1d::{convection_1d, mass_1d, stiffness_1d};
use crate::assembly::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::linops::{CsrMatrix, KronSpdSolver};
use crate::spaces::{Continuity, TensorSpace};

fn check_trial(x: &TensorSpace) -> Result<()> {
    if x.time.continuity() != Continuity::C0 || !x.time.essential_bc().is_empty() {
        return Err(Error::IncompatibleSpaces(
            "trial functions must be continuous in time without temporal constraints".into(),
        ));
    }
    Ok(())
}

/// `ε S_x + e M_x` between two spatial spaces.
fn symmetric_spatial(p: &ProblemSpec, row: &TensorSpace, col: &TensorSpace) -> Result<CsrMatrix> {
    let s = stiffness_1d(&row.space, &col.space)?;
    let m = mass_1d(&row.space, &col.space)?;
    Ok(CsrMatrix::linear_combination(&[(p.epsilon, &s), (p.e, &m)]))
}

pub fn assemble_b(p: &ProblemSpec, x: &TensorSpace, y: &TensorSpace) -> Result<KroneckerOp> {
    check_trial(x)?;
    let ct = convection_1d(&y.time, &x.time)?;
    let mt = mass_1d(&y.time, &x.time)?;
    let mx = mass_1d(&y.space, &x.space)?;
    let nx = convection_1d(&y.space, &x.space)?;
    let sym = symmetric_spatial(p, y, x)?;
    let spatial = CsrMatrix::linear_combination(&[(1.0, &sym), (p.b, &nx)]);
    KroneckerOp::new(*y, *x, vec![(ct, mx), (mt, spatial)])
}

/// The symmetric part paired between two (possibly different) tensor spaces.
pub fn assemble_as_pair(p: &ProblemSpec, row: &TensorSpace, col: &TensorSpace) -> Result<KroneckerOp> {
    let mt = mass_1d(&row.time, &col.time)?;
    KroneckerOp::new(*row, *col, vec![(mt, symmetric_spatial(p, row, col)?)])
}

/// Gram matrix of the energy inner product on `Y`, kept in factored Kronecker form.
#[derive(Debug, Clone)]
pub struct GramOperator {
    pub space: TensorSpace,
    pub m_t: CsrMatrix,
    pub k_x: CsrMatrix,
}

impl GramOperator {
    pub fn to_kronecker(&self) -> KroneckerOp {
        KroneckerOp {
            terms: vec![(self.m_t.clone(), self.k_x.clone())],
            row_space: self.space,
            col_space: self.space,
        }
    }

    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::kron(&self.m_t, &self.k_x)
    }

    pub fn solver(&self) -> Result<KronSpdSolver> {
        KronSpdSolver::new(&self.m_t, &self.k_x)
    }
}

pub fn assemble_as(p: &ProblemSpec, y: &TensorSpace) -> Result<GramOperator> {
    if p.e == 0.0 && y.space.essential_bc().is_empty() {
        return Err(Error::InvalidProblem(
            "the energy form is singular without reaction and without spatial constraints".into(),
        ));
    }
    Ok(GramOperator {
        space: *y,
        m_t: mass_1d(&y.time, &y.time)?,
        k_x: symmetric_spatial(p, y, y)?,
    })
}

pub fn assemble_aa(p: &ProblemSpec, row: &TensorSpace, col: &TensorSpace) -> Result<KroneckerOp> {
    let mt = mass_1d(&row.time, &col.time)?;
    let nx = convection_1d(&row.space, &col.space)?.scaled(p.b);
    KroneckerOp::new(*row, *col, vec![(mt, nx)])
}

pub fn assemble_dt(x: &TensorSpace, y: &TensorSpace) -> Result<KroneckerOp> {
    check_trial(x)?;
    let ct = convection_1d(&y.time, &x.time)?;
    let mx = mass_1d(&y.space, &x.space)?;
    KroneckerOp::new(*y, *x, vec![(ct, mx)])
}

/// `C = ∂t + A_a`, i.e. `B` minus its symmetric part.
pub fn assemble_c(p: &ProblemSpec, x: &TensorSpace, y: &TensorSpace) -> Result<KroneckerOp> {
    let mut c = assemble_dt(x, y)?;
    c.terms.extend(assemble_aa(p, y, x)?.terms);
    Ok(c)
}
