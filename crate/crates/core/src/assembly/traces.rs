//! Initial-trace misfit and the weak outflow penalty on a trial space.

use crate::assembly::loads::{h_mass, initial_load};
use crate::assembly::matrices1d::mass_1d;
use crate::assembly::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::linops::{dot, CsrMatrix};
use crate::spaces::{Endpoint, TensorSpace};

/// `β ‖γ₀ w − u₀‖²_{L₂}` as a quadratic form on trial coefficients.
#[derive(Debug, Clone)]
pub struct InitialTrace {
    /// `γ₀ = e₀ᵀ ⊗ I`, mapping trial coefficients to spatial coefficients at `t = 0`.
    pub gamma0: CsrMatrix,
    pub h_mass: CsrMatrix,
    pub m0: Vec<f64>,
    pub u0_norm2: f64,
    pub beta: f64,
}

impl InitialTrace {
    pub fn new(p: &ProblemSpec, x: &TensorSpace) -> Result<Self> {
        let e0 = x.time.trace_vector(Endpoint::Left);
        let row = CsrMatrix::from_triplets(1, e0.len(), e0.iter().enumerate().map(|(j, v)| (0, j, *v)));
        let gamma0 = CsrMatrix::kron(&row, &CsrMatrix::identity(x.space.dim()));
        let (m0, u0_norm2) = initial_load(p, &x.space);
        Ok(Self {
            gamma0,
            h_mass: h_mass(&x.space)?,
            m0,
            u0_norm2,
            beta: p.beta,
        })
    }

    /// `β γ₀ᵀ M_H γ₀`.
    pub fn normal_matrix(&self) -> CsrMatrix {
        self.gamma0.transpose().matmul(&self.h_mass).matmul(&self.gamma0).scaled(self.beta)
    }

    /// `β γ₀ᵀ m₀`.
    pub fn normal_rhs(&self) -> Vec<f64> {
        self.gamma0.transpose_mul_vec(&self.m0).iter().map(|v| self.beta * v).collect()
    }

    /// `β[(γ₀w)ᵀ M_H (γ₀w) − 2 (γ₀w)ᵀ m₀ + ‖u₀‖²]`, clipped at zero against rounding.
    pub fn misfit(&self, w: &[f64]) -> f64 {
        let g0w = self.gamma0.mul_vec(w);
        let q = dot(&g0w, &self.h_mass.mul_vec(&g0w)) - 2.0 * dot(&g0w, &self.m0) + self.u0_norm2;
        (self.beta * q).max(0.0)
    }

    /// Replace the data by that of a given initial coefficient vector `u0h` on the trial space.
    pub fn with_discrete_data(&self, u0h: &[f64]) -> Self {
        let m0 = self.h_mass.mul_vec(u0h);
        let n2 = dot(u0h, &m0);
        Self {
            m0,
            u0_norm2: n2,
            ..self.clone()
        }
    }
}

/// `ε ‖w(·, 1)‖²_{L₂(I)}` for trial spaces that leave the right end free.
#[derive(Debug, Clone)]
pub struct OutflowPenalty {
    pub matrix: CsrMatrix,
}

impl OutflowPenalty {
    pub fn new(p: &ProblemSpec, x: &TensorSpace) -> Result<Self> {
        let Some(r) = x.space.trace_dof(Endpoint::Right) else {
            return Err(Error::InvalidProblem(
                "outflow penalty requested while the right end is still constrained".into(),
            ));
        };
        let ns = x.space.dim();
        let er = CsrMatrix::from_triplets(ns, ns, [(r, r, 1.0)]);
        let mt = mass_1d(&x.time, &x.time)?;
        Ok(Self {
            matrix: CsrMatrix::kron(&mt, &er).scaled(p.epsilon),
        })
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        dot(w, &self.matrix.mul_vec(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::problem::{ForcingDescriptor, InitialDescriptor};
    use crate::spaces::{BoundarySet, FESpace1D, Partition1D};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn trial(n: usize, bc: BoundarySet) -> TensorSpace {
        let p = Partition1D::uniform(n).unwrap();
        TensorSpace::new(FESpace1D::continuous(p, BoundarySet::NONE), FESpace1D::continuous(p, bc))
    }

    fn problem(u0: InitialDescriptor) -> ProblemSpec {
        ProblemSpec::new(0.1, 1.0, 1.0, BoundarySet::BOTH, None, ForcingDescriptor::Zero, u0).unwrap()
    }

    #[test]
    fn misfit_vanishes_and_converges() {
        let x = trial(4, BoundarySet::BOTH);
        let zero_start = x.interpolate(|t, x| t * x * (1.0 - x));
        let it = InitialTrace::new(&problem(InitialDescriptor::Zero), &x).unwrap();
        assert!(it.misfit(&zero_start) < 1e-15);

        let mut prev = f64::INFINITY;
        for n in [8, 16, 32] {
            let x = trial(n, BoundarySet::BOTH);
            let w = x.interpolate(|_, x| (PI * x).sin());
            let m = InitialTrace::new(&problem(InitialDescriptor::SinPi), &x).unwrap().misfit(&w);
            // squared interpolation error: fourth order
            assert!(m < prev / 12.0, "n = {n}: {m}");
            prev = m;
        }
    }

    #[test]
    fn outflow_penalty_of_linear_ramp() {
        let p = problem(InitialDescriptor::Zero).with_weak_outflow().unwrap();
        let x = trial(16, p.trial_bc());
        let w = x.interpolate(|t, x| t * x);
        let v = OutflowPenalty::new(&p, &x).unwrap().value(&w);
        assert_relative_eq!(v, p.epsilon / 3.0, max_relative = 1e-12);
        assert!(OutflowPenalty::new(&p, &trial(4, BoundarySet::BOTH)).is_err());
    }
}
