//! Sums of Kronecker products `Σ_k A_t^k ⊗ B_x^k` acting on time-major vectors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linops::{CsrMatrix, LinearOperator};
use crate::spaces::TensorSpace;

#[derive(Debug, Clone)]
pub struct KroneckerOp {
    pub terms: Vec<(CsrMatrix, CsrMatrix)>,
    pub row_space: TensorSpace,
    pub col_space: TensorSpace,
}

impl KroneckerOp {
    pub fn new(row_space: TensorSpace, col_space: TensorSpace, terms: Vec<(CsrMatrix, CsrMatrix)>) -> Result<Self> {
        for (a, b) in &terms {
            let shape_ok = a.nrows() == row_space.time.dim()
                && a.ncols() == col_space.time.dim()
                && b.nrows() == row_space.space.dim()
                && b.ncols() == col_space.space.dim();
            if !shape_ok {
                return Err(Error::IncompatibleSpaces(format!(
                    "Kronecker term {}x{} ⊗ {}x{} does not map {} into {}",
                    a.nrows(),
                    a.ncols(),
                    b.nrows(),
                    b.ncols(),
                    col_space.dim(),
                    row_space.dim()
                )));
            }
        }
        Ok(Self {
            terms,
            row_space,
            col_space,
        })
    }

    pub fn nrows(&self) -> usize {
        self.row_space.dim()
    }

    pub fn ncols(&self) -> usize {
        self.col_space.dim()
    }

    /// `y = Σ (A_t ⊗ B_x) x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows()];
        for (a, b) in &self.terms {
            kron_apply_add(a, b, x, &mut y);
        }
        y
    }

    /// `y = Σ (A_t ⊗ B_x)ᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols()];
        for (a, b) in &self.terms {
            kron_apply_add(&a.transpose(), &b.transpose(), x, &mut y);
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(a, b)| (a.transpose(), b.transpose())).collect(),
            row_space: self.col_space,
            col_space: self.row_space,
        }
    }

    /// Assembled sparse matrix.
    pub fn to_csr(&self) -> CsrMatrix {
        let parts: Vec<CsrMatrix> = self.terms.iter().map(|(a, b)| CsrMatrix::kron(a, b)).collect();
        let refs: Vec<(f64, &CsrMatrix)> = parts.iter().map(|m| (1.0, m)).collect();
        if refs.is_empty() {
            return CsrMatrix::zeros(self.nrows(), self.ncols());
        }
        CsrMatrix::linear_combination(&refs)
    }

    /// `self − other` on identical spaces.
    pub fn minus(&self, other: &KroneckerOp) -> Result<Self> {
        if self.row_space != other.row_space || self.col_space != other.col_space {
            return Err(Error::IncompatibleSpaces("difference of operators on different spaces".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(a, b)| (a.scaled(-1.0), b.clone())));
        Ok(Self { terms, ..self.clone() })
    }
}

impl LinearOperator for KroneckerOp {
    fn nrows(&self) -> usize {
        self.row_space.dim()
    }
    fn ncols(&self) -> usize {
        self.col_space.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (a, b) in &self.terms {
            kron_apply_add(a, b, x, y);
        }
    }
}

/// `y += (A ⊗ B) x` with `x` stored time-major (`A` acts on the slow index).
pub fn kron_apply_add(a: &CsrMatrix, b: &CsrMatrix, x: &[f64], y: &mut [f64]) {
    let (ns_in, ns_out) = (b.ncols(), b.nrows());
    debug_assert_eq!(x.len(), a.ncols() * ns_in);
    debug_assert_eq!(y.len(), a.nrows() * ns_out);
    // z_t = B x_t for every input time row
    let mut z = vec![0.0; a.ncols() * ns_out];
    z.par_chunks_mut(ns_out.max(1))
        .zip(x.par_chunks(ns_in.max(1)))
        .for_each(|(zt, xt)| b.mul_vec_into(xt, zt));
    y.par_chunks_mut(ns_out.max(1)).enumerate().for_each(|(i, yi)| {
        for (j, aij) in a.row(i) {
            let zj = &z[j * ns_out..(j + 1) * ns_out];
            for (u, v) in yi.iter_mut().zip(zj) {
                *u += aij * v;
            }
        }
    });
}
