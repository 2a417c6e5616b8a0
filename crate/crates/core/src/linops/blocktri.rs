//! Cholesky-based solves for symmetric positive definite block-tridiagonal matrices
//! with dense blocks.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::linops::sparse::LinearOperator;

/// Symmetric block-tridiagonal matrix: `diag[k]` on the diagonal, `lower[k]` at block `(k+1, k)`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub diag: Vec<DMatrix<f64>>,
    pub lower: Vec<DMatrix<f64>>,
}

impl BlockTridiagonal {
    pub fn block_size(&self) -> usize {
        self.diag.first().map_or(0, |d| d.nrows())
    }

    pub fn dim(&self) -> usize {
        self.diag.len() * self.block_size()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let m = self.block_size();
        let nb = self.diag.len();
        let mut y = vec![0.0; nb * m];
        for k in 0..nb {
            let xk = DVector::from_column_slice(&x[k * m..(k + 1) * m]);
            let mut yk = &self.diag[k] * &xk;
            if k > 0 {
                yk += &self.lower[k - 1] * DVector::from_column_slice(&x[(k - 1) * m..k * m]);
            }
            if k + 1 < nb {
                yk += self.lower[k].tr_mul(&DVector::from_column_slice(&x[(k + 1) * m..(k + 2) * m]));
            }
            y[k * m..(k + 1) * m].copy_from_slice(yk.as_slice());
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.block_size();
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for (k, d) in self.diag.iter().enumerate() {
            a.view_mut((k * m, k * m), (m, m)).copy_from(d);
        }
        for (k, l) in self.lower.iter().enumerate() {
            a.view_mut(((k + 1) * m, k * m), (m, m)).copy_from(l);
            a.view_mut((k * m, (k + 1) * m), (m, m)).copy_from(&l.transpose());
        }
        a
    }

    /// Block LDLᵀ: Schur complements `S_k = D_k − L_{k−1} S_{k−1}⁻¹ L_{k−1}ᵀ`, each Cholesky-factored.
    pub fn factor(self) -> Result<BlockTridiagonalFactor> {
        let m = self.block_size();
        let mut schur: Vec<Cholesky<f64, Dyn>> = Vec::with_capacity(self.diag.len());
        // diagonal blocks are consumed one by one so peak memory stays near one copy
        for (k, mut s) in self.diag.into_iter().enumerate() {
            if k > 0 {
                let l = &self.lower[k - 1];
                let w = schur[k - 1].solve(&l.transpose());
                s -= l * w;
                // restore exact symmetry lost to rounding
                s = (&s + s.transpose()) * 0.5;
            }
            let chol = Cholesky::new(s).ok_or(Error::NotSpd {
                row: k * m,
                pivot: f64::NAN,
            })?;
            schur.push(chol);
        }
        Ok(BlockTridiagonalFactor {
            m,
            schur,
            lower: self.lower,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BlockTridiagonalFactor {
    m: usize,
    schur: Vec<Cholesky<f64, Dyn>>,
    lower: Vec<DMatrix<f64>>,
}

impl BlockTridiagonalFactor {
    pub fn dim(&self) -> usize {
        self.m * self.schur.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = self.m;
        let nb = self.schur.len();
        let mut y: Vec<DVector<f64>> = Vec::with_capacity(nb);
        for k in 0..nb {
            let mut yk = DVector::from_column_slice(&b[k * m..(k + 1) * m]);
            if k > 0 {
                yk -= &self.lower[k - 1] * self.schur[k - 1].solve(&y[k - 1]);
            }
            y.push(yk);
        }
        let mut x = vec![0.0; nb * m];
        let mut next: Option<DVector<f64>> = None;
        for k in (0..nb).rev() {
            let mut rhs = y[k].clone();
            if let Some(xn) = &next {
                rhs -= self.lower[k].tr_mul(xn);
            }
            let xk = self.schur[k].solve(&rhs);
            x[k * m..(k + 1) * m].copy_from_slice(xk.as_slice());
            next = Some(xk);
        }
        x
    }
}

impl LinearOperator for BlockTridiagonalFactor {
    fn nrows(&self) -> usize {
        self.dim()
    }
    fn ncols(&self) -> usize {
        self.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.solve(x));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_spd_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (nb, m) = (6, 4);
        let rand_block = |rng: &mut ChaCha8Rng| DMatrix::from_fn(m, m, |_, _| rng.random_range(-0.3..0.3));
        let lower: Vec<_> = (0..nb - 1).map(|_| rand_block(&mut rng)).collect();
        let diag: Vec<_> = (0..nb)
            .map(|_| {
                let r = rand_block(&mut rng);
                &r * r.transpose() + DMatrix::identity(m, m) * 3.0
            })
            .collect();
        let bt = BlockTridiagonal { diag, lower };
        let dense = bt.to_dense();
        let b: Vec<f64> = (0..nb * m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = bt.clone().factor().unwrap().solve(&b);
        let r = &dense * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
        assert!(r.norm() < 1e-12 * DVector::from_column_slice(&b).norm());
        let y = bt.mul_vec(&x);
        for (u, v) in y.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let bt = BlockTridiagonal {
            diag: vec![DMatrix::identity(2, 2), DMatrix::identity(2, 2)],
            lower: vec![DMatrix::identity(2, 2) * 2.0],
        };
        assert!(bt.factor().is_err());
    }
}
