//! Extremal eigenvalues of symmetric-definite pencils `A x = λ M x`.
//!
//! Two routes: a dense one (whole pencil reduced on a complement of the
//! deflation space, with a numerical null-space guard on `M`), and a
//! matrix-free Lanczos iteration in the `M` inner product.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linops::sparse::{dot, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Relative cut-off below which directions of `M` are treated as null.
pub const NULL_SPACE_TOL: f64 = 1e-10;

/// Dense extremal generalized eigenpair.
///
/// The pencil is restricted to the `M`-orthogonal complement of `deflation`
/// (columns spanning the removed subspace). Directions where the restricted `M`
/// falls below `NULL_SPACE_TOL · ‖M‖` are discarded as well.
pub fn gen_eig_dense(
    a: &DMatrix<f64>,
    m: &DMatrix<f64>,
    which: Which,
    deflation: Option<&DMatrix<f64>>,
) -> Result<EigPair> {
    let n = a.nrows();
    if a.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.nrows(),
        });
    }
    let q = match deflation {
        Some(z) if z.ncols() > 0 => complement_basis(&m_directions(m, z)),
        _ => DMatrix::identity(n, n),
    };
    let a_r = sym(&(q.transpose() * a * &q));
    let m_r = sym(&(q.transpose() * m * &q));

    let em = SymmetricEigen::new(m_r);
    let smax = em.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..em.eigenvalues.len())
        .filter(|&i| em.eigenvalues[i] > NULL_SPACE_TOL * smax)
        .collect();
    if keep.is_empty() {
        return Err(Error::EigenBreakdown { last_rayleigh: f64::NAN });
    }
    let w = DMatrix::from_fn(q.ncols(), keep.len(), |r, c| {
        em.eigenvectors[(r, keep[c])] / em.eigenvalues[keep[c]].sqrt()
    });
    let c = sym(&(w.transpose() * a_r * &w));
    let ec = SymmetricEigen::new(c);
    let idx = pick(ec.eigenvalues.as_slice(), which);
    let value = ec.eigenvalues[idx];
    let vector = q * (w * ec.eigenvectors.column(idx));
    Ok(EigPair {
        value,
        vector: vector.as_slice().to_vec(),
        iterations: 1,
    })
}

fn pick(values: &[f64], which: Which) -> usize {
    let cmp = |a: &(usize, &f64), b: &(usize, &f64)| a.1.total_cmp(b.1);
    let it = values.iter().enumerate();
    match which {
        Which::Smallest => it.min_by(cmp),
        Which::Largest => it.max_by(cmp),
    }
    .map(|(i, _)| i)
    .unwrap_or(0)
}

fn sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// `M z` per column, falling back to `z` itself where `M z` vanishes (kernel directions
/// of `M`, for which any complement is equivalent).
fn m_directions(m: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    let mut mz = m * z;
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for j in 0..z.ncols() {
        if mz.column(j).norm() <= NULL_SPACE_TOL * scale * z.column(j).norm() {
            mz.set_column(j, &z.column(j));
        }
    }
    mz
}

/// Orthonormal basis of the Euclidean orthogonal complement of the column span of `v`.
fn complement_basis(v: &DMatrix<f64>) -> DMatrix<f64> {
    let n = v.nrows();
    let svd = v.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > NULL_SPACE_TOL * smax).count();
    let span = u.columns(0, rank).into_owned();
    // Gram–Schmidt the identity against the span, keeping n − rank directions
    let mut basis: Vec<DVector<f64>> = (0..rank).map(|j| span.column(j).into_owned()).collect();
    let mut out = Vec::with_capacity(n - rank);
    for i in 0..n {
        if out.len() == n - rank {
            break;
        }
        let mut e = DVector::<f64>::zeros(n);
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&e);
                e.axpy(-c, b, 1.0);
            }
        }
        let nrm = e.norm();
        if nrm > 1e-8 {
            e /= nrm;
            basis.push(e.clone());
            out.push(e);
        }
    }
    DMatrix::from_columns(&out)
}

/// Matrix-free extremal generalized eigenpair by Lanczos in the `M` inner product
/// with full reorthogonalization.
///
/// `m_inv` applies `M⁻¹`. Vectors in `deflation` are projected out (`M`-orthogonally)
/// from every Krylov vector. Stops when the Ritz residual estimate drops below
/// `tol · |θ|`.
pub fn gen_eig_extremal(
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    m_inv: &dyn LinearOperator,
    which: Which,
    deflation: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<EigPair> {
    let n = a.nrows();
    let m_dot = |x: &[f64], y: &[f64]| dot(x, &m.apply(y));

    // M-orthonormal deflation basis
    let mut defl: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for z in deflation {
        let mut z = z.clone();
        for _ in 0..2 {
            for (d, md) in &defl {
                let c = dot(&z, md);
                axpy(-c, d, &mut z);
            }
        }
        let mz = m.apply(&z);
        let nrm = dot(&z, &mz).max(0.0).sqrt();
        if nrm > 1e-12 {
            defl.push((z.iter().map(|v| v / nrm).collect(), mz.iter().map(|v| v / nrm).collect()));
        }
    }
    let project = |x: &mut Vec<f64>, basis: &[(Vec<f64>, Vec<f64>)]| {
        for _ in 0..2 {
            for (d, md) in basis {
                let c = dot(x, md);
                axpy(-c, d, x);
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    project(&mut v, &defl);
    let nv = m_dot(&v, &v).sqrt();
    if !(nv > 0.0) {
        return Err(Error::EigenBreakdown { last_rayleigh: f64::NAN });
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let max_iter = max_iter.min(n.saturating_sub(defl.len())).max(1);
    let mut krylov: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    for it in 1..=max_iter {
        let mv = m.apply(&v);
        let av = a.apply(&v);
        let alpha = dot(&v, &av);
        let mut w = m_inv.apply(&av);
        krylov.push((v.clone(), mv));
        alphas.push(alpha);
        project(&mut w, &defl);
        project(&mut w, &krylov);
        let beta = m_dot(&w, &w).max(0.0).sqrt();

        let t = tridiagonal(&alphas, &betas);
        let et = SymmetricEigen::new(t);
        let idx = pick(et.eigenvalues.as_slice(), which);
        let theta = et.eigenvalues[idx];
        let resid = (beta * et.eigenvectors[(it - 1, idx)]).abs();
        last = theta;
        let converged = resid <= tol * theta.abs().max(f64::MIN_POSITIVE);
        // an exhausted Krylov space is exact as well
        let invariant = beta <= 1e-14 * theta.abs().max(f64::MIN_POSITIVE) || it + defl.len() >= n;
        if converged || invariant {
            let y = et.eigenvectors.column(idx);
            let mut x = vec![0.0; n];
            for (k, (vk, _)) in krylov.iter().enumerate() {
                axpy(y[k], vk, &mut x);
            }
            return Ok(EigPair {
                value: theta,
                vector: x,
                iterations: it,
            });
        }
        betas.push(beta);
        v = w.iter().map(|x| x / beta).collect();
    }
    Err(Error::EigenBreakdown { last_rayleigh: last })
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::ldl::factor_spd;
    use crate::linops::sparse::{CsrMatrix, Identity};

    fn laplace_and_mass(n: usize) -> (CsrMatrix, CsrMatrix) {
        let h = 1.0 / n as f64;
        let m = n - 1;
        let (mut s, mut ms) = (Vec::new(), Vec::new());
        for i in 0..m {
            s.push((i, i, 2.0 / h));
            ms.push((i, i, 4.0 * h / 6.0));
            if i + 1 < m {
                s.extend([(i, i + 1, -1.0 / h), (i + 1, i, -1.0 / h)]);
                ms.extend([(i, i + 1, h / 6.0), (i + 1, i, h / 6.0)]);
            }
        }
        (CsrMatrix::from_triplets(m, m, s), CsrMatrix::from_triplets(m, m, ms))
    }

    #[test]
    fn pencil_with_itself_and_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        for w in [Which::Smallest, Which::Largest] {
            assert!((gen_eig_dense(&m, &m, w, None).unwrap().value - 1.0).abs() < 1e-12);
        }
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let i = DMatrix::identity(2, 2);
        assert!((gen_eig_dense(&a, &i, Which::Smallest, None).unwrap().value - 1.0).abs() < 1e-12);
        assert!((gen_eig_dense(&a, &i, Which::Largest, None).unwrap().value - 4.0).abs() < 1e-12);
        let a_op = CsrMatrix::from_diagonal(&[1.0, 4.0]);
        let lz = |w| gen_eig_extremal(&a_op, &Identity(2), &Identity(2), w, &[], 1e-10, 10).unwrap().value;
        assert!((lz(Which::Smallest) - 1.0).abs() < 1e-12);
        assert!((lz(Which::Largest) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_laplacian_lowest_mode() {
        let (s, m) = laplace_and_mass(64);
        let dense = gen_eig_dense(&s.to_dense(), &m.to_dense(), Which::Smallest, None).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((dense.value / pi2 - 1.0).abs() < 2e-3);
        let minv = factor_spd(&m).unwrap();
        let lz = gen_eig_extremal(&s, &m, &minv, Which::Smallest, &[], 1e-10, 200).unwrap();
        assert!((lz.value - dense.value).abs() < 1e-8 * dense.value);
    }

    #[test]
    fn deflation_removes_the_lowest_mode() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 2.0, 3.0]));
        let i = DMatrix::identity(3, 3);
        let z = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let val = gen_eig_dense(&a, &i, Which::Smallest, Some(&z)).unwrap().value;
        assert!((val - 2.0).abs() < 1e-12);
        let a_op = CsrMatrix::from_diagonal(&[0.0, 2.0, 3.0]);
        let lz = gen_eig_extremal(&a_op, &Identity(3), &Identity(3), Which::Smallest, &[vec![1.0, 0.0, 0.0]], 1e-12, 10)
            .unwrap();
        assert!((lz.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn null_space_guard_skips_common_kernel() {
        // both forms vanish on e_0; the pencil lives on the remaining coordinates
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0, 6.0]));
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 2.0, 2.0]));
        let val = gen_eig_dense(&a, &m, Which::Smallest, None).unwrap().value;
        assert!((val - 0.5).abs() < 1e-12);
    }

    #[test]
    fn smallest_bounds_probe_rayleigh_quotients() {
        let (s, m) = laplace_and_mass(20);
        let (sd, md) = (s.to_dense(), m.to_dense());
        let lam = gen_eig_dense(&sd, &md, Which::Smallest, None).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = DVector::from_fn(sd.nrows(), |_, _| rng.random_range(-1.0..1.0));
            let rq = x.dot(&(&sd * &x)) / x.dot(&(&md * &x));
            assert!(lam <= rq * (1.0 + 1e-12));
        }
    }
}
