//! Preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::linops::sparse::{dot, LinearOperator};

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final preconditioned relative residual `sqrt(rᵀPr / r₀ᵀPr₀)`.
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Solve `A x = b` with preconditioner `P ≈ A⁻¹`.
///
/// Stops once the preconditioned relative residual drops to `tol`. On failure the
/// error carries the residual history and the iterate with the smallest residual.
pub fn cg_solve<A, P>(
    a: &A,
    rhs: &[f64],
    precond: &P,
    tol: f64,
    max_iter: usize,
    x0: Option<&[f64]>,
) -> Result<CgOutcome>
where
    A: LinearOperator + ?Sized,
    P: LinearOperator + ?Sized,
{
    let n = rhs.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.nrows(),
        });
    }
    if precond.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: precond.nrows(),
        });
    }
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = rhs.to_vec();
    let mut ap = vec![0.0; n];
    if x0.is_some() {
        a.apply_into(&x, &mut ap);
        for (ri, v) in r.iter_mut().zip(&ap) {
            *ri -= v;
        }
    }
    let mut z = precond.apply(&r);
    let mut rz = dot(&r, &z);
    // normalize against the data, not the initial guess
    let bz = dot(rhs, &precond.apply(rhs));
    if bz <= 0.0 {
        return Ok(CgOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
        });
    }
    let rel = |rz: f64| (rz.max(0.0) / bz).sqrt();
    let mut history = vec![rel(rz)];
    let mut best = (history[0], x.clone());
    if history[0] <= tol {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            residual: history[0],
            history,
        });
    }
    let mut p = z.clone();
    for it in 1..=max_iter {
        a.apply_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        precond.apply_into(&r, &mut z);
        let rz_new = dot(&r, &z);
        let res = rel(rz_new);
        history.push(res);
        if res < best.0 {
            best = (res, x.clone());
        }
        if res <= tol {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                residual: res,
                history,
            });
        }
        let ratio = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + ratio * p[i];
        }
    }
    Err(Error::NotConverged {
        iterations: history.len() - 1,
        residual: best.0,
        history,
        best: best.1,
    })
}
