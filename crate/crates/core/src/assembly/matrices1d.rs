//! 1D mass, stiffness and convection matrices between (possibly different) nested meshes.
//!
//! Entries pair row-space test functions with column-space trial functions and are
//! integrated cell by cell over the finer of the two meshes, where both bases are
//! linear, with a 2-point Gauss rule. That makes every entry exact.

use crate::assembly::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::linops::CsrMatrix;
use crate::spaces::FESpace1D;

#[derive(Clone, Copy)]
enum Form {
    Mass,
    Stiffness,
    Convection,
}

/// `M[i, j] = ∫ φ_j^col φ_i^row`.
pub fn mass_1d(row: &FESpace1D, col: &FESpace1D) -> Result<CsrMatrix> {
    assemble(row, col, Form::Mass)
}

/// `S[i, j] = ∫ (φ_j^col)′ (φ_i^row)′`.
pub fn stiffness_1d(row: &FESpace1D, col: &FESpace1D) -> Result<CsrMatrix> {
    assemble(row, col, Form::Stiffness)
}

/// `N[i, j] = ∫ (φ_j^col)′ φ_i^row` — the column function is differentiated.
pub fn convection_1d(row: &FESpace1D, col: &FESpace1D) -> Result<CsrMatrix> {
    assemble(row, col, Form::Convection)
}

/// Number of cells of the common refinement, with the per-side refinement ratios.
pub(crate) fn common_mesh(a: &FESpace1D, b: &FESpace1D) -> Result<(usize, usize, usize)> {
    let (na, nb) = (a.partition().n_cells(), b.partition().n_cells());
    let fine = na.max(nb);
    if fine % na != 0 || fine % nb != 0 {
        return Err(Error::NonNestedMeshes(na, nb));
    }
    Ok((fine, fine / na, fine / nb))
}

fn assemble(row: &FESpace1D, col: &FESpace1D, form: Form) -> Result<CsrMatrix> {
    let (fine, rr, rc) = common_mesh(row, col)?;
    let (qp, qw) = gauss_legendre(2);
    let hf = 1.0 / fine as f64;
    let dr = row.local_basis_derivative();
    let dc = col.local_basis_derivative();
    let mut trips = Vec::with_capacity(4 * fine);
    for f in 0..fine {
        let (cr, cc) = (f / rr, f / rc);
        let x0 = f as f64 * hf;
        let mut local = [[0.0; 2]; 2];
        for (p, w) in qp.iter().zip(&qw) {
            let x = x0 + p * hf;
            let vr = row.local_basis(cr, x);
            let vc = col.local_basis(cc, x);
            for a in 0..2 {
                for b in 0..2 {
                    local[a][b] += w
                        * hf
                        * match form {
                            Form::Mass => vr[a] * vc[b],
                            Form::Stiffness => dr[a] * dc[b],
                            Form::Convection => vr[a] * dc[b],
                        };
                }
            }
        }
        for a in 0..2 {
            let Some(i) = row.local_dof(cr, a) else { continue };
            for b in 0..2 {
                if let Some(j) = col.local_dof(cc, b) {
                    trips.push((i, j, local[a][b]));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(row.dim(), col.dim(), trips))
}
