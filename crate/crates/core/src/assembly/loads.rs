//! Load vectors: forcing tested against a tensor space, and initial-value data.
//!
//! The indicator forcing `1_{x > t}` is integrated exactly: rectangles cut by the
//! diagonal are clipped to `{x > t}`, triangulated, and each triangle is integrated
//! with the edge-midpoint rule, which is exact for the bilinear integrand.

use std::f64::consts::PI;

use crate::assembly::problem::{ForcingDescriptor, ProblemSpec};
use crate::assembly::quadrature::gauss_legendre;
use crate::assembly::matrices1d::mass_1d;
use crate::error::Result;
use crate::spaces::{FESpace1D, TensorSpace};

/// Gauss points per cell and direction for smooth data.
pub const SMOOTH_QUADRATURE_POINTS: usize = 5;

/// `g_i = ∫∫ g ψ_i` for every basis function of `y`.
pub fn assemble_load(p: &ProblemSpec, y: &TensorSpace) -> Result<Vec<f64>> {
    Ok(match p.forcing {
        ForcingDescriptor::Zero => vec![0.0; y.dim()],
        ForcingDescriptor::SmoothManufactured => {
            let f1 = project_1d(&y.time, |t| p.manufactured_factors(t)[0]);
            let f2 = project_1d(&y.time, |t| p.manufactured_factors(t)[1]);
            let s1 = project_1d(&y.space, |x| (PI * x).sin());
            let s2 = project_1d(&y.space, |x| (PI * x).cos());
            let ns = y.space.dim();
            let mut g = vec![0.0; y.dim()];
            for (i, gi) in g.chunks_mut(ns).enumerate() {
                for j in 0..ns {
                    gi[j] = f1[i] * s1[j] + f2[i] * s2[j];
                }
            }
            g
        }
        ForcingDescriptor::IndicatorDiagonal => indicator_load(y),
    })
}

/// `∫ f φ_i` for every basis function of a 1D space (5-point Gauss per cell).
pub fn project_1d(space: &FESpace1D, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let (qp, qw) = gauss_legendre(SMOOTH_QUADRATURE_POINTS);
    let part = space.partition();
    let h = part.h();
    let mut v = vec![0.0; space.dim()];
    for c in 0..part.n_cells() {
        let (a, _) = part.cell(c);
        let mut local = [0.0; 2];
        for (q, w) in qp.iter().zip(&qw) {
            let x = a + q * h;
            let fx = f(x) * w * h;
            let phi = space.local_basis(c, x);
            local[0] += fx * phi[0];
            local[1] += fx * phi[1];
        }
        for (l, val) in local.iter().enumerate() {
            if let Some(i) = space.local_dof(c, l) {
                v[i] += val;
            }
        }
    }
    v
}

fn indicator_load(y: &TensorSpace) -> Vec<f64> {
    let (tp, xp) = (y.time.partition(), y.space.partition());
    let ns = y.space.dim();
    let mut g = vec![0.0; y.dim()];
    for ct in 0..tp.n_cells() {
        let (t0, t1) = tp.cell(ct);
        for cx in 0..xp.n_cells() {
            let (x0, x1) = xp.cell(cx);
            let local = indicator_cell(y, ct, cx, [t0, t1], [x0, x1]);
            for a in 0..2 {
                let Some(i) = y.time.local_dof(ct, a) else { continue };
                for b in 0..2 {
                    if let Some(j) = y.space.local_dof(cx, b) {
                        g[i * ns + j] += local[a][b];
                    }
                }
            }
        }
    }
    g
}

/// `∫∫_{rect ∩ {x > t}} ψ_a(t) φ_b(x)` for the four local basis pairs.
fn indicator_cell(y: &TensorSpace, ct: usize, cx: usize, t: [f64; 2], x: [f64; 2]) -> [[f64; 2]; 2] {
    let (ht, hx) = (t[1] - t[0], x[1] - x[0]);
    if x[0] >= t[1] {
        // entirely above the diagonal: each P1 basis function integrates to h/2
        return [[0.25 * ht * hx; 2]; 2];
    }
    if x[1] <= t[0] {
        return [[0.0; 2]; 2];
    }
    let rect = [(t[0], x[0]), (t[1], x[0]), (t[1], x[1]), (t[0], x[1])];
    let poly = clip_above_diagonal(&rect);
    let mut out = [[0.0; 2]; 2];
    for k in 1..poly.len().saturating_sub(1) {
        let tri = [poly[0], poly[k], poly[k + 1]];
        let area = 0.5 * ((tri[1].0 - tri[0].0) * (tri[2].1 - tri[0].1) - (tri[2].0 - tri[0].0) * (tri[1].1 - tri[0].1)).abs();
        for e in 0..3 {
            let (pa, pb) = (tri[e], tri[(e + 1) % 3]);
            let (tm, xm) = (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1));
            let bt = y.time.local_basis(ct, tm);
            let bx = y.space.local_basis(cx, xm);
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] += area / 3.0 * bt[a] * bx[b];
                }
            }
        }
    }
    out
}

/// Sutherland–Hodgman clip of a convex polygon `(t, x)` against `x − t ≥ 0`.
fn clip_above_diagonal(poly: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let side = |p: (f64, f64)| p.1 - p.0;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let (cur, next) = (poly[k], poly[(k + 1) % poly.len()]);
        let (sc, sn) = (side(cur), side(next));
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0) {
            let s = sc / (sc - sn);
            out.push((cur.0 + s * (next.0 - cur.0), cur.1 + s * (next.1 - cur.1)));
        }
    }
    out
}

/// `(m0, ‖u0‖²)` with `m0_j = ∫ u0 φ_j` on the spatial trial space.
pub fn initial_load(p: &ProblemSpec, space: &FESpace1D) -> (Vec<f64>, f64) {
    (project_1d(space, |x| p.u0.eval(x)), p.u0.norm_squared())
}

/// `L₂(0,1)` Gram matrix of the spatial trial space (the pivot-space mass for the
/// initial misfit).
pub fn h_mass(space: &FESpace1D) -> Result<crate::linops::CsrMatrix> {
    mass_1d(space, space)
}
