//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls the library's quadrature or element routines: basis functions
//! are written out from their definitions and integrals use a tabulated rule.
#![allow(dead_code)]

use nalgebra::DMatrix;
use spacetime_mr::spaces::{Continuity, FESpace1D};

/// 10-point Gauss–Legendre rule on [-1, 1] (tabulated).
pub const GL10_NODES: [f64; 10] = [
    -0.973_906_528_517_171_7,
    -0.865_063_366_688_984_5,
    -0.679_409_568_299_024_4,
    -0.433_395_394_129_247_2,
    -0.148_874_338_981_631_2,
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
pub const GL10_WEIGHTS: [f64; 10] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

/// `∫_a^b f` with the 10-point rule on `cells` equal subintervals.
pub fn composite_gl10(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    let mut s = 0.0;
    for c in 0..cells {
        let mid = a + (c as f64 + 0.5) * h;
        for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS) {
            s += 0.5 * h * w * f(mid + 0.5 * h * x);
        }
    }
    s
}

/// Value and derivative of basis function `i` of `space` at an interior point `x`
/// (never a mesh node), built from the nodal definition.
pub fn basis(space: &FESpace1D, i: usize, x: f64) -> (f64, f64) {
    let n = space.partition().n_cells();
    let hinv = n as f64;
    match space.continuity() {
        Continuity::Dg => {
            let (c, loc) = (i / 2, i % 2);
            let (a, b) = (c as f64 / hinv, (c + 1) as f64 / hinv);
            if x <= a || x >= b {
                return (0.0, 0.0);
            }
            let s = (x - a) * hinv;
            if loc == 0 {
                (1.0 - s, -hinv)
            } else {
                (s, hinv)
            }
        }
        Continuity::C0 => {
            let node = i + usize::from(space.essential_bc().left);
            let xk = node as f64 / hinv;
            let d = x - xk;
            if d.abs() >= 1.0 / hinv {
                (0.0, 0.0)
            } else if d < 0.0 {
                (1.0 + d * hinv, hinv)
            } else {
                (1.0 - d * hinv, -hinv)
            }
        }
    }
}

/// Dense `[∫ f(ψ_i, φ_j)]` over rows of `row` and columns of `col`, integrating on the
/// common refinement of both meshes.
pub fn dense_form(row: &FESpace1D, col: &FESpace1D, f: impl Fn((f64, f64), (f64, f64)) -> f64) -> DMatrix<f64> {
    let (nr, nc) = (row.partition().n_cells(), col.partition().n_cells());
    let fine = nr.max(nc);
    assert_eq!(fine % nr.min(nc), 0, "meshes must be nested");
    DMatrix::from_fn(row.dim(), col.dim(), |i, j| {
        composite_gl10(|x| f(basis(row, i, x), basis(col, j, x)), 0.0, 1.0, fine)
    })
}

pub fn dense_mass(row: &FESpace1D, col: &FESpace1D) -> DMatrix<f64> {
    dense_form(row, col, |(u, _), (v, _)| u * v)
}

pub fn dense_stiffness(row: &FESpace1D, col: &FESpace1D) -> DMatrix<f64> {
    dense_form(row, col, |(_, du), (_, dv)| du * dv)
}

/// `[∫ φ_j' ψ_i]`: the column function is differentiated.
pub fn dense_convection(row: &FESpace1D, col: &FESpace1D) -> DMatrix<f64> {
    dense_form(row, col, |(u, _), (_, dv)| u * dv)
}

/// Smallest generalized eigenvalue of `(a, m)` restricted to the orthogonal complement
/// of the columns of `z`, which must span a common kernel of `a` and `m` (plain dense
/// algebra, no library calls).
pub fn smallest_gen_eig(a: &DMatrix<f64>, m: &DMatrix<f64>, z: Option<&DMatrix<f64>>) -> f64 {
    let n = a.nrows();
    // orthonormal basis Q of {v : zᵀ v = 0}
    let q = match z {
        None => DMatrix::identity(n, n),
        Some(z) => {
            let c = z.transpose();
            let svd = c.clone().svd(false, true);
            let vt = svd.v_t.unwrap();
            let rank = svd.singular_values.iter().filter(|s| **s > 1e-12).count();
            // the kernel of c is the complement of its row space
            let proj = DMatrix::identity(n, n) - vt.rows(0, rank).transpose() * vt.rows(0, rank);
            let e = nalgebra::SymmetricEigen::new(proj);
            let cols: Vec<_> = (0..n).filter(|k| e.eigenvalues[*k] > 0.5).map(|k| e.eigenvectors.column(k).into_owned()).collect();
            DMatrix::from_columns(&cols)
        }
    };
    let ar = q.transpose() * a * &q;
    let mr = q.transpose() * m * &q;
    let l = mr.cholesky().expect("reduced m is SPD");
    let linv = l.l().try_inverse().unwrap();
    let c = &linv * ar * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    nalgebra::SymmetricEigen::new(c).eigenvalues.min()
}

/// Spaces exercised by the element-matrix oracle: C0 with every boundary set and DG,
/// on a few meshes, paired same-mesh and across nested meshes (both directions).
pub fn oracle_space_pairs() -> Vec<(FESpace1D, FESpace1D)> {
    use spacetime_mr::spaces::{BoundarySet, Partition1D};
    let mut spaces = Vec::new();
    for n in [1usize, 3, 4, 7] {
        let part = Partition1D::uniform(n).unwrap();
        for bc in [BoundarySet::NONE, BoundarySet::LEFT, BoundarySet::RIGHT, BoundarySet::BOTH] {
            if let Ok(s) = FESpace1D::new(part, Continuity::C0, bc) {
                spaces.push(s);
            }
        }
        spaces.push(FESpace1D::discontinuous(part));
    }
    let mut pairs = Vec::new();
    for a in &spaces {
        for b in &spaces {
            let (na, nb) = (a.partition().n_cells(), b.partition().n_cells());
            if na.max(nb) % na.min(nb) == 0 {
                pairs.push((*a, *b));
            }
        }
    }
    // a refinement by 3 as used by the refined test spaces
    let c = FESpace1D::continuous(Partition1D::uniform(4).unwrap(), BoundarySet::BOTH);
    let f = FESpace1D::continuous(Partition1D::uniform(12).unwrap(), BoundarySet::BOTH);
    pairs.push((c, f));
    pairs.push((f, c));
    pairs
}

/// Largest entrywise deviation of the library's 1D mass, stiffness and convection
/// matrices from the dense 10-point oracle over [`oracle_space_pairs`].
pub fn element_oracle_max_error() -> f64 {
    use spacetime_mr::assembly::{convection_1d, mass_1d, stiffness_1d};
    let mut worst: f64 = 0.0;
    for (r, c) in oracle_space_pairs() {
        let checks = [
            (mass_1d(&r, &c).unwrap().to_dense(), dense_mass(&r, &c)),
            (stiffness_1d(&r, &c).unwrap().to_dense(), dense_stiffness(&r, &c)),
            (convection_1d(&r, &c).unwrap().to_dense(), dense_convection(&r, &c)),
        ];
        for (lib, oracle) in checks {
            assert_eq!(lib.shape(), oracle.shape());
            worst = worst.max((lib - oracle).amax());
        }
    }
    worst
}

/// `max |C_t + C_tᵀ + e₀e₀ᵀ − e_Te_Tᵀ|` for continuous time spaces on several meshes.
pub fn integration_by_parts_defect() -> f64 {
    use spacetime_mr::assembly::convection_1d;
    use spacetime_mr::spaces::{BoundarySet, Endpoint, Partition1D};
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 5, 16, 64, 256] {
        let s = FESpace1D::continuous(Partition1D::uniform(n).unwrap(), BoundarySet::NONE);
        let c = convection_1d(&s, &s).unwrap().to_dense();
        let mut d = &c + c.transpose();
        let (e0, et) = (s.trace_dof(Endpoint::Left).unwrap(), s.trace_dof(Endpoint::Right).unwrap());
        d[(e0, e0)] += 1.0;
        d[(et, et)] -= 1.0;
        worst = worst.max(d.amax());
    }
    worst
}

/// Worst relative deviation `‖solve(data(w)) − w‖ / ‖w‖` over random trial functions
/// for every preset × option × ε, and the largest solution entry for zero data.
/// Under weak outflow the penalty is not data-driven, so `w` gets a zero outflow trace.
pub fn round_trip_worst(epsilons: &[f64], n: usize, samples: usize, seed: u64) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    use spacetime_mr::experiment::Preset;
    use spacetime_mr::solver::{build_system, solve_mr, test_space, trial_space, SolverOptions, TestOption};
    use spacetime_mr::spaces::Endpoint;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut zero_max) = (0.0f64, 0.0f64);
    for preset in Preset::ALL {
        for &eps in epsilons {
            let p = preset.problem(eps, None).unwrap();
            for opt in [TestOption::I, TestOption::Ii] {
                let sys = build_system(&p, &trial_space(&p, n).unwrap(), &test_space(&p, n, opt).unwrap()).unwrap();
                let ns = sys.trial.space.dim();
                let outflow = sys.trial.space.trace_dof(Endpoint::Right).filter(|_| p.weak_outflow);
                for _ in 0..samples {
                    let mut w: Vec<f64> = (0..sys.trial_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                    if let Some(r) = outflow {
                        w.iter_mut().skip(r).step_by(ns).for_each(|v| *v = 0.0);
                    }
                    let sol = solve_mr(&sys.with_discrete_data(&w), &SolverOptions::default()).unwrap().coefficients;
                    let err = sol.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                        / w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    worst = worst.max(err);
                }
                let zero = solve_mr(&sys.with_zero_data(), &SolverOptions::default()).unwrap().coefficients;
                zero_max = zero.iter().fold(zero_max, |m, v| m.max(v.abs()));
            }
        }
    }
    (worst, zero_max)
}
