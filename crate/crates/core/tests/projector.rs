//! MR is a projector: data generated by a trial function is reproduced exactly.
mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacetime_mr::assembly::{assemble_as, assemble_b, KroneckerOp};
use spacetime_mr::experiment::Preset;
use spacetime_mr::linops::CsrMatrix;
use spacetime_mr::solver::{
    build_system, solve_ben, solve_mr, test_space, trial_space, SolverMethod, SolverOptions, TestOption,
};

#[test]
fn discrete_data_round_trips() {
    let (worst, zero) = common::round_trip_worst(&[1.0, 1e-3, 1e-6], 6, 3, 17);
    assert!(worst <= 1e-9, "worst relative deviation {worst:e}");
    assert_eq!(zero, 0.0);
}

#[test]
fn iterative_solver_reproduces_discrete_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = Preset::Smooth.problem(1.0, None).unwrap();
    let sys = build_system(&p, &trial_space(&p, 8).unwrap(), &test_space(&p, 8, TestOption::Ii).unwrap()).unwrap();
    let w: Vec<f64> = (0..sys.trial_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let opts = SolverOptions { method: SolverMethod::Cg, tol: 1e-12, max_iter: None };
    let sol = solve_mr(&sys.with_discrete_data(&w), &opts).unwrap();
    let err = sol.coefficients.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err:e}");
    assert!(sol.iterations > 1);
}

#[test]
fn ben_reproduces_discrete_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for preset in [Preset::Smooth, Preset::InternalLayer, Preset::BoundaryLayer] {
        let p = preset.problem(1e-2, None).unwrap();
        let sys = build_system(&p, &trial_space(&p, 6).unwrap(), &test_space(&p, 6, TestOption::I).unwrap()).unwrap();
        let w: Vec<f64> = (0..sys.trial_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sol = solve_ben(&sys.with_discrete_data(&w)).unwrap().coefficients;
        let err = sol.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{preset:?}: {err:e}");
    }
}

#[test]
fn kronecker_operators_and_gram_solver_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for preset in Preset::ALL {
        let p = preset.problem(1e-3, None).unwrap();
        let (x, y) = (trial_space(&p, 5).unwrap(), test_space(&p, 5, TestOption::Ii).unwrap());
        let b: KroneckerOp = assemble_b(&p, &x, &y).unwrap();
        let explicit = b.terms.iter().fold(CsrMatrix::zeros(b.nrows(), b.ncols()), |acc, (t, s)| {
            CsrMatrix::linear_combination(&[(1.0, &acc), (1.0, &CsrMatrix::kron(t, s))])
        });
        let v: Vec<f64> = (0..x.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (fast, slow) = (b.apply(&v), explicit.mul_vec(&v));
        assert!(fast.iter().zip(&slow).all(|(a, c)| (a - c).abs() < 1e-12));

        let gram = assemble_as(&p, &y).unwrap();
        let z: Vec<f64> = (0..y.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back = gram.solver().unwrap().solve(&gram.to_csr().mul_vec(&z));
        assert!(back.iter().zip(&z).all(|(a, c)| (a - c).abs() < 1e-9));
    }
}
