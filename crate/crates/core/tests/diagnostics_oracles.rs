mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacetime_mr::assembly::{
    assemble_as, assemble_as_pair, assemble_b, assemble_dt, ForcingDescriptor, InitialDescriptor, ProblemSpec,
};
use spacetime_mr::diagnostics::{
    alpha, alpha_spatial, estimator, inf_sup, relative_denominator, time_factor_dyadic, time_factor_inf_sup, InfSupKind, NormPair,
    TruthSpace,
};
use spacetime_mr::experiment::Preset;
use spacetime_mr::solver::{build_system, test_space, trial_space, TestOption};
use spacetime_mr::spaces::{BoundarySet, FESpace1D, Partition1D};

fn smooth(eps: f64, e: f64) -> ProblemSpec {
    ProblemSpec::new(eps, 1.0, e, BoundarySet::BOTH, None, ForcingDescriptor::SmoothManufactured, InitialDescriptor::SinPi).unwrap()
}

/// `‖g‖²_{Y'}` for `ε = 1, e = 0` from sine series: `‖sin πx‖²_{H⁻¹} = 1/(2π²)`,
/// `cos πx = Σ_{k even} 4k/(π(k²−1)) sin kπx`, and the two are orthogonal.
fn series_energy(p: &ProblemSpec) -> f64 {
    let s_cos: f64 = (1..200_000).map(|j| 2.0 * j as f64).map(|k| 8.0 / (PI.powi(4) * (k * k - 1.0).powi(2))).sum();
    let g2 = common::composite_gl10(
        |t| {
            let [f1, f2] = p.manufactured_factors(t);
            f1 * f1 / (2.0 * PI * PI) + f2 * f2 * s_cos
        },
        0.0,
        1.0,
        4,
    ) / p.epsilon;
    (g2 + p.beta * 0.5).sqrt()
}

#[test]
fn denominator_matches_series_oracle() {
    let p = smooth(1.0, 0.0);
    let den = relative_denominator(&p, &TruthSpace::new(&p, 16, 1).unwrap()).unwrap();
    let oracle = series_energy(&p);
    assert!((den - oracle).abs() <= 0.01 * oracle, "{den} vs {oracle}");
    // discrete dual norms never exceed the continuous one
    assert!(den <= oracle * (1.0 + 1e-12));
}

#[test]
fn denominator_saturates_between_truth_levels() {
    for preset in [Preset::Smooth, Preset::InternalLayer, Preset::BoundaryLayer] {
        for eps in [1.0, 1e-3] {
            let p = preset.problem(eps, None).unwrap();
            let d1 = relative_denominator(&p, &TruthSpace::new(&p, 16, 1).unwrap()).unwrap();
            let d2 = relative_denominator(&p, &TruthSpace::new(&p, 16, 2).unwrap()).unwrap();
            assert!((d2 - d1).abs() <= 0.005 * d2, "{preset:?} eps={eps}: {d1} vs {d2}");
        }
    }
}

#[test]
fn zero_data_has_zero_denominator() {
    let p = ProblemSpec::new(0.1, 1.0, 1.0, BoundarySet::BOTH, None, ForcingDescriptor::Zero, InitialDescriptor::Zero).unwrap();
    assert_eq!(relative_denominator(&p, &TruthSpace::new(&p, 4, 1).unwrap()).unwrap(), 0.0);
}

#[test]
fn time_factor_matches_dense_oracle() {
    for n in [4usize, 8, 16] {
        let xt = FESpace1D::continuous(Partition1D::uniform(n).unwrap(), BoundarySet::NONE);
        let yt = FESpace1D::continuous(Partition1D::uniform(2 * n).unwrap(), BoundarySet::NONE);
        let c = common::dense_convection(&yt, &xt);
        let my = common::dense_mass(&yt, &yt);
        let sx = common::dense_stiffness(&xt, &xt);
        let a = c.transpose() * my.clone().cholesky().unwrap().solve(&c);
        let ones = DMatrix::from_element(xt.dim(), 1, 1.0);
        let oracle = common::smallest_gen_eig(&a, &sx, Some(&ones)).sqrt();
        assert_relative_eq!(time_factor_dyadic(n).unwrap(), oracle, max_relative = 1e-10);
    }
}

#[test]
fn temporal_factor_is_one_when_the_test_space_contains_derivatives() {
    for n in [1usize, 4, 9] {
        let part = Partition1D::uniform(n).unwrap();
        let g = time_factor_inf_sup(&FESpace1D::continuous(part, BoundarySet::NONE), &FESpace1D::discontinuous(part)).unwrap();
        assert_relative_eq!(g, 1.0, max_relative = 1e-12);
    }
}

#[test]
fn norms_agree_with_dense_quadratic_forms() {
    let p = smooth(0.1, 1.0);
    let x = trial_space(&p, 4).unwrap();
    let truth = TruthSpace::new(&p, 4, 1).unwrap();
    let norms = NormPair::new(&p, &x, &truth).unwrap();
    // time-constant discrete sine mode
    let w = x.interpolate(|_, s| (PI * s).sin());

    let b = assemble_b(&p, &x, &truth.space).unwrap().to_csr().to_dense();
    let dt = assemble_dt(&x, &truth.space).unwrap().to_csr().to_dense();
    let g = assemble_as(&p, &truth.space).unwrap().to_csr().to_dense();
    let a_s = assemble_as_pair(&p, &x, &x).unwrap().to_csr().to_dense();
    let chol = g.cholesky().unwrap();
    let wv = DVector::from_vec(w.clone());
    let dual = |op: &DMatrix<f64>| {
        let r = op * &wv;
        r.dot(&chol.solve(&r))
    };
    let ns = x.space.dim();
    let mh = common::dense_mass(&x.space, &x.space);
    let slice = |k: usize| DVector::from_column_slice(&w[k * ns..(k + 1) * ns]);
    let (w0, wt) = (slice(0), slice(x.time.dim() - 1));
    let l2 = |v: &DVector<f64>| v.dot(&(&mh * v));
    let energy = dual(&b) + p.beta * l2(&w0);
    let natural = wv.dot(&(&a_s * &wv)) + dual(&dt) + l2(&wt) + (p.beta - 1.0) * l2(&w0);
    assert_relative_eq!(norms.energy2(&w), energy, max_relative = 1e-10);
    assert_relative_eq!(norms.natural2(&w), natural, max_relative = 1e-10);
    assert_relative_eq!(norms.energy2(&w) / norms.natural2(&w), energy / natural, max_relative = 1e-10);
}

#[test]
fn alpha_laws() {
    let truth_of = |p: &ProblemSpec| TruthSpace::new(p, 4, 1).unwrap();
    // e = 0: α ε is constant on a fixed truth space
    let base = smooth(1.0, 0.0);
    let truth = truth_of(&base);
    let a1 = alpha(&base, &truth).unwrap();
    for eps in [1e-1, 1e-3] {
        assert_relative_eq!(alpha(&smooth(eps, 0.0), &truth).unwrap() * eps, a1, max_relative = 1e-8);
    }
    // monotone growth as ε decreases, with and without reaction
    for e in [0.0, 1.0] {
        let vals: Vec<f64> = [1.0, 1e-1, 1e-3].iter().map(|&eps| alpha(&smooth(eps, e), &truth).unwrap()).collect();
        assert!(vals.windows(2).all(|v| v[1] > v[0]), "{vals:?}");
        assert_relative_eq!(vals[1], alpha_spatial(&smooth(1e-1, e), &truth).unwrap(), max_relative = 1e-8);
    }
    let no_conv = ProblemSpec { b: 0.0, ..base };
    assert_eq!(alpha(&no_conv, &truth).unwrap(), 0.0);
}

#[test]
fn inf_sup_constants_are_ratios_and_c_is_robust_for_option_two() {
    let mut gamma_c = Vec::new();
    for eps in [1.0, 1e-3, 1e-6] {
        let p = smooth(eps, 0.0);
        let (x, truth) = (trial_space(&p, 8).unwrap(), TruthSpace::new(&p, 8, 1).unwrap());
        for opt in [TestOption::I, TestOption::Ii] {
            let y = test_space(&p, 8, opt).unwrap();
            for kind in [InfSupKind::Dt, InfSupKind::C, InfSupKind::B] {
                let g = inf_sup(kind, &x, &y, &truth, &p).unwrap();
                assert!((0.0..=1.0 + 1e-6).contains(&g), "{kind:?} {opt:?} eps={eps}: {g}");
                if kind == InfSupKind::C && opt == TestOption::Ii {
                    gamma_c.push(g);
                }
            }
        }
    }
    let (lo, hi) = gamma_c.iter().fold((f64::INFINITY, 0.0f64), |(a, b), g| (a.min(*g), b.max(*g)));
    assert!(lo > 0.5 && hi / lo < 1.1, "{gamma_c:?}");
}

#[test]
fn estimator_grows_with_nested_test_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for preset in Preset::ALL {
        let p = preset.problem(1e-2, None).unwrap();
        let sys = build_system(&p, &trial_space(&p, 4).unwrap(), &test_space(&p, 4, TestOption::I).unwrap()).unwrap();
        let truth = TruthSpace::new(&p, 4, 1).unwrap();
        for _ in 0..5 {
            let w: Vec<f64> = (0..sys.trial_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let coarse = estimator(&sys, &w, &sys.test).unwrap();
            let mid = estimator(&sys, &w, &test_space(&p, 4, TestOption::Ii).unwrap()).unwrap();
            let fine = estimator(&sys, &w, &truth.space).unwrap();
            assert!(coarse <= mid + 1e-10 && mid <= fine + 1e-10, "{coarse} {mid} {fine}");
        }
    }
}
