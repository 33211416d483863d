use std::f64::consts::PI;

use contour_eig::diffop::{bvp_solve, BoundaryConditions, BvpOptions, DiffEigProblem, DiffOp, PencilSolver, ProblemFile};
use contour_eig::funspace::{Fun, Interval, QuasiMatrix, DEFAULT_TOL};
use contour_eig::problems;
use contour_eig::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zero_pi() -> Interval {
    Interval::new(0.0, PI).unwrap()
}

fn sin_k(k: f64) -> Fun {
    Fun::from_real_fn(zero_pi(), DEFAULT_TOL, move |x| (k * x).sin()).unwrap()
}

fn laplace() -> DiffEigProblem {
    let d = zero_pi();
    DiffEigProblem::new(
        DiffOp::constant(d, &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        DiffOp::identity(d),
        BoundaryConditions::dirichlet(),
    )
    .unwrap()
}

fn rel(a: &Fun, b: &Fun) -> f64 {
    a.try_sub(b).unwrap().norm() / b.norm()
}

#[test]
fn negative_second_derivative_of_sine() {
    let p = laplace();
    let u = sin_k(1.0);
    assert!(rel(&p.a.apply(&u).unwrap(), &u) < 1e-12);
}

#[test]
fn identity_operator_is_exact() {
    let u = sin_k(3.0);
    assert_eq!(DiffOp::identity(zero_pi()).apply(&u).unwrap(), u);
}

#[test]
fn bessel_operator_annihilates_x() {
    let d = Interval::new(0.0, 1.0).unwrap();
    let x = Fun::identity(d);
    let op = DiffOp::new(d, vec![Fun::constant(d, c(-1.0, 0.0)), x.clone(), x.try_mul(&x).unwrap()]).unwrap();
    let out = op.apply(&x).unwrap();
    assert!(out.coeffs().iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn variable_coefficients_against_closed_form() {
    // x² u'' + cos(x) u' with u = exp(x)
    let d = Interval::new(-1.0, 2.0).unwrap();
    let x2 = Fun::from_real_fn(d, DEFAULT_TOL, |x| x * x).unwrap();
    let cs = Fun::from_real_fn(d, DEFAULT_TOL, f64::cos).unwrap();
    let op = DiffOp::new(d, vec![Fun::zero(d), cs, x2]).unwrap();
    let u = Fun::from_real_fn(d, DEFAULT_TOL, f64::exp).unwrap();
    let out = op.apply(&u).unwrap();
    for x in [-0.9f64, 0.0, 0.7, 1.9] {
        let exact = (x * x + x.cos()) * x.exp();
        assert!((out.eval(x) - exact).norm() < 1e-12 * (1.0 + exact.abs()));
    }
}

#[test]
fn apply_degree_bound() {
    let d = Interval::new(-1.0, 1.0).unwrap();
    let x = Fun::identity(d);
    let op = DiffOp::new(d, vec![x.try_mul(&x).unwrap(), x.clone(), Fun::constant(d, c(1.0, 0.0))]).unwrap();
    let u = Fun::from_coeffs(d, (0..9).map(|k| c(1.0 / (k + 1) as f64, 0.0)).collect());
    assert!(op.apply(&u).unwrap().degree() <= 8 + 2);
}

#[test]
fn analytic_bvp() {
    let p = laplace();
    let y = bvp_solve(&p.a, &p.b, &p.bc, c(0.0, 0.0), &sin_k(1.0), 1e-12).unwrap();
    let exact = sin_k(1.0).scale(c(-1.0, 0.0));
    assert!(rel(&y, &exact) < 1e-12);
}

#[test]
fn shifted_bvp_residual_and_boundary() {
    let p = laplace();
    let rhs = QuasiMatrix::random(1, zero_pi(), 5).into_columns().remove(0);
    let solver = PencilSolver::new(&p, BvpOptions::default());
    let z = c(10.0, 10.0);
    let sol = solver.solve(z, &rhs).unwrap();
    let lhs = p.b.apply(&sol.y).unwrap().scale(z).try_sub(&p.a.apply(&sol.y).unwrap()).unwrap();
    assert!(rel(&lhs, &p.b.apply(&rhs).unwrap()) <= 1e-10);
    for r in p.bc.residuals(&sol.y) {
        assert!(r.norm() <= 1e-12 * sol.y.norm());
    }
}

#[test]
fn orr_sommerfeld_bvp() {
    let p = problems::orr_sommerfeld(1000).problem().unwrap();
    let rhs = QuasiMatrix::random(1, p.domain(), 9).into_columns().remove(0);
    let solver = PencilSolver::new(&p, BvpOptions::default());
    let z = c(-0.4 + 0.5, -0.6);
    let sol = solver.solve(z, &rhs).unwrap();
    assert!(sol.residual <= 1e-8, "residual {:e}", sol.residual);
    assert!(sol.y.degree() <= 512, "degree {}", sol.y.degree());
}

#[test]
fn solve_at_eigenvalue_is_ill_conditioned() {
    let p = laplace();
    let solver = PencilSolver::new(&p, BvpOptions::default());
    assert!(matches!(solver.solve(c(4.0, 0.0), &sin_k(1.0)), Err(Error::IllConditioned { .. })));
}

#[test]
fn residual_norm_examples() {
    let p = laplace();
    assert!(p.residual_norm(c(1.0, 0.0), &sin_k(1.0)).unwrap() <= 1e-13);
    assert!((p.residual_norm(c(1.0, 0.0), &sin_k(2.0)).unwrap() - 3.0).abs() < 1e-12);
    assert!(matches!(p.residual_norm(c(1.0, 0.0), &Fun::zero(zero_pi())), Err(Error::ZeroFunction)));
}

#[test]
fn resolvent_identity() {
    let p = laplace();
    let solver = PencilSolver::new(&p, BvpOptions::default());
    let z = c(10.0, 10.0);
    for k in 1..=4 {
        let u = sin_k(k as f64);
        let y = solver.solve(z, &u).unwrap().y;
        let expected = u.scale(c(1.0, 0.0) / (z - (k * k) as f64));
        assert!(rel(&y, &expected) <= 1e-10);
    }
}

#[test]
fn conjugate_symmetry_of_real_pencil() {
    let p = problems::mathieu().problem().unwrap();
    let solver = PencilSolver::new(&p, BvpOptions::default());
    let v = QuasiMatrix::random(1, p.domain(), 2).into_columns().remove(0);
    let z = c(3.0, 7.5);
    let y = solver.solve(z, &v).unwrap().y;
    let ybar = solver.solve(z.conj(), &v).unwrap().y;
    assert!(rel(&ybar, &y.conj()) <= 1e-12);
}

#[test]
fn boundary_condition_count_is_checked() {
    let d = zero_pi();
    let a = DiffOp::constant(d, &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let bc = BoundaryConditions::clamped();
    assert!(matches!(DiffEigProblem::new(a, DiffOp::identity(d), bc), Err(Error::InvalidProblem(_))));
}

#[test]
fn problem_file_builds_laplace() {
    let json = r#"{
        "name": "lap",
        "domain": [0.0, 3.141592653589793],
        "a": ["0", "0", "-1"],
        "b": ["1"],
        "bc": [{"left": [1.0]}, {"right": [1.0]}]
    }"#;
    let p = ProblemFile::from_json(json).unwrap().build().unwrap();
    assert_eq!(p.order(), 2);
    assert!(p.is_real());
    assert!(p.residual_norm(c(9.0, 0.0), &sin_k(3.0)).unwrap() < 1e-12);
    let again = ProblemFile::from_json(&ProblemFile::from_json(json).unwrap().to_json()).unwrap();
    assert_eq!(again.build().unwrap(), p);
}

#[test]
fn malformed_expression_is_rejected() {
    let json = r#"{"name": "bad", "domain": [0, 1], "a": ["0", "0", "cos("], "b": ["1"], "bc": [{"left": [1.0]}, {"right": [1.0]}]}"#;
    assert!(ProblemFile::from_json(json).unwrap().build().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, s1 in 0u64..500, s2 in 0u64..500) {
        let p = problems::sturm_liouville().problem().unwrap();
        let u = QuasiMatrix::random(1, p.domain(), s1).into_columns().remove(0);
        let v = QuasiMatrix::random(1, p.domain(), s2).into_columns().remove(0);
        let (alpha, beta) = (c(a, 0.5), c(b, -1.0));
        let lhs = p.a.apply(&u.scale(alpha).try_add(&v.scale(beta)).unwrap()).unwrap();
        let rhs = p.a.apply(&u).unwrap().scale(alpha).try_add(&p.a.apply(&v).unwrap().scale(beta)).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn bvp_solve_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, s1 in 0u64..500, s2 in 0u64..500) {
        let p = laplace();
        let solver = PencilSolver::new(&p, BvpOptions::default());
        let z = c(2.5, 1.0);
        let u = QuasiMatrix::random(1, p.domain(), s1).into_columns().remove(0);
        let v = QuasiMatrix::random(1, p.domain(), s2).into_columns().remove(0);
        let (alpha, beta) = (c(a, 0.0), c(0.0, b));
        let combined = solver.solve(z, &u.scale(alpha).try_add(&v.scale(beta)).unwrap()).unwrap().y;
        let yu = solver.solve(z, &u).unwrap().y;
        let yv = solver.solve(z, &v).unwrap().y;
        let expected = yu.scale(alpha).try_add(&yv.scale(beta)).unwrap();
        prop_assert!(combined.try_sub(&expected).unwrap().norm() <= 1e-10 * (1e-300 + expected.norm()));
    }
}
