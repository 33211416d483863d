use std::f64::consts::PI;

use contour_eig::contour::compute_moments;
use contour_eig::densela;
use contour_eig::funspace::{Fun, Interval, QuasiMatrix, DEFAULT_TOL};
use contour_eig::problems;
use contour_eig::solvers::{self, subspace_iterate};
use contour_eig::{Complex64, Contour, DiffEigProblem, EigResult, Error, Method, SolverConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn laplace() -> DiffEigProblem {
    problems::laplace().problem().unwrap()
}

fn laplace_contour(n: usize) -> Contour {
    Contour::ellipse(c(10.0, 0.0), 10.0, 1.0, n).unwrap()
}

fn sin_k(k: f64) -> Fun {
    Fun::from_real_fn(Interval::new(0.0, PI).unwrap(), DEFAULT_TOL, move |x| (k * x).sin()).unwrap()
}

fn laplace_error(res: &EigResult) -> f64 {
    let got = res.in_region_lambdas();
    assert_eq!(got.len(), 4, "in-region eigenvalues: {got:?}");
    got.iter().zip([1.0, 4.0, 9.0, 16.0]).map(|(l, e)| (l - e).norm()).fold(0.0, f64::max)
}

fn in_region_gap(a: &EigResult, b: &EigResult) -> f64 {
    let (x, y) = (a.in_region_lambdas(), b.in_region_lambdas());
    assert_eq!(x.len(), y.len());
    x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

#[test]
fn rayleigh_ritz_on_laplace() {
    let res = solvers::cont_ss_rr(&laplace(), &laplace_contour(16), &SolverConfig::new(3, 2, 16)).unwrap();
    assert!(laplace_error(&res) <= 1e-12);
    assert!(res.rank <= 6);
    assert_eq!(res.ode_solves(), 3 * 8);
    for p in &res.pairs {
        assert!((p.u.norm() - 1.0).abs() < 1e-12);
        let again = laplace().residual_norm(p.lambda, &p.u).unwrap();
        assert_eq!(again, p.residual);
    }
    assert!(res.pairs.windows(2).all(|w| w[0].lambda.re <= w[1].lambda.re));
    assert!(res.singular_values.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn hankel_on_laplace() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let small = solvers::cont_ss_hankel(&prob, &ct, &SolverConfig::new(3, 2, 16), None).unwrap();
    assert!(laplace_error(&small) <= 1e-5, "{:e}", laplace_error(&small));
    let wider = solvers::cont_ss_hankel(&prob, &ct, &SolverConfig::new(4, 2, 16), None).unwrap();
    assert!(laplace_error(&wider) <= 1e-8, "{:e}", laplace_error(&wider));
    let rr = solvers::cont_ss_rr(&prob, &ct, &SolverConfig::new(4, 2, 16)).unwrap();
    assert!(in_region_gap(&wider, &rr) <= 1e-8);
}

#[test]
fn hankel_with_explicit_test_functions() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let vt = QuasiMatrix::random(4, prob.domain(), 99);
    let res = solvers::cont_ss_hankel(&prob, &ct, &SolverConfig::new(4, 2, 16), Some(&vt)).unwrap();
    assert!(laplace_error(&res) <= 1e-8);
    let wrong = QuasiMatrix::random(2, prob.domain(), 99);
    assert!(matches!(
        solvers::cont_ss_hankel(&prob, &ct, &SolverConfig::new(4, 2, 16), Some(&wrong)),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn caa_agrees_with_rayleigh_ritz() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let cfg = SolverConfig::new(3, 2, 16);
    let caa = solvers::cont_ss_caa(&prob, &ct, &cfg).unwrap();
    let rr = solvers::cont_ss_rr(&prob, &ct, &cfg).unwrap();
    assert!(in_region_gap(&caa, &rr) <= 1e-10);
    assert_eq!(caa.ode_solves(), rr.ode_solves());
}

#[test]
fn caa_on_sturm_liouville() {
    let case = problems::sturm_liouville();
    let res = solvers::cont_ss_caa(&case.problem().unwrap(), &case.contour(Method::SsCaa).unwrap(), &SolverConfig::new(5, 8, 16)).unwrap();
    assert_eq!(res.in_region().count(), 12);
    assert!(res.in_region().all(|p| p.residual <= 1e-8));
}

#[test]
fn rayleigh_ritz_on_mathieu() {
    let case = problems::mathieu();
    let res = solvers::cont_ss_rr(&case.problem().unwrap(), &case.contour(Method::SsRr).unwrap(), &SolverConfig::new(5, 8, 16)).unwrap();
    assert_eq!(res.in_region().count(), 15);
    assert!(res.in_region().all(|p| p.residual <= 1e-8));
    for (got, want) in res.in_region_lambdas().iter().zip(case.reference()) {
        assert!((got - want).norm() <= 1e-8 * want.norm());
    }
}

#[test]
fn feast_residuals_decrease() {
    let prob = laplace();
    let res = solvers::cont_feast(&prob, &laplace_contour(4), &SolverConfig::new(4, 1, 4).with_ell(3)).unwrap();
    assert_eq!(res.history.len(), 3);
    let worst: Vec<f64> = res.history.iter().map(|h| h.max_in_region_residual().unwrap()).collect();
    assert!(worst.windows(2).all(|w| w[1] < w[0]), "{worst:?}");
    assert_eq!(res.in_region().count(), 4);

    let wide = solvers::cont_feast(&prob, &laplace_contour(4), &SolverConfig::new(16, 1, 4).with_ell(3)).unwrap();
    assert!(wide.in_region().all(|p| p.residual <= 1e-8));
}

#[test]
fn feast_matches_single_moment_rayleigh_ritz() {
    let prob = laplace();
    let ct = laplace_contour(4);
    let cfg = SolverConfig::new(16, 1, 4);
    let feast = solvers::cont_feast(&prob, &ct, &cfg).unwrap();
    let rr = solvers::cont_ss_rr(&prob, &ct, &cfg).unwrap();
    assert!(in_region_gap(&feast, &rr) <= 1e-10);
}

#[test]
fn region_without_eigenvalues() {
    let prob = laplace();
    let ct = Contour::ellipse(c(2.5, 0.0), 1.0, 1.0, 16).unwrap();
    let res = solvers::cont_feast(&prob, &ct, &SolverConfig::new(4, 1, 16)).unwrap();
    assert_eq!(res.in_region().count(), 0);
    assert!(res.pairs.iter().all(|p| (p.lambda.re - 2.5).abs() >= 1.0 || p.lambda.im.abs() > 1.0));
}

#[test]
fn enough_moments_capture_the_eigenspace() {
    let prob = laplace();
    for (l, m) in [(4, 1), (2, 2), (1, 4)] {
        let errors: Vec<f64> = [16, 32, 64]
            .into_iter()
            .map(|n| laplace_error(&solvers::cont_ss_rr(&prob, &laplace_contour(n), &SolverConfig::new(l, m, n)).unwrap()))
            .collect();
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
        assert!(errors[2] <= 1e-10, "(L, M) = ({l}, {m}): {errors:?}");
    }
}

#[test]
fn exact_eigenspace_gives_exact_ritz_values() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let v = QuasiMatrix::new(prob.domain(), (1..=4).map(|k| sin_k(k as f64)).collect()).unwrap();
    let mom = subspace_iterate(&prob, &ct, &v, 1, 1, &SolverConfig::new(4, 1, 16)).unwrap();
    let (q, _) = mom.s[0].qr();
    let aq = QuasiMatrix::new(prob.domain(), q.columns().iter().map(|f| prob.a.apply(f).unwrap()).collect()).unwrap();
    let (theta, _) = densela::eig_generalized(&q.adjoint_times(&aq).unwrap(), &q.gram()).unwrap();
    for (t, e) in theta.iter().zip([1.0, 4.0, 9.0, 16.0]) {
        assert!((t - e).norm() <= 1e-12 * e, "{t} vs {e}");
    }
}

#[test]
fn subspace_iteration_examples() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let cfg = SolverConfig::new(2, 2, 16);
    let v = QuasiMatrix::random(2, prob.domain(), 3);
    let direct = compute_moments(&prob, &v, &ct, 2, &cfg.moment_options()).unwrap();
    let iterated = subspace_iterate(&prob, &ct, &v, 1, 2, &cfg).unwrap();
    assert_eq!(direct.s, iterated.s);

    let s1 = QuasiMatrix::new(prob.domain(), vec![sin_k(1.0)]).unwrap();
    let out = subspace_iterate(&prob, &ct, &s1, 2, 1, &cfg).unwrap();
    let u = out.s[0].column(0);
    let cos_angle = contour_eig::funspace::inner_product(&sin_k(1.0), u).unwrap().norm() / (u.norm() * sin_k(1.0).norm());
    assert!((1.0 - cos_angle * cos_angle).max(0.0).sqrt() <= 1e-8);
    assert!(subspace_iterate(&prob, &ct, &s1, 0, 1, &cfg).is_err());
}

#[test]
fn region_selection() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let mut res = solvers::cont_ss_rr(&prob, &ct, &SolverConfig::new(8, 1, 16)).unwrap();
    let probe = res.pairs[0].clone();
    res.pairs = vec![
        contour_eig::EigPair { lambda: ct.center(), ..probe.clone() },
        contour_eig::EigPair { lambda: ct.center() + 2.0 * ct.rho(), ..probe.clone() },
        contour_eig::EigPair { lambda: c(25.0, 0.0), in_region: true, ..probe.clone() },
        contour_eig::EigPair { lambda: c(16.0, 0.0), in_region: false, ..probe },
    ];
    let n = res.pairs.len();
    let flagged = solvers::select_in_region(res, &ct);
    assert_eq!(flagged.pairs.len(), n);
    let flags: Vec<bool> = flagged.pairs.iter().map(|p| p.in_region).collect();
    assert_eq!(flags, vec![true, false, false, true]);
}

#[test]
fn configuration_is_validated() {
    let prob = laplace();
    let ct = laplace_contour(16);
    for cfg in [SolverConfig::new(0, 1, 16), SolverConfig::new(1, 0, 16), SolverConfig::new(1, 1, 16).with_ell(0)] {
        assert!(matches!(solvers::cont_ss_rr(&prob, &ct, &cfg), Err(Error::InvalidArgument(_))));
    }
    let cfg = SolverConfig { delta: 1.0, ..SolverConfig::new(1, 1, 16) };
    assert!(matches!(solvers::cont_ss_rr(&prob, &ct, &cfg), Err(Error::InvalidArgument(_))));
    assert!(matches!(solvers::cont_ss_rr(&prob, &ct, &SolverConfig::new(2, 1, 8)), Err(Error::InvalidArgument(_))));
}

#[test]
fn method_names_round_trip() {
    for m in Method::ALL {
        assert_eq!(m.name().parse::<Method>().unwrap(), m);
    }
    assert!("arnoldi".parse::<Method>().is_err());
}

#[test]
fn results_are_reproducible_across_thread_counts() {
    let prob = laplace();
    let ct = laplace_contour(16);
    let run = |threads| {
        let cfg = SolverConfig { threads: Some(threads), ..SolverConfig::new(3, 2, 16).with_ell(2) };
        solvers::cont_ss_caa(&prob, &ct, &cfg).unwrap()
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.pairs.len(), b.pairs.len());
    for (p, q) in a.pairs.iter().zip(&b.pairs) {
        assert_eq!(p.lambda, q.lambda);
        assert_eq!(p.u, q.u);
        assert_eq!(p.residual.to_bits(), q.residual.to_bits());
    }
    assert_eq!(a.singular_values, b.singular_values);
}
