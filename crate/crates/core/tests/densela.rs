use contour_eig::densela::{self, CMatrix};
use contour_eig::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn diag(d: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { c(0.0, 0.0) })
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn close_multiset(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| {
            let best = (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm()));
            match best {
                Some(j) if (b[j] - x).norm() <= tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
}

#[test]
fn svd_examples() {
    let (_, s, _) = densela::svd(&diag(&[c(3.0, 0.0), c(1.0, 0.0)])).unwrap();
    assert_eq!(s, vec![3.0, 1.0]);
    let (_, s, _) = densela::svd(&CMatrix::zeros(2, 2)).unwrap();
    assert_eq!(s, vec![0.0, 0.0]);
}

#[test]
fn svd_reconstructs_rectangular() {
    let a = random(8, 5, 1);
    let (u, s, w) = densela::svd(&a).unwrap();
    let sm = diag(&s.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
    let back = &u * sm * w.adjoint();
    assert!(densela::norm_fro(&(back - &a)) <= 1e-12 * s[0]);
    assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(5, 5))) <= 1e-13);
    assert!(s.windows(2).all(|p| p[0] >= p[1] && p[1] >= 0.0));
}

#[test]
fn qr_with_nonnegative_diagonal() {
    let a = random(7, 4, 2);
    let (q, r) = densela::qr(&a);
    assert!(max_abs(&(&q * &r - &a)) < 1e-13);
    assert!(max_abs(&(q.adjoint() * &q - CMatrix::identity(4, 4))) < 1e-13);
    for i in 0..4 {
        assert!(r[(i, i)].im.abs() < 1e-14 && r[(i, i)].re >= 0.0);
        for j in 0..i {
            assert_eq!(r[(i, j)], c(0.0, 0.0));
        }
    }
}

#[test]
fn standard_eig_examples() {
    let (vals, _) = densela::eig_standard(&diag(&[c(2.0, 0.0), c(5.0, 0.0)])).unwrap();
    assert!(close_multiset(&vals, &[c(2.0, 0.0), c(5.0, 0.0)], 1e-14));
    let rot = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
    let (vals, _) = densela::eig_standard(&rot).unwrap();
    assert!(close_multiset(&vals, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-14));
    assert!(vals[0].im < 0.0);
}

#[test]
fn standard_eig_residuals() {
    let a = random(10, 10, 3);
    let (vals, vecs) = densela::eig_standard(&a).unwrap();
    let an = densela::norm_fro(&a);
    for (i, th) in vals.iter().enumerate() {
        let t = vecs.column(i);
        let r = (&a * t - t * *th).norm();
        assert!(r <= 1e-10 * an * t.norm());
    }
    assert!(vals.windows(2).all(|p| p[0].re < p[1].re || (p[0].re == p[1].re && p[0].im <= p[1].im)));
}

#[test]
fn generalized_eig_examples() {
    let (vals, _) = densela::eig_generalized(&diag(&[c(2.0, 0.0), c(6.0, 0.0)]), &diag(&[c(1.0, 0.0), c(2.0, 0.0)])).unwrap();
    assert!(close_multiset(&vals, &[c(2.0, 0.0), c(3.0, 0.0)], 1e-14));
    let (vals, _) = densela::eig_generalized(&CMatrix::identity(3, 3), &CMatrix::identity(3, 3)).unwrap();
    assert!(vals.iter().all(|v| (v - 1.0).norm() < 1e-14));
}

#[test]
fn hermitian_definite_pencil_against_cholesky_reduction() {
    let x = random(6, 6, 4);
    let a = (&x + x.adjoint()) * c(0.5, 0.0);
    let y = random(6, 6, 5);
    let b = &y * y.adjoint() + CMatrix::identity(6, 6);
    let (vals, vecs) = densela::eig_generalized(&a, &b).unwrap();
    assert!(vals.iter().all(|v| v.im.abs() < 1e-10));
    for (i, th) in vals.iter().enumerate() {
        let t = vecs.column(i);
        let r = (&a * t - &b * t * *th).norm();
        assert!(r <= 1e-10 * (densela::norm_fro(&a) + th.norm() * densela::norm_fro(&b)) * t.norm());
    }
    let l = nalgebra::Cholesky::new(b).unwrap().l();
    let linv = l.clone().try_inverse().unwrap();
    let reduced = &linv * &a * linv.adjoint();
    let oracle: Vec<Complex64> = nalgebra::SymmetricEigen::new(reduced).eigenvalues.iter().map(|&x| c(x, 0.0)).collect();
    assert!(close_multiset(&vals, &oracle, 1e-10));
}

#[test]
fn singular_pencil_is_reported() {
    let z = CMatrix::zeros(3, 3);
    assert!(densela::eig_generalized(&z, &z).is_err());
}

#[test]
fn cond2_of_diagonal() {
    assert!((densela::cond2(&diag(&[c(4.0, 0.0), c(0.5, 0.0)])) - 8.0).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn singular_values_unitarily_invariant(seed in 0u64..10_000, rows in 2usize..9, cols in 2usize..9) {
        let a = random(rows, cols, seed);
        let (ql, _) = densela::qr(&random(rows, rows, seed + 1));
        let (qr, _) = densela::qr(&random(cols, cols, seed + 2));
        let s = densela::singular_values(&a);
        let t = densela::singular_values(&(ql * &a * qr));
        for (x, y) in s.iter().zip(&t) {
            prop_assert!((x - y).abs() <= 1e-12 * s[0]);
        }
    }

    #[test]
    fn generalized_with_identity_matches_standard(seed in 0u64..10_000, n in 1usize..10) {
        let a = random(n, n, seed);
        let (g, _) = densela::eig_generalized(&a, &CMatrix::identity(n, n)).unwrap();
        let (s, _) = densela::eig_standard(&a).unwrap();
        prop_assert!(close_multiset(&g, &s, 1e-10));
    }
}
