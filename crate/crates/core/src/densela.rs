//! Small dense complex linear algebra: LU with condition estimation, SVD,
//! thin QR, and standard/generalized eigenproblems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_ITER: usize = 10_000;

/// Largest column sum of moduli.
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn norm_fro(a: &CMatrix) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    anorm: f64,
    singular: bool,
}

impl Lu {
    pub fn new(mut a: CMatrix) -> Lu {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.nrows();
        let anorm = norm1(&a);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        let data = a.as_mut_slice();
        for k in 0..n {
            let col_k = k * n;
            let (mut p, mut best) = (k, -1.0);
            for i in k..n {
                let m = data[col_k + i].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    data.swap(j * n + k, j * n + p);
                }
                perm.swap(k, p);
            }
            let pivot = data[col_k + k];
            if pivot == ZERO {
                singular = true;
                continue;
            }
            let inv = ONE / pivot;
            for i in k + 1..n {
                data[col_k + i] *= inv;
            }
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let lcol = &head[col_k + k + 1..col_k + n];
            for col in tail.chunks_exact_mut(n) {
                let akj = col[k];
                if akj != ZERO {
                    for (c, l) in col[k + 1..].iter_mut().zip(lcol) {
                        *c -= akj * l;
                    }
                }
            }
        }
        Lu { lu: a, perm, anorm, singular }
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.dim();
        let data = self.lu.as_slice();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for k in 0..n {
            let xk = x[k];
            if xk != ZERO {
                for (xi, l) in x[k + 1..].iter_mut().zip(&data[k * n + k + 1..k * n + n]) {
                    *xi -= xk * l;
                }
            }
        }
        for k in (0..n).rev() {
            x[k] /= data[k * n + k];
            let xk = x[k];
            if xk != ZERO {
                for (xi, u) in x[..k].iter_mut().zip(&data[k * n..k * n + k]) {
                    *xi -= xk * u;
                }
            }
        }
        b.copy_from_slice(&x);
    }

    /// Solves `Aᴴ x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        let n = self.dim();
        let data = self.lu.as_slice();
        let mut y = b.to_vec();
        // Uᴴ w = b
        for k in 0..n {
            let col = &data[k * n..k * n + k];
            let s: Complex64 = col.iter().zip(&y[..k]).map(|(u, w)| u.conj() * w).sum();
            y[k] = (y[k] - s) / data[k * n + k].conj();
        }
        // Lᴴ v = w
        for k in (0..n).rev() {
            let col = &data[k * n + k + 1..k * n + n];
            let s: Complex64 = col.iter().zip(&y[k + 1..]).map(|(l, v)| l.conj() * v).sum();
            y[k] -= s;
        }
        for (k, &p) in self.perm.iter().enumerate() {
            b[p] = y[k];
        }
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let mut x = b.clone();
        for mut col in x.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
        x
    }

    /// Estimate of the 1-norm condition number (Hager's method with
    /// Higham's safeguard vector).
    pub fn cond1_estimate(&self) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.dim();
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est: f64 = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve_in_place(&mut y);
            let ynorm: f64 = y.iter().map(|v| v.norm()).sum();
            if ynorm <= est {
                break;
            }
            est = ynorm;
            let mut z: Vec<Complex64> =
                y.iter().map(|v| if v.norm() > 0.0 { v / v.norm() } else { ONE }).collect();
            self.solve_adjoint_in_place(&mut z);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        let mut alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
                Complex64::new(s * (1.0 + t), 0.0)
            })
            .collect();
        self.solve_in_place(&mut alt);
        let alt_est = 2.0 * alt.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
        let inv_norm = est.max(alt_est);
        if inv_norm.is_finite() {
            inv_norm * self.anorm
        } else {
            f64::INFINITY
        }
    }
}

/// Solves `A X = B`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let lu = Lu::new(a.clone());
    if lu.is_singular() {
        return Err(Error::SingularPencil);
    }
    Ok(lu.solve_matrix(b))
}

/// Singular value decomposition `A = U Σ Wᴴ`, thin, with `Σ` descending.
pub fn svd(a: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Ok((CMatrix::zeros(m, 0), Vec::new(), CMatrix::zeros(n, 0)));
    }
    let s = nalgebra::SVD::try_new(a.clone(), true, true, f64::EPSILON, MAX_ITER)
        .ok_or(Error::NoConvergence("svd"))?;
    let u = s.u.expect("requested U");
    let w = s.v_t.expect("requested Vᴴ").adjoint();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s.singular_values[j].total_cmp(&s.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| s.singular_values[i]).collect();
    let u_sorted = CMatrix::from_fn(m, k, |r, c| u[(r, order[c])]);
    let w_sorted = CMatrix::from_fn(n, k, |r, c| w[(r, order[c])]);
    Ok((u_sorted, sigma, w_sorted))
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// 2-norm condition number.
pub fn cond2(a: &CMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Thin QR with a nonnegative real diagonal in `R`. Needs `rows ≥ cols`.
pub fn qr(a: &CMatrix) -> (CMatrix, CMatrix) {
    let (m, n) = a.shape();
    assert!(m >= n, "thin QR needs rows >= cols");
    let f = a.clone().qr();
    let mut q = f.q();
    let mut r = f.r();
    for j in 0..n {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag > 0.0 {
            let ph = d / mag;
            let phc = ph.conj();
            for c in j..n {
                r[(j, c)] *= phc;
            }
            r[(j, j)] = Complex64::new(mag, 0.0);
            for i in 0..m {
                q[(i, j)] *= ph;
            }
        }
    }
    (q, r)
}

fn eig_order(values: &[Complex64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (values[i], values[j]);
        let fa = a.re.is_finite() && a.im.is_finite();
        let fb = b.re.is_finite() && b.im.is_finite();
        match (fa, fb) {
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => i.cmp(&j),
            (true, true) => a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)),
        }
    });
    order
}

fn sorted_pairs(values: Vec<Complex64>, vectors: CMatrix) -> (Vec<Complex64>, CMatrix) {
    let order = eig_order(&values);
    let vals = order.iter().map(|&i| values[i]).collect();
    let vecs = CMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    (vals, vecs)
}

/// Eigenpairs of a square matrix, sorted by real then imaginary part.
/// Eigenvectors have unit 2-norm.
pub fn eig_standard(a: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::InvalidArgument("eig_standard needs a square matrix".into()));
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NoConvergence("eig_standard: non-finite entries"));
    }
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, MAX_ITER).ok_or(Error::NoConvergence("schur"))?;
    let (q, t) = schur.unpack();
    let tnorm = norm_fro(&t).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut x = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = values[k];
        x[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = t[(i, k)];
            for j in i + 1..k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            x[(i, k)] = -s / d;
        }
    }
    let mut v = q * x;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= Complex64::new(nrm, 0.0);
        }
    }
    Ok(sorted_pairs(values, v))
}

/// Eigenpairs of the pencil `A t = θ B t`. Infinite eigenvalues are
/// reported as `θ = ∞ + 0i` and sorted last.
pub fn eig_generalized(a: &CMatrix, b: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::InvalidArgument("eig_generalized needs square matrices of equal size".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    const COND_LIMIT: f64 = 1e12;
    if cond2(b) < COND_LIMIT {
        let c = solve(b, a)?;
        return eig_standard(&c);
    }
    let infinite = Complex64::new(f64::INFINITY, 0.0);
    let scale = norm_fro(a).max(norm_fro(b));
    if scale == 0.0 {
        return Err(Error::SingularPencil);
    }
    // shifts σ: λ = σ + 1/μ with μ an eigenvalue of (A − σB)⁻¹ B
    let bn = norm_fro(b);
    let ratio = if bn > 0.0 { norm_fro(a) / bn } else { 1.0 };
    for s in [0.0, 0.73, -1.3, 2.9] {
        let sigma = Complex64::new(s * ratio, 0.0);
        let shifted = a - b * sigma;
        if cond2(&shifted) >= COND_LIMIT {
            continue;
        }
        let c = solve(&shifted, b)?;
        let (mu, vecs) = eig_standard(&c)?;
        let mu_scale = mu.iter().map(|m| m.norm()).fold(0.0, f64::max);
        let vals: Vec<Complex64> = mu
            .iter()
            .map(|&m| if m.norm() <= 1e-13 * mu_scale.max(f64::MIN_POSITIVE) { infinite } else { sigma + ONE / m })
            .collect();
        return Ok(sorted_pairs(vals, vecs));
    }
    Err(Error::SingularPencil)
}

/// Residual `‖A t − θ B t‖₂` of a generalized eigenpair.
pub fn pencil_residual(a: &CMatrix, b: &CMatrix, theta: Complex64, t: &DVector<Complex64>) -> f64 {
    (a * t - b * t * theta).norm()
}
