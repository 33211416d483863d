//! Chebyshev collocation for `(z B − A) y = B v` with boundary rows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DiffEigProblem, DiffOp};
use crate::densela::{CMatrix, Lu};
use crate::error::{Error, Result};
use crate::funspace::{cheb, Fun};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvpOptions {
    /// Relative accuracy requested of the solution coefficients.
    pub tol: f64,
    pub min_points: usize,
    pub max_points: usize,
    /// Largest acceptable condition estimate of the row-scaled system.
    pub cond_limit: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        BvpOptions { tol: 1e-12, min_points: 33, max_points: 4097, cond_limit: 1.0 / (100.0 * f64::EPSILON) }
    }
}

impl BvpOptions {
    pub fn with_tol(tol: f64) -> Self {
        BvpOptions { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub y: Fun,
    /// Collocation points of the accepted discretization.
    pub n_pts: usize,
    /// 1-norm condition estimate of the accepted system.
    pub cond: f64,
    /// `‖(z B − A) y − B v‖ / ‖B v‖`.
    pub residual: f64,
}

struct Level {
    n_pts: usize,
    a: CMatrix,
    b: CMatrix,
    bc_rows: Vec<(usize, Vec<f64>)>,
}

/// Resolvent solves for one pencil, with collocation matrices cached per
/// grid size. Safe to share between threads.
pub struct PencilSolver<'a> {
    prob: &'a DiffEigProblem,
    opts: BvpOptions,
    sizes: Vec<usize>,
    levels: Vec<OnceLock<Level>>,
}

/// Differentiation matrix on `n_pts` ascending Chebyshev points of [-1, 1].
fn cheb_diff(n_pts: usize) -> DMatrix<f64> {
    let n = n_pts - 1;
    let nf = n as f64;
    let mut d = DMatrix::zeros(n_pts, n_pts);
    let c = |i: usize| {
        let base = if i == 0 || i == n { 2.0 } else { 1.0 };
        if i.is_multiple_of(2) {
            base
        } else {
            -base
        }
    };
    for j in 0..n_pts {
        for i in 0..n_pts {
            if i != j {
                // x_i − x_j via a product formula to avoid cancellation
                let (fi, fj) = (i as f64, j as f64);
                let diff = 2.0 * (PI * (fi + fj - nf) / (2.0 * nf)).cos() * (PI * (fi - fj) / (2.0 * nf)).sin();
                d[(i, j)] = c(i) / (c(j) * diff);
            }
        }
    }
    for i in 0..n_pts {
        let s: f64 = (0..n_pts).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    d
}

fn accumulate(target: &mut CMatrix, coeff: &[Complex64], p: &DMatrix<f64>) {
    let n = target.nrows();
    for j in 0..n {
        for i in 0..n {
            target[(i, j)] += coeff[i] * p[(i, j)];
        }
    }
}

fn add_diag(target: &mut CMatrix, coeff: &[Complex64]) {
    for (i, c) in coeff.iter().enumerate() {
        target[(i, i)] += c;
    }
}

impl<'a> PencilSolver<'a> {
    pub fn new(prob: &'a DiffEigProblem, opts: BvpOptions) -> Self {
        let mut sizes = Vec::new();
        let mut n = 33;
        while n <= opts.max_points {
            if n >= opts.min_points {
                sizes.push(n);
            }
            n = 2 * n - 1;
        }
        let levels = sizes.iter().map(|_| OnceLock::new()).collect();
        PencilSolver { prob, opts, sizes, levels }
    }

    pub fn problem(&self) -> &DiffEigProblem {
        self.prob
    }

    pub fn options(&self) -> &BvpOptions {
        &self.opts
    }

    fn level(&self, k: usize) -> &Level {
        self.levels[k].get_or_init(|| self.build_level(self.sizes[k]))
    }

    fn build_level(&self, n_pts: usize) -> Level {
        let domain = self.prob.domain();
        let order = self.prob.order();
        let mut d1 = cheb_diff(n_pts);
        d1 *= 1.0 / domain.scale();
        let values = |op: &DiffOp| -> Vec<Vec<Complex64>> { op.coeffs().iter().map(|c| c.values(n_pts)).collect() };
        let (av, bv) = (values(&self.prob.a), values(&self.prob.b));
        let mut a = CMatrix::zeros(n_pts, n_pts);
        let mut b = CMatrix::zeros(n_pts, n_pts);
        let mut first_row = vec![vec![0.0; n_pts]];
        let mut last_row = vec![vec![0.0; n_pts]];
        first_row[0][0] = 1.0;
        last_row[0][n_pts - 1] = 1.0;
        add_diag(&mut a, &av[0]);
        add_diag(&mut b, &bv[0]);
        let mut p = d1.clone();
        for k in 1..=order {
            if k > 1 {
                p = &p * &d1;
            }
            if let Some(c) = av.get(k) {
                accumulate(&mut a, c, &p);
            }
            if let Some(c) = bv.get(k) {
                accumulate(&mut b, c, &p);
            }
            first_row.push(p.row(0).iter().copied().collect());
            last_row.push(p.row(n_pts - 1).iter().copied().collect());
        }

        let mut bc_rows = Vec::new();
        let (mut next_left, mut next_right) = (0usize, n_pts - 1);
        let mut place = |bc: &super::BoundaryCondition, left_side: bool| {
            let mut row = vec![0.0; n_pts];
            for (k, &c) in bc.left.iter().enumerate() {
                for (r, v) in row.iter_mut().zip(&first_row[k]) {
                    *r += c * v;
                }
            }
            for (k, &c) in bc.right.iter().enumerate() {
                for (r, v) in row.iter_mut().zip(&last_row[k]) {
                    *r += c * v;
                }
            }
            let idx = if left_side {
                next_left += 1;
                next_left - 1
            } else {
                next_right -= 1;
                next_right + 1
            };
            bc_rows.push((idx, row));
        };
        for bc in self.prob.bc.iter().filter(|bc| bc.is_left_only()) {
            place(bc, true);
        }
        for bc in self.prob.bc.iter().filter(|bc| bc.is_right_only()) {
            place(bc, false);
        }
        for bc in self.prob.bc.iter().filter(|bc| !bc.is_left_only() && !bc.is_right_only()) {
            place(bc, true);
        }
        Level { n_pts, a, b, bc_rows }
    }

    fn factor(&self, level: &Level, z: Complex64) -> Result<(Lu, Vec<f64>, f64)> {
        let n = level.n_pts;
        let mut m = &level.b * z - &level.a;
        for (idx, row) in &level.bc_rows {
            for (j, v) in row.iter().enumerate() {
                m[(*idx, j)] = Complex64::new(*v, 0.0);
            }
        }
        let mut scale = vec![0.0f64; n];
        for j in 0..n {
            for (i, s) in scale.iter_mut().enumerate() {
                *s = s.max(m[(i, j)].norm());
            }
        }
        for s in scale.iter_mut() {
            *s = if *s > 0.0 { 1.0 / *s } else { 1.0 };
        }
        for j in 0..n {
            for (i, s) in scale.iter().enumerate() {
                m[(i, j)] *= s;
            }
        }
        let lu = Lu::new(m);
        let cond = lu.cond1_estimate();
        if !(cond <= self.opts.cond_limit) {
            return Err(Error::IllConditioned { cond, z });
        }
        Ok((lu, scale, cond))
    }

    /// `(z B − A)⁻¹ B v`.
    pub fn solve(&self, z: Complex64, v: &Fun) -> Result<BvpSolution> {
        Ok(self.solve_many(z, std::slice::from_ref(v))?.pop().expect("one solution"))
    }

    /// `(z B − A)⁻¹ B v` for several `v`, sharing factorizations.
    pub fn solve_many(&self, z: Complex64, vs: &[Fun]) -> Result<Vec<BvpSolution>> {
        self.solve_impl(z, vs, true)
    }

    /// `(z B − A)⁻¹ f` with `f` used as the right-hand side directly.
    pub fn solve_rhs(&self, z: Complex64, f: &Fun) -> Result<BvpSolution> {
        Ok(self.solve_impl(z, std::slice::from_ref(f), false)?.pop().expect("one solution"))
    }

    fn solve_impl(&self, z: Complex64, vs: &[Fun], apply_b: bool) -> Result<Vec<BvpSolution>> {
        let domain = self.prob.domain();
        for v in vs {
            domain.check_same(&v.domain())?;
        }
        let real = self.prob.is_real() && z.im == 0.0;
        let mut out: Vec<Option<BvpSolution>> = vec![None; vs.len()];
        let start: Vec<usize> = vs
            .iter()
            .map(|v| self.sizes.iter().position(|&n| n >= v.len()).unwrap_or(self.sizes.len()))
            .collect();
        for k in 0..self.sizes.len() {
            let pending: Vec<usize> = (0..vs.len()).filter(|&i| out[i].is_none() && start[i] <= k).collect();
            if pending.is_empty() {
                if out.iter().all(Option::is_some) {
                    break;
                }
                continue;
            }
            let level = self.level(k);
            let n = level.n_pts;
            let (lu, scale, cond) = self.factor(level, z)?;
            for i in pending {
                let v = &vs[i];
                let vals = v.values(n);
                let mut rhs: Vec<Complex64> = if apply_b {
                    let col = nalgebra::DVector::from_vec(vals);
                    (&level.b * col).iter().copied().collect()
                } else {
                    vals
                };
                for (idx, _) in &level.bc_rows {
                    rhs[*idx] = ZERO;
                }
                for (r, s) in rhs.iter_mut().zip(&scale) {
                    *r *= s;
                }
                lu.solve_in_place(&mut rhs);
                let mut coeffs = cheb::vals2coeffs(&rhs);
                if real && v.is_real() {
                    coeffs.iter_mut().for_each(|c| c.im = 0.0);
                }
                let keep_tol = cheb::standard_chop(&coeffs, self.opts.tol);
                if keep_tol >= coeffs.len() {
                    continue;
                }
                let keep_eps = cheb::standard_chop(&coeffs, f64::EPSILON);
                coeffs.truncate(if keep_eps < n { keep_eps.max(keep_tol) } else { keep_tol });
                let y = Fun::from_coeffs(domain, coeffs);
                let residual = self.relative_residual(z, v, &y, apply_b)?;
                out[i] = Some(BvpSolution { y, n_pts: n, cond, residual });
            }
        }
        if out.iter().any(Option::is_none) {
            return Err(Error::NonConvergent { max_points: *self.sizes.last().unwrap_or(&0) });
        }
        Ok(out.into_iter().map(|s| s.expect("filled")).collect())
    }

    fn relative_residual(&self, z: Complex64, v: &Fun, y: &Fun, apply_b: bool) -> Result<f64> {
        let rhs = if apply_b { self.prob.b.apply(v)? } else { v.clone() };
        let lhs = self.prob.b.apply(y)?.scale(z).try_sub(&self.prob.a.apply(y)?)?;
        let denom = rhs.norm();
        let num = lhs.try_sub(&rhs)?.norm();
        Ok(if denom > 0.0 { num / denom } else { num })
    }
}

/// One-off solve of `(z B − A) y = B rhs` with boundary conditions.
pub fn bvp_solve(
    a: &DiffOp,
    b: &DiffOp,
    bc: &super::BoundaryConditions,
    z: Complex64,
    rhs: &Fun,
    tol: f64,
) -> Result<Fun> {
    let prob = DiffEigProblem::new(a.clone(), b.clone(), bc.clone())?;
    let solver = PencilSolver::new(&prob, BvpOptions::with_tol(tol));
    Ok(solver.solve(z, rhs)?.y)
}
