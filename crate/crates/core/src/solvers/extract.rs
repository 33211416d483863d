//! Eigenpair extraction from a moment set.

use std::time::Instant;

use num_complex::Complex64;

use super::{SolverConfig, Timings};
use crate::contour::{Contour, MomentSet};
use crate::densela::{self, CMatrix};
use crate::diffop::DiffEigProblem;
use crate::error::{Error, Result};
use crate::funspace::{Fun, QuasiMatrix};

pub(super) struct Extraction {
    pub pairs: Vec<(Complex64, Fun)>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

fn retained(sigma: &[f64], delta: f64, what: &'static str) -> Result<usize> {
    let top = sigma.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::RankCollapse(what));
    }
    Ok(sigma.iter().take_while(|&&s| s / top >= delta).count())
}

/// `W1 Σ1⁻¹` from the leading `d` singular triplets.
fn w_sigma_inv(w: &CMatrix, sigma: &[f64], d: usize) -> CMatrix {
    let mut out = w.columns(0, d).into_owned();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col /= Complex64::new(sigma[j], 0.0);
    }
    out
}

fn split(lambdas: Vec<Complex64>, funs: QuasiMatrix) -> Vec<(Complex64, Fun)> {
    lambdas.into_iter().zip(funs.into_columns()).collect()
}

fn collapse(e: Error, what: &'static str) -> Error {
    match e {
        Error::ZeroMatrix | Error::SingularPencil => Error::RankCollapse(what),
        e => e,
    }
}

/// Projected pencil `(Uᴴ A U, Uᴴ B U)`.
fn project(prob: &DiffEigProblem, u: &QuasiMatrix) -> Result<(CMatrix, CMatrix)> {
    let au = u.columns().iter().map(|c| prob.a.apply(c)).collect::<Result<Vec<_>>>()?;
    let bu = u.columns().iter().map(|c| prob.b.apply(c)).collect::<Result<Vec<_>>>()?;
    let au = QuasiMatrix::new(u.domain(), au)?;
    let bu = QuasiMatrix::new(u.domain(), bu)?;
    Ok((u.adjoint_times(&au)?, u.adjoint_times(&bu)?))
}

fn ritz(
    prob: &DiffEigProblem,
    basis: &QuasiMatrix,
    timings: &mut Timings,
    what: &'static str,
) -> Result<(Vec<Complex64>, QuasiMatrix)> {
    let (ar, br) = project(prob, basis)?;
    let t = Instant::now();
    let (theta, vecs) = densela::eig_generalized(&ar, &br).map_err(|e| collapse(e, what))?;
    timings.matrix_eig += t.elapsed().as_secs_f64();
    Ok((theta, basis.times(&vecs)))
}

pub(super) fn rayleigh_ritz(
    prob: &DiffEigProblem,
    mom: &MomentSet,
    m: usize,
    config: &SolverConfig,
    timings: &mut Timings,
) -> Result<Extraction> {
    let t = Instant::now();
    let tsvd = mom.stacked(m).tsvd(config.delta).map_err(|e| collapse(e, "moment quasi-matrix is zero"))?;
    timings.orthonormalization += t.elapsed().as_secs_f64();
    let rank = tsvd.rank();
    let (theta, funs) = ritz(prob, &tsvd.u1, timings, "projected B is singular")?;
    Ok(Extraction { pairs: split(theta, funs), rank, singular_values: tsvd.singular_values })
}

pub(super) fn feast(
    prob: &DiffEigProblem,
    mom: &MomentSet,
    config: &SolverConfig,
    timings: &mut Timings,
) -> Result<Extraction> {
    let s0 = &mom.s[0];
    let t = Instant::now();
    let (q, r) = s0.qr();
    let singular_values = densela::singular_values(&r);
    let rank = retained(&singular_values, config.delta, "filtered sources are zero")?;
    let basis = if densela::cond2(&r) < 1e12 {
        s0.times(&densela::solve(&r, &CMatrix::identity(r.nrows(), r.ncols()))?)
    } else {
        q
    };
    timings.orthonormalization += t.elapsed().as_secs_f64();
    let (theta, funs) = ritz(prob, &basis, timings, "projected B is singular")?;
    Ok(Extraction { pairs: split(theta, funs), rank, singular_values })
}

/// Eigenvalues of a block Hankel pencil, before any change of variable.
#[derive(Debug, Clone)]
pub struct HankelEigs {
    pub theta: Vec<Complex64>,
    /// `W1 Σ1⁻¹ t_i` as columns.
    pub coefficients: CMatrix,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// `(H, H<)` with blocks `μ_{i+j}` and `μ_{i+j+1}`, `i, j < m`.
pub fn hankel_blocks(mu: &[CMatrix], m: usize) -> Result<(CMatrix, CMatrix)> {
    if m == 0 || mu.len() < 2 * m {
        return Err(Error::InvalidArgument(format!("need {} reduced moments, got {}", 2 * m, mu.len())));
    }
    let l = mu[0].nrows();
    if mu.iter().any(|x| x.shape() != (l, l)) {
        return Err(Error::InvalidArgument("reduced moments must be square and of equal size".into()));
    }
    let mut h = CMatrix::zeros(l * m, l * m);
    let mut hs = CMatrix::zeros(l * m, l * m);
    for i in 0..m {
        for j in 0..m {
            h.view_mut((i * l, j * l), (l, l)).copy_from(&mu[i + j]);
            hs.view_mut((i * l, j * l), (l, l)).copy_from(&mu[i + j + 1]);
        }
    }
    Ok((h, hs))
}

/// Truncated Hankel pencil `U1ᴴ H< W1 Σ1⁻¹ t = θ t`.
pub fn hankel_eigs(mu: &[CMatrix], m: usize, delta: f64) -> Result<HankelEigs> {
    let (h, hs) = hankel_blocks(mu, m)?;
    let (u, sigma, w) = densela::svd(&h)?;
    let d = retained(&sigma, delta, "Hankel matrix is zero")?;
    let ws = w_sigma_inv(&w, &sigma, d);
    let t_mat = u.columns(0, d).adjoint() * &hs * &ws;
    let (theta, vecs) = densela::eig_standard(&t_mat)?;
    Ok(HankelEigs { theta, coefficients: ws * vecs, rank: d, singular_values: sigma })
}

pub(super) fn hankel(
    mom: &MomentSet,
    vtilde: &QuasiMatrix,
    m: usize,
    contour: &Contour,
    config: &SolverConfig,
    timings: &mut Timings,
) -> Result<Extraction> {
    let t = Instant::now();
    let mu = mom.s.iter().map(|sk| vtilde.adjoint_times(sk)).collect::<Result<Vec<_>>>()?;
    timings.orthonormalization += t.elapsed().as_secs_f64();
    let t = Instant::now();
    let he = hankel_eigs(&mu, m, config.delta)?;
    timings.matrix_eig += t.elapsed().as_secs_f64();
    let funs = mom.stacked(m).times(&he.coefficients);
    let lambdas = he.theta.iter().map(|&th| mom.scaling.unmap(contour, th)).collect();
    Ok(Extraction { pairs: split(lambdas, funs), rank: he.rank, singular_values: he.singular_values })
}

pub(super) fn caa(
    mom: &MomentSet,
    m: usize,
    contour: &Contour,
    config: &SolverConfig,
    timings: &mut Timings,
) -> Result<Extraction> {
    let l = mom.ncols();
    let lm = l * m;
    let t = Instant::now();
    let (_, rplus) = mom.stacked(m + 1).qr();
    let rhat = rplus.view((0, 0), (lm, lm)).into_owned();
    let (u, sigma, w) = densela::svd(&rhat)?;
    timings.orthonormalization += t.elapsed().as_secs_f64();
    let d = retained(&sigma, config.delta, "moment quasi-matrix is zero")?;
    let ws = w_sigma_inv(&w, &sigma, d);
    let t = Instant::now();
    let t_mat = u.columns(0, d).adjoint() * rplus.view((0, l), (lm, lm)) * &ws;
    let (theta, vecs) = densela::eig_standard(&t_mat)?;
    timings.matrix_eig += t.elapsed().as_secs_f64();
    let funs = mom.stacked(m).times(&(ws * vecs));
    let lambdas = theta.iter().map(|&th| mom.scaling.unmap(contour, th)).collect();
    Ok(Extraction { pairs: split(lambdas, funs), rank: d, singular_values: sigma })
}
