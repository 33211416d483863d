//! The four contour-integral eigensolvers and the shared subspace-iteration
//! driver.

mod extract;

pub use extract::{hankel_blocks, hankel_eigs, HankelEigs};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{compute_moments_with, Contour, MomentDiagnostics, MomentOptions, MomentScaling, MomentSet};
use crate::diffop::{BvpOptions, DiffEigProblem, PencilSolver};
use crate::error::{Error, Result};
use crate::funspace::{Fun, QuasiMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Feast,
    SsRr,
    SsHankel,
    SsCaa,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Feast, Method::SsRr, Method::SsHankel, Method::SsCaa];

    pub fn name(self) -> &'static str {
        match self {
            Method::Feast => "feast",
            Method::SsRr => "ssrr",
            Method::SsHankel => "sshankel",
            Method::SsCaa => "sscaa",
        }
    }

    /// Moment orders needed per sweep.
    pub fn orders(self, m: usize) -> usize {
        match self {
            Method::Feast => 1,
            Method::SsRr => m,
            Method::SsHankel => 2 * m,
            Method::SsCaa => m + 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}' (expected feast, ssrr, sshankel, sscaa)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Number of source functions.
    #[serde(rename = "L")]
    pub l: usize,
    /// Moment degree; forced to 1 by FEAST.
    #[serde(rename = "M")]
    pub m: usize,
    /// Quadrature points.
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    /// Filter sweeps.
    pub ell: usize,
    pub seed: u64,
    pub tol_ode: f64,
    pub orthonormalize_between_iterations: bool,
    pub scaling: MomentScaling,
    pub use_symmetry: bool,
    pub max_points: usize,
    /// Worker threads for the quadrature-point solves; `None` uses the
    /// ambient pool.
    pub threads: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            l: 4,
            m: 1,
            n: 16,
            delta: 1e-14,
            ell: 1,
            seed: 0,
            tol_ode: 1e-12,
            orthonormalize_between_iterations: true,
            scaling: MomentScaling::Centered,
            use_symmetry: true,
            max_points: BvpOptions::default().max_points,
            threads: None,
        }
    }
}

impl SolverConfig {
    pub fn new(l: usize, m: usize, n: usize) -> Self {
        SolverConfig { l, m, n, ..Self::default() }
    }

    pub fn with_ell(mut self, ell: usize) -> Self {
        self.ell = ell;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.m == 0 || self.n < 2 || self.ell == 0 {
            return Err(Error::InvalidArgument("L, M, ell must be at least 1 and N at least 2".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.tol_ode > 0.0 && self.tol_ode < 1.0) {
            return Err(Error::InvalidArgument(format!("tol_ode must lie in (0, 1), got {}", self.tol_ode)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn moment_options(&self) -> MomentOptions {
        MomentOptions {
            bvp: BvpOptions { tol: self.tol_ode, max_points: self.max_points, ..BvpOptions::default() },
            scaling: self.scaling,
            use_symmetry: self.use_symmetry,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigPair {
    pub lambda: Complex64,
    /// Unit-norm eigenfunction estimate.
    pub u: Fun,
    /// `‖A u − λ B u‖`.
    pub residual: f64,
    pub in_region: bool,
    /// `|f_N(λ)|`, NaN when `λ` sits on a node.
    pub filter_abs: f64,
}

/// Eigenvalue estimates and residuals after one sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lambdas: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub in_region: Vec<bool>,
}

impl IterationRecord {
    pub fn max_in_region_residual(&self) -> Option<f64> {
        self.residuals.iter().zip(&self.in_region).filter(|(_, &i)| i).map(|(r, _)| *r).reduce(f64::max)
    }
}

/// Wall-clock seconds by category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub solve_odes: f64,
    pub orthonormalization: f64,
    pub matrix_eig: f64,
    pub total: f64,
}

impl Timings {
    /// Time not attributed to the other categories.
    pub fn misc(&self) -> f64 {
        (self.total - self.solve_odes - self.orthonormalization - self.matrix_eig).max(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct EigResult {
    pub method: Method,
    pub pairs: Vec<EigPair>,
    /// Retained rank after truncation.
    pub rank: usize,
    /// Singular values behind the truncation of the final sweep.
    pub singular_values: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub timings: Timings,
    pub moments: Vec<MomentDiagnostics>,
}

impl EigResult {
    pub fn in_region(&self) -> impl Iterator<Item = &EigPair> {
        self.pairs.iter().filter(|p| p.in_region)
    }

    pub fn in_region_lambdas(&self) -> Vec<Complex64> {
        self.in_region().map(|p| p.lambda).collect()
    }

    /// ODE solves performed.
    pub fn ode_solves(&self) -> usize {
        self.moments.iter().map(|m| m.n_solves).sum()
    }
}

/// Re-flag pairs by membership in the contour's region.
pub fn select_in_region(mut result: EigResult, contour: &Contour) -> EigResult {
    for p in result.pairs.iter_mut() {
        p.in_region = contour.contains(p.lambda);
    }
    result
}

pub fn cont_feast(prob: &DiffEigProblem, contour: &Contour, config: &SolverConfig) -> Result<EigResult> {
    solve(Method::Feast, prob, contour, config, None)
}

pub fn cont_ss_rr(prob: &DiffEigProblem, contour: &Contour, config: &SolverConfig) -> Result<EigResult> {
    solve(Method::SsRr, prob, contour, config, None)
}

/// `vtilde` defaults to the random source `V`.
pub fn cont_ss_hankel(
    prob: &DiffEigProblem,
    contour: &Contour,
    config: &SolverConfig,
    vtilde: Option<&QuasiMatrix>,
) -> Result<EigResult> {
    solve(Method::SsHankel, prob, contour, config, vtilde)
}

pub fn cont_ss_caa(prob: &DiffEigProblem, contour: &Contour, config: &SolverConfig) -> Result<EigResult> {
    solve(Method::SsCaa, prob, contour, config, None)
}

/// Runs `method`, inside a dedicated thread pool when `config.threads` is set.
pub fn solve(
    method: Method,
    prob: &DiffEigProblem,
    contour: &Contour,
    config: &SolverConfig,
    vtilde: Option<&QuasiMatrix>,
) -> Result<EigResult> {
    config.validate()?;
    if contour.n() != config.n {
        return Err(Error::InvalidArgument(format!(
            "contour has {} points but the configuration asks for {}",
            contour.n(),
            config.n
        )));
    }
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| run(method, prob, contour, config, vtilde))
        }
        None => run(method, prob, contour, config, vtilde),
    }
}

/// `ℓ − 1` zeroth-moment sweeps applied to `v0`, then the moments of order
/// `0..orders` from the final iterate.
pub fn subspace_iterate(
    prob: &DiffEigProblem,
    contour: &Contour,
    v0: &QuasiMatrix,
    ell: usize,
    orders: usize,
    config: &SolverConfig,
) -> Result<MomentSet> {
    if ell == 0 {
        return Err(Error::InvalidArgument("ell must be at least 1".into()));
    }
    let opts = config.moment_options();
    let solver = PencilSolver::new(prob, opts.bvp);
    let mut v = v0.clone();
    for _ in 1..ell {
        let s0 = compute_moments_with(&solver, &v, contour, 1, &opts)?.s.swap_remove(0);
        v = if config.orthonormalize_between_iterations { s0.qr().0 } else { s0 };
    }
    compute_moments_with(&solver, &v, contour, orders, &opts)
}

fn run(
    method: Method,
    prob: &DiffEigProblem,
    contour: &Contour,
    config: &SolverConfig,
    vtilde: Option<&QuasiMatrix>,
) -> Result<EigResult> {
    let start = Instant::now();
    let opts = config.moment_options();
    let solver = PencilSolver::new(prob, opts.bvp);
    let v0 = QuasiMatrix::random(config.l, prob.domain(), config.seed);
    let vtilde = vtilde.cloned().unwrap_or_else(|| v0.clone());
    if vtilde.ncols() != config.l {
        return Err(Error::InvalidArgument("Vtilde must have L columns".into()));
    }
    let m = if method == Method::Feast { 1 } else { config.m };
    let orders = method.orders(m);

    let mut timings = Timings::default();
    let mut history = Vec::new();
    let mut moments_diag = Vec::new();
    let mut v = v0;
    let mut last = None;
    for it in 1..=config.ell {
        let t = Instant::now();
        let mom = compute_moments_with(&solver, &v, contour, orders, &opts)?;
        timings.solve_odes += t.elapsed().as_secs_f64();
        moments_diag.push(mom.diagnostics.clone());

        let ex = match method {
            Method::Feast => extract::feast(prob, &mom, config, &mut timings)?,
            Method::SsRr => extract::rayleigh_ritz(prob, &mom, m, config, &mut timings)?,
            Method::SsHankel => extract::hankel(&mom, &vtilde, m, contour, config, &mut timings)?,
            Method::SsCaa => extract::caa(&mom, m, contour, config, &mut timings)?,
        };
        let pairs = finish_pairs(prob, contour, ex.pairs)?;
        history.push(IterationRecord {
            iteration: it,
            lambdas: pairs.iter().map(|p| p.lambda).collect(),
            residuals: pairs.iter().map(|p| p.residual).collect(),
            in_region: pairs.iter().map(|p| p.in_region).collect(),
        });

        if it < config.ell {
            let t = Instant::now();
            v = match method {
                Method::Feast => ritz_sources(prob, &pairs, config.l)?,
                _ => {
                    let s0 = mom.s[0].clone();
                    if config.orthonormalize_between_iterations {
                        s0.qr().0
                    } else {
                        s0
                    }
                }
            };
            timings.orthonormalization += t.elapsed().as_secs_f64();
        }
        last = Some((pairs, ex.rank, ex.singular_values));
    }
    let (pairs, rank, singular_values) = last.expect("at least one sweep");
    timings.total = start.elapsed().as_secs_f64();
    Ok(EigResult { method, pairs, rank, singular_values, history, timings, moments: moments_diag })
}

/// Scales `u` to unit norm with its largest coefficient real and positive.
fn normalize(u: &Fun, real_problem: bool) -> Option<Fun> {
    let nrm = u.norm();
    if !(nrm > 0.0 && nrm.is_finite()) {
        return None;
    }
    let big = u.coeffs().iter().copied().fold(Complex64::new(0.0, 0.0), |a, c| if c.norm() > a.norm() { c } else { a });
    let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex64::new(1.0, 0.0) };
    let mut v = u.scale(phase / nrm);
    if real_problem && !v.is_real() && v.imag_part().norm() <= 1e-10 {
        v = v.real_part();
    }
    Some(v)
}

fn finish_pairs(prob: &DiffEigProblem, contour: &Contour, raw: Vec<(Complex64, Fun)>) -> Result<Vec<EigPair>> {
    let real = prob.is_real();
    let mut pairs = Vec::with_capacity(raw.len());
    for (lambda, u) in raw {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            continue;
        }
        let Some(u) = normalize(&u, real) else { continue };
        let residual = prob.residual_norm(lambda, &u)?;
        pairs.push(EigPair {
            lambda,
            u,
            residual,
            in_region: contour.contains(lambda),
            filter_abs: contour.filter(lambda).map_or(f64::NAN, |f| f.norm()),
        });
    }
    pairs.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    Ok(pairs)
}

/// Next FEAST source: the Ritz functions, padded with the leading ones if
/// some were dropped.
fn ritz_sources(prob: &DiffEigProblem, pairs: &[EigPair], l: usize) -> Result<QuasiMatrix> {
    if pairs.is_empty() {
        return Err(Error::RankCollapse("no Ritz functions to iterate on"));
    }
    let mut cols: Vec<Fun> = pairs.iter().map(|p| p.u.clone()).collect();
    let mut k = 0;
    while cols.len() < l {
        cols.push(pairs[k % pairs.len()].u.diff().try_add(&pairs[k % pairs.len()].u)?);
        k += 1;
    }
    cols.truncate(l);
    QuasiMatrix::new(prob.domain(), cols)
}
