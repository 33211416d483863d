//! Quadrature rules on contours, filter functions, and assembly of the
//! complex-moment quasi-matrices `Ŝ_k = Σ_j ω_j ζ_j^k (z_j B − A)⁻¹ B V`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffop::{BvpOptions, BvpSolution, ContourShape, ContourSpec, DiffEigProblem, PencilSolver};
use crate::error::{Error, Result};
use crate::funspace::{Fun, QuasiMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest value returned by [`convergence_rate_estimate`].
pub const RATE_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourKind {
    /// Trapezoidal rule on an ellipse.
    EllipseTrapezoid,
    /// Real rational filter on Chebyshev points of the first kind.
    ChebyshevRealFilter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    kind: ContourKind,
    gamma: Complex64,
    rho: f64,
    alpha: f64,
    points: Vec<Complex64>,
    weights: Vec<Complex64>,
    exploit_symmetry: bool,
}

impl Contour {
    /// `z_j = γ + ρ(cos θ_j + iα sin θ_j)`, `ω_j = (ρ/N)(α cos θ_j + i sin θ_j)`,
    /// `θ_j = (2π/N)(j − 1/2)` for `j = 1..N`.
    pub fn ellipse(gamma: Complex64, rho: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(rho > 0.0 && alpha > 0.0 && n >= 2) {
            return Err(Error::InvalidArgument(format!("bad ellipse: rho={rho}, alpha={alpha}, N={n}")));
        }
        let nf = n as f64;
        let (points, weights) = (1..=n)
            .map(|j| {
                let theta = 2.0 * PI / nf * (j as f64 - 0.5);
                let (s, c) = theta.sin_cos();
                (gamma + Complex64::new(rho * c, rho * alpha * s), Complex64::new(rho / nf * alpha * c, rho / nf * s))
            })
            .unzip();
        Ok(Contour {
            kind: ContourKind::EllipseTrapezoid,
            gamma,
            rho,
            alpha,
            points,
            weights,
            exploit_symmetry: gamma.im == 0.0 && n.is_multiple_of(2),
        })
    }

    /// `z_j = γ + ρ cos((2j−1)π/2N)`, `ω_j = (−1)^j sin((2j−1)π/2N)`.
    pub fn chebyshev(gamma: f64, rho: f64, n: usize) -> Result<Self> {
        if !(rho > 0.0 && n >= 2) {
            return Err(Error::InvalidArgument(format!("bad Chebyshev filter: rho={rho}, N={n}")));
        }
        let (points, weights) = (1..=n)
            .map(|j| {
                let t = (2 * j - 1) as f64 * PI / (2 * n) as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                (Complex64::new(gamma + rho * t.cos(), 0.0), Complex64::new(sign * t.sin(), 0.0))
            })
            .unzip();
        Ok(Contour {
            kind: ContourKind::ChebyshevRealFilter,
            gamma: Complex64::new(gamma, 0.0),
            rho,
            alpha: 1.0,
            points,
            weights,
            exploit_symmetry: false,
        })
    }

    pub fn from_spec(spec: &ContourSpec) -> Result<Self> {
        let mut c = match spec.kind {
            ContourShape::Ellipse => {
                Self::ellipse(Complex64::new(spec.gamma_re, spec.gamma_im), spec.rho, spec.alpha, spec.n)?
            }
            ContourShape::Chebyshev => Self::chebyshev(spec.gamma_re, spec.rho, spec.n)?,
        };
        c.exploit_symmetry &= spec.symmetry;
        Ok(c)
    }

    pub fn to_spec(&self) -> ContourSpec {
        ContourSpec {
            kind: match self.kind {
                ContourKind::EllipseTrapezoid => ContourShape::Ellipse,
                ContourKind::ChebyshevRealFilter => ContourShape::Chebyshev,
            },
            gamma_re: self.gamma.re,
            gamma_im: self.gamma.im,
            rho: self.rho,
            alpha: self.alpha,
            n: self.n(),
            symmetry: self.exploit_symmetry,
        }
    }

    /// Same contour with the symmetric halving switched off.
    pub fn without_symmetry(mut self) -> Self {
        self.exploit_symmetry = false;
        self
    }

    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    pub fn center(&self) -> Complex64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn exploit_symmetry(&self) -> bool {
        self.exploit_symmetry
    }

    /// `f_N(λ) = Σ_j ω_j / (z_j − λ)`.
    pub fn filter(&self, lambda: Complex64) -> Result<Complex64> {
        let mut s = ZERO;
        for (z, w) in self.points.iter().zip(&self.weights) {
            let d = z - lambda;
            if d.norm() < 1e-14 * self.rho {
                return Err(Error::PoleHit { lambda });
            }
            s += w / d;
        }
        Ok(s)
    }

    /// `Σ_j ω_j ((z_j − γ)/ρ)^k`.
    pub fn scaled_moment(&self, k: i32) -> Complex64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * ((z - self.gamma) / self.rho).powi(k))
            .sum()
    }

    /// Largest `|Σ_j ω_j (z_j − γ)^k| / ρ^{k+1}` over `k = 0..=N−2`. The
    /// Chebyshev weights carry no factor of `ρ` and are measured against
    /// `Σ_j |ω_j|` instead.
    pub fn moment_condition_error(&self) -> f64 {
        let scale = match self.kind {
            ContourKind::EllipseTrapezoid => self.rho,
            ContourKind::ChebyshevRealFilter => self.weights.iter().map(|w| w.norm()).sum(),
        };
        (0..self.n() as i32 - 1).map(|k| self.scaled_moment(k).norm() / scale).fold(0.0, f64::max)
    }

    /// Strictly inside the ellipse, or on the open real interval for the
    /// Chebyshev filter.
    pub fn contains(&self, lambda: Complex64) -> bool {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return false;
        }
        let d = lambda - self.gamma;
        match self.kind {
            ContourKind::EllipseTrapezoid => {
                let (u, v) = (d.re / self.rho, d.im / (self.alpha * self.rho));
                u * u + v * v < 1.0
            }
            ContourKind::ChebyshevRealFilter => d.re.abs() < self.rho && d.im.abs() <= 1e-6 * self.rho,
        }
    }

    /// Points with `θ_j` in `(0, π)`; point `j` mirrors point `N − 1 − j`.
    fn upper_half(&self) -> Vec<usize> {
        (0..self.n() / 2).collect()
    }
}

/// `|f_N(λ_{LM+1})| / min_{λ ∈ Ω} |f_N(λ)|`, with `|f_N|` sorted descending.
pub fn convergence_rate_estimate(contour: &Contour, eigs: &[Complex64], l: usize, m: usize) -> Result<f64> {
    let lm = l * m;
    if eigs.len() <= lm {
        return Err(Error::NotEnoughEigenvalues { needed: lm + 1, got: eigs.len() });
    }
    let mut mags = Vec::with_capacity(eigs.len());
    let mut inside_min = f64::INFINITY;
    for &lam in eigs {
        let f = contour.filter(lam)?.norm();
        mags.push(f);
        if contour.contains(lam) {
            inside_min = inside_min.min(f);
        }
    }
    if !inside_min.is_finite() {
        return Err(Error::InvalidArgument("no eigenvalue estimate lies inside the contour".into()));
    }
    mags.sort_by(|a, b| b.total_cmp(a));
    Ok((mags[lm] / inside_min).max(RATE_FLOOR))
}

/// Powers used in the moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MomentScaling {
    /// `ζ_j = (z_j − γ)/ρ`; eigenvalues of moment pencils map back by `γ + ρθ`.
    #[default]
    Centered,
    /// `ζ_j = z_j`.
    Raw,
}

impl MomentScaling {
    pub fn node(self, contour: &Contour, z: Complex64) -> Complex64 {
        match self {
            MomentScaling::Centered => (z - contour.center()) / contour.rho(),
            MomentScaling::Raw => z,
        }
    }

    /// Eigenvalue of the moment pencil back to the original variable.
    pub fn unmap(self, contour: &Contour, theta: Complex64) -> Complex64 {
        match self {
            MomentScaling::Centered => contour.center() + theta * contour.rho(),
            MomentScaling::Raw => theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    pub bvp: BvpOptions,
    pub scaling: MomentScaling,
    /// Use the mirror-image halving when the contour, problem and sources
    /// allow it.
    pub use_symmetry: bool,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions { bvp: BvpOptions::default(), scaling: MomentScaling::Centered, use_symmetry: true }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MomentDiagnostics {
    /// Quadrature points actually solved.
    pub points_solved: Vec<usize>,
    /// Wall time per solved point, all columns together (seconds).
    pub point_seconds: Vec<f64>,
    /// Relative ODE residual per solved point and column.
    pub ode_residuals: Vec<Vec<f64>>,
    /// Collocation size per solved point and column.
    pub ode_points: Vec<Vec<usize>>,
    pub n_solves: usize,
}

impl MomentDiagnostics {
    pub fn max_ode_residual(&self) -> f64 {
        self.ode_residuals.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn total_seconds(&self) -> f64 {
        self.point_seconds.iter().sum()
    }
}

/// Moment quasi-matrices `Ŝ_0, ..., Ŝ_{K−1}`.
#[derive(Debug, Clone)]
pub struct MomentSet {
    pub s: Vec<QuasiMatrix>,
    pub scaling: MomentScaling,
    pub diagnostics: MomentDiagnostics,
}

impl MomentSet {
    pub fn orders(&self) -> usize {
        self.s.len()
    }

    pub fn ncols(&self) -> usize {
        self.s.first().map_or(0, QuasiMatrix::ncols)
    }

    /// `[Ŝ_0, ..., Ŝ_{m−1}]`.
    pub fn stacked(&self, m: usize) -> QuasiMatrix {
        let parts: Vec<&QuasiMatrix> = self.s[..m].iter().collect();
        QuasiMatrix::hcat(&parts).expect("moments share a domain")
    }
}

/// Moments `Ŝ_0..Ŝ_{orders−1}` of `V`, building a fresh solver.
pub fn compute_moments(
    prob: &DiffEigProblem,
    v: &QuasiMatrix,
    contour: &Contour,
    orders: usize,
    opts: &MomentOptions,
) -> Result<MomentSet> {
    let solver = PencilSolver::new(prob, opts.bvp);
    compute_moments_with(&solver, v, contour, orders, opts)
}

fn solve_point(solver: &PencilSolver<'_>, z: Complex64, v: &QuasiMatrix, j: usize) -> Result<Vec<BvpSolution>> {
    solver.solve_many(z, v.columns()).map_err(|e| {
        let column = match e {
            Error::NonConvergent { .. } => {
                v.columns().iter().position(|c| solver.solve(z, c).is_err()).unwrap_or(0)
            }
            _ => 0,
        };
        Error::PointSolve { column, point: j, source: Box::new(e) }
    })
}

/// Moments with a caller-owned solver, so collocation matrices are reused.
/// Points are solved in parallel; the reduction runs in point order so the
/// result does not depend on the number of workers.
pub fn compute_moments_with(
    solver: &PencilSolver<'_>,
    v: &QuasiMatrix,
    contour: &Contour,
    orders: usize,
    opts: &MomentOptions,
) -> Result<MomentSet> {
    if orders == 0 || v.ncols() == 0 {
        return Err(Error::InvalidArgument("need at least one moment order and one source column".into()));
    }
    let prob = solver.problem();
    prob.domain().check_same(&v.domain())?;
    let symmetric = opts.use_symmetry && contour.exploit_symmetry() && prob.is_real() && v.is_real();
    let idx: Vec<usize> = if symmetric { contour.upper_half() } else { (0..contour.n()).collect() };

    let solved: Vec<(Vec<BvpSolution>, f64)> = idx
        .par_iter()
        .map(|&j| {
            let t = Instant::now();
            let sols = solve_point(solver, contour.points()[j], v, j)?;
            Ok((sols, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;

    let factor = if symmetric { 2.0 } else { 1.0 };
    let weights: Vec<Vec<Complex64>> = idx
        .iter()
        .map(|&j| {
            let zeta = opts.scaling.node(contour, contour.points()[j]);
            let w = contour.weights()[j] * factor;
            (0..orders).map(|k| w * zeta.powi(k as i32)).collect()
        })
        .collect();

    let domain = v.domain();
    let l = v.ncols();
    let mut s: Vec<Vec<Fun>> = vec![Vec::with_capacity(l); orders];
    for i in 0..l {
        let len = solved.iter().map(|(sols, _)| sols[i].y.len()).max().unwrap_or(1);
        for (k, sk) in s.iter_mut().enumerate() {
            let mut acc = vec![ZERO; len];
            for ((sols, _), w) in solved.iter().zip(&weights) {
                let wk = w[k];
                for (a, c) in acc.iter_mut().zip(sols[i].y.coeffs()) {
                    *a += wk * c;
                }
            }
            if symmetric {
                acc.iter_mut().for_each(|a| a.im = 0.0);
            }
            sk.push(Fun::from_coeffs(domain, acc));
        }
    }
    let diagnostics = MomentDiagnostics {
        points_solved: idx.clone(),
        point_seconds: solved.iter().map(|(_, t)| *t).collect(),
        ode_residuals: solved.iter().map(|(sols, _)| sols.iter().map(|s| s.residual).collect()).collect(),
        ode_points: solved.iter().map(|(sols, _)| sols.iter().map(|s| s.n_pts).collect()).collect(),
        n_solves: idx.len() * l,
    };
    let s = s.into_iter().map(|cols| QuasiMatrix::new(domain, cols)).collect::<Result<Vec<_>>>()?;
    Ok(MomentSet { s, scaling: opts.scaling, diagnostics })
}
