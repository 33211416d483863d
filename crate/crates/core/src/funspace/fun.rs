use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cheb;
use crate::error::{Error, Result};

/// Default relative accuracy for adaptive construction.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Largest grid tried by adaptive construction.
pub const MAX_POINTS: usize = 65537;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A closed real interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Half length, the Jacobian of the map from [-1, 1].
    pub fn scale(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn to_ref(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn from_ref(&self, t: f64) -> f64 {
        // endpoint-exact form
        0.5 * (self.a * (1.0 - t) + self.b * (1.0 + t))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    /// Chebyshev points of the second kind mapped to this interval, ascending.
    pub fn points(&self, n_pts: usize) -> Vec<f64> {
        let mut xs: Vec<f64> = cheb::points(n_pts).into_iter().map(|t| self.from_ref(t)).collect();
        if n_pts >= 2 {
            xs[0] = self.a;
            xs[n_pts - 1] = self.b;
        }
        xs
    }

    pub(crate) fn check_same(&self, other: &Interval) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch { a1: self.a, b1: self.b, a2: other.a, b2: other.b })
        }
    }
}

/// A function on an interval stored as a Chebyshev series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "FunRecord", try_from = "FunRecord")]
pub struct Fun {
    domain: Interval,
    coeffs: Vec<Complex64>,
    is_real: bool,
}

#[derive(Serialize, Deserialize)]
struct FunRecord {
    domain: [f64; 2],
    coeffs_re: Vec<f64>,
    coeffs_im: Vec<f64>,
}

impl From<Fun> for FunRecord {
    fn from(f: Fun) -> Self {
        FunRecord {
            domain: [f.domain.a, f.domain.b],
            coeffs_re: f.coeffs.iter().map(|c| c.re).collect(),
            coeffs_im: f.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

impl TryFrom<FunRecord> for Fun {
    type Error = Error;

    fn try_from(r: FunRecord) -> Result<Self> {
        if r.coeffs_re.len() != r.coeffs_im.len() {
            return Err(Error::InvalidArgument("coeffs_re and coeffs_im differ in length".into()));
        }
        let domain = Interval::new(r.domain[0], r.domain[1])?;
        let coeffs = r.coeffs_re.iter().zip(&r.coeffs_im).map(|(&re, &im)| Complex64::new(re, im)).collect();
        Ok(Fun::from_coeffs(domain, coeffs))
    }
}

fn strip_imag(v: &mut [Complex64]) {
    for c in v.iter_mut() {
        c.im = 0.0;
    }
}

impl Fun {
    /// Adaptive Chebyshev interpolant of `f`. Grids of 17, 33, 65, ... points
    /// are tried until the coefficients show a plateau below `tol`.
    pub fn from_fn(domain: Interval, tol: f64, f: impl Fn(f64) -> Complex64) -> Result<Fun> {
        Self::adaptive(domain, tol, f, false)
    }

    pub fn from_real_fn(domain: Interval, tol: f64, f: impl Fn(f64) -> f64) -> Result<Fun> {
        Self::adaptive(domain, tol, |x| Complex64::new(f(x), 0.0), true)
    }

    fn adaptive(domain: Interval, tol: f64, f: impl Fn(f64) -> Complex64, real: bool) -> Result<Fun> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let mut n_pts = 17;
        while n_pts <= MAX_POINTS {
            let vals: Vec<Complex64> = domain.points(n_pts).into_iter().map(&f).collect();
            if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::InvalidArgument("function is not finite on the interval".into()));
            }
            let is_real = real || vals.iter().all(|v| v.im == 0.0);
            let mut coeffs = cheb::vals2coeffs(&vals);
            if is_real {
                strip_imag(&mut coeffs);
            }
            let keep = cheb::standard_chop(&coeffs, tol);
            if keep < coeffs.len() {
                coeffs.truncate(keep);
                return Ok(Fun { domain, coeffs, is_real }.normalized());
            }
            n_pts = 2 * n_pts - 1;
        }
        Err(Error::NonConvergent { max_points: MAX_POINTS })
    }

    pub fn from_coeffs(domain: Interval, coeffs: Vec<Complex64>) -> Fun {
        let is_real = coeffs.iter().all(|c| c.im == 0.0);
        Fun { domain, coeffs, is_real }.normalized()
    }

    /// Interpolant of `values` given at `domain.points(values.len())`.
    pub fn from_values(domain: Interval, values: &[Complex64]) -> Fun {
        let is_real = values.iter().all(|c| c.im == 0.0);
        let mut coeffs = cheb::vals2coeffs(values);
        if is_real {
            strip_imag(&mut coeffs);
        }
        Fun { domain, coeffs, is_real }.normalized()
    }

    pub fn constant(domain: Interval, c: Complex64) -> Fun {
        Fun { domain, coeffs: vec![c], is_real: c.im == 0.0 }
    }

    pub fn zero(domain: Interval) -> Fun {
        Self::constant(domain, ZERO)
    }

    /// The identity function `x` on `domain`.
    pub fn identity(domain: Interval) -> Fun {
        let mid = 0.5 * (domain.a + domain.b);
        Fun::from_coeffs(domain, vec![Complex64::new(mid, 0.0), Complex64::new(domain.scale(), 0.0)])
    }

    fn normalized(mut self) -> Fun {
        if self.coeffs.is_empty() {
            self.coeffs.push(ZERO);
        }
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        cheb::clenshaw(&self.coeffs, self.domain.to_ref(x))
    }

    /// Values on `domain.points(n_pts)`.
    pub fn values(&self, n_pts: usize) -> Vec<Complex64> {
        cheb::values_on_grid(&self.coeffs, n_pts)
    }

    /// Coefficients padded with zeros or truncated to exactly `n`.
    pub fn coeffs_padded(&self, n: usize) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        c.resize(n, ZERO);
        c
    }

    /// Drops trailing coefficients below `tol` relative to the largest one.
    pub fn simplify(&self, tol: f64) -> Fun {
        let keep = cheb::standard_chop(&self.coeffs, tol);
        if keep < self.coeffs.len() {
            Fun { coeffs: self.coeffs[..keep].to_vec(), ..self.clone() }
        } else {
            let top = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let last = self.coeffs.iter().rposition(|c| c.norm() > tol * top).map_or(1, |k| k + 1);
            Fun { coeffs: self.coeffs[..last].to_vec(), ..self.clone() }
        }
    }

    pub fn diff(&self) -> Fun {
        let s = 1.0 / self.domain.scale();
        let coeffs = cheb::derivative(&self.coeffs).into_iter().map(|c| c * s).collect();
        Fun { domain: self.domain, coeffs, is_real: self.is_real }
    }

    pub fn diff_n(&self, k: usize) -> Fun {
        (0..k).fold(self.clone(), |f, _| f.diff())
    }

    /// Definite integral over the domain.
    pub fn integral(&self) -> Complex64 {
        cheb::integral(&self.coeffs) * self.domain.scale()
    }

    /// L2 norm.
    pub fn norm(&self) -> f64 {
        let n_pts = 2 * self.coeffs.len() - 1;
        let w = cheb::cc_weights(n_pts);
        let s: f64 = self.values(n_pts).iter().zip(w.iter()).map(|(v, w)| v.norm_sqr() * w).sum();
        (s * self.domain.scale()).max(0.0).sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Fun {
        Fun { coeffs: self.coeffs.iter().map(|c| c.conj()).collect(), ..self.clone() }
    }

    pub fn real_part(&self) -> Fun {
        Fun { domain: self.domain, coeffs: self.coeffs.iter().map(|c| Complex64::new(c.re, 0.0)).collect(), is_real: true }
    }

    pub fn imag_part(&self) -> Fun {
        Fun { domain: self.domain, coeffs: self.coeffs.iter().map(|c| Complex64::new(c.im, 0.0)).collect(), is_real: true }
    }

    pub fn scale(&self, s: Complex64) -> Fun {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Fun { domain: self.domain, coeffs, is_real: self.is_real && s.im == 0.0 }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &Fun) -> Result<Fun> {
        self.domain.check_same(&other.domain)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = self.coeffs_padded(n);
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c += s * o;
        }
        Ok(Fun { domain: self.domain, coeffs, is_real: self.is_real && other.is_real && s.im == 0.0 })
    }

    pub fn try_add(&self, other: &Fun) -> Result<Fun> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn try_sub(&self, other: &Fun) -> Result<Fun> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Pointwise product, exact up to rounding (no truncation).
    pub fn try_mul(&self, other: &Fun) -> Result<Fun> {
        self.domain.check_same(&other.domain)?;
        if self.coeffs.len() == 1 {
            return Ok(other.scale(self.coeffs[0]));
        }
        if other.coeffs.len() == 1 {
            return Ok(self.scale(other.coeffs[0]));
        }
        let n_pts = self.coeffs.len() + other.coeffs.len() - 1;
        let vals: Vec<Complex64> = self.values(n_pts).iter().zip(other.values(n_pts)).map(|(a, b)| a * b).collect();
        let is_real = self.is_real && other.is_real;
        let mut coeffs = cheb::vals2coeffs(&vals);
        if is_real {
            strip_imag(&mut coeffs);
        }
        Ok(Fun { domain: self.domain, coeffs, is_real })
    }

    /// `Σ_k w_k f_k` over functions sharing one domain.
    pub fn linear_combination(funs: &[&Fun], weights: &[Complex64]) -> Result<Fun> {
        let first = funs.first().ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        if funs.len() != weights.len() {
            return Err(Error::InvalidArgument("weights and functions differ in length".into()));
        }
        let n = funs.iter().map(|f| f.len()).max().unwrap_or(1);
        let mut coeffs = vec![ZERO; n];
        let mut is_real = true;
        for (f, w) in funs.iter().zip(weights) {
            first.domain.check_same(&f.domain)?;
            is_real &= f.is_real && w.im == 0.0;
            for (c, fc) in coeffs.iter_mut().zip(&f.coeffs) {
                *c += w * fc;
            }
        }
        Ok(Fun { domain: first.domain, coeffs, is_real })
    }
}

/// `∫ conj(u) v dx` by Clenshaw–Curtis on a grid exact for the product.
pub fn inner_product(u: &Fun, v: &Fun) -> Result<Complex64> {
    u.domain.check_same(&v.domain)?;
    let n_pts = u.len() + v.len() - 1;
    let w = cheb::cc_weights(n_pts);
    let s: Complex64 =
        u.values(n_pts).iter().zip(v.values(n_pts)).zip(w.iter()).map(|((a, b), w)| a.conj() * b * w).sum();
    Ok(s * u.domain.scale())
}

impl Add for &Fun {
    type Output = Fun;
    /// Panics if the domains differ.
    fn add(self, rhs: &Fun) -> Fun {
        self.try_add(rhs).expect("domain mismatch in Fun addition")
    }
}

impl Sub for &Fun {
    type Output = Fun;
    /// Panics if the domains differ.
    fn sub(self, rhs: &Fun) -> Fun {
        self.try_sub(rhs).expect("domain mismatch in Fun subtraction")
    }
}

impl Mul for &Fun {
    type Output = Fun;
    /// Panics if the domains differ.
    fn mul(self, rhs: &Fun) -> Fun {
        self.try_mul(rhs).expect("domain mismatch in Fun product")
    }
}

impl Mul<Complex64> for &Fun {
    type Output = Fun;
    fn mul(self, rhs: Complex64) -> Fun {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Fun {
    type Output = Fun;
    fn mul(self, rhs: f64) -> Fun {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Neg for &Fun {
    type Output = Fun;
    fn neg(self) -> Fun {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
