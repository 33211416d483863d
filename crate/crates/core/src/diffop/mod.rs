//! Linear ordinary differential operators, boundary conditions, and the
//! shifted boundary-value solve behind every resolvent application.

mod bvp;
pub mod expr;
mod problem;

pub use bvp::{bvp_solve, BvpOptions, BvpSolution, PencilSolver};
pub use problem::{BcSpec, ContourShape, ContourSpec, ProblemFile};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funspace::{cheb, Fun, Interval};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(L u)(x) = Σ_d c_d(x) u^(d)(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    domain: Interval,
    coeffs: Vec<Fun>,
}

impl DiffOp {
    /// Coefficients `c_0, c_1, ..., c_order`. Trailing zero coefficients are
    /// dropped.
    pub fn new(domain: Interval, mut coeffs: Vec<Fun>) -> Result<Self> {
        for c in &coeffs {
            domain.check_same(&c.domain())?;
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(Fun::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Fun::zero(domain));
        }
        Ok(DiffOp { domain, coeffs })
    }

    /// Operator with constant coefficients.
    pub fn constant(domain: Interval, coeffs: &[Complex64]) -> Self {
        let funs = coeffs.iter().map(|&c| Fun::constant(domain, c)).collect();
        Self::new(domain, funs).expect("shared domain")
    }

    pub fn identity(domain: Interval) -> Self {
        Self::constant(domain, &[Complex64::new(1.0, 0.0)])
    }

    /// Multiplication by `f`.
    pub fn multiplication(f: Fun) -> Self {
        let domain = f.domain();
        Self::new(domain, vec![f]).expect("shared domain")
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Fun] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(Fun::is_real)
    }

    fn has_constant_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.len() == 1)
    }

    pub fn apply(&self, u: &Fun) -> Result<Fun> {
        self.domain.check_same(&u.domain())?;
        let mut derivs = Vec::with_capacity(self.coeffs.len());
        let mut current = u.clone();
        for d in 0..self.coeffs.len() {
            if d > 0 {
                current = current.diff();
            }
            derivs.push(current.clone());
        }
        let real = self.is_real() && u.is_real();
        let out = if self.has_constant_coeffs() {
            let weights: Vec<Complex64> = self.coeffs.iter().map(|c| c.coeffs()[0]).collect();
            let refs: Vec<&Fun> = derivs.iter().collect();
            Fun::linear_combination(&refs, &weights)?
        } else {
            let cmax = self.coeffs.iter().map(Fun::len).max().unwrap_or(1);
            let n_pts = u.len() + cmax - 1;
            let mut vals = vec![ZERO; n_pts];
            for (c, du) in self.coeffs.iter().zip(&derivs) {
                if c.is_zero() {
                    continue;
                }
                for ((v, cv), dv) in vals.iter_mut().zip(c.values(n_pts)).zip(du.values(n_pts)) {
                    *v += cv * dv;
                }
            }
            let mut coeffs = cheb::vals2coeffs(&vals);
            if real {
                coeffs.iter_mut().for_each(|z| z.im = 0.0);
            }
            Fun::from_coeffs(self.domain, coeffs)
        };
        Ok(if real { out.real_part() } else { out })
    }
}

/// One boundary functional `Σ_d left[d] u^(d)(a) + Σ_d right[d] u^(d)(b) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    #[serde(default)]
    pub left: Vec<f64>,
    #[serde(default)]
    pub right: Vec<f64>,
}

impl BoundaryCondition {
    pub fn left(coeffs: &[f64]) -> Self {
        BoundaryCondition { left: coeffs.to_vec(), right: Vec::new() }
    }

    pub fn right(coeffs: &[f64]) -> Self {
        BoundaryCondition { left: Vec::new(), right: coeffs.to_vec() }
    }

    fn touches(side: &[f64]) -> bool {
        side.iter().any(|&c| c != 0.0)
    }

    pub fn is_left_only(&self) -> bool {
        !Self::touches(&self.right)
    }

    pub fn is_right_only(&self) -> bool {
        !Self::touches(&self.left) && Self::touches(&self.right)
    }

    pub fn max_derivative(&self) -> usize {
        self.left.len().max(self.right.len()).saturating_sub(1)
    }

    pub fn eval(&self, u: &Fun) -> Complex64 {
        let d = u.domain();
        let mut total = ZERO;
        let mut du = u.clone();
        for k in 0..=self.max_derivative() {
            if k > 0 {
                du = du.diff();
            }
            if let Some(&c) = self.left.get(k) {
                if c != 0.0 {
                    total += du.eval(d.a) * c;
                }
            }
            if let Some(&c) = self.right.get(k) {
                if c != 0.0 {
                    total += du.eval(d.b) * c;
                }
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryConditions(pub Vec<BoundaryCondition>);

impl BoundaryConditions {
    /// `u(a) = u(b) = 0`.
    pub fn dirichlet() -> Self {
        BoundaryConditions(vec![BoundaryCondition::left(&[1.0]), BoundaryCondition::right(&[1.0])])
    }

    /// `u(a) = u'(a) = u(b) = u'(b) = 0`.
    pub fn clamped() -> Self {
        BoundaryConditions(vec![
            BoundaryCondition::left(&[1.0]),
            BoundaryCondition::left(&[0.0, 1.0]),
            BoundaryCondition::right(&[1.0]),
            BoundaryCondition::right(&[0.0, 1.0]),
        ])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BoundaryCondition> {
        self.0.iter()
    }

    pub fn residuals(&self, u: &Fun) -> Vec<Complex64> {
        self.0.iter().map(|bc| bc.eval(u)).collect()
    }
}

/// The pencil `A u = λ B u` with boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffEigProblem {
    pub a: DiffOp,
    pub b: DiffOp,
    pub bc: BoundaryConditions,
}

impl DiffEigProblem {
    pub fn new(a: DiffOp, b: DiffOp, bc: BoundaryConditions) -> Result<Self> {
        a.domain.check_same(&b.domain)?;
        let order = a.order().max(b.order());
        if bc.len() != order {
            return Err(Error::InvalidProblem(format!(
                "{} boundary conditions given for an operator of order {order}",
                bc.len()
            )));
        }
        for c in bc.iter() {
            if c.max_derivative() >= order.max(1) {
                return Err(Error::InvalidProblem(
                    "boundary condition uses a derivative of order at least the operator order".into(),
                ));
            }
            if !BoundaryCondition::touches(&c.left) && !BoundaryCondition::touches(&c.right) {
                return Err(Error::InvalidProblem("empty boundary condition".into()));
            }
        }
        Ok(DiffEigProblem { a, b, bc })
    }

    pub fn domain(&self) -> Interval {
        self.a.domain
    }

    pub fn order(&self) -> usize {
        self.a.order().max(self.b.order())
    }

    /// Real coefficients and boundary functionals.
    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real()
    }

    /// `‖A u − λ B u‖` after normalizing `u` to unit norm.
    pub fn residual_norm(&self, lambda: Complex64, u: &Fun) -> Result<f64> {
        let nrm = u.norm();
        if !(nrm > 0.0) {
            return Err(Error::ZeroFunction);
        }
        let u = u.scale(Complex64::new(1.0 / nrm, 0.0));
        let au = self.a.apply(&u)?;
        let bu = self.b.apply(&u)?;
        Ok(au.axpy(-lambda, &bu)?.norm())
    }
}
