use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cheb;
use super::fun::{Fun, Interval};
use crate::densela::{self, CMatrix};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of Chebyshev points used for random columns.
pub const RANDOM_POINTS: usize = 32;

/// An ordered list of functions on one interval, used like a tall matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiMatrix {
    domain: Interval,
    columns: Vec<Fun>,
}

/// Truncated SVD `V ≈ U1 Σ1 W1ᴴ` of a quasi-matrix.
#[derive(Debug, Clone)]
pub struct Tsvd {
    pub u1: QuasiMatrix,
    pub sigma1: Vec<f64>,
    pub w1: CMatrix,
    /// Every singular value, descending.
    pub singular_values: Vec<f64>,
}

impl Tsvd {
    pub fn rank(&self) -> usize {
        self.sigma1.len()
    }
}

impl QuasiMatrix {
    pub fn new(domain: Interval, columns: Vec<Fun>) -> Result<Self> {
        for c in &columns {
            domain.check_same(&c.domain())?;
        }
        Ok(QuasiMatrix { domain, columns })
    }

    pub fn from_columns(columns: Vec<Fun>) -> Result<Self> {
        let domain = columns
            .first()
            .ok_or_else(|| Error::InvalidArgument("quasi-matrix needs at least one column".into()))?
            .domain();
        Self::new(domain, columns)
    }

    /// `L` columns, each interpolating standard-normal samples at 32
    /// Chebyshev points. Deterministic in `seed`.
    pub fn random(l: usize, domain: Interval, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns = (0..l)
            .map(|_| {
                let vals: Vec<Complex64> = (0..RANDOM_POINTS)
                    .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
                    .collect();
                Fun::from_values(domain, &vals)
            })
            .collect();
        QuasiMatrix { domain, columns }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Fun] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Fun {
        &self.columns[j]
    }

    pub fn into_columns(self) -> Vec<Fun> {
        self.columns
    }

    pub fn is_real(&self) -> bool {
        self.columns.iter().all(Fun::is_real)
    }

    pub fn max_len(&self) -> usize {
        self.columns.iter().map(Fun::len).max().unwrap_or(1)
    }

    /// Columns of several quasi-matrices side by side.
    pub fn hcat(parts: &[&QuasiMatrix]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("nothing to concatenate".into()))?;
        let mut columns = Vec::new();
        for p in parts {
            first.domain.check_same(&p.domain)?;
            columns.extend(p.columns.iter().cloned());
        }
        Ok(QuasiMatrix { domain: first.domain, columns })
    }

    /// Values of every column on `n_pts` Chebyshev points, one column each.
    pub fn values_matrix(&self, n_pts: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n_pts, self.ncols());
        for (j, f) in self.columns.iter().enumerate() {
            m.column_mut(j).copy_from_slice(&f.values(n_pts));
        }
        m
    }

    /// The matrix `Vᴴ W` of pairwise inner products.
    pub fn adjoint_times(&self, other: &QuasiMatrix) -> Result<CMatrix> {
        self.domain.check_same(&other.domain)?;
        let n_pts = self.max_len() + other.max_len() - 1;
        let w = cheb::cc_weights(n_pts);
        let s = self.domain.scale();
        let v = self.values_matrix(n_pts);
        let mut wv = other.values_matrix(n_pts);
        for mut col in wv.column_iter_mut() {
            for (x, wk) in col.iter_mut().zip(w.iter()) {
                *x *= wk * s;
            }
        }
        Ok(v.ad_mul(&wv))
    }

    pub fn gram(&self) -> CMatrix {
        self.adjoint_times(self).expect("same domain")
    }

    /// `V X` for a coefficient matrix `X` with `ncols(V)` rows.
    pub fn times(&self, x: &CMatrix) -> QuasiMatrix {
        assert_eq!(x.nrows(), self.ncols(), "dimension mismatch in quasi-matrix product");
        let n = self.max_len();
        let mut coeffs = CMatrix::zeros(n, self.ncols());
        for (j, f) in self.columns.iter().enumerate() {
            coeffs.view_mut((0, j), (f.len(), 1)).copy_from_slice(f.coeffs());
        }
        let real = self.is_real() && x.iter().all(|v| v.im == 0.0);
        let prod = coeffs * x;
        let columns = prod
            .column_iter()
            .map(|c| {
                let mut v: Vec<Complex64> = c.iter().copied().collect();
                if real {
                    v.iter_mut().for_each(|z| z.im = 0.0);
                }
                Fun::from_coeffs(self.domain, v)
            })
            .collect();
        QuasiMatrix { domain: self.domain, columns }
    }

    /// `V t` for a coefficient vector.
    pub fn times_vec(&self, t: &[Complex64]) -> Fun {
        let x = CMatrix::from_column_slice(t.len(), 1, t);
        self.times(&x).columns.pop().expect("one column")
    }

    /// Weighted discrete representation on `n_pts` points: rows scaled by
    /// the square roots of the quadrature weights, so that its Euclidean
    /// geometry matches L2.
    fn weighted_values(&self, n_pts: usize) -> (CMatrix, Vec<f64>) {
        let w = cheb::cc_weights(n_pts);
        let s = self.domain.scale();
        let sq: Vec<f64> = w.iter().map(|wk| (wk * s).sqrt()).collect();
        let mut m = self.values_matrix(n_pts);
        for mut col in m.column_iter_mut() {
            for (x, r) in col.iter_mut().zip(&sq) {
                *x *= r;
            }
        }
        (m, sq)
    }

    fn qr_grid(&self) -> usize {
        (2 * self.max_len()).max(self.ncols()).max(2)
    }

    /// `V = Q R` with orthonormal `Q` and a nonnegative real diagonal in `R`.
    pub fn qr(&self) -> (QuasiMatrix, CMatrix) {
        let n_pts = self.qr_grid();
        let (a, sq) = self.weighted_values(n_pts);
        let (qd, r) = densela::qr(&a);
        let keep = self.max_len();
        let real = self.is_real();
        let columns = qd
            .column_iter()
            .map(|c| {
                let vals: Vec<Complex64> = c.iter().zip(&sq).map(|(v, r)| v / r).collect();
                let mut coeffs = cheb::vals2coeffs(&vals);
                coeffs.truncate(keep);
                if real {
                    coeffs.iter_mut().for_each(|z| z.im = 0.0);
                }
                Fun::from_coeffs(self.domain, coeffs)
            })
            .collect();
        (QuasiMatrix { domain: self.domain, columns }, r)
    }

    /// Singular values of `V`, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let (a, _) = self.weighted_values(self.qr_grid());
        let (_, r) = densela::qr(&a);
        densela::singular_values(&r)
    }

    /// Truncated SVD keeping every `σ_d` with `σ_d / σ_1 ≥ delta`.
    /// `U1` is formed as `V W1 Σ1⁻¹`, which keeps it in the span of the
    /// original columns without passing through the quadrature grid.
    pub fn tsvd(&self, delta: f64) -> Result<Tsvd> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
        }
        let (a, _) = self.weighted_values(self.qr_grid());
        let (_, r) = densela::qr(&a);
        let (_, sigma, w) = densela::svd(&r)?;
        let top = sigma.first().copied().unwrap_or(0.0);
        if !(top > 0.0) {
            return Err(Error::ZeroMatrix);
        }
        let d = sigma.iter().take_while(|&&s| s / top >= delta).count();
        let w1 = w.columns(0, d).into_owned();
        let mut scaled = w1.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col /= Complex64::new(sigma[j], 0.0);
        }
        let u1 = self.times(&scaled);
        Ok(Tsvd { u1, sigma1: sigma[..d].to_vec(), w1, singular_values: sigma })
    }

    /// Column-wise conjugate.
    pub fn conj(&self) -> QuasiMatrix {
        QuasiMatrix { domain: self.domain, columns: self.columns.iter().map(Fun::conj).collect() }
    }

    /// Matrix of coefficients, `n` rows, zero padded.
    pub fn coeff_matrix(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::from_element(n, self.ncols(), ZERO);
        for (j, f) in self.columns.iter().enumerate() {
            let len = f.len().min(n);
            m.view_mut((0, j), (len, 1)).copy_from_slice(&f.coeffs()[..len]);
        }
        m
    }
}
