//! Haar-distributed orthogonal matrices and subspace frames.
//!
//! A Ginibre matrix `X` (i.i.d. standard normal entries) is factored as
//! `X = QR` by Householder reflections. With `D = diag(sign(R_ii))`,
//! `U = QD` is the unique factor with a positive-diagonal `R` and is
//! Haar-distributed on O(n). The first `p` columns of `Q` only depend on
//! the first `p` columns of `X`, so a frame can be sampled without forming
//! the full matrix.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

/// Square matrix of i.i.d. standard normal entries, drawn column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct GinibreMatrix(Matrix);

impl GinibreMatrix {
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("matrix size must be at least 1".into()));
        }
        Ok(Self(gaussian_columns(n, n, rng)))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

/// An orthogonal matrix drawn from Haar measure.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarOrthogonal(Matrix);

impl HaarOrthogonal {
    pub fn from_ginibre(x: &GinibreMatrix) -> Self {
        Self(sign_corrected_q(x.0.clone()))
    }

    /// Wraps a matrix the caller knows to be orthogonal (test injection,
    /// identity embeddings). Fails if `‖UᵀU − I‖_F ≥ 1e-10`.
    pub fn from_orthogonal(u: Matrix) -> Result<Self> {
        if u.rows() != u.cols() || u.rows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "expected a nonempty square matrix, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let residual = u.orthonormality_residual();
        if residual >= 1e-10 {
            return Err(Error::InvalidDimension(format!(
                "matrix is not orthogonal (residual {residual:e})"
            )));
        }
        Ok(Self(u))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// Samples `U = QD` from the QR factorization of a fresh Ginibre matrix.
pub fn sample_haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HaarOrthogonal> {
    let x = GinibreMatrix::sample(n, rng)?;
    Ok(HaarOrthogonal::from_ginibre(&x))
}

/// `n × p` matrix with orthonormal columns plus its JLT scaling `√(n/p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFrame {
    columns: Matrix,
    origin_index: u64,
}

impl SubspaceFrame {
    pub fn new(columns: Matrix) -> Result<Self> {
        let (n, p) = (columns.rows(), columns.cols());
        if p == 0 || p > n {
            return Err(Error::InvalidDimension(format!(
                "subspace dimension {p} must lie in [1, {n}]"
            )));
        }
        Ok(Self {
            columns,
            origin_index: 0,
        })
    }

    /// The embedding of the first `p` coordinate axes of `R^n`.
    pub fn coordinate(n: usize, p: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("ambient dimension must be at least 1".into()));
        }
        let identity = Matrix::identity(n);
        if p == 0 || p > n {
            return Err(Error::InvalidDimension(format!(
                "subspace dimension {p} must lie in [1, {n}]"
            )));
        }
        Self::new(identity.leading_columns(p))
    }

    pub fn with_origin(mut self, t: u64) -> Self {
        self.origin_index = t;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn subspace_dim(&self) -> usize {
        self.columns.cols()
    }

    /// Matrix-stream index this frame was drawn from.
    pub fn origin_index(&self) -> u64 {
        self.origin_index
    }

    pub fn columns(&self) -> &Matrix {
        &self.columns
    }

    pub fn scale(&self) -> f64 {
        (self.ambient_dim() as f64 / self.subspace_dim() as f64).sqrt()
    }

    /// `Qᵀv` where `Q = √(n/p)·U`.
    pub fn sketch(&self, v: &[f64]) -> Vec<f64> {
        let s = self.scale();
        self.columns.tr_mul_vec(v).into_iter().map(|x| s * x).collect()
    }

    /// `U s` for subspace coordinates `s`.
    pub fn embed(&self, s: &[f64]) -> Vec<f64> {
        self.columns.mul_vec(s)
    }
}

/// The first `p` columns of `u`, scaled by `√(n/p)`.
pub fn take_frame(u: &HaarOrthogonal, p: usize) -> Result<SubspaceFrame> {
    let n = u.dim();
    if p == 0 || p > n {
        return Err(Error::InvalidDimension(format!(
            "subspace dimension {p} must lie in [1, {n}]"
        )));
    }
    SubspaceFrame::new(u.matrix().leading_columns(p))
}

/// Samples the same frame as `take_frame(sample_haar_orthogonal(n, rng), p)`
/// for an identically seeded stream, in `O(n p²)` instead of `O(n³)`.
pub fn sample_haar_frame<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> Result<SubspaceFrame> {
    if n == 0 || p == 0 || p > n {
        return Err(Error::InvalidDimension(format!(
            "subspace dimension {p} must lie in [1, {n}]"
        )));
    }
    let x = gaussian_columns(n, p, rng);
    SubspaceFrame::new(sign_corrected_q(x))
}

fn gaussian_columns<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_col_major(rows, cols, data)
}

/// Householder QR of a tall `n × p` matrix, returning the thin `Q` with
/// column `j` multiplied by `sign(R_jj)` (`sign(0) = +1`).
fn sign_corrected_q(mut a: Matrix) -> Matrix {
    let (n, p) = (a.rows(), a.cols());
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(p);
    let mut r_diag = Vec::with_capacity(p);

    for j in 0..p {
        let x = &a.col(j)[j..];
        let norm_x = norm(x);
        if norm_x == 0.0 {
            reflectors.push((Vec::new(), 0.0));
            r_diag.push(0.0);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm_x } else { norm_x };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let scale = 2.0 / dot(&v, &v);
        for c in j..p {
            let col = &mut a.col_mut(c)[j..];
            let s = scale * dot(&v, col);
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= s * vi;
            }
        }
        r_diag.push(alpha);
        reflectors.push((v, scale));
    }

    // Q = H_0 H_1 ... H_{p-1} [I_p; 0], applied back to front. Columns left
    // of j are still unit vectors supported above row j, so H_j skips them.
    let mut q = Matrix::zeros(n, p);
    for j in 0..p {
        q[(j, j)] = 1.0;
    }
    for (j, (v, scale)) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        for c in j..p {
            let col = &mut q.col_mut(c)[j..];
            let s = scale * dot(v, col);
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci -= s * vi;
            }
        }
    }

    for (j, r) in r_diag.iter().enumerate() {
        if *r < 0.0 {
            for x in q.col_mut(j) {
                *x = -*x;
            }
        }
    }
    q
}
