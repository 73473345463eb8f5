//! Random Gaussian measurement operators on matrix space, GUE samples,
//! and null-space direction sampling.
//!
//! A `General` operator acts on all of R^{n x n} through column-major
//! vectorization; a `Symmetric` operator acts on the symmetric matrices
//! through svec coordinates, where the GUE row scaling is absorbed so
//! rows are iid standard normal. Operators are immutable after
//! construction and safe to share across workers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix_ops::{ivec, svec, svec_len};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Matrix space the operator measures, carrying the side length n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    /// All of R^{n x n}; ambient dimension n^2.
    General(usize),
    /// Symmetric matrices in svec coordinates; ambient n(n+1)/2.
    Symmetric(usize),
}

impl OperatorMode {
    pub fn n(self) -> usize {
        match self {
            OperatorMode::General(n) | OperatorMode::Symmetric(n) => n,
        }
    }

    /// Ambient coordinate dimension D.
    pub fn dim(self) -> usize {
        match self {
            OperatorMode::General(n) => n * n,
            OperatorMode::Symmetric(n) => svec_len(n),
        }
    }
}

/// Fill an r x c matrix with iid standard normals in column-major order.
pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

/// Symmetrized Gaussian (GUE) sample: (A + A^T) / sqrt(2) with A from
/// G(n, n). Diagonal entries have variance 2, off-diagonal variance 1.
pub fn gue_sample(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    let a = gaussian_matrix(n, n, &mut rng);
    (&a + a.transpose()) / std::f64::consts::SQRT_2
}

/// A dense Gaussian measurement operator together with the Cholesky factor
/// of its Gram matrix A A^T, reused by kernel/affine projections.
pub struct MeasurementOperator {
    mode: OperatorMode,
    m: usize,
    seed: u64,
    matrix: DMatrix<f64>,
    gram_chol: Cholesky<f64, Dyn>,
}

impl MeasurementOperator {
    /// Draw an operator with `m` rows; rows are iid standard normal in the
    /// mode's coordinates, filled row by row, deterministic per seed.
    pub fn build(mode: OperatorMode, m: usize, seed: u64) -> Result<Self> {
        let dim = mode.dim();
        if m == 0 {
            return Err(Error::Domain("measurement count m must be positive".into()));
        }
        if m > dim {
            return Err(Error::TooManyMeasurements { m, dim });
        }
        let mut rng = rng_from_seed(seed);
        let mut matrix = DMatrix::zeros(m, dim);
        for i in 0..m {
            for j in 0..dim {
                matrix[(i, j)] = rng.sample(StandardNormal);
            }
        }
        let gram: DMatrix<f64> = &matrix * matrix.transpose();
        let gram_chol = gram
            .cholesky()
            .ok_or_else(|| Error::Precondition("operator Gram matrix not positive definite".into()))?;
        Ok(MeasurementOperator {
            mode,
            m,
            seed,
            matrix,
            gram_chol,
        })
    }

    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.mode.n()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.mode.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Coordinates of a matrix in the operator's domain: column-major vec
    /// for `General`, svec for `Symmetric`.
    pub fn coords(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        let n = self.n();
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n}x{n} input, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        match self.mode {
            OperatorMode::General(_) => Ok(DVector::from_column_slice(x.as_slice())),
            OperatorMode::Symmetric(_) => svec(x),
        }
    }

    /// Matrix with the given coordinates.
    pub fn from_coords(&self, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "coordinate length {} does not match ambient dimension {}",
                v.len(),
                self.dim()
            )));
        }
        match self.mode {
            OperatorMode::General(n) => Ok(DMatrix::from_column_slice(n, n, v.as_slice())),
            OperatorMode::Symmetric(_) => ivec(v),
        }
    }

    /// Apply the operator: y_i = <row_i, coords(X)>.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        Ok(&self.matrix * self.coords(x)?)
    }

    /// Adjoint map back into matrix space.
    pub fn adjoint(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        if y.len() != self.m {
            return Err(Error::ShapeMismatch(format!(
                "adjoint input length {} does not match m = {}",
                y.len(),
                self.m
            )));
        }
        self.from_coords(&(self.matrix.transpose() * y))
    }

    /// Solve (A A^T) w = v with the cached factorization.
    pub fn solve_gram(&self, v: &DVector<f64>) -> DVector<f64> {
        self.gram_chol.solve(v)
    }

    /// Orthogonal projection of coordinates onto the kernel of A.
    pub fn project_kernel(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.matrix.transpose() * self.solve_gram(&(&self.matrix * v))
    }

    /// Projection of coordinates onto the affine slice {w : A w = y}.
    pub fn project_affine(&self, v: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        v - self.matrix.transpose() * self.solve_gram(&(&self.matrix * v - y))
    }

    /// Draw a random kernel direction: project a fresh Gaussian onto the
    /// null space. Fails when the operator is fully sampled.
    pub fn sample_null_space(&self, seed: u64) -> Result<NullSpaceSample> {
        if self.m == self.dim() {
            return Err(Error::TrivialKernel);
        }
        let mut rng = rng_from_seed(derive_seed(seed, &[self.seed]));
        let g = DVector::from_fn(self.dim(), |_, _| rng.sample(StandardNormal));
        let mut w = self.project_kernel(&g);
        let norm = w.norm();
        // one refinement pass keeps the residual at factorization noise
        if (&self.matrix * &w).norm() > 1e-12 * norm {
            w = self.project_kernel(&w);
        }
        let residual = (&self.matrix * &w).norm();
        Ok(NullSpaceSample {
            w: self.from_coords(&w)?,
            seed,
            residual,
        })
    }
}

/// A sampled kernel direction with its measurement residual.
#[derive(Debug, Clone)]
pub struct NullSpaceSample {
    pub w: DMatrix<f64>,
    pub seed: u64,
    pub residual: f64,
}
