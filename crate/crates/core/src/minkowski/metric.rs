use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `η = diag(-1, 1, ..., 1)` in dimension `n ≥ 2`. The metric is its own
/// inverse, so raising and lowering are the same sign flip on the time slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metric {
    dim: usize,
}

impl Metric {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        Ok(Metric { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal entry `η_{ii}`.
    pub fn sign(&self, i: usize) -> f64 {
        if i == 0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| if i == j { self.sign(i) } else { 0.0 })
    }

    pub fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }

    pub fn raise(&self, covector: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(covector.len())?;
        Ok(DVector::from_fn(self.dim, |i, _| self.sign(i) * covector[i]))
    }

    pub fn lower(&self, vector: &DVector<f64>) -> Result<DVector<f64>> {
        self.raise(vector)
    }

    /// `η(u, v) = -u_0 v_0 + Σ u_i v_i` (the same formula for vectors and
    /// covectors in this signature).
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        self.check_dim(u.len())?;
        self.check_dim(v.len())?;
        Ok(-u[0] * v[0] + u.rows(1, self.dim - 1).dot(&v.rows(1, self.dim - 1)))
    }

    /// Largest entry of `ΛᵀηΛ - η`.
    pub fn lorentz_residual(&self, lambda: &DMatrix<f64>) -> Result<f64> {
        if lambda.nrows() != self.dim || lambda.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: lambda.nrows() });
        }
        let eta = self.matrix();
        Ok((lambda.transpose() * &eta * lambda - eta).amax())
    }

    pub fn basis(&self, i: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |j, _| if i == j { 1.0 } else { 0.0 })
    }
}
