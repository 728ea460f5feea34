//! Dense solves for normal equations, regularized or minimum-norm.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Relative eigenvalue cutoff below which directions are treated as null.
pub const PINV_RCOND: f64 = 1e-12;

/// Accumulated `X^T X` and `X^T y` for a set of rows.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    pub gram: DMatrix<f64>,
    pub moment: DVector<f64>,
}

impl NormalEquations {
    pub fn new(dim: usize) -> Self {
        Self {
            gram: DMatrix::zeros(dim, dim),
            moment: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn add(&mut self, x: &[f64], y: f64, weight: f64) -> Result<()> {
        check_dim("row", self.dim(), x.len())?;
        let v = DVector::from_column_slice(x);
        self.gram.ger(weight, &v, &v, 1.0);
        self.moment.axpy(weight * y, &v, 1.0);
        Ok(())
    }

    /// `(G + lambda I)^{-1} m`, or the minimum-norm solution `G^+ m` when
    /// `lambda == 0`.
    pub fn solve(&self, lambda: f64) -> Result<DVector<f64>> {
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
        }
        if self.dim() == 0 {
            return Ok(DVector::zeros(0));
        }
        if lambda > 0.0 {
            let mut a = self.gram.clone();
            for i in 0..self.dim() {
                a[(i, i)] += lambda;
            }
            return a
                .cholesky()
                .map(|c| c.solve(&self.moment))
                .ok_or_else(|| Error::Invariant("regularized gram matrix is not SPD".into()));
        }
        Ok(pinv_solve_symmetric(&self.gram, &self.moment))
    }
}

/// Minimum-norm solution of `A z = b` for symmetric positive semidefinite `A`.
pub fn pinv_solve_symmetric(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let eig = a.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = max * PINV_RCOND;
    let proj = eig.eigenvectors.transpose() * b;
    let scaled = DVector::from_iterator(
        proj.len(),
        proj.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(p, &l)| if l > cutoff && l > 0.0 { p / l } else { 0.0 }),
    );
    &eig.eigenvectors * scaled
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
