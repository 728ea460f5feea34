use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Learner;
use crate::error::{check_dim, check_unit, Error, Result};
use crate::linalg::NormalEquations;
use crate::types::Context;

/// Vovk-Azoury-Warmuth online ridge regression.
///
/// Keeps `A^{-1}` for `A = lambda I + sum_s w_s x_s x_s^T` and `b = sum_s w_s y_s x_s`.
/// [`VawState::predict`] folds the current context into `A` before solving;
/// [`VawState::predict_ridge`] is the plain ridge refit on history alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VawState {
    lambda: f64,
    a_inv: DMatrix<f64>,
    b: DVector<f64>,
    updates: usize,
}

impl VawState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("ridge lambda must be > 0, got {lambda}")));
        }
        Ok(Self {
            lambda,
            a_inv: DMatrix::identity(dim, dim) / lambda,
            b: DVector::zeros(dim),
            updates: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a_inv(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    fn project(&self, x: &[f64]) -> Result<DVector<f64>> {
        check_dim("context", self.dim(), x.len())?;
        Ok(&self.a_inv * DVector::from_column_slice(x))
    }

    /// `b^T (A + x x^T)^{-1} x`, via Sherman-Morrison on the stored inverse.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let u = self.project(x)?;
        let q: f64 = x.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        Ok(self.b.dot(&u) / (1.0 + q))
    }

    /// `b^T A^{-1} x`: ridge regression refit on the rounds seen so far.
    pub fn predict_ridge(&self, x: &[f64]) -> Result<f64> {
        Ok(self.b.dot(&self.project(x)?))
    }

    /// Current ridge coefficients `A^{-1} b`.
    pub fn theta(&self) -> DVector<f64> {
        &self.a_inv * &self.b
    }

    pub fn update(&mut self, x: &[f64], y: f64, weight: f64) -> Result<()> {
        check_unit("label", y)?;
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("update weight {weight} must be >= 0")));
        }
        let u = self.project(x)?;
        let v = DVector::from_column_slice(x);
        let denom = 1.0 + weight * v.dot(&u);
        if !(denom > 0.0) {
            return Err(Error::Invariant(format!(
                "Sherman-Morrison denominator {denom} <= 0; A^-1 lost positive definiteness"
            )));
        }
        self.a_inv.ger(-weight / denom, &u, &u, 1.0);
        self.b.axpy(weight * y, &v, 1.0);
        self.updates += 1;
        Ok(())
    }
}

impl Learner for VawState {
    type Action = f64;
    type Outcome = f64;

    fn predict(&mut self, context: &Context) -> Result<f64> {
        VawState::predict(self, context.values())
    }

    fn update(&mut self, context: &Context, outcome: &f64, weight: f64) -> Result<()> {
        VawState::update(self, context.values(), *outcome, weight)
    }
}

/// `argmin_theta sum (<theta, x_i> - y_i)^2 + lambda |theta|^2`; minimum-norm
/// least squares when `lambda == 0`.
pub fn ridge_batch(dim: usize, xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_dim("labels", xs.len(), ys.len())?;
    let mut ne = NormalEquations::new(dim);
    for (x, &y) in xs.iter().zip(ys) {
        ne.add(x, y, 1.0)?;
    }
    Ok(ne.solve(lambda)?.iter().copied().collect())
}
