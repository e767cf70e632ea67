//! Recursive least squares in square-root form.
//!
//! The state keeps an upper-triangular `R` and vector `z` with
//! `RᵀR = XᵀX + diag(penalty)` and `Rᵀz = Xᵀy`. Each new row is folded in
//! with Givens rotations in `O(d²)`, and the ridge weights solve `R w = z`.
//! Working with the square root instead of the inverse Gram matrix keeps
//! the update stable for the ill-conditioned polynomial bases used here.

use crate::error::{DdlError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    dim: usize,
    penalty: Vec<f64>,
    /// Row-major upper triangle, `dim * dim`.
    r: Vec<f64>,
    z: Vec<f64>,
    weights: Option<Vec<f64>>,
    count: usize,
    /// Minimum of `|y - Xw|² + Σ penalty_j w_j²`.
    objective: f64,
}

impl RlsState {
    /// Ridge state with penalty `lambda |w|²`.
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        Self::with_penalty(vec![lambda; dim])
    }

    /// Generalized ridge with penalty `Σ penalty_j w_j²`.
    pub fn with_penalty(penalty: Vec<f64>) -> Result<Self> {
        if penalty.is_empty() {
            return Err(DdlError::config("regression needs at least one feature"));
        }
        if penalty.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DdlError::config("ridge penalty must be finite and nonnegative"));
        }
        let dim = penalty.len();
        let mut r = vec![0.0; dim * dim];
        for (j, p) in penalty.iter().enumerate() {
            r[j * dim + j] = p.sqrt();
        }
        let mut state = Self { dim, penalty, r, z: vec![0.0; dim], weights: None, count: 0, objective: 0.0 };
        state.refresh_weights();
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of samples consumed.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Ridge weights, or `None` while the regularized Gram matrix is singular.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn predict(&self, phi: &[f64]) -> Option<f64> {
        self.weights.as_ref().map(|w| dot(w, phi))
    }

    /// In-sample residual sum of squares of the current weights.
    pub fn rss(&self) -> f64 {
        let penalty = match &self.weights {
            Some(w) => w.iter().zip(&self.penalty).map(|(w, p)| p * w * w).sum(),
            None => 0.0,
        };
        (self.objective - penalty).max(0.0)
    }

    /// Penalized objective at the optimum.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Square-root factor `R` (row-major, upper triangular).
    pub fn factor(&self) -> &[f64] {
        &self.r
    }

    /// `(XᵀX + diag(penalty))⁻¹`, computed from the factor.
    pub fn precision_inverse(&self) -> Option<Vec<f64>> {
        let d = self.dim;
        self.weights.as_ref()?;
        // R⁻¹ column by column, then R⁻¹ R⁻ᵀ.
        let mut rinv = vec![0.0; d * d];
        for col in 0..d {
            for row in (0..=col).rev() {
                let mut acc = if row == col { 1.0 } else { 0.0 };
                for k in row + 1..=col {
                    acc -= self.r[row * d + k] * rinv[k * d + col];
                }
                rinv[row * d + col] = acc / self.r[row * d + row];
            }
        }
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v: f64 = (j..d).map(|k| rinv[i * d + k] * rinv[j * d + k]).sum();
                out[i * d + j] = v;
                out[j * d + i] = v;
            }
        }
        Some(out)
    }

    /// Folds in one sample.
    pub fn update(&mut self, phi: &[f64], y: f64) -> Result<()> {
        if phi.len() != self.dim {
            return Err(DdlError::config(format!("feature vector of length {} for dimension {}", phi.len(), self.dim)));
        }
        if !y.is_finite() || phi.iter().any(|v| !v.is_finite()) {
            return Err(DdlError::computation(format!("non-finite sample at index {}", self.count)));
        }
        let d = self.dim;
        let mut a = phi.to_vec();
        let mut b = y;
        for j in 0..d {
            let rjj = self.r[j * d + j];
            let aj = a[j];
            if aj == 0.0 {
                continue;
            }
            let h = rjj.hypot(aj);
            let (c, s) = (rjj / h, aj / h);
            self.r[j * d + j] = h;
            a[j] = 0.0;
            for k in j + 1..d {
                let rk = self.r[j * d + k];
                self.r[j * d + k] = c * rk + s * a[k];
                a[k] = c * a[k] - s * rk;
            }
            let zj = self.z[j];
            self.z[j] = c * zj + s * b;
            b = c * b - s * zj;
        }
        self.objective += b * b;
        self.count += 1;
        self.refresh_weights();
        Ok(())
    }

    fn refresh_weights(&mut self) {
        let d = self.dim;
        let max_diag = (0..d).map(|j| self.r[j * d + j].abs()).fold(0.0, f64::max);
        if max_diag == 0.0 || (0..d).any(|j| self.r[j * d + j].abs() <= 1e-14 * max_diag) {
            self.weights = None;
            return;
        }
        let mut w = vec![0.0; d];
        for i in (0..d).rev() {
            let mut acc = self.z[i];
            for k in i + 1..d {
                acc -= self.r[i * d + k] * w[k];
            }
            w[i] = acc / self.r[i * d + i];
        }
        self.weights = Some(w);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
