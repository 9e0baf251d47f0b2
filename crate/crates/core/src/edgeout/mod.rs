//! Edge-out hub graph estimation.
//!
//! Fits `X ≈ X B` with a zero diagonal under the row penalty
//!
//! ```text
//! ½‖X − XB‖²_F + θ Σᵢ [ γ‖B_{i,·}‖₁ + (1−γ)√(p−1)‖B_{i,·}‖₂ ]
//! ```
//!
//! by cyclic exact row minimization. Rows with many nonzero entries mark hub
//! features; their absolute row sums become penalty factors for the
//! supervised stage.

mod solver;
mod tuning;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{dot, DenseMatrix};

pub use solver::{fit, fit_warm};
pub use tuning::{
    default_theta_grid, degrees_of_freedom, fit_grid, for_each_grid_fit, gcv_score, select_theta, select_theta_and_fit,
    theta_max, ThetaMethod, ThetaSelection, DEFAULT_GRID_LEN, DEFAULT_GRID_RATIO,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeOutConfig {
    /// Overall penalty level.
    pub theta: f64,
    /// Share of the penalty given to the elementwise ℓ1 term; the rest goes
    /// to the row-wise ℓ2 term.
    pub gamma: f64,
    pub max_sweeps: usize,
    /// Stop once a full sweep lowers the objective by less than this
    /// fraction.
    pub tol: f64,
}

impl EdgeOutConfig {
    pub const DEFAULT_MAX_SWEEPS: usize = 500;
    pub const DEFAULT_TOL: f64 = 1e-7;

    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        let cfg = Self {
            theta,
            gamma,
            max_sweeps: Self::DEFAULT_MAX_SWEEPS,
            tol: Self::DEFAULT_TOL,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tolerance(mut self, tol: f64, max_sweeps: usize) -> Self {
        self.tol = tol;
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta = {}", self.theta)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!("gamma = {}", self.gamma)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol = {}", self.tol)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("max_sweeps = 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeOutFit {
    pub theta: f64,
    pub gamma: f64,
    /// p×p coefficient matrix with an exactly zero diagonal.
    pub b: DenseMatrix,
    pub row_abs_sums: Vec<f64>,
    pub row_l2: Vec<f64>,
    /// ½‖X − XB‖²_F at the returned B.
    pub rss: f64,
    pub objective: f64,
    /// Objective after each completed sweep.
    pub trace: Vec<f64>,
    pub sweeps_used: usize,
    pub converged: bool,
}

impl EdgeOutFit {
    /// Indices of rows with a nonzero entry.
    pub fn active_rows(&self) -> Vec<usize> {
        (0..self.b.rows()).filter(|&i| self.row_l2[i] > 0.0).collect()
    }

    pub fn nnz(&self) -> usize {
        self.b.data().iter().filter(|v| **v != 0.0).count()
    }

    /// JSON summary; the dense coefficient matrix is included only on request.
    pub fn to_json(&self, include_b: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "theta": self.theta,
            "gamma": self.gamma,
            "sweeps": self.sweeps_used,
            "converged": self.converged,
            "objective": self.objective,
            "row_l1": self.row_abs_sums,
        });
        if include_b {
            let rows: Vec<&[f64]> = (0..self.b.rows()).map(|i| self.b.row(i)).collect();
            v["B"] = serde_json::json!(rows);
        }
        v
    }
}

/// Penalty factors derived from edge-out row sums.
///
/// `w[j] = 1/s[j]`; a zero row sum maps to `f64::INFINITY`, which downstream
/// solvers treat as exclusion of the feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HubWeights {
    #[serde(with = "crate::serde_inf")]
    pub w: Vec<f64>,
    pub s: Vec<f64>,
}

impl HubWeights {
    pub fn from_sums(s: Vec<f64>) -> Self {
        let w = s
            .iter()
            .map(|&v| if v > 0.0 { 1.0 / v } else { f64::INFINITY })
            .collect();
        Self { w, s }
    }

    pub fn excluded(&self) -> Vec<usize> {
        (0..self.w.len()).filter(|&j| self.w[j].is_infinite()).collect()
    }

    /// Feature indices ordered by decreasing row sum (increasing weight).
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.s.len()).collect();
        idx.sort_by(|&a, &b| self.s[b].total_cmp(&self.s[a]).then(a.cmp(&b)));
        idx
    }
}

pub fn hub_weights(fit: &EdgeOutFit) -> HubWeights {
    let s = (0..fit.b.rows())
        .map(|i| fit.b.row(i).iter().map(|v| v.abs()).sum())
        .collect();
    HubWeights::from_sums(s)
}

/// `sign(x)·max(|x| − t, 0)`.
#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Weight on the row ℓ2 norm: θ(1−γ)√(p−1).
#[inline]
pub(crate) fn group_penalty(theta: f64, gamma: f64, p: usize) -> f64 {
    theta * (1.0 - gamma) * ((p.max(1) - 1) as f64).sqrt()
}

fn check_coefficients(x: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    let p = x.cols();
    if b.rows() != p || b.cols() != p {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, X has {p} columns",
            b.rows(),
            b.cols()
        )));
    }
    if let Some(i) = (0..p).find(|&i| b.get(i, i) != 0.0) {
        return Err(Error::NonzeroDiagonal(i));
    }
    Ok(())
}

/// Row penalty θ[γ‖b‖₁ + (1−γ)√(p−1)‖b‖₂] for one row.
pub(crate) fn row_penalty(row: &[f64], theta: f64, gamma: f64, p: usize) -> f64 {
    let l1: f64 = row.iter().map(|v| v.abs()).sum();
    let l2 = dot(row, row).sqrt();
    theta * gamma * l1 + group_penalty(theta, gamma, p) * l2
}

/// The edge-out objective at `b`.
pub fn objective(x: &DenseMatrix, b: &DenseMatrix, theta: f64, gamma: f64) -> Result<f64> {
    check_coefficients(x, b)?;
    let p = x.cols();
    let fitted = x.matmul(b)?;
    let rss = 0.5 * x.sub(&fitted)?.frobenius_sq();
    let pen: f64 = (0..p).map(|i| row_penalty(b.row(i), theta, gamma, p)).sum();
    Ok(rss + pen)
}

/// Exact minimizer of the objective over row `i` (off-diagonal entries, in
/// column order) with every other row of `b` held fixed.
///
/// With `a = ‖X_i‖²`, `r_j = X_iᵀ(X_j − Σ_{k≠i} X_k B_kj)` and
/// `β = S(r, θγ)`, the row is zero when `‖β‖₂ ≤ θ(1−γ)√(p−1)` and otherwise
/// `(1/a)(1 − θ(1−γ)√(p−1)/‖β‖₂) β`.
pub fn row_minimize(
    x: &DenseMatrix,
    b: &DenseMatrix,
    i: usize,
    theta: f64,
    gamma: f64,
) -> Result<Vec<f64>> {
    check_coefficients(x, b)?;
    let (n, p) = x.shape();
    if i >= p {
        return Err(Error::InvalidParameter(format!("row {i} out of range for p = {p}")));
    }
    let xi = x.col(i);
    let a = dot(&xi, &xi);
    if !(a > 0.0) {
        return Err(Error::ZeroColumn(i));
    }
    let mut r = Vec::with_capacity(p - 1);
    for j in (0..p).filter(|&j| j != i) {
        let mut acc = 0.0;
        for t in 0..n {
            let row = x.row(t);
            let mut resid = row[j];
            for k in (0..p).filter(|&k| k != i) {
                resid -= row[k] * b.get(k, j);
            }
            acc += xi[t] * resid;
        }
        r.push(acc);
    }
    Ok(shrink_row(&r, a, theta, gamma, p))
}

/// Applies the elementwise then group shrinkage to a partial correlation
/// vector `r`; `a` is the squared norm of the regressor column.
pub(crate) fn shrink_row(r: &[f64], a: f64, theta: f64, gamma: f64, p: usize) -> Vec<f64> {
    let t1 = theta * gamma;
    let mut beta: Vec<f64> = r.iter().map(|&v| soft_threshold(v, t1)).collect();
    let norm = dot(&beta, &beta).sqrt();
    let t2 = group_penalty(theta, gamma, p);
    if norm <= t2 {
        beta.iter_mut().for_each(|v| *v = 0.0);
    } else {
        let scale = (1.0 - t2 / norm) / a;
        beta.iter_mut().for_each(|v| *v *= scale);
    }
    beta
}
