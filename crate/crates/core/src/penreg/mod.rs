//! Weighted lasso / elastic net with per-feature penalty factors.
//!
//! Penalty factors multiply both the ℓ1 and the ℓ2 part of the penalty;
//! an infinite factor removes the feature from the model. The data term is
//! scaled by 1/n so λ is comparable across sample sizes.

mod path;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{dot, DenseMatrix};

pub use path::{
    cross_validate, cv, cv_with_folds, fold_assignment, lambda_max, lambda_path, CvReport,
    FitPath, DEFAULT_N_LAMBDA, DEFAULT_RATIO,
};
pub use solver::wfit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Binomial,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Family::Gaussian),
            "binomial" => Ok(Family::Binomial),
            other => Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

/// Penalty mix and per-feature factors, without a λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyForm {
    pub alpha: f64,
    #[serde(with = "crate::serde_inf")]
    pub weights: Vec<f64>,
}

impl PenaltyForm {
    pub fn new(alpha: f64, weights: Vec<f64>) -> Self {
        Self { alpha, weights }
    }

    /// Plain lasso (α = 1) or elastic net with unit factors.
    pub fn uniform(alpha: f64, p: usize) -> Self {
        Self { alpha, weights: vec![1.0; p] }
    }

    pub fn at(&self, lambda: f64) -> PenaltySpec {
        PenaltySpec {
            lambda,
            alpha: self.alpha,
            weights: self.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub lambda: f64,
    /// ℓ1 share of the penalty.
    pub alpha: f64,
    #[serde(with = "crate::serde_inf")]
    pub weights: Vec<f64>,
}

impl PenaltySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {}", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {}", self.alpha)));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidParameter(format!("penalty factor {w} is not positive")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenalizedFit {
    pub beta0: f64,
    pub beta: Vec<f64>,
    pub family: Family,
    pub spec: PenaltySpec,
    pub nonzero_count: usize,
}

impl PenalizedFit {
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != 0.0).collect()
    }

    pub fn linear_predictor(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        Ok(x.matvec(&self.beta)?.into_iter().map(|e| e + self.beta0).collect())
    }

    /// Mean response: the linear predictor (Gaussian) or a probability
    /// (binomial).
    pub fn predict(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        let eta = self.linear_predictor(x)?;
        Ok(match self.family {
            Family::Gaussian => eta,
            Family::Binomial => eta.into_iter().map(|e| 1.0 / (1.0 + (-e).exp())).collect(),
        })
    }

    /// Mean squared error (Gaussian) or mean deviance (binomial) on `(x, y)`.
    pub fn loss(&self, x: &DenseMatrix, y: &[f64]) -> Result<f64> {
        let eta = self.linear_predictor(x)?;
        Ok(loss_from_eta(self.family, y, &eta))
    }

    /// The penalized objective this fit minimizes, evaluated on `(x, y)`.
    pub fn objective(&self, x: &DenseMatrix, y: &[f64]) -> Result<f64> {
        let eta = self.linear_predictor(x)?;
        let data = match self.family {
            Family::Gaussian => 0.5 * loss_from_eta(Family::Gaussian, y, &eta),
            Family::Binomial => 0.5 * loss_from_eta(Family::Binomial, y, &eta),
        };
        let pen: f64 = self
            .beta
            .iter()
            .zip(&self.spec.weights)
            .filter(|(b, _)| **b != 0.0)
            .map(|(b, w)| w * (self.spec.alpha * b.abs() + (1.0 - self.spec.alpha) * b * b))
            .sum();
        Ok(data + self.spec.lambda * pen)
    }
}

pub(crate) fn loss_from_eta(family: Family, y: &[f64], eta: &[f64]) -> f64 {
    match family {
        Family::Gaussian => {
            y.iter().zip(eta).map(|(y, e)| (y - e).powi(2)).sum::<f64>() / y.len().max(1) as f64
        }
        Family::Binomial => solver::binomial_deviance(y, eta),
    }
}

/// Adaptive lasso factors from univariate slopes: `wⱼ = 1/|xⱼᵀy / n|`,
/// infinite when the slope is exactly zero.
pub fn univariate_weights(x: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "y has {} entries, X has {} rows",
            y.len(),
            x.rows()
        )));
    }
    let n = x.rows() as f64;
    Ok(x.columns()
        .iter()
        .map(|c| {
            let slope = dot(c, y) / n;
            if slope == 0.0 {
                f64::INFINITY
            } else {
                1.0 / slope.abs()
            }
        })
        .collect())
}
