use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MethodId, ReplicateResult};
use crate::error::{Error, Result};
use crate::penreg::{Family, FitPath, PenalizedFit};
use crate::simgen::SimData;

/// Support recovery and prediction quality of one fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Share of selected features that are not in the true support.
    pub fp: f64,
    /// Share of true features that were not selected.
    #[serde(rename = "fn")]
    pub fn_rate: f64,
    pub n_features: usize,
    pub test_error: f64,
}

/// One table row: replicate means, with sample standard deviations across
/// replicates for cvm and test error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: MethodId,
    pub cvm: f64,
    pub cvm_se: f64,
    #[serde(rename = "fn")]
    pub fn_rate: f64,
    pub fp: f64,
    #[serde(rename = "features")]
    pub n_features: f64,
    pub test_error: f64,
    pub test_error_se: f64,
}

/// False positive and false negative rates along a λ path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCurve {
    pub lambdas: Vec<f64>,
    pub nonzero: Vec<usize>,
    pub fp_path: Vec<f64>,
    pub fn_path: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Screening {
    /// False positives in the sparsest model containing the true support.
    Screened(usize),
    NotScreened,
}

fn truth(data: &SimData) -> Result<&[usize]> {
    if data.true_support.is_empty() {
        return Err(Error::MissingGroundTruth);
    }
    Ok(&data.true_support)
}

fn rates(selected: &[usize], truth: &[usize]) -> (f64, f64) {
    let hits = selected.iter().filter(|j| truth.contains(j)).count();
    let fp = (selected.len() - hits) as f64 / selected.len().max(1) as f64;
    let fn_rate = (truth.len() - hits) as f64 / truth.len() as f64;
    (fp, fn_rate)
}

/// Scores `fit` against the ground truth and the held-out test set.
pub fn evaluate(fit: &PenalizedFit, data: &SimData) -> Result<Evaluation> {
    let truth = truth(data)?;
    if data.y_test.is_empty() {
        return Err(Error::MissingGroundTruth);
    }
    let selected = fit.support();
    let (fp, fn_rate) = rates(&selected, truth);
    let test_error = match fit.family {
        Family::Gaussian => fit.loss(&data.x_test, &data.y_test)?,
        Family::Binomial => {
            let prob = fit.predict(&data.x_test)?;
            let wrong = prob
                .iter()
                .zip(&data.y_test)
                .filter(|(q, y)| (**q > 0.5) != (**y == 1.0))
                .count();
            wrong as f64 / data.y_test.len() as f64
        }
    };
    Ok(Evaluation {
        fp,
        fn_rate,
        n_features: selected.len(),
        test_error,
    })
}

pub fn fp_fn_path(path: &FitPath, data: &SimData) -> Result<PathCurve> {
    let truth = truth(data)?;
    let mut curve = PathCurve {
        lambdas: path.lambdas.clone(),
        nonzero: Vec::with_capacity(path.fits.len()),
        fp_path: Vec::with_capacity(path.fits.len()),
        fn_path: Vec::with_capacity(path.fits.len()),
    };
    for fit in &path.fits {
        let (fp, fn_rate) = rates(&fit.support(), truth);
        curve.nonzero.push(fit.nonzero_count);
        curve.fp_path.push(fp);
        curve.fn_path.push(fn_rate);
    }
    Ok(curve)
}

/// False positives of the sparsest path model that contains every true
/// feature.
pub fn screening_fp(path: &FitPath, data: &SimData) -> Result<Screening> {
    let truth = truth(data)?;
    for fit in &path.fits {
        let selected = fit.support();
        if truth.iter().all(|j| selected.contains(j)) {
            return Ok(Screening::Screened(selected.len() - truth.len()));
        }
    }
    Ok(Screening::NotScreened)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates per-replicate results into one row per method, in canonical
/// method order.
pub fn summarize(per_rep: &[Vec<ReplicateResult>]) -> Vec<MetricsRow> {
    let mut by_method: BTreeMap<MethodId, Vec<&ReplicateResult>> = BTreeMap::new();
    for rep in per_rep {
        for r in rep {
            by_method.entry(r.method).or_default().push(r);
        }
    }
    by_method
        .into_iter()
        .map(|(method, rs)| {
            let col = |f: &dyn Fn(&ReplicateResult) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (cvm, cvm_se) = mean_sd(&col(&|r| r.cvm));
            let (test_error, test_error_se) = mean_sd(&col(&|r| r.eval.test_error));
            MetricsRow {
                method,
                cvm,
                cvm_se,
                fn_rate: mean_sd(&col(&|r| r.eval.fn_rate)).0,
                fp: mean_sd(&col(&|r| r.eval.fp)).0,
                n_features: mean_sd(&col(&|r| r.eval.n_features as f64)).0,
                test_error,
                test_error_se,
            }
        })
        .collect()
}
