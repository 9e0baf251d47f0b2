use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::solver::{check_inputs, null_coefs, solve_into, to_fit, Design};
use super::{loss_from_eta, Family, PenalizedFit, PenaltyForm};
use crate::error::{Error, Result};
use crate::numcore::{DenseMatrix, Seed};
use crate::par;

pub const DEFAULT_N_LAMBDA: usize = 100;
pub const DEFAULT_RATIO: f64 = 0.01;
/// ℓ1 share used to size λ_max when α = 0.
const MIN_ALPHA_FOR_GRID: f64 = 1e-3;
/// Stream id for fold shuffling.
const FOLD_STREAM: u64 = 0xf01d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPath {
    /// Strictly decreasing.
    pub lambdas: Vec<f64>,
    pub fits: Vec<PenalizedFit>,
}

impl FitPath {
    pub fn nonzero_counts(&self) -> Vec<usize> {
        self.fits.iter().map(|f| f.nonzero_count).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub lambdas: Vec<f64>,
    pub cvm: Vec<f64>,
    pub cvsd: Vec<f64>,
    pub nonzero: Vec<usize>,
    pub lambda_min: f64,
    pub index_min: usize,
    pub chosen_fit: PenalizedFit,
}

impl CvReport {
    pub fn cvm_min(&self) -> f64 {
        self.cvm[self.index_min]
    }
}

/// Smallest λ at which every finite-weight coefficient is zero:
/// `maxⱼ |xⱼᵀ(y − ȳ)| / (n α wⱼ)`.
pub fn lambda_max(x: &DenseMatrix, y: &[f64], form: &PenaltyForm) -> Result<f64> {
    lambda_max_design(&Design::new(x), y, form)
}

fn lambda_max_design(design: &Design, y: &[f64], form: &PenaltyForm) -> Result<f64> {
    if form.weights.iter().all(|w| w.is_infinite()) {
        return Err(Error::AllWeightsInfinite);
    }
    let n = design.n as f64;
    let ybar = y.iter().sum::<f64>() / n;
    let alpha = form.alpha.max(MIN_ALPHA_FOR_GRID);
    let mut top = 0.0f64;
    for (j, w) in form.weights.iter().enumerate() {
        if w.is_finite() {
            let g: f64 = design.col(j).iter().zip(y).map(|(x, y)| x * (y - ybar)).sum::<f64>() / n;
            top = top.max(g.abs() / (alpha * w));
        }
    }
    if top == 0.0 {
        return Err(Error::InvalidParameter(
            "response is uncorrelated with every eligible feature".into(),
        ));
    }
    // Guard the zero branch against last-bit rounding in the solver.
    Ok(top * (1.0 + 1e-10))
}

fn log_grid(top: f64, len: usize, ratio: f64) -> Vec<f64> {
    if len == 1 {
        return vec![top];
    }
    let (hi, lo) = (top.ln(), (top * ratio).ln());
    (0..len)
        .map(|k| {
            if k == 0 {
                top
            } else {
                (hi + (lo - hi) * k as f64 / (len - 1) as f64).exp()
            }
        })
        .collect()
}

fn path_on_grid(
    design: &Design,
    y: &[f64],
    form: &PenaltyForm,
    family: Family,
    lambdas: &[f64],
) -> Result<Vec<PenalizedFit>> {
    let mut coefs = null_coefs(y, design.p, family);
    let mut fits = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let spec = form.at(lam);
        solve_into(design, y, &spec, family, &mut coefs)?;
        fits.push(to_fit(&coefs, &spec, family));
    }
    Ok(fits)
}

/// Warm-started fits over `n_lambda` log-spaced values from λ_max down to
/// λ_max·`ratio`.
pub fn lambda_path(
    x: &DenseMatrix,
    y: &[f64],
    form: &PenaltyForm,
    family: Family,
    n_lambda: usize,
    ratio: f64,
) -> Result<FitPath> {
    if n_lambda == 0 || !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "n_lambda = {n_lambda}, ratio = {ratio}"
        )));
    }
    check_inputs(x, y, &form.at(0.0), family)?;
    let design = Design::new(x);
    let lambdas = log_grid(lambda_max_design(&design, y, form)?, n_lambda, ratio);
    let fits = path_on_grid(&design, y, form, family, &lambdas)?;
    Ok(FitPath { lambdas, fits })
}

/// Deterministic fold labels in `0..k`: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, k: usize, seed: Seed) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed.rng(FOLD_STREAM));
    let mut folds = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        folds[i] = pos % k.max(1);
    }
    folds
}

/// K-fold cross-validation over the default λ path.
pub fn cv(
    x: &DenseMatrix,
    y: &[f64],
    form: &PenaltyForm,
    family: Family,
    k: usize,
    seed: Seed,
) -> Result<CvReport> {
    if k < 2 || k > x.rows() {
        return Err(Error::InvalidParameter(format!("K = {k} with n = {}", x.rows())));
    }
    let folds = fold_assignment(x.rows(), k, seed);
    cv_with_folds(x, y, form, family, &folds)
}

/// Cross-validation with caller-supplied fold labels.
pub fn cv_with_folds(
    x: &DenseMatrix,
    y: &[f64],
    form: &PenaltyForm,
    family: Family,
    folds: &[usize],
) -> Result<CvReport> {
    cross_validate(x, y, form, family, folds).map(|(r, _)| r)
}

/// Cross-validation that also returns the full-data path.
///
/// The λ grid comes from the full data; each fold refits the whole path on
/// its training rows. `cvm` is the mean per-observation loss and `cvsd` the
/// standard error of the per-fold means. Ties at the minimum go to the
/// larger λ.
pub fn cross_validate(
    x: &DenseMatrix,
    y: &[f64],
    form: &PenaltyForm,
    family: Family,
    folds: &[usize],
) -> Result<(CvReport, FitPath)> {
    let n = x.rows();
    if folds.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} fold labels for {n} rows",
            folds.len()
        )));
    }
    let k = folds.iter().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::InvalidParameter("cross-validation needs at least 2 folds".into()));
    }
    let path = lambda_path(x, y, form, family, DEFAULT_N_LAMBDA, DEFAULT_RATIO)?;
    let lambdas = path.lambdas.clone();

    let fold_losses = par::try_map_range(k, |f| -> Result<(usize, Vec<f64>)> {
        let train: Vec<usize> = (0..n).filter(|&i| folds[i] != f).collect();
        let val: Vec<usize> = (0..n).filter(|&i| folds[i] == f).collect();
        if val.is_empty() {
            return Ok((0, vec![0.0; lambdas.len()]));
        }
        let design = Design::new(&x.select_rows(&train));
        let ytr: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let yval: Vec<f64> = val.iter().map(|&i| y[i]).collect();
        let xval = Design::new(&x.select_rows(&val));
        let fits = path_on_grid(&design, &ytr, form, family, &lambdas)?;
        let losses = fits
            .iter()
            .map(|fit| loss_from_eta(family, &yval, &xval.linear_predictor(fit.beta0, &fit.beta)))
            .collect();
        Ok((val.len(), losses))
    })?;

    let used: Vec<&(usize, Vec<f64>)> = fold_losses.iter().filter(|(m, _)| *m > 0).collect();
    let total: f64 = used.iter().map(|(m, _)| *m as f64).sum();
    let kf = used.len() as f64;
    let mut cvm = Vec::with_capacity(lambdas.len());
    let mut cvsd = Vec::with_capacity(lambdas.len());
    for l in 0..lambdas.len() {
        let mean = used.iter().map(|(m, loss)| *m as f64 * loss[l]).sum::<f64>() / total;
        let var = used
            .iter()
            .map(|(m, loss)| *m as f64 * (loss[l] - mean).powi(2))
            .sum::<f64>()
            / total
            / (kf - 1.0).max(1.0);
        cvm.push(mean);
        cvsd.push(var.sqrt());
    }
    let mut index_min = 0;
    for l in 1..cvm.len() {
        if cvm[l] < cvm[index_min] {
            index_min = l;
        }
    }
    let report = CvReport {
        lambda_min: lambdas[index_min],
        index_min,
        nonzero: path.nonzero_counts(),
        chosen_fit: path.fits[index_min].clone(),
        lambdas,
        cvm,
        cvsd,
    };
    Ok((report, path))
}
