use serde::{Deserialize, Serialize};

use super::solver::{solve, Problem};
use super::{group_penalty, soft_threshold, EdgeOutConfig, EdgeOutFit};
use crate::error::{Error, Result};
use crate::numcore::{dot, DenseMatrix, Seed};
use crate::par;

pub const DEFAULT_GRID_LEN: usize = 50;
pub const DEFAULT_GRID_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum ThetaMethod {
    Gcv,
    Kfold { k: usize, seed: Seed },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSelection {
    pub grid: Vec<f64>,
    /// Score per grid value; `+∞` (JSON `null`) marks a degenerate fit.
    #[serde(with = "crate::serde_inf")]
    pub scores: Vec<f64>,
    pub chosen_theta: f64,
    pub method: ThetaMethod,
}

impl ThetaSelection {
    pub fn chosen_index(&self) -> usize {
        self.grid
            .iter()
            .position(|&t| t == self.chosen_theta)
            .expect("chosen theta comes from the grid")
    }
}

/// True when row `i` stays at zero for penalty `theta`, given its partial
/// correlations `r` at B = 0. Mirrors the zero branch of the row update.
fn row_is_zeroed(r: &[f64], theta: f64, gamma: f64, p: usize) -> bool {
    let t1 = theta * gamma;
    let norm_sq: f64 = r.iter().map(|&v| soft_threshold(v, t1).powi(2)).sum();
    norm_sq.sqrt() <= group_penalty(theta, gamma, p)
}

fn row_theta_max(r: &[f64], gamma: f64, p: usize) -> f64 {
    let max_abs = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return 0.0;
    }
    let mut cand = if gamma >= 1.0 {
        max_abs
    } else if gamma <= 0.0 {
        dot(r, r).sqrt() / ((p - 1) as f64).sqrt()
    } else {
        // The zeroing condition is monotone in θ; bisect on [0, max|r|/γ].
        let (mut lo, mut hi) = (0.0, max_abs / gamma);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if row_is_zeroed(r, mid, gamma, p) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        hi
    };
    while !row_is_zeroed(r, cand, gamma, p) {
        cand = cand.next_up();
    }
    cand
}

pub(crate) fn theta_max_problem(prob: &Problem, gamma: f64) -> f64 {
    let p = prob.p;
    par::map_range(p, |i| {
        let mut g = prob.gram_row(i);
        g.remove(i);
        row_theta_max(&g, gamma, p)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Smallest θ at which every row stays zero during the first sweep from
/// B = 0.
pub fn theta_max(x: &DenseMatrix, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}")));
    }
    Ok(theta_max_problem(&Problem::new(x)?, gamma))
}

fn log_grid(top: f64, len: usize, ratio: f64) -> Vec<f64> {
    // θ_max = 0 means no column correlates with another; B = 0 at every θ.
    if len == 1 || top == 0.0 {
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

/// 50 log-spaced values from θ_max down to θ_max·10⁻³.
pub fn default_theta_grid(x: &DenseMatrix, gamma: f64) -> Result<Vec<f64>> {
    Ok(log_grid(theta_max(x, gamma)?, DEFAULT_GRID_LEN, DEFAULT_GRID_RATIO))
}

/// Approximate degrees of freedom of the fitted reconstruction XB.
///
/// With γ = 1 this is the count of nonzero entries of B. Otherwise each row
/// contributes its nonzero count times the shrinkage factor of its group
/// update, aᵢ‖Bᵢ‖₂ / (aᵢ‖Bᵢ‖₂ + θ(1−γ)√(p−1)) with aᵢ = ‖Xᵢ‖². On
/// unit-norm columns this is ‖Bᵢ‖₂ / (‖Bᵢ‖₂ + θ(1−γ)√(p−1)); the aᵢ keeps
/// the estimate invariant to column scale.
pub fn degrees_of_freedom(x: &DenseMatrix, b: &DenseMatrix, theta: f64, gamma: f64) -> Result<f64> {
    let p = x.cols();
    if b.rows() != p || b.cols() != p {
        return Err(Error::DimensionMismatch(format!("B is {}x{}, X has {p} columns", b.rows(), b.cols())));
    }
    let col_sq: Vec<f64> = x.columns().iter().map(|c| dot(c, c)).collect();
    Ok(df_scaled(b, &col_sq, theta, gamma))
}

fn df_scaled(b: &DenseMatrix, col_sq: &[f64], theta: f64, gamma: f64) -> f64 {
    let p = b.rows();
    if gamma >= 1.0 {
        return b.data().iter().filter(|v| **v != 0.0).count() as f64;
    }
    let t2 = group_penalty(theta, gamma, p);
    (0..p)
        .map(|i| {
            let row = b.row(i);
            let nnz = row.iter().filter(|v| **v != 0.0).count();
            if nnz == 0 {
                return 0.0;
            }
            let scaled = col_sq[i] * dot(row, row).sqrt();
            scaled / (scaled + t2) * nnz as f64
        })
        .sum()
}

fn gcv_from_rss(rss_full: f64, n: usize, p: usize, df: f64) -> Result<f64> {
    let np = (n * p) as f64;
    if df >= np {
        return Err(Error::DegenerateDf { df, np });
    }
    Ok(rss_full / (np - df))
}

/// ‖X − XB‖² / (np − df).
pub fn gcv_score(x: &DenseMatrix, fit: &EdgeOutFit, theta: f64, gamma: f64) -> Result<f64> {
    let (n, p) = x.shape();
    if fit.b.rows() != p || fit.b.cols() != p {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, X has {p} columns",
            fit.b.rows(),
            fit.b.cols()
        )));
    }
    let resid = x.sub(&x.matmul(&fit.b)?)?;
    let df = degrees_of_freedom(x, &fit.b, theta, gamma)?;
    gcv_from_rss(resid.frobenius_sq(), n, p, df)
}

/// Grid positions ordered by decreasing θ, so each fit warm-starts from a
/// sparser neighbour.
fn descending_order(grid: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]).then(a.cmp(&b)));
    order
}

/// Runs warm-started fits down the grid, handing each to `visit`.
fn sweep_grid(
    prob: &Problem,
    gamma: f64,
    grid: &[f64],
    mut visit: impl FnMut(usize, EdgeOutFit) -> Result<()>,
) -> Result<()> {
    let mut warm: Option<DenseMatrix> = None;
    for idx in descending_order(grid) {
        let cfg = EdgeOutConfig::new(grid[idx], gamma)?;
        let fit = solve(prob, &cfg, warm.as_ref().map(DenseMatrix::data));
        warm = Some(fit.b.clone());
        visit(idx, fit)?;
    }
    Ok(())
}

/// Warm-started fits over `grid`, visited from the largest θ down and
/// handed to `visit` with their grid position.
pub fn for_each_grid_fit(
    x: &DenseMatrix,
    gamma: f64,
    grid: &[f64],
    visit: impl FnMut(usize, EdgeOutFit) -> Result<()>,
) -> Result<()> {
    validate_grid(grid)?;
    let prob = Problem::new(x)?;
    sweep_grid(&prob, gamma, grid, visit)
}

/// Warm-started fits over `grid`, returned in grid order.
pub fn fit_grid(x: &DenseMatrix, gamma: f64, grid: &[f64]) -> Result<Vec<EdgeOutFit>> {
    let mut fits: Vec<Option<EdgeOutFit>> = vec![None; grid.len()];
    for_each_grid_fit(x, gamma, grid, |idx, fit| {
        fits[idx] = Some(fit);
        Ok(())
    })?;
    Ok(fits.into_iter().map(|f| f.expect("every grid point visited")).collect())
}

fn argmin_prefer_larger(grid: &[f64], scores: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..grid.len() {
        let better = scores[k] < scores[best]
            || (scores[k] == scores[best] && grid[k] > grid[best])
            || (scores[best].is_nan() && !scores[k].is_nan());
        if better {
            best = k;
        }
    }
    best
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty theta grid".into()));
    }
    if grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter("theta grid values must be finite and >= 0".into()));
    }
    Ok(())
}

/// Chooses θ by GCV or K-fold cross-validation.
///
/// Grid fits are warm-started from the next larger θ. GCV scores a θ whose
/// df reaches np as `+∞`. K-fold fits B on the training rows of each fold
/// and scores ½‖X_val − X_val B‖²_F, summed over folds. Ties go to the
/// larger θ.
pub fn select_theta(
    x: &DenseMatrix,
    gamma: f64,
    method: ThetaMethod,
    grid: Option<&[f64]>,
) -> Result<ThetaSelection> {
    select_impl(x, gamma, method, grid, false).map(|(sel, _)| sel)
}

/// [`select_theta`] plus the full-data fit at the chosen θ.
pub fn select_theta_and_fit(
    x: &DenseMatrix,
    gamma: f64,
    method: ThetaMethod,
    grid: Option<&[f64]>,
) -> Result<(ThetaSelection, EdgeOutFit)> {
    let (sel, fit) = select_impl(x, gamma, method, grid, true)?;
    Ok((sel, fit.expect("fit requested")))
}

fn select_impl(
    x: &DenseMatrix,
    gamma: f64,
    method: ThetaMethod,
    grid: Option<&[f64]>,
    keep_fit: bool,
) -> Result<(ThetaSelection, Option<EdgeOutFit>)> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}")));
    }
    let (n, p) = x.shape();
    let prob = Problem::new(x)?;
    let grid: Vec<f64> = match grid {
        Some(g) => g.to_vec(),
        None => log_grid(theta_max_problem(&prob, gamma), DEFAULT_GRID_LEN, DEFAULT_GRID_RATIO),
    };
    validate_grid(&grid)?;

    match method {
        ThetaMethod::Gcv => {
            let mut scores = vec![f64::INFINITY; grid.len()];
            let mut fits: Vec<Option<EdgeOutFit>> = vec![None; grid.len()];
            let mut best: Option<(f64, f64, usize)> = None;
            sweep_grid(&prob, gamma, &grid, |idx, fit| {
                let df = df_scaled(&fit.b, prob.col_sq(), fit.theta, gamma);
                let score = gcv_from_rss(2.0 * fit.rss, n, p, df).unwrap_or(f64::INFINITY);
                scores[idx] = score;
                if keep_fit {
                    let improves = match best {
                        None => true,
                        Some((s, t, _)) => score < s || (score == s && grid[idx] > t),
                    };
                    if improves {
                        if let Some((_, _, old)) = best {
                            fits[old] = None;
                        }
                        best = Some((score, grid[idx], idx));
                        fits[idx] = Some(fit);
                    }
                }
                Ok(())
            })?;
            let chosen = argmin_prefer_larger(&grid, &scores);
            let fit = if keep_fit { fits[chosen].take() } else { None };
            let sel = ThetaSelection {
                chosen_theta: grid[chosen],
                grid,
                scores,
                method,
            };
            Ok((sel, fit))
        }
        ThetaMethod::Kfold { k, seed } => {
            if k < 2 || k > n {
                return Err(Error::InvalidParameter(format!("K = {k} with n = {n}")));
            }
            let folds = crate::penreg::fold_assignment(n, k, seed);
            let per_fold = par::try_map_range(k, |f| -> Result<Vec<f64>> {
                let train: Vec<usize> = (0..n).filter(|&t| folds[t] != f).collect();
                let val: Vec<usize> = (0..n).filter(|&t| folds[t] == f).collect();
                let xtr = x.select_rows(&train);
                let xval = x.select_rows(&val);
                let prob = Problem::new(&xtr)?;
                let mut scores = vec![0.0; grid.len()];
                sweep_grid(&prob, gamma, &grid, |idx, fit| {
                    let resid = xval.sub(&xval.matmul(&fit.b)?)?;
                    scores[idx] = 0.5 * resid.frobenius_sq();
                    Ok(())
                })?;
                Ok(scores)
            })?;
            let scores: Vec<f64> = (0..grid.len())
                .map(|g| per_fold.iter().map(|s| s[g]).sum())
                .collect();
            let chosen = argmin_prefer_larger(&grid, &scores);
            let fit = if keep_fit {
                let cfg = EdgeOutConfig::new(grid[chosen], gamma)?;
                Some(solve(&prob, &cfg, None))
            } else {
                None
            };
            let sel = ThetaSelection {
                chosen_theta: grid[chosen],
                grid,
                scores,
                method,
            };
            Ok((sel, fit))
        }
    }
}
