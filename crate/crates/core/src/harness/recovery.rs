use serde::{Deserialize, Serialize};

use crate::edgeout::{default_theta_grid, for_each_grid_fit};
use crate::error::{Error, Result};
use crate::simgen::SimData;

/// Hub detection along a θ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryCurve {
    pub gamma: f64,
    pub grid: Vec<f64>,
    /// Hubs whose row of B is nonzero.
    pub correct_hubs: Vec<usize>,
    /// Non-hub features whose row of B is nonzero.
    pub false_hubs: Vec<usize>,
    /// Worst rank of any hub by decreasing absolute row sum, 1-based.
    pub max_hub_rank: Vec<usize>,
}

impl RecoveryCurve {
    /// Grid positions where the nonzero rows are exactly the hubs.
    pub fn exact_indices(&self, s: usize) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|&k| self.correct_hubs[k] == s && self.false_hubs[k] == 0)
            .collect()
    }
}

/// 1-based rank of every hub when features are sorted by decreasing `sums`.
/// A hub tied with other features takes the worst rank among them.
pub fn hub_ranks(sums: &[f64], hubs: &[usize]) -> Vec<usize> {
    hubs.iter()
        .map(|&h| {
            let v = sums[h];
            1 + sums.iter().enumerate().filter(|&(j, &s)| j != h && s >= v).count()
        })
        .collect()
}

/// Fits edge-out over `grid` (default grid when `None`) on the training
/// features of `data` and scores hub detection at every θ.
pub fn hub_recovery(data: &SimData, gamma: f64, grid: Option<&[f64]>) -> Result<RecoveryCurve> {
    if data.hub_set.is_empty() {
        return Err(Error::MissingGroundTruth);
    }
    let x = &data.x_train;
    let grid = match grid {
        Some(g) => g.to_vec(),
        None => default_theta_grid(x, gamma)?,
    };
    let len = grid.len();
    let mut curve = RecoveryCurve {
        gamma,
        grid: grid.clone(),
        correct_hubs: vec![0; len],
        false_hubs: vec![0; len],
        max_hub_rank: vec![0; len],
    };
    let hubs = &data.hub_set;
    for_each_grid_fit(x, gamma, &grid, |k, fit| {
        let active = fit.active_rows();
        let found = active.iter().filter(|i| hubs.contains(i)).count();
        curve.correct_hubs[k] = found;
        curve.false_hubs[k] = active.len() - found;
        curve.max_hub_rank[k] = hub_ranks(&fit.row_abs_sums, hubs).into_iter().max().unwrap_or(0);
        Ok(())
    })?;
    Ok(curve)
}
