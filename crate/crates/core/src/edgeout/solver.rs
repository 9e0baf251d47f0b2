use super::{group_penalty, row_penalty, shrink_row, EdgeOutConfig, EdgeOutFit};
use crate::error::{Error, Result};
use crate::numcore::{dot, DenseMatrix};

/// Rows updated per pass over the residual.
const ROW_BLOCK: usize = 8;

/// Column-major copy of X with cached squared column norms.
pub(crate) struct Problem {
    pub n: usize,
    pub p: usize,
    cols: Vec<f64>,
    sq: Vec<f64>,
}

impl Problem {
    pub fn new(x: &DenseMatrix) -> Result<Self> {
        let (n, p) = x.shape();
        if p < 2 {
            return Err(Error::InvalidParameter(format!("edge-out needs p >= 2, got {p}")));
        }
        let cols: Vec<f64> = x.columns().concat();
        let sq: Vec<f64> = cols.chunks(n.max(1)).map(|c| dot(c, c)).collect();
        if let Some(j) = sq.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::ZeroColumn(j));
        }
        Ok(Self { n, p, cols, sq })
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    pub fn col_sq(&self) -> &[f64] {
        &self.sq
    }

    /// X_iᵀ X_j for all j, i.e. row i of the Gram matrix.
    pub fn gram_row(&self, i: usize) -> Vec<f64> {
        let xi = self.col(i);
        (0..self.p).map(|j| dot(xi, self.col(j))).collect()
    }

    /// Column-major residual X − XB for row-major `b`.
    fn residual(&self, b: &[f64]) -> Vec<f64> {
        let (n, p) = (self.n, self.p);
        let mut resid = self.cols.clone();
        for k in 0..p {
            let row = &b[k * p..(k + 1) * p];
            if row.iter().all(|v| *v == 0.0) {
                continue;
            }
            let xk = self.col(k);
            for (j, &bkj) in row.iter().enumerate() {
                if bkj != 0.0 {
                    let rj = &mut resid[j * n..(j + 1) * n];
                    for (r, x) in rj.iter_mut().zip(xk) {
                        *r -= bkj * x;
                    }
                }
            }
        }
        resid
    }
}

/// Fits edge-out from B = 0.
pub fn fit(x: &DenseMatrix, cfg: &EdgeOutConfig) -> Result<EdgeOutFit> {
    fit_warm(x, cfg, None)
}

/// Fits edge-out starting from `init` (zero diagonal required), or from
/// B = 0 when `init` is `None`.
pub fn fit_warm(x: &DenseMatrix, cfg: &EdgeOutConfig, init: Option<&DenseMatrix>) -> Result<EdgeOutFit> {
    cfg.validate()?;
    let prob = Problem::new(x)?;
    if let Some(b0) = init {
        super::check_coefficients(x, b0)?;
    }
    Ok(solve(&prob, cfg, init.map(DenseMatrix::data)))
}

/// Exact objective decrease when row `i` moves from `old` to `new`
/// (off-diagonal values), written in terms of the step so that it keeps its
/// precision when the step is tiny.
fn row_decrease(old: &[f64], new: &[f64], r: &[f64], a: f64, theta: f64, gamma: f64, p: usize) -> f64 {
    let (mut smooth, mut step_sq, mut l1, mut cross) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..old.len() {
        let d = new[j] - old[j];
        // r - a·old is the correlation with the current residual.
        smooth += (r[j] - a * old[j]) * d;
        step_sq += d * d;
        l1 += old[j].abs() - new[j].abs();
        cross += old[j] * d;
    }
    let (n_old, n_new) = (dot(old, old).sqrt(), dot(new, new).sqrt());
    let l2 = if n_old + n_new > 0.0 { -(2.0 * cross + step_sq) / (n_old + n_new) } else { 0.0 };
    smooth - 0.5 * a * step_sq + theta * gamma * l1 + group_penalty(theta, gamma, p) * l2
}

pub(crate) fn solve(prob: &Problem, cfg: &EdgeOutConfig, init: Option<&[f64]>) -> EdgeOutFit {
    let (n, p) = (prob.n, prob.p);
    let (theta, gamma) = (cfg.theta, cfg.gamma);
    let mut b = match init {
        Some(b0) => b0.to_vec(),
        None => vec![0.0; p * p],
    };
    let mut resid = prob.residual(&b);
    let objective_of = |b: &[f64], resid: &[f64]| -> f64 {
        let pen: f64 = b
            .chunks(p)
            .filter(|row| row.iter().any(|v| *v != 0.0))
            .map(|row| row_penalty(row, theta, gamma, p))
            .sum();
        0.5 * dot(resid, resid) + pen
    };

    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    let mut r = vec![0.0; p - 1];
    let mut old = vec![0.0; p - 1];
    let mut new_row = vec![0.0; p];
    // Rows are visited in blocks. One pass over the residual gives every
    // block row's X_iᵀR; earlier rows of the same block are folded in
    // through the Gram entries, and a second pass applies the block's
    // changes. The visiting order and the updates are those of plain cyclic
    // descent.
    let mut xcorr = vec![0.0; ROW_BLOCK * p];
    let mut deltas = vec![0.0; ROW_BLOCK * p];
    let mut gram = [[0.0; ROW_BLOCK]; ROW_BLOCK];

    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        // Summed from the row subproblems, so it stays accurate long after
        // the difference of two full objectives has lost its digits.
        let mut decrease = 0.0;
        for start in (0..p).step_by(ROW_BLOCK) {
            let m = ROW_BLOCK.min(p - start);
            for j in 0..p {
                let rj = &resid[j * n..(j + 1) * n];
                for k in 0..m {
                    xcorr[k * p + j] = dot(prob.col(start + k), rj);
                }
            }
            for k in 0..m {
                for l in 0..k {
                    gram[k][l] = dot(prob.col(start + k), prob.col(start + l));
                }
            }
            for k in 0..m {
                let i = start + k;
                let a = prob.sq[i];
                let row = &mut b[i * p..(i + 1) * p];
                let (done, rest) = deltas.split_at_mut(k * p);
                let xc = &mut xcorr[k * p..(k + 1) * p];
                for (l, dl) in done.chunks(p).enumerate() {
                    let g = gram[k][l];
                    for (c, d) in xc.iter_mut().zip(dl) {
                        *c -= g * d;
                    }
                }
                let mut slot = 0;
                for j in 0..p {
                    if j == i {
                        continue;
                    }
                    // Add row i's own contribution back into the residual.
                    r[slot] = xc[j] + a * row[j];
                    old[slot] = row[j];
                    slot += 1;
                }
                let shrunk = shrink_row(&r, a, theta, gamma, p);
                decrease += row_decrease(&old, &shrunk, &r, a, theta, gamma, p);
                let mut slot = 0;
                for (j, v) in new_row.iter_mut().enumerate() {
                    if j == i {
                        *v = 0.0;
                    } else {
                        *v = shrunk[slot];
                        slot += 1;
                    }
                }
                let dk = &mut rest[..p];
                for j in 0..p {
                    dk[j] = new_row[j] - row[j];
                    row[j] = new_row[j];
                }
            }
            for j in 0..p {
                let rj = &mut resid[j * n..(j + 1) * n];
                for k in 0..m {
                    let d = deltas[k * p + j];
                    if d != 0.0 {
                        for (rv, xv) in rj.iter_mut().zip(prob.col(start + k)) {
                            *rv -= d * xv;
                        }
                    }
                }
            }
        }
        let cur = objective_of(&b, &resid);
        trace.push(cur);
        if decrease <= cfg.tol * cur.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    // Report quantities recomputed from B rather than the running residual.
    let resid = prob.residual(&b);
    let rss = 0.5 * dot(&resid, &resid);
    let mut row_abs_sums = Vec::with_capacity(p);
    let mut row_l2 = Vec::with_capacity(p);
    let mut pen = 0.0;
    for row in b.chunks(p) {
        row_abs_sums.push(row.iter().map(|v| v.abs()).sum());
        row_l2.push(dot(row, row).sqrt());
        pen += row_penalty(row, theta, gamma, p);
    }
    debug_assert!(group_penalty(theta, gamma, p) >= 0.0);
    EdgeOutFit {
        theta,
        gamma,
        b: DenseMatrix::from_parts(p, p, b),
        row_abs_sums,
        row_l2,
        rss,
        objective: rss + pen,
        trace,
        sweeps_used: sweeps,
        converged,
    }
}
