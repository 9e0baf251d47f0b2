use super::{Family, PenalizedFit, PenaltySpec};
use crate::edgeout::soft_threshold;
use crate::error::{Error, Result};
use crate::numcore::{dot, DenseMatrix};

pub(crate) const MAX_SWEEPS: usize = 100_000;
/// Convergence threshold on max_j c_j Δβ_j² within a sweep.
const SWEEP_TOL: f64 = 1e-18;
const IRLS_MAX_ITER: usize = 25;
const IRLS_TOL: f64 = 1e-8;
const PROB_CLAMP: f64 = 1e-5;

/// Column-major view of a design matrix.
pub(crate) struct Design {
    pub n: usize,
    pub p: usize,
    cols: Vec<f64>,
}

impl Design {
    pub fn new(x: &DenseMatrix) -> Self {
        Self {
            n: x.rows(),
            p: x.cols(),
            cols: x.columns().concat(),
        }
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    pub fn linear_predictor(&self, beta0: f64, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![beta0; self.n];
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                for (e, x) in eta.iter_mut().zip(self.col(j)) {
                    *e += b * x;
                }
            }
        }
        eta
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Coefs {
    pub beta0: f64,
    pub beta: Vec<f64>,
}

#[cfg(test)]
impl Coefs {
    pub fn zeros(p: usize) -> Self {
        Self { beta0: 0.0, beta: vec![0.0; p] }
    }
}

pub(crate) fn check_inputs(x: &DenseMatrix, y: &[f64], spec: &PenaltySpec, family: Family) -> Result<()> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "y has {} entries, X has {} rows",
            y.len(),
            x.rows()
        )));
    }
    if spec.weights.len() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} penalty factors for {} features",
            spec.weights.len(),
            x.cols()
        )));
    }
    spec.validate()?;
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite response {v}")));
    }
    if family == Family::Binomial {
        if let Some(v) = y.iter().find(|&&v| v != 0.0 && v != 1.0) {
            return Err(Error::NonBinaryResponse(*v));
        }
    }
    Ok(())
}

/// Coordinate descent for
/// `1/(2n) Σ vᵢ (zᵢ − β₀ − xᵢβ)² + λ Σ wⱼ (α|βⱼ| + (1−α)βⱼ²)`
/// with an unpenalized intercept; infinite-weight features stay at zero.
fn weighted_cd(
    design: &Design,
    z: &[f64],
    obs_w: Option<&[f64]>,
    spec: &PenaltySpec,
    coefs: &mut Coefs,
    mut on_sweep: Option<&mut dyn FnMut(&Coefs)>,
) -> Result<usize> {
    let (n, p) = (design.n, design.p);
    let nf = n as f64;
    let v = |i: usize| obs_w.map_or(1.0, |w| w[i]);
    let vsum: f64 = (0..n).map(v).sum();
    if !(vsum > 0.0) {
        return Err(Error::InvalidParameter("observation weights sum to zero".into()));
    }

    let eligible: Vec<usize> = (0..p).filter(|&j| spec.weights[j].is_finite()).collect();
    for j in 0..p {
        if !spec.weights[j].is_finite() {
            coefs.beta[j] = 0.0;
        }
    }
    let curv: Vec<f64> = (0..p)
        .map(|j| {
            let c = design.col(j);
            match obs_w {
                Some(w) => c.iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>() / nf,
                None => dot(c, c) / nf,
            }
        })
        .collect();

    let eta = design.linear_predictor(coefs.beta0, &coefs.beta);
    let mut resid: Vec<f64> = z.iter().zip(&eta).map(|(z, e)| z - e).collect();
    let l1 = |j: usize| spec.lambda * spec.alpha * spec.weights[j];
    let l2 = |j: usize| 2.0 * spec.lambda * (1.0 - spec.alpha) * spec.weights[j];

    let update = |j: usize, coefs: &mut Coefs, resid: &mut [f64]| -> f64 {
        let c = curv[j];
        if c == 0.0 {
            return 0.0;
        }
        let xj = design.col(j);
        let grad = match obs_w {
            Some(w) => xj.iter().zip(resid.iter()).zip(w).map(|((x, r), w)| w * x * r).sum::<f64>(),
            None => dot(xj, resid),
        } / nf;
        let old = coefs.beta[j];
        let new = soft_threshold(grad + c * old, l1(j)) / (c + l2(j));
        let delta = new - old;
        if delta != 0.0 {
            for (r, x) in resid.iter_mut().zip(xj) {
                *r -= delta * x;
            }
            coefs.beta[j] = new;
        }
        c * delta * delta
    };
    let recenter = |coefs: &mut Coefs, resid: &mut [f64]| -> f64 {
        let shift = (0..n).map(|i| v(i) * resid[i]).sum::<f64>() / vsum;
        if shift != 0.0 {
            coefs.beta0 += shift;
            resid.iter_mut().for_each(|r| *r -= shift);
        }
        vsum / nf * shift * shift
    };

    let mut sweeps = 0;
    loop {
        // Full pass over every eligible feature.
        let mut change = recenter(coefs, &mut resid);
        for &j in &eligible {
            change = change.max(update(j, coefs, &mut resid));
        }
        sweeps += 1;
        if let Some(cb) = on_sweep.as_mut() {
            cb(coefs);
        }
        if change < SWEEP_TOL {
            return Ok(sweeps);
        }
        // Iterate on the current active set until it settles.
        let active: Vec<usize> = eligible.iter().copied().filter(|&j| coefs.beta[j] != 0.0).collect();
        loop {
            if sweeps >= MAX_SWEEPS {
                return Err(Error::NoConvergence(MAX_SWEEPS));
            }
            let mut change = recenter(coefs, &mut resid);
            for &j in &active {
                change = change.max(update(j, coefs, &mut resid));
            }
            sweeps += 1;
            if let Some(cb) = on_sweep.as_mut() {
                cb(coefs);
            }
            if change < SWEEP_TOL {
                break;
            }
        }
    }
}

fn sigmoid(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

pub(crate) fn binomial_deviance(y: &[f64], eta: &[f64]) -> f64 {
    let n = y.len() as f64;
    -2.0 * y
        .iter()
        .zip(eta)
        .map(|(&y, &e)| {
            let p = sigmoid(e).clamp(1e-15, 1.0 - 1e-15);
            y * p.ln() + (1.0 - y) * (1.0 - p).ln()
        })
        .sum::<f64>()
        / n
}

fn irls(design: &Design, y: &[f64], spec: &PenaltySpec, coefs: &mut Coefs) -> Result<()> {
    let n = design.n;
    let mut dev_old = binomial_deviance(y, &design.linear_predictor(coefs.beta0, &coefs.beta));
    for _ in 0..IRLS_MAX_ITER {
        let eta = design.linear_predictor(coefs.beta0, &coefs.beta);
        let mut w = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let p = sigmoid(eta[i]).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            let wi = p * (1.0 - p);
            w.push(wi);
            z.push(eta[i] + (y[i] - p) / wi);
        }
        weighted_cd(design, &z, Some(&w), spec, coefs, None)?;
        let dev = binomial_deviance(y, &design.linear_predictor(coefs.beta0, &coefs.beta));
        if (dev_old - dev).abs() <= IRLS_TOL * dev.abs().max(IRLS_TOL) {
            break;
        }
        dev_old = dev;
    }
    Ok(())
}

/// Solves one penalized problem in place, starting from `coefs`.
pub(crate) fn solve_into(
    design: &Design,
    y: &[f64],
    spec: &PenaltySpec,
    family: Family,
    coefs: &mut Coefs,
) -> Result<()> {
    match family {
        Family::Gaussian => weighted_cd(design, y, None, spec, coefs, None).map(|_| ()),
        Family::Binomial => irls(design, y, spec, coefs),
    }
}

pub(crate) fn to_fit(coefs: &Coefs, spec: &PenaltySpec, family: Family) -> PenalizedFit {
    PenalizedFit {
        beta0: coefs.beta0,
        nonzero_count: coefs.beta.iter().filter(|b| **b != 0.0).count(),
        beta: coefs.beta.clone(),
        family,
        spec: spec.clone(),
    }
}

/// Initial coefficients: null model intercept.
pub(crate) fn null_coefs(y: &[f64], p: usize, family: Family) -> Coefs {
    let ybar = y.iter().sum::<f64>() / y.len().max(1) as f64;
    let beta0 = match family {
        Family::Gaussian => ybar,
        Family::Binomial => {
            let q = ybar.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            (q / (1.0 - q)).ln()
        }
    };
    Coefs { beta0, beta: vec![0.0; p] }
}

/// Fits one penalized regression.
///
/// Gaussian minimizes `½/n ‖y − β₀ − Xβ‖² + λ Σⱼ wⱼ(α|βⱼ| + (1−α)βⱼ²)` by
/// cyclic coordinate descent. Binomial swaps the squared error for the mean
/// negative log-likelihood and solves it by iteratively reweighted
/// quadratic approximations.
pub fn wfit(x: &DenseMatrix, y: &[f64], spec: &PenaltySpec, family: Family) -> Result<PenalizedFit> {
    check_inputs(x, y, spec, family)?;
    let design = Design::new(x);
    let mut coefs = null_coefs(y, x.cols(), family);
    solve_into(&design, y, spec, family, &mut coefs)?;
    Ok(to_fit(&coefs, spec, family))
}

/// Gaussian fit that reports the coefficients after every sweep.
#[cfg(test)]
pub(crate) fn wfit_traced(
    x: &DenseMatrix,
    y: &[f64],
    spec: &PenaltySpec,
    on_sweep: &mut dyn FnMut(f64, &[f64]),
) -> Result<PenalizedFit> {
    check_inputs(x, y, spec, Family::Gaussian)?;
    let design = Design::new(x);
    let mut coefs = Coefs::zeros(x.cols());
    let mut cb = |c: &Coefs| on_sweep(c.beta0, &c.beta);
    weighted_cd(&design, y, None, spec, &mut coefs, Some(&mut cb))?;
    Ok(to_fit(&coefs, spec, Family::Gaussian))
}
