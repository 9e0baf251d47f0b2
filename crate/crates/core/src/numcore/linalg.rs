use rand::Rng;

use super::matrix::DenseMatrix;
use super::random::{normals, Seed};
use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `a = L Lᵀ`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch("cholesky needs a square matrix".into()));
    }
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l.set_unchecked(j, j, djj);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set_unchecked(i, j, s / djj);
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
/// The result is exactly symmetric.
pub fn spd_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    let l = cholesky(a)?;
    let n = a.rows();
    // Solve L Lᵀ x = e_k column by column.
    let mut inv = DenseMatrix::zeros(n, n);
    let mut y = vec![0.0; n];
    for k in 0..n {
        for i in 0..n {
            let mut s = if i == k { 1.0 } else { 0.0 };
            for m in 0..i {
                s -= l.get(i, m) * y[m];
            }
            y[i] = s / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for m in i + 1..n {
                s -= l.get(m, i) * inv.get(m, k);
            }
            inv.set_unchecked(i, k, s / l.get(i, i));
        }
    }
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (inv.get(i, j) + inv.get(j, i));
            inv.set_unchecked(i, j, v);
            inv.set_unchecked(j, i, v);
        }
    }
    Ok(inv)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("eigenvalues need a square matrix".into()));
    }
    let n = a.rows();
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.data());
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `n` i.i.d. rows from N(0, Σ), generated as `Z Lᵀ` with `Σ = L Lᵀ`.
pub fn sample_gaussian(n: usize, sigma: &DenseMatrix, seed: Seed) -> Result<DenseMatrix> {
    sample_gaussian_with(n, sigma, &mut seed.rng(0))
}

pub(crate) fn sample_gaussian_with<R: Rng + ?Sized>(
    n: usize,
    sigma: &DenseMatrix,
    rng: &mut R,
) -> Result<DenseMatrix> {
    let l = cholesky(sigma)?;
    let p = sigma.rows();
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        let z = normals(rng, p);
        for j in 0..p {
            let mut s = 0.0;
            for (k, zk) in z.iter().enumerate().take(j + 1) {
                s += zk * l.get(j, k);
            }
            data.push(s);
        }
    }
    Ok(DenseMatrix::from_parts(n, p, data))
}

/// Random symmetric positive definite matrix whose largest to smallest
/// eigenvalue ratio is exactly `cond_ratio`.
///
/// `Q` is the orthogonal factor of a Gaussian matrix; the spectrum is uniform
/// on `[1, cond_ratio]` with the smallest value pinned to 1 and the largest
/// pinned to `cond_ratio`. Returns `Q Λ Qᵀ`.
pub fn gen_positive_def(p: usize, cond_ratio: f64, seed: Seed) -> Result<DenseMatrix> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p must be at least 2, got {p}")));
    }
    if !(cond_ratio > 1.0) || !cond_ratio.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cond_ratio must exceed 1, got {cond_ratio}"
        )));
    }
    let mut rng = seed.rng(0);
    let g = nalgebra::DMatrix::from_row_slice(p, p, &normals(&mut rng, p * p));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Sign fix so Q is Haar distributed.
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for i in 0..p {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    let mut lambda: Vec<f64> = (0..p).map(|_| rng.random_range(1.0..=cond_ratio)).collect();
    let (imin, imax) = argmin_argmax(&lambda);
    lambda[imin] = 1.0;
    let imax = if imax == imin { (imin + 1) % p } else { imax };
    lambda[imax] = cond_ratio;

    let mut sigma = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let v: f64 = (0..p).map(|k| q[(i, k)] * lambda[k] * q[(j, k)]).sum();
            sigma.set_unchecked(i, j, v);
            sigma.set_unchecked(j, i, v);
        }
    }
    Ok(sigma)
}

fn argmin_argmax(v: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[lo] {
            lo = i;
        }
        if *x > v[hi] {
            hi = i;
        }
    }
    (lo, hi)
}
