use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Column means and standard deviations applied by [`standardize`].
/// Standard deviations use the sample convention (divisor n − 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizeReport {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl StandardizeReport {
    /// Applies the stored centering and scaling to new rows.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.means.len() {
            return Err(Error::DimensionMismatch(format!(
                "report has {} columns, matrix has {}",
                self.means.len(),
                x.cols()
            )));
        }
        let mut data = x.data().to_vec();
        for row in data.chunks_mut(x.cols().max(1)) {
            for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.sds) {
                *v = (*v - m) / s;
            }
        }
        Ok(DenseMatrix::from_parts(x.rows(), x.cols(), data))
    }
}

/// Centers each column and scales it to unit sample variance.
pub fn standardize(x: &DenseMatrix) -> Result<(DenseMatrix, StandardizeReport)> {
    let (n, p) = x.shape();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "standardize needs at least 2 rows, got {n}"
        )));
    }
    let mut means = vec![0.0; p];
    for i in 0..n {
        for (m, v) in means.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut ss = vec![0.0; p];
    for i in 0..n {
        for ((s, v), m) in ss.iter_mut().zip(x.row(i)).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    let mut sds = Vec::with_capacity(p);
    for (j, s) in ss.iter().enumerate() {
        let sd = (s / (n - 1) as f64).sqrt();
        // Relative test so rounding noise on a constant column still counts as zero.
        let scale = means[j].abs().max(1.0);
        if !(sd > 1e-12 * scale) {
            return Err(Error::ZeroVarianceColumn(j));
        }
        sds.push(sd);
    }
    let report = StandardizeReport { means, sds };
    let out = report.apply(x)?;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{sample_gaussian, Seed};

    fn col_var(x: &DenseMatrix, j: usize) -> (f64, f64) {
        let c = x.col(j);
        let n = c.len() as f64;
        let m = c.iter().sum::<f64>() / n;
        let v = c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn unit_variance_after_call() {
        let x = sample_gaussian(50, &DenseMatrix::identity(5).scale(3.0), Seed(8)).unwrap();
        let (z, rep) = standardize(&x).unwrap();
        for j in 0..5 {
            let (m, v) = col_var(&z, j);
            assert!(m.abs() < 1e-12);
            assert!((v - 1.0).abs() < 1e-10);
            assert!(rep.sds[j] > 0.0);
        }
    }

    #[test]
    fn standardized_input_unchanged() {
        let x = sample_gaussian(30, &DenseMatrix::identity(3), Seed(1)).unwrap();
        let (z, _) = standardize(&x).unwrap();
        let (z2, rep) = standardize(&z).unwrap();
        assert!(z2.max_abs_diff(&z) < 1e-12);
        for j in 0..3 {
            assert!(rep.means[j].abs() < 1e-12);
            assert!((rep.sds[j] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_column_rejected() {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 5.0],
            vec![2.0, 3.0, 5.0],
            vec![0.0, 1.0, 5.0],
        ])
        .unwrap();
        assert!(matches!(standardize(&x), Err(Error::ZeroVarianceColumn(2))));
    }
}
