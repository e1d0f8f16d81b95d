//! Small shared numerics: ordinary least squares on dense design matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Standard errors of the coefficients under homoskedastic errors.
    pub std_errors: Vec<f64>,
    pub rss: f64,
    /// Total sum of squares of the centred response.
    pub tss: f64,
    pub n_obs: usize,
}

impl OlsFit {
    pub fn r_squared(&self) -> f64 {
        if self.tss > 0.0 {
            1.0 - self.rss / self.tss
        } else {
            0.0
        }
    }
}

/// Least squares of `y` on the rows of `x` via QR, with classical standard
/// errors from `s² (XᵀX)⁻¹`.
pub(crate) fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let n = x.nrows();
    let k = x.ncols();
    if n <= k {
        return Err(Error::InsufficientData {
            required: k + 1,
            actual: n,
        });
    }
    let qr = x.clone().qr();
    let coef = qr
        .solve(y)
        .ok_or_else(|| Error::numerical("singular regression design matrix"))?;
    let fitted = x * &coef;
    let resid = y - &fitted;
    let rss = resid.dot(&resid);
    let mean = y.mean();
    let tss = y.iter().map(|v| (v - mean) * (v - mean)).sum();

    let sigma2 = rss / (n - k) as f64;
    let xtx = x.transpose() * x;
    let xtx_inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::numerical("XᵀX not invertible"))?;
    let std_errors = (0..k)
        .map(|i| (sigma2 * xtx_inv[(i, i)]).abs().sqrt())
        .collect();

    Ok(OlsFit {
        coefficients: coef.iter().copied().collect(),
        residuals: resid.iter().copied().collect(),
        std_errors,
        rss,
        tss,
        n_obs: n,
    })
}

/// Sample mean.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
