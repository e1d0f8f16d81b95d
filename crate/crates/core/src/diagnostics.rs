//! Model-building diagnostics: sample (partial) autocorrelations, the
//! augmented Dickey-Fuller unit-root test, Engle's ARCH-LM test and
//! information criteria.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::numeric::ols;

/// Critical thresholds at the conventional levels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub pct1: f64,
    #[serde(rename = "5%")]
    pub pct5: f64,
    #[serde(rename = "10%")]
    pub pct10: f64,
}

/// A test statistic with its critical values and the 5%-level decision.
/// The rejection direction (left or right tail) is the respective test's.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub critical_values: CriticalValues,
    pub reject: bool,
}

/// Sample autocorrelation function for lags `0..=max_lag` (lag 0 is 1).
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 || max_lag >= n / 2 {
        return Err(Error::InsufficientData {
            required: (max_lag + 1) * 2,
            actual: n,
        });
    }
    let mean = crate::numeric::mean(series);
    let denom: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom <= 0.0 {
        return Err(Error::numerical(
            "series has zero variance; autocorrelation undefined",
        ));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let num: f64 = (0..n - k)
            .map(|t| (series[t] - mean) * (series[t + k] - mean))
            .sum();
        out.push(num / denom);
    }
    Ok(out)
}

/// Sample partial autocorrelations for lags `0..=max_lag` via the
/// Durbin-Levinson recursion (index 0 is 1 so indices line up with [`acf`];
/// `pacf[1] == acf[1]` by construction).
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let r = acf(series, max_lag)?;
    let mut out = vec![1.0];
    if max_lag == 0 {
        return Ok(out);
    }
    let mut prev = vec![r[1]];
    out.push(r[1]);
    for k in 2..=max_lag {
        let num = r[k] - (1..k).map(|j| prev[j - 1] * r[k - j]).sum::<f64>();
        let den = 1.0 - (1..k).map(|j| prev[j - 1] * r[j]).sum::<f64>();
        let phi_kk = if den.abs() > 1e-14 { num / den } else { 0.0 };
        let mut next = vec![0.0; k];
        for j in 1..k {
            next[j - 1] = prev[j - 1] - phi_kk * prev[k - j - 1];
        }
        next[k - 1] = phi_kk;
        out.push(phi_kk);
        prev = next;
    }
    Ok(out)
}

/// Large-sample Dickey-Fuller critical values for the constant-only
/// regression. Fixed table; no response-surface interpolation.
pub const ADF_CRITICAL_VALUES: CriticalValues = CriticalValues {
    pct1: -3.43,
    pct5: -2.86,
    pct10: -2.57,
};

/// Default augmentation order `⌊(n-1)^{1/3}⌋`.
pub fn adf_default_lags(n: usize) -> usize {
    ((n.saturating_sub(1)) as f64).powf(1.0 / 3.0).floor() as usize
}

/// Augmented Dickey-Fuller test with a constant and no trend.
///
/// Regresses `Δy_t` on `[1, y_{t-1}, Δy_{t-1}, ..., Δy_{t-n_lags}]` and
/// compares the t-statistic of the `y_{t-1}` coefficient against the fixed
/// critical table. The unit-root null is rejected (left tail) when the
/// statistic falls below the 5% value.
pub fn adf_test(series: &[f64], n_lags: usize) -> Result<TestResult> {
    let n = series.len();
    if n <= n_lags + 10 {
        return Err(Error::InsufficientData {
            required: n_lags + 11,
            actual: n,
        });
    }
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // rows t = n_lags+1 .. n-1 in level indexing
    let rows = n - 1 - n_lags;
    let cols = 2 + n_lags;
    let x = DMatrix::from_fn(rows, cols, |r, c| {
        let t = n_lags + 1 + r; // level index of the response Δy_t
        match c {
            0 => 1.0,
            1 => series[t - 1],
            _ => dy[t - 1 - (c - 1)], // Δy_{t-(c-1)}
        }
    });
    let y = DVector::from_fn(rows, |r, _| dy[n_lags + r]);
    let fit = ols(&x, &y)?;
    let se = fit.std_errors[1];
    if !(se > 0.0) {
        return Err(Error::numerical("degenerate ADF regression"));
    }
    let statistic = fit.coefficients[1] / se;
    Ok(TestResult {
        statistic,
        critical_values: ADF_CRITICAL_VALUES,
        reject: statistic < ADF_CRITICAL_VALUES.pct5,
    })
}

/// Engle's ARCH-LM test: `T·R²` from regressing squared residuals on their
/// own `n_lags` lags, against χ²(n_lags) critical values (right tail).
pub fn arch_lm_test(residuals: &[f64], n_lags: usize) -> Result<TestResult> {
    let n = residuals.len();
    if n_lags == 0 {
        return Err(Error::invalid_input("ARCH test needs at least one lag"));
    }
    if n <= n_lags + 10 {
        return Err(Error::InsufficientData {
            required: n_lags + 11,
            actual: n,
        });
    }
    let sq: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let rows = n - n_lags;
    let x = DMatrix::from_fn(rows, n_lags + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            sq[n_lags + r - c]
        }
    });
    let y = DVector::from_fn(rows, |r, _| sq[n_lags + r]);
    let fit = ols(&x, &y)?;
    let statistic = rows as f64 * fit.r_squared();
    let chi2 = ChiSquared::new(n_lags as f64)
        .map_err(|e| Error::numerical(format!("chi-squared setup failed: {e}")))?;
    let critical_values = CriticalValues {
        pct1: chi2.inverse_cdf(0.99),
        pct5: chi2.inverse_cdf(0.95),
        pct10: chi2.inverse_cdf(0.90),
    };
    Ok(TestResult {
        statistic,
        critical_values,
        reject: statistic > critical_values.pct5,
    })
}

/// `AIC = -2·loglik + 2k`, `BIC = -2·loglik + k·ln(n)`.
pub fn information_criteria(loglik: f64, k_params: usize, n_obs: usize) -> (f64, f64) {
    assert!(n_obs > 0, "information criteria need n_obs > 0");
    let k = k_params as f64;
    (
        -2.0 * loglik + 2.0 * k,
        -2.0 * loglik + k * (n_obs as f64).ln(),
    )
}
