//! Multi-step conditional mean and variance forecasts.

use super::likelihood::residual_paths;
use super::{garch_step, ArmaGarchFit};
use crate::error::{Error, Result};

/// Forecast for one step ahead: the conditional mean of x and the
/// conditional variance of its innovation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ForecastStep {
    pub mean: f64,
    pub variance: f64,
}

pub const MAX_HORIZON: usize = 10;

/// Forecast `horizon` steps ahead from the end of `series`.
///
/// Means follow the ARMA recursion with future innovations set to zero;
/// variances follow the GARCH recursion with future ε² replaced by its
/// conditional expectation, i.e.
/// `σ²(t+1) = ω + a ε²_t + b σ²_t` and `σ²(t+h) = ω + (a+b) σ²(t+h-1)`.
///
/// `series` must be the sample the fit was produced on (the residual path
/// is reconstructed from it).
pub fn forecast(fit: &ArmaGarchFit, series: &[f64], horizon: usize) -> Result<Vec<ForecastStep>> {
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(Error::invalid_input(format!(
            "horizon must be in 1..={MAX_HORIZON}, got {horizon}"
        )));
    }
    if series.len() != fit.n_obs {
        return Err(Error::invalid_input(format!(
            "series length {} does not match the fitted sample size {}",
            series.len(),
            fit.n_obs
        )));
    }
    let params = &fit.params;
    let n = series.len();
    let (eps, var) = residual_paths(params, series);

    // extended observation vector: actuals then forecast means
    let mut x_ext = series.to_vec();
    let mut out = Vec::with_capacity(horizon);
    let mut prev_var = var[n - 1];
    let mut prev_eps_sq = eps[n - 1] * eps[n - 1];
    for h in 1..=horizon {
        let t = n - 1 + h; // index of the step being forecast
        let mut mean = params.mu;
        for (i, phi) in params.phi.iter().enumerate() {
            let lag = t as isize - i as isize - 1;
            if lag >= 0 {
                mean += phi * x_ext[lag as usize];
            }
        }
        for (j, theta) in params.theta.iter().enumerate() {
            let lag = t as isize - j as isize - 1;
            if lag >= 0 && (lag as usize) < n {
                mean += theta * eps[lag as usize];
            }
            // future innovations have conditional mean zero
        }
        let variance = garch_step(params.omega, params.a_arch, params.b_garch, prev_eps_sq, prev_var);
        x_ext.push(mean);
        out.push(ForecastStep { mean, variance });
        prev_var = variance;
        prev_eps_sq = variance; // E[ε²_{t}] = σ²_{t} beyond the sample
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{fit, presets, simulate, ArmaGarchParams, ArmaGarchSpec};
    use super::*;

    fn fit_of(spec: &ArmaGarchSpec, params: &ArmaGarchParams, series: &[f64]) -> ArmaGarchFit {
        // build a fit object at given parameters without optimising
        let (residuals, cond_var) = residual_paths(params, series);
        let loglik = super::super::log_likelihood(spec, params, series).unwrap();
        ArmaGarchFit {
            spec: *spec,
            params: params.clone(),
            stderrs: None,
            loglik,
            residuals,
            cond_var,
            n_obs: series.len(),
            converged: true,
        }
    }

    #[test]
    fn white_noise_forecasts_its_mean() {
        let spec = ArmaGarchSpec {
            ar_order: 0,
            ma_order: 0,
            include_mean: true,
        };
        let params = ArmaGarchParams {
            mu: 0.7,
            phi: vec![],
            theta: vec![],
            omega: 0.5,
            a_arch: 0.0,
            b_garch: 0.0,
            dof: 10.0,
        };
        let series: Vec<f64> = (0..200).map(|i| 0.7 + 0.1 * ((i % 7) as f64 - 3.0)).collect();
        let f = forecast(&fit_of(&spec, &params, &series), &series, 5).unwrap();
        for step in &f {
            assert!((step.mean - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn ar1_hand_recursion() {
        let spec = ArmaGarchSpec {
            ar_order: 1,
            ma_order: 0,
            include_mean: false,
        };
        let params = ArmaGarchParams {
            mu: 0.0,
            phi: vec![0.9],
            theta: vec![],
            omega: 0.1,
            a_arch: 0.05,
            b_garch: 0.8,
            dof: 6.0,
        };
        let mut series = vec![0.0; 150];
        series[149] = 1.0; // last observation pinned at 1
        let f = forecast(&fit_of(&spec, &params, &series), &series, 3).unwrap();
        assert!((f[0].mean - 0.9).abs() < 1e-12);
        assert!((f[1].mean - 0.81).abs() < 1e-12);
        assert!((f[2].mean - 0.729).abs() < 1e-12);
    }

    #[test]
    fn garch_variance_recursion_identity() {
        let (spec, params) = presets::alpha_model();
        let series = simulate(&spec, &params, 500, 5).unwrap();
        let f = forecast(&fit_of(&spec, &params, &series), &series, 4).unwrap();
        let ab = params.a_arch + params.b_garch;
        for h in 1..4 {
            let expected = params.omega + ab * f[h - 1].variance;
            assert!(
                (f[h].variance - expected).abs() < 1e-12,
                "σ² recursion broken at h={}",
                h + 1
            );
        }
    }

    /// Literal step-by-step oracle: extend the series one forecast at a
    /// time, recomputing the whole mean recursion from scratch.
    fn forecast_oracle(
        params: &ArmaGarchParams,
        series: &[f64],
        eps: &[f64],
        var_last: f64,
        eps_last: f64,
        horizon: usize,
    ) -> Vec<(f64, f64)> {
        let n = series.len();
        let mut xs = series.to_vec();
        let mut vars = Vec::new();
        let mut means = Vec::new();
        let mut v_prev = var_last;
        let mut e2_prev = eps_last * eps_last;
        for h in 1..=horizon {
            let t = n - 1 + h;
            let mut m = params.mu;
            for i in 0..params.phi.len() {
                if t >= i + 1 {
                    m += params.phi[i] * xs[t - i - 1];
                }
            }
            for j in 0..params.theta.len() {
                if t >= j + 1 && t - j - 1 < n {
                    m += params.theta[j] * eps[t - j - 1];
                }
            }
            let v = params.omega + params.a_arch * e2_prev + params.b_garch * v_prev;
            xs.push(m);
            means.push(m);
            vars.push(v);
            v_prev = v;
            e2_prev = v;
        }
        means.into_iter().zip(vars).collect()
    }

    #[test]
    fn matches_stepwise_oracle_across_specs() {
        let cases = [presets::alpha_model(), presets::nu_model(), presets::rho_model()];
        for (seed, (spec, params)) in cases.into_iter().enumerate() {
            let series = simulate(&spec, &params, 400, seed as u64 + 100).unwrap();
            let fitted = fit_of(&spec, &params, &series);
            let (eps, var) = residual_paths(&params, &series);
            let oracle = forecast_oracle(
                &params,
                &series,
                &eps,
                var[series.len() - 1],
                eps[series.len() - 1],
                10,
            );
            let got = forecast(&fitted, &series, 10).unwrap();
            for (g, (om, ov)) in got.iter().zip(oracle) {
                assert!((g.mean - om).abs() < 1e-12);
                assert!((g.variance - ov).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn horizon_bounds_enforced() {
        let (spec, params) = presets::rho_model();
        let series = simulate(&spec, &params, 300, 2).unwrap();
        let fitted = fit(&spec, &series, Some(&params)).unwrap();
        assert!(forecast(&fitted, &series, 0).is_err());
        assert!(forecast(&fitted, &series, 11).is_err());
        assert!(forecast(&fitted, &series, 10).is_ok());
    }
}
