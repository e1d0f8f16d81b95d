//! Maximum-likelihood estimation.
//!
//! The optimiser works in a reparameterised space where every constraint
//! holds automatically:
//!
//! ```text
//! ω = e^w,   a = s·u,  b = s·(1-u)  with  s = sigmoid(g₁), u = sigmoid(g₂),
//! ν = 2.1 + e^d
//! ```
//!
//! so positivity, a + b < 1 and ν > 2 (with a 2.1 floor) are structural.
//! Mean and ARMA coefficients are unconstrained. A Nelder-Mead pass is
//! refined by finite-difference BFGS; standard errors come from the inverse
//! numerical Hessian in the natural parameter space.

use nalgebra::DMatrix;

use super::likelihood::{residual_paths, scaled_t_log_pdf};
use super::{ArmaGarchFit, ArmaGarchParams, ArmaGarchSpec};
use crate::error::{Error, Result};
use crate::numeric::{self, ols, variance};
use crate::optim::{bfgs, nelder_mead, BfgsConfig, NelderMeadConfig};

/// Estimation knobs. Exposed so callers (and the CLI config) can trade
/// accuracy for speed on rolling refits.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct FitOptions {
    /// Minimum observations accepted by [`fit_with`].
    pub min_obs: usize,
    /// Simplex iteration cap.
    pub max_iter: usize,
    /// Absolute log-likelihood improvement at which iteration stops.
    pub f_tol: f64,
    /// Skip the standard-error Hessian (rolling backtests don't need it).
    pub compute_stderrs: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            min_obs: 100,
            max_iter: 2000,
            f_tol: 1e-8,
            compute_stderrs: true,
        }
    }
}

const DOF_FLOOR: f64 = 2.1;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Natural → optimiser coordinates.
fn encode(spec: &ArmaGarchSpec, params: &ArmaGarchParams) -> Vec<f64> {
    let mut v = Vec::with_capacity(spec.n_params());
    if spec.include_mean {
        v.push(params.mu);
    }
    v.extend(&params.phi);
    v.extend(&params.theta);
    v.push(params.omega.ln());
    let s = (params.a_arch + params.b_garch).clamp(1e-6, 1.0 - 1e-6);
    let u = if s > 0.0 {
        (params.a_arch / s).clamp(1e-6, 1.0 - 1e-6)
    } else {
        0.5
    };
    v.push(logit(s));
    v.push(logit(u));
    v.push((params.dof - DOF_FLOOR).max(1e-3).ln());
    v
}

/// Optimiser → natural coordinates. Total for any finite input.
fn decode(spec: &ArmaGarchSpec, v: &[f64]) -> ArmaGarchParams {
    let mut idx = 0;
    let mu = if spec.include_mean {
        idx += 1;
        v[0]
    } else {
        0.0
    };
    let phi = v[idx..idx + spec.ar_order].to_vec();
    idx += spec.ar_order;
    let theta = v[idx..idx + spec.ma_order].to_vec();
    idx += spec.ma_order;
    let omega = v[idx].clamp(-700.0, 700.0).exp();
    let s = sigmoid(v[idx + 1]);
    let u = sigmoid(v[idx + 2]);
    let dof = DOF_FLOOR + v[idx + 3].clamp(-700.0, 700.0).exp();
    ArmaGarchParams {
        mu,
        phi,
        theta,
        omega,
        a_arch: s * u,
        b_garch: s * (1.0 - u),
        dof,
    }
}

/// Warm start for the ARMA block: fit a long autoregression to proxy the
/// innovations, then regress the series on its own lags and the lagged
/// innovation proxies (Hannan-Rissanen). Falls back to zeros when the
/// regression is degenerate.
fn hannan_rissanen_init(spec: &ArmaGarchSpec, series: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let n = series.len();
    let p = spec.ar_order;
    let q = spec.ma_order;
    let fallback = (
        if spec.include_mean {
            numeric::mean(series)
        } else {
            0.0
        },
        vec![0.0; p],
        vec![0.0; q],
    );
    if p + q == 0 {
        return fallback;
    }

    let long_lag = ((n as f64).powf(1.0 / 3.0).ceil() as usize + p + q).min(n / 4).max(1);
    let rows = n - long_lag;
    let x = DMatrix::from_fn(rows, long_lag + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            series[long_lag + r - c]
        }
    });
    let y = nalgebra::DVector::from_fn(rows, |r, _| series[long_lag + r]);
    let Ok(long_ar) = ols(&x, &y) else {
        return fallback;
    };
    // innovation proxies aligned with the series (zeros before long_lag)
    let mut eps_hat = vec![0.0; n];
    for (r, e) in long_ar.residuals.iter().enumerate() {
        eps_hat[long_lag + r] = *e;
    }

    let start = long_lag.max(p).max(q);
    let rows = n - start;
    let n_cols = usize::from(spec.include_mean) + p + q;
    let x = DMatrix::from_fn(rows, n_cols, |r, c| {
        let t = start + r;
        let mut col = c;
        if spec.include_mean {
            if col == 0 {
                return 1.0;
            }
            col -= 1;
        }
        if col < p {
            series[t - col - 1]
        } else {
            eps_hat[t - (col - p) - 1]
        }
    });
    let y = nalgebra::DVector::from_fn(rows, |r, _| series[start + r]);
    let Ok(stage2) = ols(&x, &y) else {
        return fallback;
    };
    let mut coefs = stage2.coefficients.into_iter();
    let mu = if spec.include_mean {
        coefs.next().unwrap_or(0.0)
    } else {
        0.0
    };
    let phi: Vec<f64> = coefs.by_ref().take(p).collect();
    let theta: Vec<f64> = coefs.take(q).collect();
    // wild stage-2 estimates (near-singular designs) are worse than zeros
    if phi.iter().chain(&theta).any(|c| !c.is_finite() || c.abs() > 5.0) {
        return fallback;
    }
    (mu, phi, theta)
}

fn default_init(spec: &ArmaGarchSpec, series: &[f64]) -> ArmaGarchParams {
    let (mu, phi, theta) = hannan_rissanen_init(spec, series);
    ArmaGarchParams {
        mu,
        phi,
        theta,
        omega: 0.1 * variance(series).max(1e-12),
        a_arch: 0.05,
        b_garch: 0.90,
        dof: 8.0,
    }
}

fn negative_log_likelihood(params: &ArmaGarchParams, series: &[f64]) -> f64 {
    let (eps, var) = residual_paths(params, series);
    let ll: f64 = eps
        .iter()
        .zip(&var)
        .map(|(&e, &v)| scaled_t_log_pdf(e, v, params.dof))
        .sum();
    if ll.is_finite() {
        -ll
    } else {
        f64::INFINITY
    }
}

/// Fit with default [`FitOptions`].
pub fn fit(
    spec: &ArmaGarchSpec,
    series: &[f64],
    init: Option<&ArmaGarchParams>,
) -> Result<ArmaGarchFit> {
    fit_with(spec, series, init, &FitOptions::default())
}

/// Maximum-likelihood fit of the ARMA-GARCH-t model.
///
/// `init`, when given, seeds the optimiser (useful for warm-started rolling
/// refits) and must satisfy the parameter invariants. The returned
/// log-likelihood is never below the log-likelihood at the starting point.
pub fn fit_with(
    spec: &ArmaGarchSpec,
    series: &[f64],
    init: Option<&ArmaGarchParams>,
    options: &FitOptions,
) -> Result<ArmaGarchFit> {
    let floor = options.min_obs.max(spec.ar_order + spec.ma_order + 2);
    if series.len() < floor {
        return Err(Error::InsufficientData {
            required: floor,
            actual: series.len(),
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid_input("series contains non-finite values"));
    }
    if let Some(p) = init {
        p.validate(spec)?;
    }

    let warm = init.is_some();
    let init_params = match init {
        Some(p) => p.clone(),
        None => default_init(spec, series),
    };
    let x0 = encode(spec, &init_params);
    let objective = |v: &[f64]| negative_log_likelihood(&decode(spec, v), series);

    // per-block simplex steps; smaller when warm-starting near an optimum
    let scale = if warm { 0.2 } else { 1.0 };
    let mut steps = Vec::with_capacity(x0.len());
    if spec.include_mean {
        steps.push(1e-3 * scale);
    }
    steps.extend(std::iter::repeat(0.05 * scale).take(spec.ar_order + spec.ma_order));
    steps.extend([0.3 * scale, 0.3 * scale, 0.3 * scale, 0.4 * scale]);

    let nm = nelder_mead(
        objective,
        &x0,
        &steps,
        NelderMeadConfig {
            max_iter: options.max_iter,
            f_tol: options.f_tol,
        },
    );
    let polish = bfgs(
        objective,
        &nm.x,
        BfgsConfig {
            max_iter: 200,
            g_tol: 1e-7,
            f_tol: options.f_tol * 1e-2,
        },
    );
    let (best_x, best_f, converged) = if polish.fx <= nm.fx {
        (polish.x, polish.fx, nm.converged || polish.converged)
    } else {
        (nm.x.clone(), nm.fx, nm.converged)
    };
    if !converged {
        return Err(Error::NonConvergence {
            iterations: options.max_iter,
            message: format!("likelihood optimisation stalled at {best_f}"),
        });
    }

    let params = decode(spec, &best_x);
    let (residuals, cond_var) = residual_paths(&params, series);
    let loglik = -best_f;

    let stderrs = if options.compute_stderrs {
        hessian_stderrs(spec, &params, series)
    } else {
        None
    };

    Ok(ArmaGarchFit {
        spec: *spec,
        params,
        stderrs,
        loglik,
        residuals,
        cond_var,
        n_obs: series.len(),
        converged,
    })
}

/// Standard errors from the inverse numerical Hessian of -loglik in the
/// natural parameter space. `None` when the Hessian is singular or produces
/// non-positive variances.
fn hessian_stderrs(
    spec: &ArmaGarchSpec,
    params: &ArmaGarchParams,
    series: &[f64],
) -> Option<Vec<f64>> {
    let x = params.to_vec(spec);
    let k = x.len();
    let f = |v: &[f64]| {
        let p = ArmaGarchParams::from_vec(spec, v);
        if p.validate(spec).is_err() {
            return f64::INFINITY;
        }
        negative_log_likelihood(&p, series)
    };
    let h: Vec<f64> = x.iter().map(|xi| 1e-4 * xi.abs().max(1e-2)).collect();
    let f0 = f(&x);
    if !f0.is_finite() {
        return None;
    }
    let mut hess = DMatrix::zeros(k, k);
    let mut xp = x.clone();
    for i in 0..k {
        for j in i..k {
            let val = if i == j {
                xp[i] = x[i] + h[i];
                let fp = f(&xp);
                xp[i] = x[i] - h[i];
                let fm = f(&xp);
                xp[i] = x[i];
                (fp - 2.0 * f0 + fm) / (h[i] * h[i])
            } else {
                xp[i] = x[i] + h[i];
                xp[j] = x[j] + h[j];
                let fpp = f(&xp);
                xp[j] = x[j] - h[j];
                let fpm = f(&xp);
                xp[i] = x[i] - h[i];
                let fmm = f(&xp);
                xp[j] = x[j] + h[j];
                let fmp = f(&xp);
                xp[i] = x[i];
                xp[j] = x[j];
                (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
            };
            if !val.is_finite() {
                return None;
            }
            hess[(i, j)] = val;
            hess[(j, i)] = val;
        }
    }
    let cov = hess.try_inverse()?;
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let v = cov[(i, i)];
        if v <= 0.0 || !v.is_finite() {
            return None;
        }
        out.push(v.sqrt());
    }
    Some(out)
}
