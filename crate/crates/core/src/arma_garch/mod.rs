//! ARMA(p,q) conditional-mean models with GARCH(1,1) Student-t innovations:
//! maximum-likelihood estimation, simulation and multi-horizon forecasting.
//!
//! The model for a (differenced, transformed) parameter series x_t is
//!
//! ```text
//! x_t  = μ + Σ φ_i x_{t-i} + Σ θ_j ε_{t-j} + ε_t
//! σ²_t = ω + a ε²_{t-1} + b σ²_{t-1}
//! ε_t  = σ_t z_t,   z_t ~ standardised Student-t(ν), unit variance
//! ```
//!
//! Recursions start from zero presample observations and innovations; the
//! presample conditional variance is the sample variance of the series
//! (estimation) or the stationary level ω/(1-a-b) (simulation).

mod fit;
mod forecast;
mod likelihood;
mod simulate;

pub use fit::{fit, fit_with, FitOptions};
pub use forecast::{forecast, ForecastStep};
pub use likelihood::log_likelihood;
pub use simulate::simulate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model orders: AR order `p`, MA order `q`, and whether an intercept is
/// included. At least one of the three must be present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmaGarchSpec {
    pub ar_order: usize,
    pub ma_order: usize,
    pub include_mean: bool,
}

impl ArmaGarchSpec {
    pub fn new(ar_order: usize, ma_order: usize, include_mean: bool) -> Result<Self> {
        if ar_order + ma_order == 0 && !include_mean {
            return Err(Error::invalid_input(
                "model needs at least one of: AR terms, MA terms, an intercept",
            ));
        }
        Ok(Self {
            ar_order,
            ma_order,
            include_mean,
        })
    }

    /// Number of estimated parameters including the GARCH block and the
    /// degrees of freedom.
    pub fn n_params(&self) -> usize {
        usize::from(self.include_mean) + self.ar_order + self.ma_order + 4
    }

    /// Parameter labels in estimation order.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_params());
        if self.include_mean {
            names.push("mu".to_string());
        }
        for i in 1..=self.ar_order {
            names.push(format!("phi{i}"));
        }
        for j in 1..=self.ma_order {
            names.push(format!("theta{j}"));
        }
        names.extend(["omega", "a_arch", "b_garch", "dof"].map(String::from));
        names
    }
}

/// Full coefficient set for one ARMA-GARCH-t model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaGarchParams {
    /// Intercept; ignored (and zero) when the spec has no mean.
    pub mu: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// GARCH constant, > 0.
    pub omega: f64,
    /// ARCH loading on ε²_{t-1}, ≥ 0.
    pub a_arch: f64,
    /// GARCH loading on σ²_{t-1}, ≥ 0. `a_arch + b_garch < 1`.
    pub b_garch: f64,
    /// Student-t degrees of freedom, > 2 so the innovation variance exists.
    pub dof: f64,
}

impl ArmaGarchParams {
    /// Check the parameter invariants against a model spec.
    pub fn validate(&self, spec: &ArmaGarchSpec) -> Result<()> {
        if self.phi.len() != spec.ar_order {
            return Err(Error::invalid_input(format!(
                "expected {} AR coefficients, got {}",
                spec.ar_order,
                self.phi.len()
            )));
        }
        if self.theta.len() != spec.ma_order {
            return Err(Error::invalid_input(format!(
                "expected {} MA coefficients, got {}",
                spec.ma_order,
                self.theta.len()
            )));
        }
        for v in std::iter::once(&self.mu)
            .chain(&self.phi)
            .chain(&self.theta)
            .chain([&self.omega, &self.a_arch, &self.b_garch, &self.dof])
        {
            if !v.is_finite() {
                return Err(Error::invalid_input("non-finite model parameter"));
            }
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid_input(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.a_arch < 0.0 || self.b_garch < 0.0 {
            return Err(Error::invalid_input(
                "ARCH and GARCH coefficients must be non-negative",
            ));
        }
        if self.a_arch + self.b_garch >= 1.0 {
            return Err(Error::invalid_input(format!(
                "a_arch + b_garch must be below 1 for a stationary variance, got {}",
                self.a_arch + self.b_garch
            )));
        }
        if self.dof <= 2.0 {
            return Err(Error::invalid_input(format!(
                "dof must exceed 2, got {}",
                self.dof
            )));
        }
        Ok(())
    }

    /// Flatten in estimation order (mean first when present).
    pub fn to_vec(&self, spec: &ArmaGarchSpec) -> Vec<f64> {
        let mut v = Vec::with_capacity(spec.n_params());
        if spec.include_mean {
            v.push(self.mu);
        }
        v.extend(&self.phi);
        v.extend(&self.theta);
        v.extend([self.omega, self.a_arch, self.b_garch, self.dof]);
        v
    }

    pub(crate) fn from_vec(spec: &ArmaGarchSpec, v: &[f64]) -> Self {
        debug_assert_eq!(v.len(), spec.n_params());
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
        Self {
            mu,
            phi,
            theta,
            omega: v[idx],
            a_arch: v[idx + 1],
            b_garch: v[idx + 2],
            dof: v[idx + 3],
        }
    }

    /// Stationary innovation variance ω/(1-a-b).
    pub fn unconditional_variance(&self) -> f64 {
        self.omega / (1.0 - self.a_arch - self.b_garch)
    }
}

/// A fitted model: the optimum, per-parameter standard errors when the
/// numerical Hessian is invertible, and the in-sample residual and
/// conditional-variance paths.
#[derive(Debug, Clone, Serialize)]
pub struct ArmaGarchFit {
    pub spec: ArmaGarchSpec,
    pub params: ArmaGarchParams,
    /// Standard errors in `to_vec` order; `None` when the Hessian was
    /// singular at the optimum.
    pub stderrs: Option<Vec<f64>>,
    pub loglik: f64,
    pub residuals: Vec<f64>,
    pub cond_var: Vec<f64>,
    pub n_obs: usize,
    pub converged: bool,
}

impl ArmaGarchFit {
    /// Residuals standardised by the fitted conditional volatility.
    pub fn standardized_residuals(&self) -> Vec<f64> {
        self.residuals
            .iter()
            .zip(&self.cond_var)
            .map(|(e, v)| e / v.sqrt())
            .collect()
    }
}

/// One step of the conditional-variance recursion.
#[inline]
pub(crate) fn garch_step(omega: f64, a: f64, b: f64, eps_sq_prev: f64, var_prev: f64) -> f64 {
    omega + a * eps_sq_prev + b * var_prev
}

/// First differences: `out[t] = levels[t+1] - levels[t]`.
pub fn difference(levels: &[f64]) -> Result<Vec<f64>> {
    if levels.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: levels.len(),
        });
    }
    Ok(levels.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Undo differencing on forecast means: cumulative sums anchored at the last
/// observed level.
pub fn integrate_forecast(last_level: f64, diff_means: &[f64]) -> Vec<f64> {
    diff_means
        .iter()
        .scan(last_level, |level, d| {
            *level += d;
            Some(*level)
        })
        .collect()
}

/// Bundled default models for the three transformed SABR parameter series,
/// estimated on a major-pair one-month FX options history. These drive the
/// synthetic data generator and serve as sane starting orders.
pub mod presets {
    use super::{ArmaGarchParams, ArmaGarchSpec};

    /// ARMA(1,1) with mean for Δ log α.
    pub fn alpha_model() -> (ArmaGarchSpec, ArmaGarchParams) {
        (
            ArmaGarchSpec {
                ar_order: 1,
                ma_order: 1,
                include_mean: true,
            },
            ArmaGarchParams {
                mu: -0.0002,
                phi: vec![0.9104],
                theta: vec![-0.9789],
                omega: 0.0002,
                a_arch: 0.1801,
                b_garch: 0.7807,
                dof: 3.8903,
            },
        )
    }

    /// ARMA(5,1) without mean for Δ log ν.
    ///
    /// The reference estimate's GARCH constant rounds to zero at four
    /// decimals; the generator needs a strictly positive value, so a small
    /// one consistent with that rounding is used.
    pub fn nu_model() -> (ArmaGarchSpec, ArmaGarchParams) {
        (
            ArmaGarchSpec {
                ar_order: 5,
                ma_order: 1,
                include_mean: false,
            },
            ArmaGarchParams {
                mu: 0.0,
                phi: vec![-0.1844, -0.2279, -0.2269, -0.1096, 0.2753],
                theta: vec![0.0042],
                omega: 3.0e-5,
                a_arch: 0.0317,
                b_garch: 0.9397,
                dof: 6.1987,
            },
        )
    }

    /// AR(1) with mean for Δ transformed ρ.
    pub fn rho_model() -> (ArmaGarchSpec, ArmaGarchParams) {
        (
            ArmaGarchSpec {
                ar_order: 1,
                ma_order: 0,
                include_mean: true,
            },
            ArmaGarchParams {
                mu: 0.0013,
                phi: vec![-0.0520],
                theta: vec![],
                omega: 0.0004,
                a_arch: 0.0445,
                b_garch: 0.9262,
                dof: 2.9694,
            },
        )
    }
}
