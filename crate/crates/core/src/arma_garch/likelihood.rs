//! Conditional log-likelihood under standardised Student-t innovations.

use statrs::function::gamma::ln_gamma;

use super::{garch_step, ArmaGarchParams, ArmaGarchSpec};
use crate::error::{Error, Result};
use crate::numeric;

/// Log-density of a scaled Student-t with variance `var` and `dof > 2`
/// evaluated at `eps`:
///
/// ```text
/// ln Γ((ν+1)/2) - ln Γ(ν/2) - ½ ln(π(ν-2)var) - (ν+1)/2 · ln(1 + ε²/((ν-2)var))
/// ```
pub(crate) fn scaled_t_log_pdf(eps: f64, var: f64, dof: f64) -> f64 {
    let x = eps * eps / ((dof - 2.0) * var);
    ln_gamma((dof + 1.0) / 2.0)
        - ln_gamma(dof / 2.0)
        - 0.5 * (std::f64::consts::PI * (dof - 2.0) * var).ln()
        - (dof + 1.0) / 2.0 * x.ln_1p()
}

/// Residual and conditional-variance paths for a parameterised model.
///
/// Presample observations and innovations are zero; the presample variance
/// is the sample variance of the series, so `σ²_0 = ω + b·s²`.
pub(crate) fn residual_paths(params: &ArmaGarchParams, series: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = series.len();
    let mut eps = vec![0.0; n];
    let mut var = vec![0.0; n];
    let presample_var = if n >= 2 {
        numeric::variance(series)
    } else {
        params.unconditional_variance()
    };
    let mut prev_eps_sq = 0.0;
    let mut prev_var = presample_var;
    for t in 0..n {
        let mut mean = params.mu;
        for (i, phi) in params.phi.iter().enumerate() {
            if t > i {
                mean += phi * series[t - i - 1];
            }
        }
        for (j, theta) in params.theta.iter().enumerate() {
            if t > j {
                mean += theta * eps[t - j - 1];
            }
        }
        eps[t] = series[t] - mean;
        var[t] = garch_step(params.omega, params.a_arch, params.b_garch, prev_eps_sq, prev_var);
        prev_eps_sq = eps[t] * eps[t];
        prev_var = var[t];
    }
    (eps, var)
}

/// Full-sample conditional log-likelihood of `series` under the model.
pub fn log_likelihood(
    spec: &ArmaGarchSpec,
    params: &ArmaGarchParams,
    series: &[f64],
) -> Result<f64> {
    params.validate(spec)?;
    let min_len = spec.ar_order + spec.ma_order + 2;
    if series.len() < min_len {
        return Err(Error::InsufficientData {
            required: min_len,
            actual: series.len(),
        });
    }
    let (eps, var) = residual_paths(params, series);
    Ok(eps
        .iter()
        .zip(&var)
        .map(|(&e, &v)| scaled_t_log_pdf(e, v, params.dof))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Continuous, StudentsT};

    // mpmath reference values for the scaled-t log-density, 40 digits.
    const T_LOGPDF_GOLDEN: &[(f64, f64, f64, f64)] = &[
        // (eps, var, dof, expected)
        (0.5, 1.3, 4.2, -1.0036844938704781),
        (-1.7, 0.25, 2.5, -5.0890958574366777),
        (0.0, 2.0, 30.0, -1.2393474799153426),
        (3.2, 0.9, 6.1987, -5.4303381532249657),
    ];

    fn white_noise_spec() -> ArmaGarchSpec {
        ArmaGarchSpec {
            ar_order: 0,
            ma_order: 0,
            include_mean: true,
        }
    }

    #[test]
    fn scaled_t_matches_mpmath() {
        for &(eps, var, dof, expected) in T_LOGPDF_GOLDEN {
            let got = scaled_t_log_pdf(eps, var, dof);
            assert!(
                (got - expected).abs() < 1e-12,
                "log pdf({eps}, {var}, {dof}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn scaled_t_matches_statrs_location_scale() {
        // independent route: standardise and use the statrs t density
        for &(eps, var, dof, _) in T_LOGPDF_GOLDEN {
            let scale = (var * (dof - 2.0) / dof).sqrt();
            let t = StudentsT::new(0.0, scale, dof).unwrap();
            let reference = t.ln_pdf(eps);
            let got = scaled_t_log_pdf(eps, var, dof);
            assert!(
                (got - reference).abs() < 1e-10,
                "{got} vs statrs {reference}"
            );
        }
    }

    #[test]
    fn iid_reduction_with_flat_variance() {
        // p = q = 0, a = b = 0, zero mean: every term is the iid density at ω
        let spec = ArmaGarchSpec {
            ar_order: 0,
            ma_order: 0,
            include_mean: true,
        };
        let params = ArmaGarchParams {
            mu: 0.0,
            phi: vec![],
            theta: vec![],
            omega: 1.7,
            a_arch: 0.0,
            b_garch: 0.0,
            dof: 5.0,
        };
        let series = [0.3, -1.2, 0.7, 2.1, -0.4, 0.0, 1.5, -2.3];
        let ll = log_likelihood(&spec, &params, &series).unwrap();
        let direct: f64 = series
            .iter()
            .map(|&x| scaled_t_log_pdf(x, 1.7, 5.0))
            .sum();
        assert!((ll - direct).abs() < 1e-10);
    }

    #[test]
    fn gaussian_limit_for_large_dof() {
        let gauss = |e: f64, v: f64| -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + e * e / v);
        for &(eps, var) in &[(0.4, 1.0), (-1.3, 0.5), (2.0, 2.4)] {
            let t = scaled_t_log_pdf(eps, var, 1e6);
            assert!(
                (t - gauss(eps, var)).abs() < 1e-4,
                "dof→∞ limit broken: {t} vs {}",
                gauss(eps, var)
            );
        }
    }

    #[test]
    fn likelihood_rejects_invalid_params() {
        let spec = white_noise_spec();
        let params = ArmaGarchParams {
            mu: 0.0,
            phi: vec![],
            theta: vec![],
            omega: 1.0,
            a_arch: 0.6,
            b_garch: 0.5,
            dof: 5.0,
        };
        let series: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        assert!(log_likelihood(&spec, &params, &series).is_err());
    }

    #[test]
    fn likelihood_is_deterministic() {
        let (spec, params) = super::super::presets::alpha_model();
        let series: Vec<f64> = (0..500).map(|i| 0.01 * ((i * 37 % 97) as f64 - 48.0)).collect();
        let a = log_likelihood(&spec, &params, &series).unwrap();
        let b = log_likelihood(&spec, &params, &series).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn variance_recursion_feeds_forward() {
        // a = b = 0 makes σ²_t = ω for every t ≥ 1 and σ²_0 = ω as well
        let spec = white_noise_spec();
        let params = ArmaGarchParams {
            mu: 0.0,
            phi: vec![],
            theta: vec![],
            omega: 0.8,
            a_arch: 0.0,
            b_garch: 0.0,
            dof: 8.0,
        };
        let series = [1.0, -1.0, 2.0, 0.5, -0.5];
        let (eps, var) = residual_paths(&params, &series);
        assert_eq!(eps, series);
        assert!(var.iter().all(|&v| v == 0.8));
    }
}
