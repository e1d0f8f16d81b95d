//! Seeded simulation of ARMA-GARCH-t paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StudentT};

use super::{garch_step, ArmaGarchParams, ArmaGarchSpec};
use crate::error::{Error, Result};

const BURN_IN: usize = 1000;

/// Simulate `n` observations, discarding a burn-in of 1000 samples.
///
/// Innovations are standardised Student-t (unit variance) scaled by the
/// GARCH conditional volatility. The variance recursion starts at its
/// stationary level ω/(1-a-b); presample observations and innovations are
/// zero and the burn-in absorbs the transient. Deterministic per seed.
pub fn simulate(
    spec: &ArmaGarchSpec,
    params: &ArmaGarchParams,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    params.validate(spec)?;
    if n == 0 {
        return Err(Error::invalid_input("simulation length must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let student = StudentT::new(params.dof)
        .map_err(|e| Error::invalid_input(format!("bad degrees of freedom: {e}")))?;
    // scale a standard t down to unit variance (dof > 2 guarantees it exists)
    let std_scale = ((params.dof - 2.0) / params.dof).sqrt();

    let total = n + BURN_IN;
    let mut xs = vec![0.0; total];
    let mut eps = vec![0.0; total];
    let mut prev_var = params.unconditional_variance();
    let mut prev_eps_sq = 0.0;
    for t in 0..total {
        let var = garch_step(params.omega, params.a_arch, params.b_garch, prev_eps_sq, prev_var);
        let z: f64 = student.sample(&mut rng) * std_scale;
        let e = var.sqrt() * z;
        let mut x = params.mu + e;
        for (i, phi) in params.phi.iter().enumerate() {
            if t > i {
                x += phi * xs[t - i - 1];
            }
        }
        for (j, theta) in params.theta.iter().enumerate() {
            if t > j {
                x += theta * eps[t - j - 1];
            }
        }
        xs[t] = x;
        eps[t] = e;
        prev_eps_sq = e * e;
        prev_var = var;
    }
    Ok(xs.split_off(BURN_IN))
}
