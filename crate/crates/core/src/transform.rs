//! Bijection between the constrained SABR parameter space and the
//! unconstrained reals used by the time-series models.
//!
//! ```text
//! a = ln α,   n = ln ν,   r = ln((1 + ρ) / (1 - ρ))
//! ```
//!
//! The inverse maps any finite triple back into the valid domain, which is
//! what makes every forecast produce admissible parameters by construction.

use serde::{Deserialize, Serialize};

use crate::sabr::SabrParams;

/// SABR parameters mapped to the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedParams {
    pub a: f64,
    pub n: f64,
    pub r: f64,
}

// exp saturates to +inf just above 709; clamp so the inverse stays finite.
const EXP_CLAMP: f64 = 700.0;

/// Largest representable correlation strictly below 1.
const RHO_CAP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Map valid SABR parameters to the real line.
pub fn to_unconstrained(p: SabrParams) -> TransformedParams {
    TransformedParams {
        a: p.alpha().ln(),
        n: p.nu().ln(),
        // identical to ln((1+ρ)/(1-ρ)), better conditioned near ±1
        r: 2.0 * p.rho().atanh(),
    }
}

/// Map any finite real triple to valid SABR parameters:
/// `α = e^a`, `ν = e^n`, `ρ = tanh(r/2)`.
///
/// tanh avoids the overflow the ratio form suffers for large `|r|`; the
/// result is additionally capped to the largest float strictly inside
/// (-1, 1) because tanh itself rounds to ±1.0 beyond |r| ≈ 77. Exponents
/// are clamped to ±700 so the output is always finite and positive.
pub fn from_unconstrained(t: TransformedParams) -> SabrParams {
    debug_assert!(
        t.a.is_finite() && t.n.is_finite() && t.r.is_finite(),
        "from_unconstrained requires finite input, got {t:?}"
    );
    let alpha = t.a.clamp(-EXP_CLAMP, EXP_CLAMP).exp();
    let nu = t.n.clamp(-EXP_CLAMP, EXP_CLAMP).exp();
    let rho = (t.r / 2.0).tanh().clamp(-RHO_CAP, RHO_CAP);
    SabrParams::new_unchecked(alpha, nu, rho)
}
