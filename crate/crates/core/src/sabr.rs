//! The SABR implied-volatility map (β = 1/2), smile construction over strike
//! grids, least-squares calibration from quotes, and the static-arbitrage
//! checker.
//!
//! The smile for parameters (α, ν, ρ) at forward F and maturity T is
//!
//! ```text
//!            1 + T [ α²/(96 √(FK)) + ¼·(ρνα/2)/(FK)^{1/4} + (2-3ρ²)ν²/24 ]     z
//! IV(K) = α ───────────────────────────────────────────────────────────── · ────
//!            (FK)^{1/4} [ 1 + ln²(F/K)/96 + ln⁴(F/K)/30720 ]                 x(z)
//!
//! z = (ν/α)(FK)^{1/4} ln(F/K),    x(z) = ln[ (√(1-2ρz+z²) + z - ρ) / (1-ρ) ]
//! ```
//!
//! Every valid parameter triple yields an arbitrage-free call curve away
//! from the extreme wings, which is the property the whole forecasting
//! pipeline rests on.

use serde::{Deserialize, Serialize};

use crate::error::{validate_positive, Error, Result};
use crate::market::{bs_call, MarketSnapshot, OptionQuote};
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::transform::{from_unconstrained, to_unconstrained, TransformedParams};

// Eq. coefficients as printed: 1/(4·24) on the α² and log² terms,
// 1/(16·1920) on the log⁴ term.
const C_96: f64 = 1.0 / (4.0 * 24.0);
const C_30720: f64 = 1.0 / (16.0 * 1920.0);

/// |z| below which z/x(z) switches to its Taylor series. Both branches agree
/// to ~1e-12 here; the direct quotient would divide 0/0 at z = 0.
const Z_SERIES_THRESHOLD: f64 = 1e-6;

/// Risk-neutral SABR parameters with β fixed at 1/2.
///
/// `alpha` is the instantaneous volatility level (in units of √price · vol
/// under the β = 1/2 normalisation), `nu` the vol-of-vol and `rho` the
/// spot/vol correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SabrParams {
    alpha: f64,
    nu: f64,
    rho: f64,
}

impl SabrParams {
    /// Validated constructor: `α > 0`, `ν > 0`, `-1 < ρ < 1`, all finite.
    pub fn new(alpha: f64, nu: f64, rho: f64) -> Result<Self> {
        validate_positive(alpha, "alpha")?;
        validate_positive(nu, "nu")?;
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::invalid_input(format!(
                "rho must lie strictly inside (-1, 1), got {rho}"
            )));
        }
        Ok(Self { alpha, nu, rho })
    }

    /// For callers that guarantee the invariants by construction
    /// (the unconstrained-space inverse transform).
    pub(crate) fn new_unchecked(alpha: f64, nu: f64, rho: f64) -> Self {
        debug_assert!(alpha > 0.0 && nu > 0.0 && rho.abs() < 1.0);
        Self { alpha, nu, rho }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// z/x(z) with the cancellation-free rewrite
/// `x(z) = log1p[ (z(z - 2ρ)/(√(1-2ρz+z²) + 1) + z) / (1-ρ) ]`
/// (algebraically identical to the printed form) and the Taylor series
/// `1 - ρz/2 + (2-3ρ²)z²/12` for small |z|.
fn z_over_x(z: f64, rho: f64) -> f64 {
    if z.abs() < Z_SERIES_THRESHOLD {
        1.0 - 0.5 * rho * z + (2.0 - 3.0 * rho * rho) / 12.0 * z * z
    } else {
        let disc = (1.0 - 2.0 * rho * z + z * z).sqrt();
        let x = ((z * (z - 2.0 * rho) / (disc + 1.0) + z) / (1.0 - rho)).ln_1p();
        z / x
    }
}

/// SABR implied volatility at a strike.
pub fn sabr_vol(params: SabrParams, forward: f64, strike: f64, maturity: f64) -> Result<f64> {
    validate_positive(forward, "forward")?;
    validate_positive(strike, "strike")?;
    validate_positive(maturity, "maturity")?;
    let (alpha, nu, rho) = (params.alpha, params.nu, params.rho);

    let fk = forward * strike;
    let fk_quarter = fk.sqrt().sqrt();
    let log_fk = (forward / strike).ln();

    let numerator = 1.0
        + maturity
            * (C_96 * alpha * alpha / fk.sqrt()
                + 0.25 * (rho * nu * alpha / 2.0) / fk_quarter
                + (2.0 - 3.0 * rho * rho) / 24.0 * nu * nu);
    let log_sq = log_fk * log_fk;
    let denominator = fk_quarter * (1.0 + C_96 * log_sq + C_30720 * log_sq * log_sq);
    let z = (nu / alpha) * fk_quarter * log_fk;

    Ok(alpha * numerator / denominator * z_over_x(z, rho))
}

/// One snapshot's smile: ascending strikes with their SABR implied vols and
/// the corresponding Black-Scholes call prices.
#[derive(Debug, Clone, Serialize)]
pub struct SmileGrid {
    snapshot: MarketSnapshot,
    strikes: Vec<f64>,
    vols: Vec<f64>,
    calls: Vec<f64>,
}

impl SmileGrid {
    pub fn snapshot(&self) -> &MarketSnapshot {
        &self.snapshot
    }

    pub fn strikes(&self) -> &[f64] {
        &self.strikes
    }

    pub fn vols(&self) -> &[f64] {
        &self.vols
    }

    pub fn calls(&self) -> &[f64] {
        &self.calls
    }

    pub fn len(&self) -> usize {
        self.strikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strikes.is_empty()
    }
}

/// Evaluate the smile on a strike grid and price each strike.
///
/// Strikes must be positive and strictly increasing.
pub fn build_smile(
    params: SabrParams,
    snapshot: &MarketSnapshot,
    strikes: &[f64],
) -> Result<SmileGrid> {
    if strikes.is_empty() {
        return Err(Error::invalid_input("strike grid is empty"));
    }
    for w in strikes.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid_input(format!(
                "strikes must be strictly increasing, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    let forward = snapshot.forward();
    let maturity = snapshot.maturity();
    let mut vols = Vec::with_capacity(strikes.len());
    let mut calls = Vec::with_capacity(strikes.len());
    for &strike in strikes {
        let vol = sabr_vol(params, forward, strike, maturity)?;
        vols.push(vol);
        calls.push(bs_call(forward, strike, maturity, vol, snapshot.rate_dom())?);
    }
    Ok(SmileGrid {
        snapshot: *snapshot,
        strikes: strikes.to_vec(),
        vols,
        calls,
    })
}

/// Equally spaced strike grid covering `[lo_frac, hi_frac] · spot`,
/// endpoints included.
pub fn strike_grid(spot: f64, lo_frac: f64, hi_frac: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi_frac > lo_frac && spot > 0.0);
    (0..n)
        .map(|i| spot * (lo_frac + (hi_frac - lo_frac) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Outcome of the static no-arbitrage scan of a call-price curve.
///
/// An arbitrage-free curve is non-increasing and convex in strike.
/// `monotonicity_violations` holds the offending adjacent index pairs,
/// `convexity_violations` the offending triples, and `max_violation` the
/// largest overshoot in price units (0 when the curve is clean).
#[derive(Debug, Clone, Default, Serialize)]
pub struct ArbitrageReport {
    pub monotonicity_violations: Vec<[usize; 2]>,
    pub convexity_violations: Vec<[usize; 3]>,
    pub max_violation: f64,
}

impl ArbitrageReport {
    pub fn is_clean(&self) -> bool {
        self.monotonicity_violations.is_empty() && self.convexity_violations.is_empty()
    }
}

/// Scan a raw call curve. Monotonicity flags `calls[i+1] > calls[i] + tol`;
/// convexity flags triples where the mid price exceeds the chord through its
/// neighbours by more than `tol` (for an even grid this is half the negative
/// second difference). Weak inequalities pass: a linear curve is clean.
pub(crate) fn check_call_curve(strikes: &[f64], calls: &[f64], tol: f64) -> ArbitrageReport {
    let mut report = ArbitrageReport::default();
    for i in 0..calls.len().saturating_sub(1) {
        let excess = calls[i + 1] - calls[i];
        if excess > tol {
            report.monotonicity_violations.push([i, i + 1]);
            report.max_violation = report.max_violation.max(excess);
        }
    }
    for i in 1..calls.len().saturating_sub(1) {
        let lambda = (strikes[i + 1] - strikes[i]) / (strikes[i + 1] - strikes[i - 1]);
        let chord = lambda * calls[i - 1] + (1.0 - lambda) * calls[i + 1];
        let excess = calls[i] - chord;
        if excess > tol {
            report.convexity_violations.push([i - 1, i, i + 1]);
            report.max_violation = report.max_violation.max(excess);
        }
    }
    report
}

/// Verify the grid's call curve is statically arbitrage-free.
///
/// The tolerance is `1e-10 ·` forward, i.e. violations below a tenth of a
/// nano-forward are treated as rounding noise. Needs at least three strikes.
pub fn check_static_arbitrage(grid: &SmileGrid) -> Result<ArbitrageReport> {
    if grid.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            actual: grid.len(),
        });
    }
    let tol = 1e-10 * grid.snapshot.forward();
    Ok(check_call_curve(&grid.strikes, &grid.calls, tol))
}

const CALIBRATE_MAX_ITER: usize = 500;
const CALIBRATE_F_TOL: f64 = 1e-14;
const GAUSS_NEWTON_MAX_ITER: usize = 60;

/// Fit SABR parameters to implied-vol quotes by unweighted least squares in
/// vol space.
///
/// The search runs in the unconstrained coordinates of
/// [`crate::transform`], so the result satisfies the parameter constraints
/// by construction: Nelder-Mead first, then a damped Gauss-Newton polish
/// with finite-difference Jacobian. The returned objective never exceeds the
/// objective at `initial`.
pub fn calibrate(
    quotes: &[OptionQuote],
    snapshot: &MarketSnapshot,
    initial: SabrParams,
) -> Result<SabrParams> {
    if quotes.len() < 3 {
        return Err(Error::invalid_input(format!(
            "calibration needs at least 3 quotes, got {}",
            quotes.len()
        )));
    }
    let mut strikes: Vec<f64> = quotes.iter().map(|q| q.strike()).collect();
    strikes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in strikes.windows(2) {
        if w[0] == w[1] {
            return Err(Error::invalid_input(format!(
                "degenerate quotes: strike {} appears more than once",
                w[0]
            )));
        }
    }

    let forward = snapshot.forward();
    let maturity = snapshot.maturity();
    let residuals = |t: &[f64]| -> Vec<f64> {
        let p = from_unconstrained(TransformedParams {
            a: t[0],
            n: t[1],
            r: t[2],
        });
        quotes
            .iter()
            .map(|q| {
                sabr_vol(p, forward, q.strike(), maturity)
                    .map(|v| v - q.implied_vol())
                    .unwrap_or(f64::INFINITY)
            })
            .collect()
    };
    let objective = |t: &[f64]| -> f64 { residuals(t).iter().map(|r| r * r).sum() };

    let t0 = to_unconstrained(initial);
    let x0 = [t0.a, t0.n, t0.r];
    let f0 = objective(&x0);

    let nm = nelder_mead(
        objective,
        &x0,
        &[0.1, 0.1, 0.1],
        NelderMeadConfig {
            max_iter: CALIBRATE_MAX_ITER,
            f_tol: CALIBRATE_F_TOL,
        },
    );

    // Damped Gauss-Newton polish to push the coordinates to full accuracy.
    let mut x = nm.x.clone();
    let mut fx = nm.fx;
    let mut lambda = 1e-8;
    let mut stalled = false;
    for _ in 0..GAUSS_NEWTON_MAX_ITER {
        let r = residuals(&x);
        let m = r.len();
        let mut jac = vec![[0.0f64; 3]; m];
        for j in 0..3 {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let rp = residuals(&xp);
            xp[j] = x[j] - h;
            let rm = residuals(&xp);
            for i in 0..m {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = nalgebra::Matrix3::<f64>::zeros();
        let mut jtr = nalgebra::Vector3::<f64>::zeros();
        for i in 0..m {
            for a in 0..3 {
                jtr[a] += jac[i][a] * r[i];
                for b in 0..3 {
                    jtj[(a, b)] += jac[i][a] * jac[i][b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..8 {
            let mut damped = jtj;
            for a in 0..3 {
                damped[(a, a)] += lambda * (1.0 + jtj[(a, a)]);
            }
            let Some(delta) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let cand = [x[0] + delta[0], x[1] + delta[1], x[2] + delta[2]];
            let f_cand = objective(&cand);
            if f_cand < fx {
                x = cand.to_vec();
                fx = f_cand;
                lambda = (lambda * 0.1).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            stalled = true;
            break;
        }
    }

    if !nm.converged && !stalled && fx > CALIBRATE_F_TOL && fx > f0 * 1e-10 {
        return Err(Error::NonConvergence {
            iterations: CALIBRATE_MAX_ITER,
            message: format!("calibration objective stuck at {fx}"),
        });
    }

    debug_assert!(fx <= f0 + 1e-15);
    Ok(from_unconstrained(TransformedParams {
        a: x[0],
        n: x[1],
        r: x[2],
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::implied_vol;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Golden values for the β=1/2 formula, from an independent straight-line
    // transcription evaluated with mpmath at 40 digits.
    const GOLDEN: &[(f64, f64, f64, f64, f64, f64, f64)] = &[
        // (forward, strike, maturity, alpha, nu, rho, expected_vol)
        (100.0, 90.0, 1.0 / 12.0, 1.0, 0.5, -0.2, 0.11163419907596007),
        (100.0, 105.0, 1.0 / 12.0, 1.2, 0.6, -0.3, 0.11550584189712748),
        (100.0, 110.0, 0.5, 0.8, 0.9, 0.4, 0.10447388799962739),
        (80.0, 76.0, 1.0 / 12.0, 0.9, 0.4, -0.1, 0.10370883564795292),
        (1.0, 0.95, 0.25, 0.1, 0.8, -0.5, 0.11364497573644737),
    ];

    fn p(alpha: f64, nu: f64, rho: f64) -> SabrParams {
        SabrParams::new(alpha, nu, rho).unwrap()
    }

    /// ATM reduction of the smile formula, written out independently.
    fn atm_closed_form(params: SabrParams, f: f64, t: f64) -> f64 {
        let (a, n, r) = (params.alpha(), params.nu(), params.rho());
        a * (1.0
            + t * (a * a / (96.0 * f) + r * n * a / (8.0 * f.sqrt()) + (2.0 - 3.0 * r * r) / 24.0 * n * n))
            / f.sqrt()
    }

    fn random_params(rng: &mut ChaCha8Rng) -> SabrParams {
        p(
            rng.random_range(0.1..3.0),
            rng.random_range(0.05..2.0),
            rng.random_range(-0.95..0.95),
        )
    }

    // --- parameter validation ---

    #[test]
    fn params_validation() {
        assert!(SabrParams::new(1.0, 0.5, 0.0).is_ok());
        assert!(SabrParams::new(0.0, 0.5, 0.0).is_err());
        assert!(SabrParams::new(1.0, 0.0, 0.0).is_err());
        assert!(SabrParams::new(1.0, 0.5, 1.0).is_err());
        assert!(SabrParams::new(1.0, 0.5, -1.0).is_err());
        assert!(SabrParams::new(f64::NAN, 0.5, 0.0).is_err());
        assert!(SabrParams::new(1.0, 0.5, f64::NAN).is_err());
    }

    // --- formula constants pinned as printed ---

    #[test]
    fn printed_constants() {
        assert_eq!(C_96, 1.0 / 96.0);
        assert_eq!(C_96, 1.0 / (4.0 * 24.0));
        assert_eq!(C_30720, 1.0 / 30720.0);
        assert_eq!(C_30720, 1.0 / (16.0 * 1920.0));
    }

    // --- golden values ---

    #[test]
    fn golden_transcription_values() {
        for &(f, k, t, a, n, r, expected) in GOLDEN {
            let v = sabr_vol(p(a, n, r), f, k, t).unwrap();
            assert!(
                (v - expected).abs() < 1e-10,
                "sabr_vol(F={f}, K={k}) = {v}, expected {expected}"
            );
        }
    }

    #[test]
    fn near_zero_nu_reduces_to_level_term() {
        // ATM with ν ≈ 0: only the α²/(96F) correction survives
        let v = sabr_vol(p(0.1, 1e-12, 0.0), 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, 0.1 * (1.0 + 0.01 / 96.0), max_relative = 1e-12);
    }

    // --- ATM limit ---

    #[test]
    fn atm_matches_closed_form_on_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let params = random_params(&mut rng);
            let f = rng.random_range(0.5..200.0);
            let t = rng.random_range(0.01..2.0);
            let direct = sabr_vol(params, f, f, t).unwrap();
            let closed = atm_closed_form(params, f, t);
            assert!(
                (direct - closed).abs() < 1e-12 * closed.max(1.0),
                "ATM mismatch: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn atm_increasing_in_alpha_for_zero_rho() {
        let f = 100.0;
        let mut last = 0.0;
        for i in 1..=50 {
            let alpha = 2.0 * f.sqrt() * i as f64 / 50.0;
            let v = sabr_vol(p(alpha, 0.5, 1e-9), f, f, 1.0).unwrap();
            assert!(v > last, "not increasing at alpha={alpha}");
            last = v;
        }
    }

    // --- series switch ---

    #[test]
    fn z_ratio_branches_agree_at_threshold() {
        for &rho in &[-0.9, -0.5, -0.2, 0.0, 0.3, 0.7, 0.95] {
            for &z in &[Z_SERIES_THRESHOLD, -Z_SERIES_THRESHOLD] {
                let series = 1.0 - 0.5 * rho * z + (2.0 - 3.0 * rho * rho) / 12.0 * z * z;
                let disc = (1.0f64 - 2.0 * rho * z + z * z).sqrt();
                let direct = z / ((z * (z - 2.0 * rho) / (disc + 1.0) + z) / (1.0 - rho)).ln_1p();
                assert!(
                    (series - direct).abs() < 1e-10,
                    "branch gap {} at rho={rho}, z={z}",
                    (series - direct).abs()
                );
            }
        }
    }

    #[test]
    fn smile_continuous_through_atm() {
        let params = p(1.0, 0.6, -0.3);
        let f = 100.0;
        let v_atm = sabr_vol(params, f, f, 0.25).unwrap();
        for &eps in &[1e-3, 1e-6, 1e-9] {
            let up = sabr_vol(params, f, f * (1.0 + eps), 0.25).unwrap();
            let dn = sabr_vol(params, f, f * (1.0 - eps), 0.25).unwrap();
            assert!((up - v_atm).abs() < 1.0 * eps + 1e-12);
            assert!((dn - v_atm).abs() < 1.0 * eps + 1e-12);
        }
    }

    // --- build_smile ---

    #[test]
    fn single_atm_strike_grid() {
        let snap = MarketSnapshot::new(100.0, 0.0, 0.0, 0.5).unwrap();
        let params = p(1.1, 0.4, 0.1);
        let grid = build_smile(params, &snap, &[100.0]).unwrap();
        assert_eq!(grid.len(), 1);
        assert_relative_eq!(
            grid.vols()[0],
            atm_closed_form(params, 100.0, 0.5),
            max_relative = 1e-12
        );
    }

    #[test]
    fn forty_strike_grid_spacing() {
        let strikes = strike_grid(100.0, 0.9, 1.1, 40);
        assert_eq!(strikes.len(), 40);
        assert_eq!(strikes[0], 90.0);
        assert_relative_eq!(strikes[39], 110.0, max_relative = 1e-15);
        let step = strikes[1] - strikes[0];
        for w in strikes.windows(2) {
            assert_relative_eq!(w[1] - w[0], step, max_relative = 1e-9);
        }
    }

    #[test]
    fn grid_prices_round_trip_through_implied_vol() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let snap = MarketSnapshot::new(100.0, 0.02, 0.005, 1.0 / 12.0).unwrap();
        let params = random_params(&mut rng);
        let grid = build_smile(params, &snap, &strike_grid(100.0, 0.9, 1.1, 40)).unwrap();
        let f = snap.forward();
        for i in 0..grid.len() {
            let recovered = implied_vol(
                grid.calls()[i],
                f,
                grid.strikes()[i],
                snap.maturity(),
                snap.rate_dom(),
            )
            .unwrap();
            assert!((recovered - grid.vols()[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn build_smile_rejects_unsorted_strikes() {
        let snap = MarketSnapshot::new(100.0, 0.0, 0.0, 0.5).unwrap();
        assert!(build_smile(p(1.0, 0.5, 0.0), &snap, &[100.0, 90.0]).is_err());
        assert!(build_smile(p(1.0, 0.5, 0.0), &snap, &[90.0, 90.0]).is_err());
        assert!(build_smile(p(1.0, 0.5, 0.0), &snap, &[]).is_err());
    }

    // --- static arbitrage ---

    #[test]
    fn random_smiles_inside_band_are_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let snap = MarketSnapshot::new(100.0, 0.02, 0.01, 1.0 / 12.0).unwrap();
        let strikes = strike_grid(100.0, 0.9, 1.1, 40);
        for _ in 0..300 {
            let params = random_params(&mut rng);
            let grid = build_smile(params, &snap, &strikes).unwrap();
            let report = check_static_arbitrage(&grid).unwrap();
            assert!(
                report.is_clean(),
                "violations for {params:?}: {report:?}"
            );
        }
    }

    #[test]
    fn corrupted_grid_flags_exactly_one_convexity_triple() {
        let snap = MarketSnapshot::new(100.0, 0.0, 0.0, 1.0 / 12.0).unwrap();
        let grid = build_smile(p(1.0, 0.5, -0.2), &snap, &strike_grid(100.0, 0.9, 1.1, 40)).unwrap();
        let mut calls = grid.calls().to_vec();
        let bump_at = 20;
        calls[bump_at] += 0.01 * snap.forward();
        let report = check_call_curve(grid.strikes(), &calls, 1e-10 * snap.forward());
        assert_eq!(
            report.convexity_violations,
            vec![[bump_at - 1, bump_at, bump_at + 1]]
        );
        assert!(report.max_violation > 0.0);
    }

    #[test]
    fn linear_call_curve_is_clean() {
        let strikes: Vec<f64> = (0..20).map(|i| 50.0 + i as f64).collect();
        let calls: Vec<f64> = strikes.iter().map(|k| 100.0 - 0.8 * k).collect();
        let report = check_call_curve(&strikes, &calls, 1e-10);
        assert!(report.is_clean());
        assert_eq!(report.max_violation, 0.0);
    }

    #[test]
    fn arbitrage_check_needs_three_strikes() {
        let snap = MarketSnapshot::new(100.0, 0.0, 0.0, 0.5).unwrap();
        let grid = build_smile(p(1.0, 0.5, 0.0), &snap, &[90.0, 110.0]).unwrap();
        assert!(matches!(
            check_static_arbitrage(&grid),
            Err(Error::InsufficientData { required: 3, .. })
        ));
    }

    // --- calibration ---

    fn quotes_from(params: SabrParams, snap: &MarketSnapshot, strikes: &[f64]) -> Vec<OptionQuote> {
        let f = snap.forward();
        strikes
            .iter()
            .map(|&k| {
                OptionQuote::new(k, sabr_vol(params, f, k, snap.maturity()).unwrap()).unwrap()
            })
            .collect()
    }

    #[test]
    fn calibration_round_trip_recovers_parameters() {
        let snap = MarketSnapshot::new(100.0, 0.02, 0.005, 1.0 / 12.0).unwrap();
        let truth = p(1.2, 0.6, -0.3);
        let strikes = strike_grid(100.0, 0.9, 1.1, 7);
        let quotes = quotes_from(truth, &snap, &strikes);
        let initial = p(1.2 * 1.2, 0.6 * 1.2, -0.3 * 1.2);
        let fitted = calibrate(&quotes, &snap, initial).unwrap();
        assert!((fitted.alpha() - 1.2).abs() < 1e-6, "alpha {}", fitted.alpha());
        assert!((fitted.nu() - 0.6).abs() < 1e-6, "nu {}", fitted.nu());
        assert!((fitted.rho() + 0.3).abs() < 1e-6, "rho {}", fitted.rho());
    }

    #[test]
    fn calibration_flat_smile_recovers_alpha() {
        let snap = MarketSnapshot::new(100.0, 0.0, 0.0, 1.0 / 12.0).unwrap();
        let truth = SabrParams::new(1.0, 1e-9, 0.0).unwrap();
        let strikes = [95.0, 100.0, 105.0];
        let quotes = quotes_from(truth, &snap, &strikes);
        let fitted = calibrate(&quotes, &snap, p(0.8, 0.05, 0.1)).unwrap();
        assert!((fitted.alpha() - 1.0).abs() < 1e-6, "alpha {}", fitted.alpha());
        assert!(fitted.nu() < 0.05, "nu should fall toward zero, got {}", fitted.nu());
    }

    #[test]
    fn calibration_from_optimum_is_fixed_point() {
        let snap = MarketSnapshot::new(100.0, 0.01, 0.03, 1.0 / 12.0).unwrap();
        let truth = p(0.9, 0.5, 0.25);
        let strikes = strike_grid(100.0, 0.92, 1.08, 9);
        let quotes = quotes_from(truth, &snap, &strikes);
        let fitted = calibrate(&quotes, &snap, truth).unwrap();
        assert!((fitted.alpha() - truth.alpha()).abs() < 1e-9);
        assert!((fitted.nu() - truth.nu()).abs() < 1e-9);
        assert!((fitted.rho() - truth.rho()).abs() < 1e-9);
    }

    #[test]
    fn calibration_rejects_degenerate_quotes() {
        let snap = MarketSnapshot::new(100.0, 0.0, 0.0, 0.5).unwrap();
        let q = OptionQuote::new(100.0, 0.1).unwrap();
        assert!(calibrate(&[q, q], &snap, p(1.0, 0.5, 0.0)).is_err());
        let dup = vec![
            OptionQuote::new(90.0, 0.11).unwrap(),
            OptionQuote::new(90.0, 0.12).unwrap(),
            OptionQuote::new(110.0, 0.10).unwrap(),
        ];
        assert!(calibrate(&dup, &snap, p(1.0, 0.5, 0.0)).is_err());
    }

    #[test]
    fn calibration_identifiability_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let snap = MarketSnapshot::new(100.0, 0.015, 0.002, 1.0 / 12.0).unwrap();
        let strikes = strike_grid(100.0, 0.9, 1.1, 5);
        for _ in 0..10 {
            let truth = p(
                rng.random_range(0.4..2.0),
                rng.random_range(0.2..1.2),
                rng.random_range(-0.7..0.7),
            );
            let quotes = quotes_from(truth, &snap, &strikes);
            let initial = p(
                truth.alpha() * rng.random_range(0.7..1.4),
                truth.nu() * rng.random_range(0.7..1.4),
                (truth.rho() + rng.random_range(-0.15..0.15)).clamp(-0.9, 0.9),
            );
            let fitted = calibrate(&quotes, &snap, initial).unwrap();
            assert!((fitted.alpha() - truth.alpha()).abs() < 1e-6);
            assert!((fitted.nu() - truth.nu()).abs() < 1e-6);
            assert!((fitted.rho() - truth.rho()).abs() < 1e-6);
        }
    }
}
