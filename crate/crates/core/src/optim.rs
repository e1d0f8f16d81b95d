//! Small derivative-free optimisers shared by the SABR calibration and the
//! ARMA-GARCH maximum-likelihood fit.
//!
//! Both routines are deterministic: no randomised restarts, no
//! time-dependent state, so identical inputs give identical optima.

/// Outcome of a minimisation run.
#[derive(Debug, Clone)]
pub(crate) struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NelderMeadConfig {
    pub max_iter: usize,
    /// Absolute spread of objective values across the simplex at which the
    /// search stops.
    pub f_tol: f64,
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Nelder-Mead downhill simplex with standard coefficients
/// (reflect 1, expand 2, contract 1/2, shrink 1/2).
pub(crate) fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    cfg: NelderMeadConfig,
) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(step.len(), dim);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let fx0 = finite_or_inf(f(x0));
    simplex.push((x0.to_vec(), fx0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += if step[i] != 0.0 { step[i] } else { 1e-4 };
        let fx = finite_or_inf(f(&x));
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= cfg.f_tol && worst.is_finite() {
            converged = true;
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let worst_x = simplex[dim].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflect = finite_or_inf(f(&reflect));

        if f_reflect < simplex[0].1 {
            // try to expand further in the same direction
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expand = finite_or_inf(f(&expand));
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
            continue;
        }
        if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
            continue;
        }

        // contract toward the better of (worst, reflected)
        let (anchor, f_anchor) = if f_reflect < simplex[dim].1 {
            (&reflect, f_reflect)
        } else {
            (&worst_x, simplex[dim].1)
        };
        let contract: Vec<f64> = centroid
            .iter()
            .zip(anchor)
            .map(|(c, a)| c + 0.5 * (a - c))
            .collect();
        let f_contract = finite_or_inf(f(&contract));
        if f_contract < f_anchor {
            simplex[dim] = (contract, f_contract);
            continue;
        }

        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best_x) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *fx = finite_or_inf(f(x));
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    OptimResult {
        x: simplex[0].0.clone(),
        fx: simplex[0].1,
        iterations,
        converged,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BfgsConfig {
    pub max_iter: usize,
    pub g_tol: f64,
    pub f_tol: f64,
}

impl Default for BfgsConfig {
    fn default() -> Self {
        Self {
            max_iter: 200,
            g_tol: 1e-7,
            f_tol: 1e-12,
        }
    }
}

pub(crate) fn central_gradient<F>(f: &mut F, x: &[f64]) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1.0);
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// BFGS with central-difference gradients and a backtracking Armijo line
/// search. Used to polish a simplex optimum; falls back gracefully (keeps
/// the best point seen) when the surface is too flat for the finite
/// differences to help.
pub(crate) fn bfgs<F>(mut f: F, x0: &[f64], cfg: BfgsConfig) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut fx = finite_or_inf(f(&x));
    let mut h_inv: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut g = central_gradient(&mut f, &x);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        iterations += 1;
        if g.iter().all(|gi| gi.abs() <= cfg.g_tol) {
            converged = true;
            break;
        }
        // d = -H g
        let mut d = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                d[i] -= h_inv[i][j] * g[j];
            }
        }
        let slope: f64 = d.iter().zip(&g).map(|(di, gi)| di * gi).sum();
        if slope >= 0.0 {
            // not a descent direction; reset the Hessian approximation
            for i in 0..dim {
                for j in 0..dim {
                    h_inv[i][j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            for (di, gi) in d.iter_mut().zip(&g) {
                *di = -gi;
            }
        }
        let slope: f64 = d.iter().zip(&g).map(|(di, gi)| di * gi).sum();

        let mut t = 1.0;
        let mut x_new = x.clone();
        let mut f_new = f64::INFINITY;
        let mut ok = false;
        for _ in 0..50 {
            for i in 0..dim {
                x_new[i] = x[i] + t * d[i];
            }
            f_new = finite_or_inf(f(&x_new));
            if f_new <= fx + 1e-4 * t * slope {
                ok = true;
                break;
            }
            t *= 0.5;
        }
        if !ok || !f_new.is_finite() {
            break;
        }
        let improvement = fx - f_new;
        let g_new = central_gradient(&mut f, &x_new);

        // BFGS update on the inverse Hessian
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let rho = 1.0 / sy;
            // H' = (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            let mut hy = vec![0.0; dim];
            for i in 0..dim {
                for j in 0..dim {
                    hy[i] += h_inv[i][j] * y[j];
                }
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..dim {
                for j in 0..dim {
                    h_inv[i][j] += (sy + yhy) * rho * rho * s[i] * s[j]
                        - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        if improvement.abs() <= cfg.f_tol {
            converged = true;
            break;
        }
    }

    OptimResult {
        x,
        fx,
        iterations,
        converged,
    }
}
