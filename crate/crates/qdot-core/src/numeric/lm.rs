//! Levenberg–Marquardt nonlinear least squares with numeric Jacobians,
//! optional box bounds, and covariance from the local quadratic model.
//!
//! Sized for the fit problems in this crate: a handful of parameters against
//! up to a few thousand residuals. Residual weighting is the caller's job
//! (fold 1/σ into the residual function).

use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{invert_spd, solve_spd};

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative decrease of the sum of squares below which we stop.
    pub ftol: f64,
    /// Step size (relative to parameter magnitude) below which we stop.
    pub xtol: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            ftol: 1e-12,
            xtol: 1e-10,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmFit {
    pub params: Vec<f64>,
    /// Final sum of squared residuals.
    pub rss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// (JᵀJ)⁻¹ at the solution, row-major; multiply by rss/(m−n) for the
    /// parameter covariance of an unweighted fit. None if JᵀJ is singular.
    pub jtj_inverse: Option<Vec<f64>>,
    pub num_residuals: usize,
}

impl LmFit {
    /// Standard errors of the parameters, scaled by the reduced chi-square.
    pub fn standard_errors(&self) -> Option<Vec<f64>> {
        let inv = self.jtj_inverse.as_ref()?;
        let n = self.params.len();
        let dof = self.num_residuals.saturating_sub(n).max(1) as f64;
        let scale = self.rss / dof;
        Some(
            (0..n)
                .map(|i| libm::sqrt((inv[i * n + i] * scale).max(0.0)))
                .collect(),
        )
    }
}

fn rss_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn clamp_params(p: &mut [f64], bounds: Option<&[(f64, f64)]>) {
    if let Some(b) = bounds {
        for (x, &(lo, hi)) in p.iter_mut().zip(b) {
            *x = x.clamp(lo, hi);
        }
    }
}

/// Minimizes Σᵢ rᵢ(x)² from `x0`, with optional per-parameter bounds applied
/// by projection. `residuals` fills `out` (length `m`) for the given params.
pub fn fit<F>(
    residuals: F,
    x0: &[f64],
    m: usize,
    bounds: Option<&[(f64, f64)]>,
    opts: &LmOptions,
) -> LmFit
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = x0.len();
    assert!(m >= n, "need at least as many residuals as parameters");
    if let Some(b) = bounds {
        assert_eq!(b.len(), n);
    }

    let mut x = x0.to_vec();
    clamp_params(&mut x, bounds);
    let mut r = vec![0.0; m];
    residuals(&x, &mut r);
    let mut rss = rss_of(&r);

    let mut jac = vec![0.0; m * n];
    let mut r_step = vec![0.0; m];
    let mut lambda = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    let mut stall = 0usize;

    for _ in 0..opts.max_iterations {
        iterations += 1;

        // forward-difference Jacobian
        for j in 0..n {
            let h0 = 1e-7 * libm::fabs(x[j]) + 1e-11;
            let mut xh = x.clone();
            let mut h = h0;
            xh[j] = x[j] + h;
            if let Some(b) = bounds {
                if xh[j] > b[j].1 {
                    h = -h0;
                    xh[j] = x[j] + h;
                }
            }
            residuals(&xh, &mut r_step);
            for i in 0..m {
                jac[i * n + j] = (r_step[i] - r[i]) / h;
            }
        }

        // normal equations: (JᵀJ + λ·diag(JᵀJ)) δ = -Jᵀr
        let mut jtj = vec![0.0; n * n];
        let mut g = vec![0.0; n];
        for i in 0..m {
            let ri = r[i];
            for a in 0..n {
                let ja = jac[i * n + a];
                g[a] += ja * ri;
                for b in a..n {
                    jtj[a * n + b] += ja * jac[i * n + b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a * n + b] = jtj[b * n + a];
            }
        }

        // freeze parameters pinned at a bound with the gradient pointing
        // outward, else projected steps stall against the constraint
        if let Some(b) = bounds {
            for j in 0..n {
                let at_lower = x[j] <= b[j].0 && g[j] > 0.0;
                let at_upper = x[j] >= b[j].1 && g[j] < 0.0;
                if at_lower || at_upper {
                    g[j] = 0.0;
                    for k in 0..n {
                        jtj[j * n + k] = 0.0;
                        jtj[k * n + j] = 0.0;
                    }
                    jtj[j * n + j] = 1.0;
                }
            }
        }

        let gmax = g.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
        if gmax == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..16 {
            let mut a = jtj.clone();
            for d in 0..n {
                let diag = if jtj[d * n + d] > 0.0 {
                    jtj[d * n + d]
                } else {
                    1.0
                };
                a[d * n + d] += lambda * diag;
            }
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let Some(delta) = solve_spd(&a, n, &rhs) else {
                lambda *= 10.0;
                continue;
            };
            let mut x_new = x.clone();
            for j in 0..n {
                x_new[j] += delta[j];
            }
            clamp_params(&mut x_new, bounds);
            residuals(&x_new, &mut r_step);
            let rss_new = rss_of(&r_step);
            if rss_new.is_finite() && rss_new < rss {
                let rel_drop = (rss - rss_new) / rss.max(f64::MIN_POSITIVE);
                let max_step = x_new
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| libm::fabs(a - b) / (libm::fabs(*b) + opts.xtol))
                    .fold(0.0f64, f64::max);
                x = x_new;
                core::mem::swap(&mut r, &mut r_step);
                rss = rss_new;
                lambda = (lambda * 0.3).max(1e-14);
                accepted = true;
                if rel_drop < opts.ftol || max_step < opts.xtol {
                    converged = true;
                } else if rel_drop < 1e3 * opts.ftol {
                    // creeping along a flat valley: a run of near-stationary
                    // steps changes nothing at the tolerance scale
                    stall += 1;
                    if stall >= 10 {
                        converged = true;
                    }
                } else {
                    stall = 0;
                }
                break;
            }
            lambda *= 10.0;
        }

        if !accepted {
            // damping maxed out without progress: local minimum to numerical
            // precision
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    // covariance from the undamped normal matrix at the solution
    for j in 0..n {
        let h0 = 1e-7 * libm::fabs(x[j]) + 1e-11;
        let mut xh = x.clone();
        let mut h = h0;
        xh[j] = x[j] + h;
        if let Some(b) = bounds {
            if xh[j] > b[j].1 {
                h = -h0;
                xh[j] = x[j] + h;
            }
        }
        residuals(&xh, &mut r_step);
        for i in 0..m {
            jac[i * n + j] = (r_step[i] - r[i]) / h;
        }
    }
    let mut jtj = vec![0.0; n * n];
    for i in 0..m {
        for a in 0..n {
            for b in a..n {
                jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            jtj[a * n + b] = jtj[b * n + a];
        }
    }
    let jtj_inverse = invert_spd(&jtj, n);

    LmFit {
        params: x,
        rss,
        iterations,
        converged,
        jtj_inverse,
        num_residuals: m,
    }
}
