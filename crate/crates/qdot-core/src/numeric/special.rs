//! Incomplete gamma functions and Poisson tail utilities.

/// Regularized lower incomplete gamma P(a, x), by series expansion for
/// x < a+1 and continued fraction otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if libm::fabs(del) < libm::fabs(sum) * 1e-15 {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - libm::lgamma(a))
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < tiny {
            d = tiny;
        }
        c = b + an / c;
        if libm::fabs(c) < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < 1e-15 {
            break;
        }
    }
    h * libm::exp(-x + a * libm::log(x) - libm::lgamma(a))
}

/// Poisson CDF P(X ≤ k; µ) = Q(k+1, µ).
pub fn poisson_cdf(k: u64, mu: f64) -> f64 {
    gamma_q(k as f64 + 1.0, mu)
}

/// One-sided upper confidence bound on a Poisson mean given an observed
/// count: the µ with P(X ≤ n; µ) = 1 − cl. For cl = 0.95 and n = 0 this is
/// −ln(0.05) ≈ 3.0.
pub fn poisson_upper_bound(n: u64, cl: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&cl));
    let tail = 1.0 - cl;
    let nf = n as f64;
    let mut lo = nf;
    let mut hi = nf + 10.0 * libm::sqrt(nf + 1.0) + 10.0;
    while poisson_cdf(n, hi) > tail {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if poisson_cdf(n, mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}
