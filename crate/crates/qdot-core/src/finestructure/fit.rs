//! Weighted least-squares fit of measured polar patterns to the hole-mixing
//! model.
//!
//! Only β, the mixing phase θ, and an overall amplitude are identifiable
//! from in-plane polarizer data; γ is fixed (default 0) because it moves
//! intensity into the out-of-plane channel that this geometry cannot see.

use alloc::vec;
use alloc::vec::Vec;

use super::{
    beta_from_ellipticity, dipoles_from_mixing, pattern_extrema, pattern_intensity,
    FinestructureError, HoleMixingParams, PolarPattern,
};
use crate::numeric::linalg::solve_spd;
use crate::numeric::lm::{self, LmOptions};

/// Result of a polar-pattern fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFit {
    pub params: HoleMixingParams,
    /// Overall amplitude multiplying the unit-dipole pattern.
    pub scale: f64,
    /// Max/min of the fitted pattern.
    pub ellipticity: f64,
    /// Major-axis angle in degrees from [−1 1 0], in [0°, 180°).
    pub major_axis_deg: f64,
    /// Set when the data are consistent with a circular pattern: β is
    /// reported as 0 and this bounds it from above at two sigma.
    pub beta_upper_bound: Option<f64>,
    pub rss: f64,
    pub iterations: usize,
}

/// Fits {β, θ, scale} to polar data, γ held fixed (default 0).
///
/// Needs at least 8 distinct angles spanning 150°. Data whose max/min ratio
/// is below 1.05 are reported as circular: β = 0 with an upper bound
/// propagated from the residual scatter.
pub fn fit_polar(
    data: &PolarPattern,
    fixed_gamma: Option<f64>,
) -> Result<PolarFit, FinestructureError> {
    let gamma = fixed_gamma.unwrap_or(0.0);
    let n = data.len();
    let span = data
        .angles_deg
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - data.angles_deg.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if n < 8 || span < 150.0 {
        return Err(FinestructureError::InsufficientCoverage {
            needed: 8,
            got: n,
            span,
        });
    }

    let weights: Vec<f64> = match &data.uncertainties {
        Some(u) => u.iter().map(|&s| if s > 0.0 { 1.0 / s } else { 1.0 }).collect(),
        None => vec![1.0; n],
    };

    // Linear pre-fit of the quadratic form I = c0 + c1·cos2φ + s1·sin2φ;
    // exact for this model, it supplies the ellipticity and axis estimates.
    let (c0, c1, s1) = quadratic_form_fit(data, &weights);
    let r = libm::sqrt(c1 * c1 + s1 * s1);
    let e_data = if c0 - r > 0.0 {
        (c0 + r) / (c0 - r)
    } else {
        f64::INFINITY
    };

    if e_data < 1.05 {
        // indistinguishable from circular: bound β by the scatter
        let mut rss = 0.0;
        for (i, &a) in data.angles_deg.iter().enumerate() {
            let phi2 = 2.0 * a.to_radians();
            let model = c0 + c1 * libm::cos(phi2) + s1 * libm::sin(phi2);
            let d = (data.intensities[i] - model) * weights[i];
            rss += d * d;
        }
        let sigma = libm::sqrt(rss / (n.saturating_sub(3)).max(1) as f64);
        let sigma_r = sigma * libm::sqrt(2.0 / n as f64);
        let r_ub = r + 2.0 * sigma_r;
        let e_ub = if c0 - r_ub > 0.0 {
            (c0 + r_ub) / (c0 - r_ub)
        } else {
            f64::INFINITY
        };
        let beta_ub = if e_ub.is_finite() {
            beta_from_ellipticity(e_ub, gamma)?
        } else {
            libm::sqrt((1.0 - gamma * gamma).max(0.0))
        };
        let params = HoleMixingParams::new(0.0, gamma, 0.0, 0.0)?;
        let d0 = dipoles_from_mixing(&params)?;
        let unit_mean = 0.5 * {
            let (max, min, _) = pattern_extrema(&d0);
            max + min
        };
        return Ok(PolarFit {
            params,
            scale: c0 / unit_mean,
            ellipticity: 1.0,
            major_axis_deg: 0.0,
            beta_upper_bound: Some(beta_ub),
            rss,
            iterations: 0,
        });
    }

    // initial guesses from the quadratic form
    let beta_max = libm::sqrt((1.0 - gamma * gamma).max(0.0));
    let beta0 = beta_from_ellipticity(e_data.min(50.0), gamma)
        .unwrap_or(0.5 * beta_max)
        .clamp(1e-3, 0.999 * beta_max);
    let mut axis = 0.5 * libm::atan2(s1, c1).to_degrees();
    if axis < 0.0 {
        axis += 180.0;
    }
    let theta0 = (axis - 90.0).to_radians();
    let d0 = dipoles_from_mixing(&HoleMixingParams::new(beta0, gamma, theta0, 0.0)?)?;
    let (max0, min0, _) = pattern_extrema(&d0);
    let scale0 = (2.0 * c0 / (max0 + min0)).max(f64::MIN_POSITIVE);

    let angles = &data.angles_deg;
    let intens = &data.intensities;
    let residuals = |p: &[f64], out: &mut [f64]| {
        let params = HoleMixingParams {
            beta: p[0],
            gamma,
            theta_mix: p[1],
            phi_mix: 0.0,
        };
        match dipoles_from_mixing(&params) {
            Ok(d) => {
                for i in 0..angles.len() {
                    out[i] = (p[2] * pattern_intensity(&d, angles[i]) - intens[i]) * weights[i];
                }
            }
            Err(_) => out.iter_mut().for_each(|o| *o = f64::MAX),
        }
    };

    let bounds = [
        (0.0, 0.999 * beta_max),
        (theta0 - core::f64::consts::FRAC_PI_2, theta0 + core::f64::consts::FRAC_PI_2),
        (f64::MIN_POSITIVE, f64::INFINITY),
    ];
    let fit = lm::fit(
        residuals,
        &[beta0, theta0, scale0],
        n,
        Some(&bounds),
        &LmOptions::default(),
    );

    let beta = fit.params[0];
    // θ enters as e^{2iθ}: normalize to (−90°, 90°]
    let mut theta = fit.params[1];
    while theta > core::f64::consts::FRAC_PI_2 {
        theta -= core::f64::consts::PI;
    }
    while theta <= -core::f64::consts::FRAC_PI_2 {
        theta += core::f64::consts::PI;
    }
    let params = HoleMixingParams::new(beta, gamma, theta, 0.0)?;
    let d = dipoles_from_mixing(&params)?;
    let (max, min, major_axis_deg) = pattern_extrema(&d);
    let result = PolarFit {
        params,
        scale: fit.params[2],
        ellipticity: if min > 0.0 { max / min } else { f64::INFINITY },
        major_axis_deg,
        beta_upper_bound: None,
        rss: fit.rss,
        iterations: fit.iterations,
    };
    if !fit.converged {
        return Err(FinestructureError::NonConvergence {
            iterations: fit.iterations,
            best: alloc::boxed::Box::new(result),
        });
    }
    Ok(result)
}

/// Weighted linear least squares of I(φ) on {1, cos2φ, sin2φ}.
fn quadratic_form_fit(data: &PolarPattern, weights: &[f64]) -> (f64, f64, f64) {
    let mut a = [0.0f64; 9];
    let mut b = [0.0f64; 3];
    for (i, &ang) in data.angles_deg.iter().enumerate() {
        let phi2 = 2.0 * ang.to_radians();
        let row = [1.0, libm::cos(phi2), libm::sin(phi2)];
        let w2 = weights[i] * weights[i];
        for p in 0..3 {
            b[p] += w2 * row[p] * data.intensities[i];
            for q in 0..3 {
                a[p * 3 + q] += w2 * row[p] * row[q];
            }
        }
    }
    match solve_spd(&a, 3, &b) {
        Some(x) => (x[0], x[1], x[2]),
        // degenerate geometry: fall back to the mean intensity
        None => (
            data.intensities.iter().sum::<f64>() / data.len().max(1) as f64,
            0.0,
            0.0,
        ),
    }
}
