//! Exciton fine structure under heavy/light-hole mixing: mixed hole states,
//! transition dipoles of the two fine-structure-split lines, polarizer-angle
//! intensity patterns, closed-form ellipticity, and polar-data fitting.
//!
//! # Basis convention
//!
//! The hole states are written in the J = 3/2 angular momentum basis over
//! p-like orbitals {X, Y, Z} and spins {↑, ↓}:
//!
//! ```text
//! |3/2, +3/2⟩ = −(X + iY)↑ / √2
//! |3/2, +1/2⟩ = −(X + iY)↓ / √6 + √(2/3) Z↑
//! |3/2, −1/2⟩ = +(X − iY)↑ / √6 + √(2/3) Z↓
//! |3/2, −3/2⟩ = +(X − iY)↓ / √2
//! ```
//!
//! The in-plane axes are tied to the measurement frame: X lies along the
//! crystallographic [−1 1 0] direction (polarizer angle 0°), Y along [1 1 0]
//! (polarizer angle 90°), Z along the growth axis [001]. The electron states
//! are |S↑⟩ and |S↓⟩ with ⟨S|x|X⟩ = ⟨S|y|Y⟩ = ⟨S|z|Z⟩ = 1. With these
//! choices the unmixed case radiates two equal orthogonal in-plane dipoles
//! along [110] and [−110], and the mixed case reproduces the closed-form
//! ellipticity of [`closed_form_ellipticity`] exactly (enforced by test
//! oracle rather than citation).
//!
//! Mixing amplitudes β (with the ∓1/2 states) and γ (with the ±1/2 states)
//! enter through phases e^{±2iθ} and e^{±2iφ}. The γ admixture contributes
//! only z-polarized dipole components, so φ has no effect on any in-plane
//! quantity; it is carried for completeness and is inert in this measurement
//! geometry.

use alloc::vec::Vec;
use num_complex::Complex64;
use thiserror::Error;

mod collection;
mod fit;

pub use collection::{collection_fraction, CollectionGeometry};
pub use fit::{fit_polar, PolarFit};

#[derive(Debug, Error, PartialEq)]
pub enum FinestructureError {
    #[error("mixing amplitudes must satisfy β² + γ² ≤ 1, got β={beta}, γ={gamma}")]
    MixingTooLarge { beta: f64, gamma: f64 },
    #[error("mixing outside the formula's validity (non-positive denominator)")]
    EllipticityUndefined,
    #[error("polar data angles must lie in [0°, 360°), got {0}")]
    AngleOutOfRange(f64),
    #[error("polar data intensities must be non-negative, got {0}")]
    NegativeIntensity(f64),
    #[error("duplicate polarizer angle {0}°")]
    DuplicateAngle(f64),
    #[error("half-range extension expects angles in [0°, 180°) or an already-extended set")]
    MixedRange,
    #[error("polar fit needs at least {needed} distinct angles spanning {span}°, got {got}")]
    InsufficientCoverage {
        needed: usize,
        got: usize,
        span: f64,
    },
    #[error("polar fit did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        best: alloc::boxed::Box<PolarFit>,
    },
    #[error("dipole vector must be nonzero")]
    ZeroDipole,
    #[error("numerical aperture must satisfy 0 < NA < n")]
    BadAperture,
}

/// Heavy/light-hole mixing parameters: amplitudes β, γ ∈ [0, 1) with
/// β² + γ² ≤ 1, and mixing phases θ, φ in radians (entering as e^{±2iθ},
/// e^{±2iφ}, hence effectively mod π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleMixingParams {
    pub beta: f64,
    pub gamma: f64,
    pub theta_mix: f64,
    pub phi_mix: f64,
}

impl HoleMixingParams {
    pub fn new(
        beta: f64,
        gamma: f64,
        theta_mix: f64,
        phi_mix: f64,
    ) -> Result<Self, FinestructureError> {
        if !(beta >= 0.0) || !(gamma >= 0.0) || beta * beta + gamma * gamma > 1.0 {
            return Err(FinestructureError::MixingTooLarge { beta, gamma });
        }
        Ok(Self {
            beta,
            gamma,
            theta_mix,
            phi_mix,
        })
    }

    /// Remaining heavy-hole amplitude √(1 − β² − γ²).
    pub fn hh_amplitude(&self) -> f64 {
        libm::sqrt((1.0 - self.beta * self.beta - self.gamma * self.gamma).max(0.0))
    }
}

/// Complex transition-dipole 3-vector in the (X, Y, Z) frame above.
pub type DipoleVector = [Complex64; 3];

/// The transition dipoles of the two fine-structure-split exciton lines:
/// the symmetric and antisymmetric combinations of the two spin channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FssDipolePair {
    pub d_plus: DipoleVector,
    pub d_minus: DipoleVector,
}

impl FssDipolePair {
    /// Total squared magnitude of both dipoles.
    pub fn norm_sq(&self) -> f64 {
        self.d_plus
            .iter()
            .chain(&self.d_minus)
            .map(|c| c.norm_sqr())
            .sum()
    }
}

/// Polarizer-angle intensity pattern: angles in degrees from [−1 1 0],
/// intensities ≥ 0, optional per-angle uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPattern {
    pub angles_deg: Vec<f64>,
    pub intensities: Vec<f64>,
    pub uncertainties: Option<Vec<f64>>,
}

impl PolarPattern {
    pub fn new(
        angles_deg: Vec<f64>,
        intensities: Vec<f64>,
        uncertainties: Option<Vec<f64>>,
    ) -> Result<Self, FinestructureError> {
        for &a in &angles_deg {
            if !(0.0..360.0).contains(&a) {
                return Err(FinestructureError::AngleOutOfRange(a));
            }
        }
        for &i in &intensities {
            if !(i >= 0.0) {
                return Err(FinestructureError::NegativeIntensity(i));
            }
        }
        assert_eq!(angles_deg.len(), intensities.len());
        if let Some(u) = &uncertainties {
            assert_eq!(u.len(), intensities.len());
        }
        for (i, &a) in angles_deg.iter().enumerate() {
            for &b in &angles_deg[i + 1..] {
                if (a - b).abs() < 1e-9 {
                    return Err(FinestructureError::DuplicateAngle(a));
                }
            }
        }
        Ok(Self {
            angles_deg,
            intensities,
            uncertainties,
        })
    }

    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }
}

/// Transition dipoles of the two fine-structure lines for the given mixing.
///
/// Expands ⟨u_E±| r |u_H±⟩ in the documented basis (Kane matrix element set
/// to 1) and returns the sum and difference combinations.
pub fn dipoles_from_mixing(p: &HoleMixingParams) -> Result<FssDipolePair, FinestructureError> {
    if p.beta * p.beta + p.gamma * p.gamma > 1.0 {
        return Err(FinestructureError::MixingTooLarge {
            beta: p.beta,
            gamma: p.gamma,
        });
    }
    let a = p.hh_amplitude();
    let sqrt1_2 = core::f64::consts::FRAC_1_SQRT_2;
    let sqrt1_6 = 1.0 / libm::sqrt(6.0);
    let sqrt2_3 = libm::sqrt(2.0 / 3.0);
    let e2t = Complex64::from_polar(1.0, 2.0 * p.theta_mix);
    let e2p = Complex64::from_polar(1.0, 2.0 * p.phi_mix);
    let i = Complex64::I;

    // spin-up channel: ⟨S↑| r |u_H+⟩
    //   a·⟨S↑|r|+3/2⟩ + βe^{2iθ}·⟨S↑|r|−1/2⟩ + γe^{2iφ}·⟨S↑|r|+1/2⟩
    let m_plus: DipoleVector = [
        -a * sqrt1_2 + p.beta * sqrt1_6 * e2t,
        -a * sqrt1_2 * i - p.beta * sqrt1_6 * e2t * i,
        p.gamma * sqrt2_3 * e2p,
    ];
    // spin-down channel: ⟨S↓| r |u_H−⟩
    //   a·⟨S↓|r|−3/2⟩ + βe^{−2iθ}·⟨S↓|r|+1/2⟩ − γe^{−2iφ}·⟨S↓|r|−1/2⟩
    let e2t_c = e2t.conj();
    let e2p_c = e2p.conj();
    let m_minus: DipoleVector = [
        a * sqrt1_2 - p.beta * sqrt1_6 * e2t_c,
        -a * sqrt1_2 * i - p.beta * sqrt1_6 * e2t_c * i,
        -p.gamma * sqrt2_3 * e2p_c,
    ];

    let d_plus = [
        m_plus[0] + m_minus[0],
        m_plus[1] + m_minus[1],
        m_plus[2] + m_minus[2],
    ];
    let d_minus = [
        m_plus[0] - m_minus[0],
        m_plus[1] - m_minus[1],
        m_plus[2] - m_minus[2],
    ];
    Ok(FssDipolePair { d_plus, d_minus })
}

/// Intensity through an in-plane linear polarizer at `angle_deg` from
/// [−1 1 0]: |ε̂·d₊|² + |ε̂·d₋|². The two lines are spectrally distinct and
/// add incoherently.
pub fn pattern_intensity(d: &FssDipolePair, angle_deg: f64) -> f64 {
    let phi = angle_deg.to_radians();
    let (s, c) = (libm::sin(phi), libm::cos(phi));
    let proj = |v: &DipoleVector| -> f64 { (v[0] * c + v[1] * s).norm_sqr() };
    proj(&d.d_plus) + proj(&d.d_minus)
}

/// Polarizer-angle pattern of the two lines over the given angles.
pub fn polar_pattern(d: &FssDipolePair, angles_deg: &[f64]) -> PolarPattern {
    let intensities = angles_deg
        .iter()
        .map(|&a| pattern_intensity(d, a))
        .collect();
    PolarPattern {
        angles_deg: angles_deg.to_vec(),
        intensities,
        uncertainties: None,
    }
}

/// In-plane pattern (max, min, major-axis angle in degrees), exact: the
/// pattern is a quadratic form in the polarizer direction,
/// I(φ) = c₀ + c₁cos2φ + s₁sin2φ.
pub fn pattern_extrema(d: &FssDipolePair) -> (f64, f64, f64) {
    let i0 = pattern_intensity(d, 0.0);
    let i45 = pattern_intensity(d, 45.0);
    let i90 = pattern_intensity(d, 90.0);
    let c0 = 0.5 * (i0 + i90);
    let c1 = 0.5 * (i0 - i90);
    let s1 = i45 - c0;
    let r = libm::sqrt(c1 * c1 + s1 * s1);
    let mut axis_deg = 0.5 * libm::atan2(s1, c1).to_degrees();
    if axis_deg < 0.0 {
        axis_deg += 180.0;
    }
    (c0 + r, c0 - r, axis_deg)
}

/// Closed-form polar-pattern ellipticity for mixing amplitudes (β, γ):
///
/// e = [1 − (2/3)β² − γ² + 2β√((1−β²)/3)] / [1 − (2/3)β² − γ² − 2β√((1−β²)/3)]
///
/// valid for a point dipole with the surrounding dielectric and measurement
/// geometry neglected.
pub fn closed_form_ellipticity(beta: f64, gamma: f64) -> Result<f64, FinestructureError> {
    if !(beta >= 0.0) || !(gamma >= 0.0) || beta * beta + gamma * gamma > 1.0 {
        return Err(FinestructureError::MixingTooLarge { beta, gamma });
    }
    let base = 1.0 - 2.0 / 3.0 * beta * beta - gamma * gamma;
    let cross = 2.0 * beta * libm::sqrt((1.0 - beta * beta) / 3.0);
    let denom = base - cross;
    if denom <= 0.0 {
        return Err(FinestructureError::EllipticityUndefined);
    }
    Ok((base + cross) / denom)
}

/// Inverts [`closed_form_ellipticity`] for β at fixed γ by bisection on the
/// monotone branch: e grows from 1 at β = 0 and diverges where the
/// denominator vanishes (β = √3/2 at γ = 0); larger β is not considered.
pub fn beta_from_ellipticity(e: f64, gamma: f64) -> Result<f64, FinestructureError> {
    if e < 1.0 {
        return Err(FinestructureError::EllipticityUndefined);
    }
    let beta_max = libm::sqrt((1.0 - gamma * gamma).max(0.0));
    // end of the monotone branch
    let mut hi = 0.0;
    let mut last = 1.0;
    for k in 1..=2000 {
        let b = beta_max * k as f64 / 2000.0;
        match closed_form_ellipticity(b, gamma) {
            Ok(ek) if ek >= last => {
                hi = b;
                last = ek;
            }
            _ => break,
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match closed_form_ellipticity(mid, gamma) {
            Ok(em) if em < e => lo = mid,
            _ => hi = mid,
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Extends half-range polarizer data to [0°, 360°) using the 180° symmetry
/// of a linear polarizer: I(φ + 180°) = I(φ). Already-extended data passes
/// through unchanged; partially extended data is rejected.
pub fn extend_polarizer_data(half: &PolarPattern) -> Result<PolarPattern, FinestructureError> {
    if half.is_empty() {
        return Ok(half.clone());
    }
    let all_below = half.angles_deg.iter().all(|&a| a < 180.0);
    if all_below {
        let mut angles = half.angles_deg.clone();
        let mut intensities = half.intensities.clone();
        let mut uncertainties = half.uncertainties.clone();
        for i in 0..half.len() {
            angles.push(half.angles_deg[i] + 180.0);
            intensities.push(half.intensities[i]);
            if let Some(u) = &mut uncertainties {
                let v = u[i];
                u.push(v);
            }
        }
        return PolarPattern::new(angles, intensities, uncertainties);
    }
    // accept only a clean mirror closure: every angle has its 180° partner
    // with identical intensity
    for i in 0..half.len() {
        let a = half.angles_deg[i];
        let partner = if a < 180.0 { a + 180.0 } else { a - 180.0 };
        let found = half
            .angles_deg
            .iter()
            .position(|&b| (b - partner).abs() < 1e-9);
        match found {
            Some(j) if half.intensities[j] == half.intensities[i] => {}
            _ => return Err(FinestructureError::MixedRange),
        }
    }
    Ok(half.clone())
}
