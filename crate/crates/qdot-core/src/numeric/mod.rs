//! Shared numerical machinery: deterministic samplers, small dense linear
//! algebra, a Levenberg–Marquardt driver, and special functions.

pub mod linalg;
pub mod lm;
pub mod sampling;
pub mod special;

/// Sample mean and standard deviation (n−1 denominator).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}
