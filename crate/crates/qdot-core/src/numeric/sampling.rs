//! Deterministic random draws on top of a counter-based ChaCha stream.
//!
//! All simulation randomness flows through these helpers so that results are
//! reproducible bit-for-bit from a seed, independent of platform and of how
//! work is split across threads.

use rand_core::{Rng, SeedableRng};

pub use rand_chacha::ChaCha8Rng;

/// RNG for one logical substream. Streams with distinct ids are independent;
/// the id space is partitioned by the callers.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in [0, 1) with 53-bit resolution.
pub fn uniform(rng: &mut impl Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential draw with the given mean.
pub fn exponential(rng: &mut impl Rng, mean: f64) -> f64 {
    // 1 - u in (0, 1] avoids ln(0)
    -mean * libm::log(1.0 - uniform(rng))
}

/// Standard normal draw (Box–Muller; one value per call, two uniforms each).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Poisson draw. Knuth's product method below mean 10, the PTRS transformed
/// rejection method (Hörmann 1993) above, where the product method would
/// underflow or crawl.
pub fn poisson(rng: &mut impl Rng, mean: f64) -> u64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean <= 0.0 {
        0
    } else if mean < 10.0 {
        poisson_knuth(rng, mean)
    } else {
        poisson_ptrs(rng, mean)
    }
}

fn poisson_knuth(rng: &mut impl Rng, mean: f64) -> u64 {
    let l = libm::exp(-mean);
    let mut k = 0u64;
    let mut p = 1.0;
    loop {
        p *= uniform(rng);
        if p <= l {
            return k;
        }
        k += 1;
    }
}

fn poisson_ptrs(rng: &mut impl Rng, mean: f64) -> u64 {
    let slam = libm::sqrt(mean);
    let loglam = libm::log(mean);
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let invalpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = uniform(rng) - 0.5;
        let v = uniform(rng);
        let us = 0.5 - libm::fabs(u);
        let k = libm::floor((2.0 * a / us + b) * u + mean + 0.43);
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let log_check = libm::log(v) + libm::log(invalpha) - libm::log(a / (us * us) + b);
        if log_check <= k * loglam - mean - libm::lgamma(k + 1.0) {
            return k as u64;
        }
    }
}
