//! Hierarchical seed derivation.
//!
//! A single root seed is split into independent streams by hashing a path of
//! labels (run, node, role, ...). Each leaf seeds its own `ChaCha8Rng`, so the
//! order in which streams are consumed never changes their contents.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

/// Role labels used as the last component of a seed path.
pub mod role {
    pub const TOPOLOGY: u64 = 1;
    pub const ALPHA: u64 = 2;
    pub const PARAMETER: u64 = 3;
    pub const REGRESSOR: u64 = 4;
    pub const NOISE: u64 = 5;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &label| splitmix64(acc ^ splitmix64(label.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn stream(root: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(root, path))
}

/// Circular complex Gaussian sample with `E|z|² = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_are_distinct() {
        let a = derive_seed(7, &[0, 1, role::NOISE]);
        let b = derive_seed(7, &[0, 1, role::REGRESSOR]);
        let c = derive_seed(7, &[1, 0, role::NOISE]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, &[0, 1, role::NOISE]));
    }

    #[test]
    fn gaussian_variance() {
        let mut rng = stream(3, &[]);
        let n = 200_000;
        let v: f64 = (0..n).map(|_| complex_gaussian(&mut rng, 2.0).norm_sqr()).sum::<f64>() / n as f64;
        assert!((v - 2.0).abs() < 0.03, "{v}");
    }
}
