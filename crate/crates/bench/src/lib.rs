//! Fixtures shared by the criterion benches.

use drjio_core::linalg::CVector;
use drjio_core::rng;
use drjio_core::Sample;

/// `count` samples with unit-variance white regressors of length `m`.
pub fn white_samples(m: usize, count: usize, seed: u64) -> Vec<Sample> {
    let mut r = rng::stream(seed, &[]);
    (0..count)
        .map(|_| Sample {
            x: CVector::from_fn(m, |_, _| rng::complex_gaussian(&mut r, 1.0)),
            d: rng::complex_gaussian(&mut r, 1.0),
        })
        .collect()
}
