//! Complex matrix aliases and the few dense helpers the agents share.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `I_{M,D}`: the `D × D` identity on top of `M − D` zero rows.
pub fn identity_md(m: usize, d: usize) -> CMatrix {
    CMatrix::from_fn(m, d, |a, b| {
        if a == b {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn scaled_identity(n: usize, scale: f64) -> CMatrix {
    CMatrix::identity(n, n) * Complex64::new(scale, 0.0)
}

/// Replaces `a` by `(a + aᴴ)/2` in place.
pub fn hermitian_symmetrize(a: &mut CMatrix) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
}

/// `aᴴ b` for column vectors.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

pub fn norm_sqr(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn all_finite<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> bool {
    values.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Inverse of a Hermitian positive definite matrix; falls back to LU when the
/// Cholesky factorization fails.
pub fn inverse_hermitian(a: &CMatrix) -> Option<CMatrix> {
    if let Some(chol) = a.clone().cholesky() {
        let mut inv = chol.inverse();
        hermitian_symmetrize(&mut inv);
        return Some(inv);
    }
    a.clone().try_inverse()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
