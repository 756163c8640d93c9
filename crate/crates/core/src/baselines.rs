//! Full-rank diffusion NLMS and diffusion RLS agents.
//!
//! Both follow adapt-then-combine: every agent computes a local intermediate
//! `ψ_k` from its own sample, then replaces its estimate with the weighted
//! average of its neighbours' `ψ_l`.

use num_complex::Complex64;

use crate::linalg::{hermitian_symmetrize, scaled_identity, CMatrix, CVector};
use crate::signal::Sample;
use crate::{Error, Result};

pub const DEFAULT_NLMS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NlmsAgentState {
    pub omega: CVector,
    pub psi: CVector,
}

impl NlmsAgentState {
    pub fn new(m: usize) -> Self {
        NlmsAgentState {
            omega: CVector::zeros(m),
            psi: CVector::zeros(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlsAgentState {
    pub omega: CVector,
    pub psi: CVector,
    pub p_inv: CMatrix,
}

impl RlsAgentState {
    /// Zero estimate with `p_inv = δ⁻¹ I`.
    pub fn new(m: usize, delta_init: f64) -> Self {
        RlsAgentState {
            omega: CVector::zeros(m),
            psi: CVector::zeros(m),
            p_inv: scaled_identity(m, 1.0 / delta_init),
        }
    }
}

/// A-priori error `d − ωᴴx`.
pub fn apriori_error(omega: &CVector, sample: &Sample) -> Complex64 {
    sample.d - omega.dotc(&sample.x)
}

/// `ψ = ω + μ₀/(xᴴx + eps) · x · e*`.
pub fn nlms_adapt(state: &mut NlmsAgentState, sample: &Sample, mu0: f64, eps: f64) {
    let e = apriori_error(&state.omega, sample);
    let step = mu0 / (sample.x.norm_squared() + eps);
    state.psi = &state.omega + &sample.x * (e.conj() * step);
}

/// Exponentially weighted RLS step via the matrix inversion lemma.
pub fn rls_adapt(state: &mut RlsAgentState, sample: &Sample, lambda: f64) {
    let x = &sample.x;
    let px = &state.p_inv * x;
    let denom = lambda + x.dotc(&px).re;
    let g = px / Complex64::new(denom, 0.0);
    let e = apriori_error(&state.omega, sample);
    state.psi = &state.omega + &g * e.conj();
    // xᴴP = (P x)ᴴ for Hermitian P.
    let xh_p = x.adjoint() * &state.p_inv;
    state.p_inv = (&state.p_inv - &g * xh_p) / Complex64::new(lambda, 0.0);
    hermitian_symmetrize(&mut state.p_inv);
}

/// `Σ c_l ψ_l` over a neighbourhood.
pub fn combine(psis: &[&CVector], weights: &[f64]) -> Result<CVector> {
    if psis.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: psis.len(),
            found: weights.len(),
        });
    }
    let Some(first) = psis.first() else {
        return Err(Error::InvalidParameter("empty neighbourhood".into()));
    };
    let m = first.len();
    let mut out = CVector::zeros(m);
    for (psi, &c) in psis.iter().zip(weights) {
        if psi.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: psi.len(),
            });
        }
        out.axpy(Complex64::new(c, 0.0), psi, Complex64::new(1.0, 0.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nlms_zero_error_no_move() {
        let mut s = NlmsAgentState::new(2);
        s.omega = CVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        let x = CVector::from_vec(vec![c(0.3, 0.1), c(1.0, -1.0)]);
        let sample = Sample { d: s.omega.dotc(&x), x };
        nlms_adapt(&mut s, &sample, 0.5, DEFAULT_NLMS_EPS);
        assert_eq!(s.psi, s.omega);
    }

    #[test]
    fn nlms_unit_step_zero_posterior_error() {
        let mut s = NlmsAgentState::new(3);
        let x = CVector::from_vec(vec![c(0.3, 0.1), c(1.0, -1.0), c(0.0, 2.0)]);
        let sample = Sample { x, d: c(0.7, -0.2) };
        nlms_adapt(&mut s, &sample, 1.0, 0.0);
        let post = sample.d - s.psi.dotc(&sample.x);
        assert!(post.norm() < 1e-15);
    }

    #[test]
    fn nlms_effective_step() {
        let mut s = NlmsAgentState::new(2);
        let x = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let sample = Sample { x, d: c(1.0, 0.0) };
        nlms_adapt(&mut s, &sample, 0.15, 0.0);
        assert!((s.psi[0] - c(0.075, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rls_single_update() {
        let delta = 0.11;
        let mut s = RlsAgentState::new(3, delta);
        let mut x = CVector::zeros(3);
        x[0] = c(1.0, 0.0);
        rls_adapt(&mut s, &Sample { x, d: c(1.0, 0.0) }, 1.0);
        let expect = (1.0 / delta) / (1.0 + 1.0 / delta);
        assert!((s.psi[0] - c(expect, 0.0)).norm() < 1e-14);
        assert_eq!(s.psi[1], c(0.0, 0.0));
    }

    #[test]
    fn rls_zero_error_no_move() {
        let mut s = RlsAgentState::new(2, 0.11);
        s.omega = CVector::from_vec(vec![c(0.2, 0.0), c(0.0, 1.0)]);
        let x = CVector::from_vec(vec![c(1.0, 1.0), c(0.5, 0.0)]);
        let sample = Sample { d: s.omega.dotc(&x), x };
        rls_adapt(&mut s, &sample, 0.99);
        assert_eq!(s.psi, s.omega);
    }

    #[test]
    fn combine_examples() {
        let a = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let w = combine(&[&a, &b], &[0.5, 0.5]).unwrap();
        assert_eq!(w, CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        assert_eq!(combine(&[&a], &[1.0]).unwrap(), a);
        assert!(combine(&[&a, &b], &[1.0]).is_err());
        let short = CVector::zeros(1);
        assert!(combine(&[&a, &short], &[0.5, 0.5]).is_err());
    }
}
