//! DRJIO agents: joint adaptation of a local dimensionality-reduction matrix
//! `S_D` (`M × D`) and a reduced estimator `ω̄` (`D`).
//!
//! Each agent projects its regressor to `x̄ = S_Dᴴ x`, adapts `ω̄` to an
//! intermediate `ψ̄`, and adapts `S_D` locally. Only `ψ̄` is shared with the
//! neighbourhood; the full-dimension estimate is recovered as `S_D ω̄`.

use num_complex::Complex64;

use crate::baselines;
use crate::linalg::{all_finite, hermitian_symmetrize, identity_md, scaled_identity, CMatrix, CVector};
use crate::signal::Sample;
use crate::{Error, Result};

fn check_dims(m: usize, d: usize) -> Result<()> {
    if d == 0 || m == 0 || d > m {
        return Err(Error::InvalidParameter(format!(
            "reduced rank must satisfy 1 <= D <= M, got D = {d}, M = {m}"
        )));
    }
    Ok(())
}

/// Step sizes and regularizers of the NLMS variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrjioNlmsHyper {
    pub mu0: f64,
    pub eta0: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Guard added to both normalizations.
    pub eps: f64,
    /// Floor `ξ` added to `ω̄ᴴω̄` in the `S_D` step size.
    ///
    /// With `ω̄(0) = 0` the bare normalization `η₀ / (ω̄ᴴω̄ · xᴴx + eps)` is
    /// `η₀ / eps` on the first step and the regularization terms blow `S_D` up
    /// immediately. The floor bounds the step by `η₀ / (ξ xᴴx)`.
    pub omega_floor: f64,
}

impl Default for DrjioNlmsHyper {
    fn default() -> Self {
        DrjioNlmsHyper {
            mu0: 0.15,
            eta0: 0.5,
            gamma: 0.02,
            delta: 0.01,
            eps: 1e-8,
            omega_floor: 0.1,
        }
    }
}

impl DrjioNlmsHyper {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu0 > 0.0
            && self.eta0 >= 0.0
            && self.gamma >= 0.0
            && self.delta >= 0.0
            && self.eps >= 0.0
            && self.omega_floor >= 0.0;
        if !ok || ![self.mu0, self.eta0, self.gamma, self.delta, self.eps, self.omega_floor]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "DRJIO-NLMS needs mu0 > 0 and nonnegative eta0, gamma, delta, eps, omega_floor: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrjioNlmsState {
    pub s_d: CMatrix,
    pub omega_bar: CVector,
    pub psi_bar: CVector,
}

impl DrjioNlmsState {
    /// `S_D = I_{M,D}`, `ω̄ = 0`.
    pub fn new(m: usize, d: usize) -> Result<Self> {
        check_dims(m, d)?;
        Ok(DrjioNlmsState {
            s_d: identity_md(m, d),
            omega_bar: CVector::zeros(d),
            psi_bar: CVector::zeros(d),
        })
    }

    pub fn estimate(&self) -> CVector {
        &self.s_d * &self.omega_bar
    }
}

pub fn drjio_nlms_adapt(state: &mut DrjioNlmsState, sample: &Sample, hyper: &DrjioNlmsHyper) -> Result<()> {
    let x = &sample.x;
    if x.len() != state.s_d.nrows() {
        return Err(Error::DimensionMismatch {
            expected: state.s_d.nrows(),
            found: x.len(),
        });
    }
    let x_bar = state.s_d.ad_mul(x);
    let e = sample.d - state.omega_bar.dotc(&x_bar);
    let xx = x.norm_squared();

    let mu = hyper.mu0 / (xx + hyper.eps);
    state.psi_bar = &state.omega_bar + &x_bar * (e.conj() * mu);

    let eta = hyper.eta0 / ((state.omega_bar.norm_squared() + hyper.omega_floor) * xx + hyper.eps);
    if eta != 0.0 {
        // e*·x·ω̄ᴴ − δ·x·xᴴS_D = x·(e·ω̄ − δ·x̄)ᴴ since xᴴS_D = x̄ᴴ.
        let v = &state.omega_bar * e - &x_bar * Complex64::new(hyper.delta, 0.0);
        state
            .s_d
            .gerc(Complex64::new(eta, 0.0), x, &v, Complex64::new(1.0, 0.0));
        let diag = sample.d.conj() * (eta * hyper.gamma);
        if diag != Complex64::new(0.0, 0.0) {
            for j in 0..state.s_d.ncols() {
                state.s_d[(j, j)] += diag;
            }
        }
    }

    if !all_finite(state.psi_bar.iter()) || !all_finite(state.s_d.iter()) {
        return Err(Error::NonFinite("DRJIO-NLMS update"));
    }
    Ok(())
}

/// How the RLS variant updates `S_D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SUpdateRule {
    /// `S_D ← S_D + k·e_s*·tᴴ` with `e_s = d − ω̄ᴴS_Dᴴx` and
    /// `t = (ω̄ω̄ᴴ + δ I)⁻¹ω̄ = ω̄ / (δ + ω̄ᴴω̄)`.
    #[default]
    ErrorDriven,
    /// `S_D ← S_D + k·(d*·tᴴ − xᴴS_D)` with `t` from an exponentially weighted
    /// inverse of `ω̄ω̄ᴴ`. Kept for comparison: `t` shrinks like `(1−λ)ω̄/‖ω̄‖²`
    /// and the iteration stalls far above the noise floor.
    Accumulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrjioRlsState {
    pub s_d: CMatrix,
    pub omega_bar: CVector,
    pub psi_bar: CVector,
    /// Inverse of the exponentially weighted regressor correlation.
    pub p_full: CMatrix,
    /// Inverse of the `ω̄` correlation used to form `t`.
    pub q_omega: CMatrix,
    /// Inverse of the reduced regressor correlation.
    pub phi_bar: CMatrix,
    pub delta_init: f64,
    pub rule: SUpdateRule,
}

impl DrjioRlsState {
    /// `S_D = I_{M,D}`, `ω̄ = 0`, `P = δ⁻¹I_M`, `Q = Φ̄ = δ⁻¹I_D`.
    pub fn new(m: usize, d: usize, delta_init: f64) -> Result<Self> {
        check_dims(m, d)?;
        if !(delta_init > 0.0 && delta_init.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta_init must be positive, got {delta_init}"
            )));
        }
        Ok(DrjioRlsState {
            s_d: identity_md(m, d),
            omega_bar: CVector::zeros(d),
            psi_bar: CVector::zeros(d),
            p_full: scaled_identity(m, 1.0 / delta_init),
            q_omega: scaled_identity(d, 1.0 / delta_init),
            phi_bar: scaled_identity(d, 1.0 / delta_init),
            delta_init,
            rule: SUpdateRule::ErrorDriven,
        })
    }

    pub fn with_rule(mut self, rule: SUpdateRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn estimate(&self) -> CVector {
        &self.s_d * &self.omega_bar
    }
}

/// `P x / (λ + xᴴ P x)` and the matching inverse update `λ⁻¹(P − g xᴴP)`.
fn rls_gain_and_update(p: &mut CMatrix, x: &CVector, lambda: f64) -> CVector {
    let px = &*p * x;
    let denom = lambda + x.dotc(&px).re;
    let g = px / Complex64::new(denom, 0.0);
    let xh_p = x.adjoint() * &*p;
    *p = (&*p - &g * xh_p) / Complex64::new(lambda, 0.0);
    hermitian_symmetrize(p);
    g
}

pub fn drjio_rls_adapt(state: &mut DrjioRlsState, sample: &Sample, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "forgetting factor must lie in (0, 1], got {lambda}"
        )));
    }
    let x = &sample.x;
    let d = sample.d;
    if x.len() != state.s_d.nrows() {
        return Err(Error::DimensionMismatch {
            expected: state.s_d.nrows(),
            found: x.len(),
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let dim = state.omega_bar.len();

    // Gain of the S_D step; P is updated after S_D uses the old value.
    let k = rls_gain_and_update(&mut state.p_full, x, lambda);

    match state.rule {
        SUpdateRule::ErrorDriven => {
            let w = &state.omega_bar;
            let scale = state.delta_init + w.norm_squared();
            let t = w / Complex64::new(scale, 0.0);
            let e_s = d - w.dotc(&state.s_d.ad_mul(x));
            state.s_d.gerc(one, &k, &(t * e_s), one);
            let mut q = CMatrix::identity(dim, dim) - w * w.adjoint() / Complex64::new(scale, 0.0);
            q /= Complex64::new(state.delta_init, 0.0);
            state.q_omega = q;
        }
        SUpdateRule::Accumulated => {
            let w = state.omega_bar.clone();
            let t = rls_gain_and_update(&mut state.q_omega, &w, lambda);
            // k·(d*·tᴴ − xᴴS_D) = k·(d·t − S_Dᴴx)ᴴ
            let v = t * d - state.s_d.ad_mul(x);
            state.s_d.gerc(one, &k, &v, one);
        }
    }

    let x_bar = state.s_d.ad_mul(x);
    let k_bar = rls_gain_and_update(&mut state.phi_bar, &x_bar, lambda);
    let innovation = d.conj() - x_bar.dotc(&state.omega_bar);
    state.psi_bar = &state.omega_bar + k_bar * innovation;

    if !all_finite(state.psi_bar.iter())
        || !all_finite(state.s_d.iter())
        || !all_finite(state.phi_bar.iter())
        || !all_finite(state.p_full.iter())
    {
        return Err(Error::NonFinite("DRJIO-RLS update"));
    }
    Ok(())
}

/// `ω̄ = Σ c_l ψ̄_l` over a neighbourhood.
pub fn combine_reduced(psi_bars: &[&CVector], weights: &[f64]) -> Result<CVector> {
    baselines::combine(psi_bars, weights)
}

/// Full-dimension estimate `S_D ω̄`.
pub fn reconstruct(s_d: &CMatrix, omega_bar: &CVector) -> Result<CVector> {
    if s_d.ncols() != omega_bar.len() {
        return Err(Error::DimensionMismatch {
            expected: s_d.ncols(),
            found: omega_bar.len(),
        });
    }
    Ok(s_d * omega_bar)
}
