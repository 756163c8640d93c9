//! Exact second-order statistics and the analytic solutions built from them.
//!
//! * [`exact_moments`]: `R`, `p` and `σ²_d` of the AR(1) measurement model.
//! * [`alt_fixed_point`]: alternating minimization over `(S_D, ω̄)` of
//!   `J = E|d − ω̄ᴴS_Dᴴx|² + δ·tr(S_DᴴRS_D) − 2γ·Re tr(I_{M,D}ᴴS_D)`.
//! * [`rank_d_wiener`]: `Φ_D Λ_D⁻¹ Φ_Dᴴ p` from the dominant eigenspace of `R`.
//! * [`deterministic_recursion`]: the noise-free norm recursion in eigen
//!   coordinates, with [`recursion_norm_bound`] as its closed-form ceiling.

use num_complex::Complex64;

use crate::linalg::{hermitian_symmetrize, identity_md, inverse_hermitian, CMatrix, CVector};
use crate::signal::{NodeSignalModel, ParameterVector};
use crate::topology::CombinationMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentModel {
    pub r: CMatrix,
    pub p: CVector,
    pub sigma_d2: f64,
}

impl MomentModel {
    /// Moments of `d = ω₀ᴴx + n` for an arbitrary regressor covariance.
    pub fn from_covariance(r: CMatrix, omega0: &CVector, noise_var: f64) -> Result<Self> {
        if r.nrows() != r.ncols() || r.nrows() != omega0.len() {
            return Err(Error::DimensionMismatch {
                expected: omega0.len(),
                found: r.nrows(),
            });
        }
        let p = &r * omega0;
        let sigma_d2 = omega0.dotc(&p).re + noise_var;
        Ok(MomentModel { r, p, sigma_d2 })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// Full-rank Wiener solution `R⁻¹p` and its MSE.
    pub fn wiener(&self) -> Result<(CVector, f64)> {
        let inv = inverse_hermitian(&self.r).ok_or(Error::Singular {
            context: "regressor covariance",
            cycle: None,
        })?;
        let w = inv * &self.p;
        let mse = self.sigma_d2 - self.p.dotc(&w).re;
        Ok((w, mse))
    }
}

/// `R_ab = E[x_a x_b*]`: `conj(α)^{a−b}` below the diagonal, `α^{b−a}` above.
pub fn ar1_covariance(alpha: Complex64, m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |a, b| {
        if a >= b {
            alpha.conj().powu((a - b) as u32)
        } else {
            alpha.powu((b - a) as u32)
        }
    })
}

pub fn exact_moments(model: &NodeSignalModel, omega0: &ParameterVector) -> Result<MomentModel> {
    model.validate()?;
    MomentModel::from_covariance(
        ar1_covariance(model.alpha, model.regressor_len),
        &omega0.omega0,
        model.noise_var,
    )
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomp {
    pub phi: CMatrix,
    pub lambda: Vec<f64>,
}

impl EigenDecomp {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.lambda.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.phi[(i, j)] * self.lambda[j]);
        scaled * self.phi.adjoint()
    }
}

pub fn eigen_decomp(r: &CMatrix) -> EigenDecomp {
    let mut sym = r.clone();
    hermitian_symmetrize(&mut sym);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    EigenDecomp {
        phi: CMatrix::from_fn(r.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]),
        lambda: order.iter().map(|&j| eig.eigenvalues[j]).collect(),
    }
}

/// `σ²_d − p̄ᴴ R̄⁻¹ p̄`.
pub fn mse_closed_form(p_bar: &CVector, r_bar: &CMatrix, sigma_d2: f64) -> Result<f64> {
    if r_bar.nrows() != p_bar.len() || r_bar.ncols() != p_bar.len() {
        return Err(Error::DimensionMismatch {
            expected: p_bar.len(),
            found: r_bar.nrows(),
        });
    }
    let w = solve_reduced(r_bar, p_bar).ok_or(Error::Singular {
        context: "reduced covariance",
        cycle: None,
    })?;
    Ok(sigma_d2 - p_bar.dotc(&w).re)
}

/// Solves `R̄ w = p̄`, treating numerically rank-deficient `R̄` as singular.
fn solve_reduced(r_bar: &CMatrix, p_bar: &CVector) -> Option<CVector> {
    let n = r_bar.nrows();
    if n == 0 {
        return Some(CVector::zeros(0));
    }
    let scale = r_bar.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let eig = eigen_decomp(r_bar);
    let min = eig.lambda[n - 1];
    if !(min > 1e-13 * scale) {
        return None;
    }
    Some(inverse_hermitian(r_bar)? * p_bar)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSolution {
    pub s_d: CMatrix,
    pub omega_bar: CVector,
    pub r_bar: CMatrix,
    pub p_bar: CVector,
    pub mse: f64,
    /// Completed alternation cycles (the initial reduced Wiener step is cycle 0).
    pub cycles: usize,
    /// MSE after the initial step and after each cycle.
    pub mse_history: Vec<f64>,
    /// Regularized objective after the initial step and after each cycle.
    pub objective_history: Vec<f64>,
}

pub const DEFAULT_MAX_CYCLES: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;

/// The regularized objective minimized by [`alt_fixed_point`].
pub fn objective(moments: &MomentModel, s_d: &CMatrix, omega_bar: &CVector, gamma: f64, delta: f64) -> f64 {
    let rs = &moments.r * s_d;
    let r_bar = s_d.adjoint() * &rs;
    let p_bar = s_d.ad_mul(&moments.p);
    let mse = moments.sigma_d2 - 2.0 * omega_bar.dotc(&p_bar).re + omega_bar.dotc(&(&r_bar * omega_bar)).re;
    let trace_rs = r_bar.trace().re;
    let trace_s: f64 = (0..s_d.ncols()).map(|j| s_d[(j, j)].re).sum();
    mse + delta * trace_rs - 2.0 * gamma * trace_s
}

/// Alternates the closed-form `S_D` and `ω̄` minimizers until the MSE changes
/// by less than `tol`.
///
/// The `S_D` step solves `R S_D (ω̄ω̄ᴴ + δI) = p ω̄ᴴ + γ I_{M,D}`. When
/// `ω̄ω̄ᴴ + δI` is singular (`δ = 0`) and `γ = 0`, the component of `S_D`
/// outside the span of `ω̄` does not affect the objective and is kept.
pub fn alt_fixed_point(
    moments: &MomentModel,
    d: usize,
    gamma: f64,
    delta: f64,
    max_cycles: usize,
    tol: f64,
) -> Result<FixedPointSolution> {
    let m = moments.dim();
    if d == 0 || d > m {
        return Err(Error::InvalidParameter(format!(
            "reduced rank must satisfy 1 <= D <= M, got D = {d}, M = {m}"
        )));
    }
    if gamma < 0.0 || delta < 0.0 {
        return Err(Error::InvalidParameter("gamma and delta must be nonnegative".into()));
    }
    if delta == 0.0 && gamma > 0.0 {
        return Err(Error::InvalidParameter(
            "gamma > 0 with delta = 0 leaves the objective unbounded below".into(),
        ));
    }
    let r_inv = inverse_hermitian(&moments.r).ok_or(Error::Singular {
        context: "regressor covariance",
        cycle: None,
    })?;
    let upsilon = identity_md(m, d);

    let omega_step = |s: &CMatrix, cycle: usize| -> Result<(CMatrix, CVector, CVector)> {
        let r_bar = s.adjoint() * &moments.r * s;
        let p_bar = s.ad_mul(&moments.p);
        let w = solve_reduced(&r_bar, &p_bar).ok_or(Error::Singular {
            context: "reduced covariance",
            cycle: Some(cycle),
        })?;
        Ok((r_bar, p_bar, w))
    };

    let mut s = upsilon.clone();
    let (mut r_bar, mut p_bar, mut w) = omega_step(&s, 0)?;
    let mut mse = moments.sigma_d2 - p_bar.dotc(&w).re;
    let mut mse_history = vec![mse];
    let mut objective_history = vec![objective(moments, &s, &w, gamma, delta)];
    let mut cycles = 0;

    for cycle in 1..=max_cycles {
        let a = &w * w.adjoint() + CMatrix::identity(d, d) * Complex64::new(delta, 0.0);
        let b = &moments.p * w.adjoint() + &upsilon * Complex64::new(gamma, 0.0);
        s = if delta > 0.0 {
            let a_inv = inverse_hermitian(&a).ok_or(Error::Singular {
                context: "estimator correlation",
                cycle: Some(cycle),
            })?;
            &r_inv * b * a_inv
        } else {
            let wn = w.norm_squared();
            if wn == 0.0 {
                s
            } else {
                let a_pinv = &a / Complex64::new(wn * wn, 0.0);
                let proj = &w * w.adjoint() / Complex64::new(wn, 0.0);
                &r_inv * b * a_pinv + &s * (CMatrix::identity(d, d) - proj)
            }
        };
        (r_bar, p_bar, w) = omega_step(&s, cycle)?;
        let next = moments.sigma_d2 - p_bar.dotc(&w).re;
        mse_history.push(next);
        objective_history.push(objective(moments, &s, &w, gamma, delta));
        cycles = cycle;
        let change = (next - mse).abs();
        mse = next;
        if change < tol {
            break;
        }
    }

    Ok(FixedPointSolution {
        s_d: s,
        omega_bar: w,
        r_bar,
        p_bar,
        mse,
        cycles,
        mse_history,
        objective_history,
    })
}

/// Expected DRJIO-NLMS update directions at `(S_D, ω̄)`:
/// `(p − R S_D ω̄) ω̄ᴴ + γ I_{M,D} − δ R S_D` for `S_D` and `p̄ − R̄ ω̄` for `ω̄`.
///
/// Both vanish at a fixed point of [`alt_fixed_point`] with the same `γ`, `δ`.
pub fn expected_nlms_drift(
    moments: &MomentModel,
    s_d: &CMatrix,
    omega_bar: &CVector,
    gamma: f64,
    delta: f64,
) -> (CMatrix, CVector) {
    let (m, d) = s_d.shape();
    let rs = &moments.r * s_d;
    let residual = &moments.p - &rs * omega_bar;
    let ds = &residual * omega_bar.adjoint() + identity_md(m, d) * Complex64::new(gamma, 0.0)
        - &rs * Complex64::new(delta, 0.0);
    let dw = s_d.ad_mul(&residual);
    (ds, dw)
}

/// Rank-`D` Wiener filter `Φ_D Λ_D⁻¹ Φ_Dᴴ p` and its MSE.
///
/// Eigenvectors are ordered by eigenvalue; inside a cluster of equal
/// eigenvalues the ones capturing more of `p` come first, then the one whose
/// largest entry has the smaller coordinate index. A diagonal `R` uses the
/// coordinate axes as its eigenbasis. The subspace is reported as degenerate
/// only if the `D`-th and `(D+1)`-th directions tie on both keys while
/// capturing a nonzero part of `p`.
pub fn rank_d_wiener(moments: &MomentModel, d: usize) -> Result<(CVector, f64)> {
    let m = moments.dim();
    if d == 0 || d > m {
        return Err(Error::InvalidParameter(format!(
            "reduced rank must satisfy 1 <= D <= M, got D = {d}, M = {m}"
        )));
    }
    let eig = ordered_eigenbasis(moments);
    let scale = eig.lambda.first().copied().unwrap_or(0.0).abs().max(f64::MIN_POSITIVE);
    let energy = |j: usize| eig.phi.column(j).dotc(&moments.p).norm_sqr();
    if d < m {
        let same_value = (eig.lambda[d - 1] - eig.lambda[d]).abs() <= 1e-10 * scale;
        let (e1, e2) = (energy(d - 1), energy(d));
        let energy_scale = moments.p.norm_squared().max(f64::MIN_POSITIVE);
        if same_value && (e1 - e2).abs() <= 1e-12 * energy_scale && e1 > 1e-14 * energy_scale {
            return Err(Error::DegenerateSubspace { rank: d });
        }
    }
    let mut w = CVector::zeros(m);
    let mut captured = 0.0;
    for j in 0..d {
        if !(eig.lambda[j] > 0.0) {
            return Err(Error::Singular {
                context: "dominant eigenvalues",
                cycle: None,
            });
        }
        let phi = eig.phi.column(j);
        let coef = phi.dotc(&moments.p);
        captured += coef.norm_sqr() / eig.lambda[j];
        w += phi * (coef / eig.lambda[j]);
    }
    Ok((w, moments.sigma_d2 - captured))
}

fn ordered_eigenbasis(moments: &MomentModel) -> EigenDecomp {
    let r = &moments.r;
    let m = r.nrows();
    let diagonal = (0..m).all(|a| (0..m).all(|b| a == b || r[(a, b)] == Complex64::new(0.0, 0.0)));
    let base = if diagonal {
        EigenDecomp {
            phi: CMatrix::identity(m, m),
            lambda: (0..m).map(|a| r[(a, a)].re).collect(),
        }
    } else {
        eigen_decomp(r)
    };
    let scale = base.lambda.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    let energy: Vec<f64> = (0..m).map(|j| base.phi.column(j).dotc(&moments.p).norm_sqr()).collect();
    let energy_tol = 1e-12 * moments.p.norm_squared().max(f64::MIN_POSITIVE);
    let lead: Vec<usize> = (0..m)
        .map(|j| {
            let col = base.phi.column(j);
            (0..m)
                .max_by(|&a, &b| col[a].norm().total_cmp(&col[b].norm()).then(b.cmp(&a)))
                .unwrap_or(0)
        })
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (base.lambda[a], base.lambda[b]);
        if (la - lb).abs() > 1e-10 * scale {
            return lb.total_cmp(&la);
        }
        if (energy[a] - energy[b]).abs() > energy_tol {
            return energy[b].total_cmp(&energy[a]);
        }
        lead[a].cmp(&lead[b])
    });
    EigenDecomp {
        phi: CMatrix::from_fn(m, m, |i, j| base.phi[(i, order[j])]),
        lambda: order.iter().map(|&j| base.lambda[j]).collect(),
    }
}

/// Per-node trajectories of the deterministic recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionTrace {
    /// `trajectories[i][k]` is `ω_k(i)`; index 0 holds the initial vectors.
    pub trajectories: Vec<Vec<CVector>>,
    /// `norms[i][k] = ‖ω_k(i)‖`.
    pub norms: Vec<Vec<f64>>,
}

/// `ω_k(i) = Σ_l c_kl Λ_l² ω_l (ω_lᴴΛ_l²ω_l)⁻¹ (ω_lᴴω_l)` in eigen coordinates.
///
/// `spectra[l]` holds the eigenvalues `Λ_l` of node `l`.
pub fn deterministic_recursion(
    spectra: &[Vec<f64>],
    weights: &CombinationMatrix,
    omega_init: &[CVector],
    iters: usize,
) -> Result<RecursionTrace> {
    let n = weights.n_nodes();
    if spectra.len() != n || omega_init.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: spectra.len().min(omega_init.len()),
        });
    }
    let m = omega_init.first().map(|w| w.len()).unwrap_or(0);
    if spectra.iter().any(|s| s.len() != m) || omega_init.iter().any(|w| w.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: spectra.iter().map(|s| s.len()).find(|&l| l != m).unwrap_or(0),
        });
    }
    let mut current: Vec<CVector> = omega_init.to_vec();
    let norms_of = |ws: &[CVector]| ws.iter().map(|w| w.norm()).collect::<Vec<_>>();
    let mut trajectories = vec![current.clone()];
    let mut norms = vec![norms_of(&current)];
    for i in 1..=iters {
        let mapped: Vec<CVector> = current
            .iter()
            .zip(spectra)
            .map(|(w, s)| {
                let sq: Vec<f64> = s.iter().map(|v| v * v).collect();
                let quad: f64 = w.iter().zip(&sq).map(|(z, q)| z.norm_sqr() * q).sum();
                if !(quad > 0.0) {
                    return Err(Error::Singular {
                        context: "deterministic recursion denominator",
                        cycle: Some(i),
                    });
                }
                let ratio = w.norm_squared() / quad;
                Ok(CVector::from_fn(m, |j, _| w[j] * (sq[j] * ratio)))
            })
            .collect::<Result<_>>()?;
        current = (0..n)
            .map(|k| {
                let mut acc = CVector::zeros(m);
                for (l, c) in weights.row(k) {
                    acc.axpy(Complex64::new(c, 0.0), &mapped[l], Complex64::new(1.0, 0.0));
                }
                acc
            })
            .collect();
        norms.push(norms_of(&current));
        trajectories.push(current.clone());
    }
    Ok(RecursionTrace { trajectories, norms })
}

/// Ceiling on the norm reachable by a single node's recursion from `omega`.
///
/// With `σ_j = λ_j²`, `T` the cluster of largest `σ`, `q = σ_{r+1}/σ_r` the
/// gap ratio to the next value and `C = Σ_{j∉T}|ω_j|² / Σ_{j∈T}|ω_j|²`, every
/// step multiplies `‖ω‖²` by at most `1 + C(i)` while `C(i) ≤ q^{2i} C`, so
/// `‖ω(∞)‖ ≤ ‖ω‖ · exp(C / (2(1 − q²)))`.
pub fn single_node_bound(spectrum: &[f64], omega: &CVector) -> f64 {
    let sq: Vec<f64> = spectrum.iter().map(|v| v * v).collect();
    let top = sq.iter().copied().fold(0.0, f64::max);
    let in_top = |s: f64| (top - s).abs() <= 1e-12 * top;
    let next = sq.iter().copied().filter(|&s| !in_top(s)).fold(0.0, f64::max);
    let q = if top > 0.0 { next / top } else { 1.0 };
    let (inside, outside) = omega.iter().zip(&sq).fold((0.0, 0.0), |(a, b), (z, &s)| {
        if in_top(s) {
            (a + z.norm_sqr(), b)
        } else {
            (a, b + z.norm_sqr())
        }
    });
    if outside == 0.0 {
        return omega.norm();
    }
    if inside == 0.0 || q >= 1.0 {
        return f64::INFINITY;
    }
    let c = outside / inside;
    omega.norm() * (c / (2.0 * (1.0 - q * q))).exp()
}

/// Per-node bound `Σ_l c_kl · single_node_bound(Λ_l, ω_l(0))`.
pub fn recursion_norm_bound(
    spectra: &[Vec<f64>],
    weights: &CombinationMatrix,
    omega_init: &[CVector],
) -> Vec<f64> {
    let per_node: Vec<f64> = spectra
        .iter()
        .zip(omega_init)
        .map(|(s, w)| single_node_bound(s, w))
        .collect();
    (0..weights.n_nodes())
        .map(|k| weights.row(k).iter().map(|&(l, c)| c * per_node[l]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::signal::ParameterKind;
    use crate::topology::{metropolis_weights, Topology};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vec_of(values: &[f64]) -> CVector {
        CVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0)))
    }

    fn real_model(alpha: f64, m: usize, noise: f64) -> NodeSignalModel {
        NodeSignalModel::new(c(alpha, 0.0), noise, m).unwrap()
    }

    #[test]
    fn white_covariance_is_identity() {
        let p = crate::signal::make_parameter(ParameterKind::FullRank, 4, 4, 1).unwrap();
        let mm = exact_moments(&real_model(0.0, 4, 0.01), &p).unwrap();
        assert_eq!(mm.r, CMatrix::identity(4, 4));
        assert!((mm.sigma_d2 - (p.omega0.norm_squared() + 0.01)).abs() < 1e-12);
    }

    #[test]
    fn ar1_covariance_real() {
        let r = ar1_covariance(c(0.5, 0.0), 3);
        let expect = [[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(r[(a, b)], c(expect[a][b], 0.0));
            }
        }
    }

    #[test]
    fn zero_parameter_moments() {
        let p = ParameterVector {
            omega0: CVector::zeros(3),
            kind: ParameterKind::FullRank,
        };
        let mm = exact_moments(&real_model(0.3, 3, 0.2), &p).unwrap();
        assert_eq!(mm.p, CVector::zeros(3));
        assert_eq!(mm.sigma_d2, 0.2);
    }

    #[test]
    fn eigen_reconstructs() {
        let r = ar1_covariance(c(0.4, 0.3), 6);
        let e = eigen_decomp(&r);
        assert!(max_abs_diff(&e.reconstruct(), &r) < 1e-10);
        assert!(max_abs_diff(&(e.phi.adjoint() * &e.phi), &CMatrix::identity(6, 6)) < 1e-10);
        assert!(e.lambda.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn mse_closed_form_examples() {
        let r_bar = CMatrix::from_element(1, 1, c(2.0, 0.0));
        assert!((mse_closed_form(&vec_of(&[1.0]), &r_bar, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(mse_closed_form(&vec_of(&[0.0]), &r_bar, 0.7).unwrap(), 0.7);
        let zero = CMatrix::zeros(1, 1);
        assert!(matches!(
            mse_closed_form(&vec_of(&[1.0]), &zero, 1.0),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn full_rank_fixed_point_is_wiener() {
        let p = crate::signal::make_parameter(ParameterKind::FullRank, 5, 5, 2).unwrap();
        let mm = exact_moments(&real_model(0.5, 5, 0.01), &p).unwrap();
        let sol = alt_fixed_point(&mm, 5, 0.0, 0.0, DEFAULT_MAX_CYCLES, DEFAULT_TOL).unwrap();
        let (w, mse) = mm.wiener().unwrap();
        assert!((&sol.omega_bar - &w).norm() < 1e-10);
        assert!((sol.mse - mse).abs() < 1e-12);
        assert!(sol.cycles <= 1);
    }

    #[test]
    fn zero_cross_correlation_fixed_point() {
        let p = ParameterVector {
            omega0: CVector::zeros(6),
            kind: ParameterKind::FullRank,
        };
        let mm = exact_moments(&real_model(0.5, 6, 0.3), &p).unwrap();
        let sol = alt_fixed_point(&mm, 2, 0.02, 0.01, DEFAULT_MAX_CYCLES, DEFAULT_TOL).unwrap();
        assert!((sol.mse - 0.3).abs() < 1e-12);
    }

    #[test]
    fn unregularized_fixed_point_reaches_full_wiener() {
        let p = crate::signal::make_parameter(ParameterKind::FullRank, 6, 6, 4).unwrap();
        let mm = exact_moments(&real_model(0.5, 6, 0.01), &p).unwrap();
        let sol = alt_fixed_point(&mm, 3, 0.0, 0.0, DEFAULT_MAX_CYCLES, DEFAULT_TOL).unwrap();
        let (_, full) = mm.wiener().unwrap();
        assert!((sol.mse - full).abs() < 1e-10);
        assert!(matches!(
            alt_fixed_point(&mm, 3, 0.1, 0.0, DEFAULT_MAX_CYCLES, DEFAULT_TOL),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rank_d_wiener_full_rank() {
        let p = crate::signal::make_parameter(ParameterKind::FullRank, 6, 6, 5).unwrap();
        let mm = exact_moments(&real_model(0.6, 6, 0.01), &p).unwrap();
        let (w, mse) = rank_d_wiener(&mm, 6).unwrap();
        let (wf, msef) = mm.wiener().unwrap();
        assert!((w - wf).norm() < 1e-9);
        assert!((mse - msef).abs() < 1e-9);
    }

    #[test]
    fn rank_d_wiener_identity_keeps_largest_coordinates() {
        let omega = vec_of(&[0.1, 3.0, 0.0, -2.0, 0.5]);
        let mm = MomentModel::from_covariance(CMatrix::identity(5, 5), &omega, 0.01).unwrap();
        let (w, mse) = rank_d_wiener(&mm, 2).unwrap();
        assert_eq!(w, vec_of(&[0.0, 3.0, 0.0, -2.0, 0.0]));
        let expect = mm.sigma_d2 - 9.0 - 4.0;
        assert!((mse - expect).abs() < 1e-12);
    }

    #[test]
    fn rank_d_wiener_degenerate_boundary() {
        let omega = vec_of(&[1.0, 1.0, 0.0]);
        let mm = MomentModel::from_covariance(CMatrix::identity(3, 3), &omega, 0.0).unwrap();
        assert!(matches!(rank_d_wiener(&mm, 1), Err(Error::DegenerateSubspace { rank: 1 })));
        assert!(rank_d_wiener(&mm, 2).is_ok());
    }

    #[test]
    fn rank_d_wiener_zero_cross_correlation() {
        let mm = MomentModel::from_covariance(ar1_covariance(c(0.5, 0.0), 4), &CVector::zeros(4), 0.1).unwrap();
        let (w, mse) = rank_d_wiener(&mm, 2).unwrap();
        assert_eq!(w, CVector::zeros(4));
        assert_eq!(mse, 0.1);
    }

    #[test]
    fn recursion_one_hot_is_fixed() {
        let t = Topology::from_edges(1, &[]).unwrap();
        let w = metropolis_weights(&t).unwrap();
        let start = vec_of(&[0.0, 2.0, 0.0]);
        let trace = deterministic_recursion(&[vec![3.0, 1.5, 0.5]], &w, std::slice::from_ref(&start), 5).unwrap();
        for step in &trace.trajectories {
            assert!((&step[0] - &start).norm() < 1e-14);
        }
    }

    #[test]
    fn recursion_zero_start_is_reported() {
        let w = CombinationMatrix::identity(1);
        let err = deterministic_recursion(&[vec![1.0, 2.0]], &w, &[CVector::zeros(2)], 3).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn single_node_norm_grows_to_bound() {
        let spectrum = vec![2.0, 1.0, 0.5];
        let start = vec_of(&[1.0, 1.0, 1.0]);
        let w = CombinationMatrix::identity(1);
        let trace = deterministic_recursion(std::slice::from_ref(&spectrum), &w, std::slice::from_ref(&start), 200).unwrap();
        let bound = single_node_bound(&spectrum, &start);
        let norms: Vec<f64> = trace.norms.iter().map(|n| n[0]).collect();
        assert!(norms.windows(2).all(|p| p[1] >= p[0] - 1e-12));
        assert!(*norms.last().unwrap() <= bound);
    }
}
