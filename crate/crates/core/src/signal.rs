//! Regressors, measurements and unknown parameter vectors.
//!
//! Every node observes `d(i) = ω₀ᴴ x(i) + n(i)` where `x(i)` is the shift
//! register `[u(i), u(i−1), …, u(i−M+1)]` of a unit-variance complex AR(1)
//! process `u(i) = α u(i−1) + w(i)` and `n(i)` is circular complex Gaussian.

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;

use crate::linalg::CVector;
use crate::rng::{self, StreamRng};
use crate::topology::Topology;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterKind {
    /// Every entry i.i.d. unit-variance complex Gaussian.
    FullRank,
    /// `D` Gaussian entries at random positions, the rest zero.
    Sparse,
    /// The all-ones vector.
    AllOnes,
}

impl ParameterKind {
    pub fn name(self) -> &'static str {
        match self {
            ParameterKind::FullRank => "full-rank",
            ParameterKind::Sparse => "sparse",
            ParameterKind::AllOnes => "all-ones",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full-rank" | "full" => Some(ParameterKind::FullRank),
            "sparse" => Some(ParameterKind::Sparse),
            "all-ones" | "ones" => Some(ParameterKind::AllOnes),
            _ => None,
        }
    }
}

/// The unknown `ω₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    pub omega0: CVector,
    pub kind: ParameterKind,
}

impl ParameterVector {
    pub fn len(&self) -> usize {
        self.omega0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega0.is_empty()
    }

    pub fn nonzeros(&self) -> usize {
        self.omega0.iter().filter(|z| z.norm_sqr() != 0.0).count()
    }
}

/// Draws `ω₀` of length `m`; `d` is the number of nonzeros for the sparse kind.
pub fn make_parameter(kind: ParameterKind, m: usize, d: usize, seed: u64) -> Result<ParameterVector> {
    if m == 0 {
        return Err(Error::InvalidParameter("parameter length must be positive".into()));
    }
    if kind == ParameterKind::Sparse && (d == 0 || d > m) {
        return Err(Error::InvalidParameter(format!(
            "sparse parameter needs 1 <= D <= M, got D = {d}, M = {m}"
        )));
    }
    let mut rng = rng::stream(seed, &[rng::role::PARAMETER]);
    let omega0 = match kind {
        ParameterKind::FullRank => CVector::from_fn(m, |_, _| rng::complex_gaussian(&mut rng, 1.0)),
        ParameterKind::AllOnes => CVector::from_element(m, Complex64::new(1.0, 0.0)),
        ParameterKind::Sparse => {
            let mut v = CVector::zeros(m);
            let mut positions = sample_indices(&mut rng, m, d).into_vec();
            positions.sort_unstable();
            for p in positions {
                // A zero draw has probability zero but would break the support count.
                let mut z = rng::complex_gaussian(&mut rng, 1.0);
                while z.norm_sqr() == 0.0 {
                    z = rng::complex_gaussian(&mut rng, 1.0);
                }
                v[p] = z;
            }
            v
        }
    };
    Ok(ParameterVector { omega0, kind })
}

/// Per-node AR(1) regressor statistics and measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSignalModel {
    pub alpha: Complex64,
    pub noise_var: f64,
    pub regressor_len: usize,
}

impl NodeSignalModel {
    pub fn new(alpha: Complex64, noise_var: f64, regressor_len: usize) -> Result<Self> {
        let model = NodeSignalModel {
            alpha,
            noise_var,
            regressor_len,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.norm() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "AR(1) coefficient must satisfy |alpha| < 1, got {}",
                self.alpha
            )));
        }
        if !(self.noise_var >= 0.0 && self.noise_var.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be finite and nonnegative, got {}",
                self.noise_var
            )));
        }
        if self.regressor_len == 0 {
            return Err(Error::InvalidParameter("regressor length must be positive".into()));
        }
        Ok(())
    }

    /// Innovation variance `1 − |α|²`.
    pub fn innovation_var(&self) -> f64 {
        1.0 - self.alpha.norm_sqr()
    }
}

/// One regressor and its measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: CVector,
    pub d: Complex64,
}

/// Endless stream of shift-register regressors.
///
/// The scalar process starts from its stationary distribution and runs
/// `10·M` warm-up steps before the first vector is emitted.
#[derive(Debug, Clone)]
pub struct Ar1Stream {
    alpha: Complex64,
    innovation_var: f64,
    rng: StreamRng,
    current: CVector,
}

impl Ar1Stream {
    fn step(&mut self) {
        let m = self.current.len();
        let next = self.alpha * self.current[0] + rng::complex_gaussian(&mut self.rng, self.innovation_var);
        for j in (1..m).rev() {
            self.current[j] = self.current[j - 1];
        }
        self.current[0] = next;
    }
}

impl Iterator for Ar1Stream {
    type Item = CVector;

    fn next(&mut self) -> Option<CVector> {
        self.step();
        Some(self.current.clone())
    }
}

pub fn ar1_regressor_stream(model: &NodeSignalModel, seed: u64) -> Result<Ar1Stream> {
    model.validate()?;
    let m = model.regressor_len;
    let mut rng = rng::stream(seed, &[rng::role::REGRESSOR]);
    let mut current = CVector::zeros(m);
    current[0] = rng::complex_gaussian(&mut rng, 1.0);
    let mut stream = Ar1Stream {
        alpha: model.alpha,
        innovation_var: model.innovation_var(),
        rng,
        current,
    };
    // The first M−1 steps fill the register; one extra keeps the emitted
    // vector strictly after the warm-up.
    for _ in 0..(10 * m).max(m) - 1 {
        stream.step();
    }
    Ok(stream)
}

/// `ω₀ᴴx + n` with `n ~ CN(0, noise_var)`.
pub fn measure(
    omega0: &ParameterVector,
    x: &CVector,
    noise_var: f64,
    rng: &mut StreamRng,
) -> Result<Complex64> {
    if omega0.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: omega0.len(),
            found: x.len(),
        });
    }
    let clean = omega0.omega0.dotc(x);
    if noise_var == 0.0 {
        return Ok(clean);
    }
    Ok(clean + rng::complex_gaussian(rng, noise_var))
}

/// Regressor stream paired with a noise stream: yields complete samples.
#[derive(Debug, Clone)]
pub struct SampleStream {
    regressors: Ar1Stream,
    noise: StreamRng,
    omega0: ParameterVector,
    noise_var: f64,
}

impl SampleStream {
    /// Regressors come from `regressor_seed`, noise from `noise_seed`.
    pub fn new(
        model: &NodeSignalModel,
        omega0: &ParameterVector,
        regressor_seed: u64,
        noise_seed: u64,
    ) -> Result<Self> {
        if omega0.len() != model.regressor_len {
            return Err(Error::DimensionMismatch {
                expected: model.regressor_len,
                found: omega0.len(),
            });
        }
        Ok(SampleStream {
            regressors: ar1_regressor_stream(model, regressor_seed)?,
            noise: rng::stream(noise_seed, &[rng::role::NOISE]),
            omega0: omega0.clone(),
            noise_var: model.noise_var,
        })
    }
}

impl Iterator for SampleStream {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        let x = self.regressors.next()?;
        let d = measure(&self.omega0, &x, self.noise_var, &mut self.noise).ok()?;
        Some(Sample { x, d })
    }
}

/// Signal models for the linearized DC state-estimation grid.
#[derive(Debug, Clone)]
pub struct SmartGrid {
    pub models: Vec<NodeSignalModel>,
    pub parameter: ParameterVector,
    pub topology: Topology,
}

/// The IEEE 14-bus grid with `users_per_bus` users behind every bus.
///
/// The state vector is all ones; each bus sees a white (`α = 0`) regressor of
/// length `14 · users_per_bus` in place of its measurement Jacobian row.
pub fn smartgrid_models(n_buses: usize, users_per_bus: usize, noise_var: f64) -> Result<SmartGrid> {
    if n_buses != 14 {
        return Err(Error::InvalidParameter(format!(
            "only the 14-bus grid is embedded, got {n_buses} buses"
        )));
    }
    if users_per_bus == 0 {
        return Err(Error::InvalidParameter("users_per_bus must be positive".into()));
    }
    let m = n_buses * users_per_bus;
    let model = NodeSignalModel::new(Complex64::new(0.0, 0.0), noise_var, m)?;
    Ok(SmartGrid {
        models: vec![model; n_buses],
        parameter: make_parameter(ParameterKind::AllOnes, m, m, 0)?,
        topology: Topology::ieee_14_bus(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sparse_parameter_support() {
        let p = make_parameter(ParameterKind::Sparse, 20, 3, 9).unwrap();
        assert_eq!(p.nonzeros(), 3);
        assert!(make_parameter(ParameterKind::Sparse, 4, 5, 0).is_err());
        let full = make_parameter(ParameterKind::FullRank, 10, 10, 1).unwrap();
        assert_eq!(full.nonzeros(), 10);
    }

    #[test]
    fn all_ones_parameter() {
        let p = make_parameter(ParameterKind::AllOnes, 42, 0, 0).unwrap();
        assert_eq!(p.len(), 42);
        assert!(p.omega0.iter().all(|&z| z == c(1.0, 0.0)));
    }

    #[test]
    fn shift_register_structure() {
        let model = NodeSignalModel::new(c(0.3, 0.1), 0.0, 6).unwrap();
        let mut s = ar1_regressor_stream(&model, 4).unwrap();
        let a = s.next().unwrap();
        let b = s.next().unwrap();
        for j in 1..6 {
            assert_eq!(b[j], a[j - 1]);
        }
    }

    #[test]
    fn rejects_unstable_alpha() {
        assert!(NodeSignalModel::new(c(1.0, 0.0), 0.1, 3).is_err());
        assert!(NodeSignalModel::new(c(0.8, 0.7), 0.1, 3).is_err());
    }

    #[test]
    fn measurement_conjugates_parameter() {
        let mut omega = CVector::zeros(3);
        omega[0] = c(0.0, 1.0);
        let p = ParameterVector {
            omega0: omega,
            kind: ParameterKind::FullRank,
        };
        let mut x = CVector::zeros(3);
        x[0] = c(1.0, 0.0);
        let mut rng = rng::stream(0, &[]);
        assert_eq!(measure(&p, &x, 0.0, &mut rng).unwrap(), c(0.0, -1.0));
        assert!(measure(&p, &CVector::zeros(2), 0.0, &mut rng).is_err());
    }

    #[test]
    fn identical_seeds_identical_streams() {
        let model = NodeSignalModel::new(c(0.4, 0.0), 0.01, 5).unwrap();
        let p = make_parameter(ParameterKind::FullRank, 5, 5, 3).unwrap();
        let a: Vec<_> = SampleStream::new(&model, &p, 1, 2).unwrap().take(50).collect();
        let b: Vec<_> = SampleStream::new(&model, &p, 1, 2).unwrap().take(50).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn smart_grid_setup() {
        let g = smartgrid_models(14, 3, 0.001).unwrap();
        assert_eq!(g.parameter.len(), 42);
        assert_eq!(g.topology.n_nodes(), 14);
        assert!(g.models.iter().all(|m| m.noise_var == 0.001 && m.regressor_len == 42));
    }
}
