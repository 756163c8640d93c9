//! Learning curves.
//!
//! The network MSE at iteration `i` is the node average of the a-priori error
//! `|d_k(i) − ω̂_kᴴ(i−1) x_k(i)|²`, with low-rank agents contributing their
//! reconstructed estimate `S_D ω̄`.

use crate::linalg::CVector;
use crate::signal::Sample;
use crate::{Error, Result};

/// Value reported by [`to_db`] for an exact zero.
pub const DB_FLOOR: f64 = -300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MseTrace {
    pub per_iteration: Vec<f64>,
    pub runs: usize,
    pub algorithm: String,
    pub scenario: String,
}

impl MseTrace {
    pub fn new(per_iteration: Vec<f64>, algorithm: impl Into<String>, scenario: impl Into<String>) -> Self {
        MseTrace {
            per_iteration,
            runs: 1,
            algorithm: algorithm.into(),
            scenario: scenario.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.per_iteration.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_iteration.is_empty()
    }

    /// Mean of the last `window` values.
    pub fn steady_state(&self, window: usize) -> f64 {
        let w = window.clamp(1, self.len().max(1));
        let tail = &self.per_iteration[self.len().saturating_sub(w)..];
        tail.iter().sum::<f64>() / tail.len().max(1) as f64
    }
}

/// `|d − ω̂ᴴx|²`.
pub fn record_error(omega_hat: &CVector, sample: &Sample) -> Result<f64> {
    if omega_hat.len() != sample.x.len() {
        return Err(Error::DimensionMismatch {
            expected: sample.x.len(),
            found: omega_hat.len(),
        });
    }
    Ok((sample.d - omega_hat.dotc(&sample.x)).norm_sqr())
}

/// Pointwise mean of equally long traces; `runs` is the total of the inputs.
pub fn average_traces(traces: &[MseTrace]) -> Result<MseTrace> {
    let first = traces
        .first()
        .ok_or_else(|| Error::InvalidParameter("cannot average zero traces".into()))?;
    let len = first.len();
    let mut sum = vec![0.0; len];
    let mut runs = 0;
    for t in traces {
        if t.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: t.len(),
            });
        }
        for (s, v) in sum.iter_mut().zip(&t.per_iteration) {
            *s += v * t.runs as f64;
        }
        runs += t.runs;
    }
    for s in &mut sum {
        *s /= runs as f64;
    }
    Ok(MseTrace {
        per_iteration: sum,
        runs,
        algorithm: first.algorithm.clone(),
        scenario: first.scenario.clone(),
    })
}

/// `10·log₁₀(v)`, with zero mapped to [`DB_FLOOR`].
pub fn value_to_db(v: f64) -> f64 {
    if v <= 0.0 {
        DB_FLOOR
    } else {
        (10.0 * v.log10()).max(DB_FLOOR)
    }
}

pub fn to_db(trace: &MseTrace) -> Vec<f64> {
    trace.per_iteration.iter().map(|&v| value_to_db(v)).collect()
}

/// First iteration index whose value is at or below `threshold_db`.
pub fn iterations_to_threshold(trace: &MseTrace, threshold_db: f64) -> Option<usize> {
    trace.per_iteration.iter().position(|&v| value_to_db(v) <= threshold_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn trace(values: &[f64]) -> MseTrace {
        MseTrace::new(values.to_vec(), "a", "s")
    }

    #[test]
    fn error_examples() {
        let x = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
        let w = CVector::from_vec(vec![Complex64::new(0.5, 0.5), Complex64::new(1.0, 0.0)]);
        let d = w.dotc(&x);
        assert_eq!(record_error(&w, &Sample { x: x.clone(), d }).unwrap(), 0.0);
        let z = CVector::zeros(2);
        assert_eq!(record_error(&z, &Sample { x, d }).unwrap(), d.norm_sqr());
    }

    #[test]
    fn single_trace_average_is_identity() {
        let t = trace(&[1.0, 0.5, 0.25]);
        assert_eq!(average_traces(std::slice::from_ref(&t)).unwrap(), t);
        assert!(average_traces(&[]).is_err());
        assert!(average_traces(&[t, trace(&[1.0])]).is_err());
    }

    #[test]
    fn db_conversion() {
        let t = trace(&[0.001; 4]);
        assert!(to_db(&t).iter().all(|&v| (v + 30.0).abs() < 1e-12));
        assert_eq!(value_to_db(0.0), DB_FLOOR);
    }

    #[test]
    fn threshold_crossing() {
        let t = trace(&[1.0, 0.1, 0.01, 0.001]);
        assert_eq!(iterations_to_threshold(&t, 10.0), Some(0));
        assert_eq!(iterations_to_threshold(&t, -20.0), Some(2));
        assert_eq!(iterations_to_threshold(&t, -40.0), None);
    }
}
