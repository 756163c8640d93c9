//! Distributed low-rank adaptive estimation over partially connected networks.
//!
//! Every node observes `d_k(i) = ω₀ᴴ x_k(i) + n_k(i)` and cooperates with its
//! neighbours through adapt-then-combine diffusion. Besides the full-rank
//! diffusion NLMS/RLS baselines, the crate provides the DRJIO agents: each node
//! keeps a local `M × D` dimensionality-reduction matrix and only exchanges a
//! `D`-dimensional estimate with its neighbourhood.
//!
//! Modules:
//!
//! * [`topology`]: graphs, edge lists and Metropolis combination weights.
//! * [`signal`]: AR(1) regressor streams, measurements, unknown parameters.
//! * [`baselines`]: diffusion NLMS and diffusion RLS agents.
//! * [`drjio`]: DRJIO-NLMS and DRJIO-RLS agents.
//! * [`oracle`]: exact moments, alternating fixed point, rank-D Wiener filter.
//! * [`complexity`]: per-iteration operation counts.
//! * [`metrics`]: learning curves.
//! * [`harness`]: scenarios, Monte Carlo runner, CSV output.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod complexity;
pub mod drjio;
mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod signal;
pub mod topology;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;

pub use baselines::{NlmsAgentState, RlsAgentState};
pub use complexity::{ComplexityReport, CostModel};
pub use drjio::{DrjioNlmsHyper, DrjioNlmsState, DrjioRlsState};
pub use harness::{Algorithm, ScenarioConfig, ScenarioKind, ScenarioOutcome};
pub use metrics::MseTrace;
pub use oracle::{EigenDecomp, FixedPointSolution, MomentModel};
pub use signal::{NodeSignalModel, ParameterKind, ParameterVector, Sample};
pub use topology::{CombinationMatrix, Topology};
