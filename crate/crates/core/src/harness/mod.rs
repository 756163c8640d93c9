//! Scenario configuration, the Monte Carlo runner and CSV output.
//!
//! Every run draws a fresh `ω₀` and fresh node streams from seeds derived
//! from `(root seed, run, node, role)`; topology and AR(1) coefficients are
//! drawn once per scenario. All selected algorithms consume the same samples,
//! and all neighbour traffic goes through an [`Exchange`] that counts it.
//!
//! ```no_run
//! use drjio_core::harness::{run_scenario, ScenarioConfig, ScenarioKind};
//!
//! let mut cfg = ScenarioConfig::preset(ScenarioKind::WsnFull20);
//! cfg.runs = 10;
//! let outcome = run_scenario(&cfg).unwrap();
//! for trace in outcome.traces() {
//!     println!("{}: {:e}", trace.algorithm, trace.steady_state(50));
//! }
//! ```

mod config;
mod exchange;
mod output;
mod runner;

pub use config::{parse_algorithm_list, AlphaDist, Algorithm, ScenarioConfig, ScenarioKind};
pub use exchange::{Exchange, ExchangeStats};
pub use output::{manifest, mse_csv, sweep_csv, write_outputs, MSE_CSV_HEADER, SWEEP_CSV_HEADER};
pub use runner::{
    generate_run, run_algorithm, run_rank_sweep, run_scenario, simulate_run, AlgorithmRun, AlgorithmSummary,
    Divergence, RunData, RunResult, ScenarioOutcome, ScenarioSetup, SweepRow,
};
