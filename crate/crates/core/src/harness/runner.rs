use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::config::{AlphaDist, Algorithm, ScenarioConfig, ScenarioKind};
use super::exchange::{Exchange, ExchangeStats};
use crate::baselines::{nlms_adapt, rls_adapt, NlmsAgentState, RlsAgentState};
use crate::drjio::{drjio_nlms_adapt, drjio_rls_adapt, DrjioNlmsHyper, DrjioNlmsState, DrjioRlsState};
use crate::linalg::{all_finite, CVector};
use crate::metrics::{average_traces, MseTrace};
use crate::rng::{self, role};
use crate::signal::{make_parameter, NodeSignalModel, ParameterVector, Sample, SampleStream};
use crate::topology::{metropolis_weights, random_connected_topology, CombinationMatrix, Topology};
use crate::{Error, Result};

/// Everything fixed for a scenario across its Monte Carlo runs.
#[derive(Debug, Clone)]
pub struct ScenarioSetup {
    pub topology: Topology,
    pub weights: CombinationMatrix,
    pub models: Vec<NodeSignalModel>,
}

impl ScenarioSetup {
    pub fn build(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let topology = if let Some(path) = &config.topology_file {
            let t = Topology::parse_edge_list(&std::fs::read_to_string(path)?)?;
            if t.n_nodes() != config.n_nodes {
                return Err(Error::Config(format!(
                    "topology file has {} nodes but n_nodes = {}",
                    t.n_nodes(),
                    config.n_nodes
                )));
            }
            t
        } else if config.scenario == ScenarioKind::Smartgrid14Bus {
            Topology::ieee_14_bus()
        } else {
            random_connected_topology(
                config.n_nodes,
                config.target_degree,
                rng::derive_seed(config.seed, &[role::TOPOLOGY]),
            )?
        };
        let weights = metropolis_weights(&topology)?;
        let mut alpha_rng = rng::stream(config.seed, &[role::ALPHA]);
        let models = (0..config.n_nodes)
            .map(|_| {
                let a = match config.alpha {
                    AlphaDist::Fixed(a) => a,
                    AlphaDist::Uniform { lo, hi } if lo == hi => lo,
                    AlphaDist::Uniform { lo, hi } => alpha_rng.random_range(lo..hi),
                };
                NodeSignalModel::new(Complex64::new(a, 0.0), config.noise_var, config.m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioSetup {
            topology,
            weights,
            models,
        })
    }
}

/// One Monte Carlo realization: `ω₀` and `samples[i][k]`.
#[derive(Debug, Clone)]
pub struct RunData {
    pub omega0: ParameterVector,
    pub samples: Vec<Vec<Sample>>,
    pub checksum: u64,
}

fn fnv_mix(h: &mut u64, v: f64) {
    for b in v.to_bits().to_le_bytes() {
        *h ^= b as u64;
        *h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
}

const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;

fn checksum_sample(h: &mut u64, s: &Sample) {
    for z in s.x.iter() {
        fnv_mix(h, z.re);
        fnv_mix(h, z.im);
    }
    fnv_mix(h, s.d.re);
    fnv_mix(h, s.d.im);
}

pub fn generate_run(config: &ScenarioConfig, setup: &ScenarioSetup, run: usize) -> Result<RunData> {
    let run_id = run as u64;
    let omega0 = make_parameter(
        config.parameter,
        config.m,
        config.nonzeros,
        rng::derive_seed(config.seed, &[run_id, role::PARAMETER]),
    )?;
    let mut streams = setup
        .models
        .iter()
        .enumerate()
        .map(|(k, model)| {
            SampleStream::new(
                model,
                &omega0,
                rng::derive_seed(config.seed, &[run_id, k as u64, role::REGRESSOR]),
                rng::derive_seed(config.seed, &[run_id, k as u64, role::NOISE]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checksum = FNV_OFFSET;
    let mut samples = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let row: Vec<Sample> = streams
            .iter_mut()
            .map(|s| s.next().expect("sample streams are endless"))
            .collect();
        for s in &row {
            checksum_sample(&mut checksum, s);
        }
        samples.push(row);
    }
    Ok(RunData {
        omega0,
        samples,
        checksum,
    })
}

enum Agent {
    Nlms(NlmsAgentState),
    Rls(RlsAgentState),
    DrjioNlms(DrjioNlmsState),
    DrjioRls(DrjioRlsState),
}

struct Params {
    mu0: f64,
    nlms_eps: f64,
    lambda: f64,
    drjio: DrjioNlmsHyper,
}

impl Agent {
    fn new(alg: Algorithm, config: &ScenarioConfig) -> Result<Self> {
        Ok(match alg {
            Algorithm::DNlms => Agent::Nlms(NlmsAgentState::new(config.m)),
            Algorithm::DRls => Agent::Rls(RlsAgentState::new(config.m, config.delta_init)),
            Algorithm::DrjioNlms => Agent::DrjioNlms(DrjioNlmsState::new(config.m, config.d)?),
            Algorithm::DrjioRls => Agent::DrjioRls(DrjioRlsState::new(config.m, config.d, config.delta_init)?),
        })
    }

    fn estimate(&self) -> CVector {
        match self {
            Agent::Nlms(s) => s.omega.clone(),
            Agent::Rls(s) => s.omega.clone(),
            Agent::DrjioNlms(s) => s.estimate(),
            Agent::DrjioRls(s) => s.estimate(),
        }
    }

    fn adapt(&mut self, sample: &Sample, p: &Params) -> Result<()> {
        match self {
            Agent::Nlms(s) => {
                nlms_adapt(s, sample, p.mu0, p.nlms_eps);
                if !all_finite(s.psi.iter()) {
                    return Err(Error::NonFinite("dNLMS update"));
                }
            }
            Agent::Rls(s) => {
                rls_adapt(s, sample, p.lambda);
                if !all_finite(s.psi.iter()) || !all_finite(s.p_inv.iter()) {
                    return Err(Error::NonFinite("dRLS update"));
                }
            }
            Agent::DrjioNlms(s) => drjio_nlms_adapt(s, sample, &p.drjio)?,
            Agent::DrjioRls(s) => drjio_rls_adapt(s, sample, p.lambda)?,
        }
        Ok(())
    }

    /// The intermediate estimate shared with neighbours.
    fn published(&self) -> CVector {
        match self {
            Agent::Nlms(s) => s.psi.clone(),
            Agent::Rls(s) => s.psi.clone(),
            Agent::DrjioNlms(s) => s.psi_bar.clone(),
            Agent::DrjioRls(s) => s.psi_bar.clone(),
        }
    }

    fn accept(&mut self, combined: CVector) {
        match self {
            Agent::Nlms(s) => s.omega = combined,
            Agent::Rls(s) => s.omega = combined,
            Agent::DrjioNlms(s) => s.omega_bar = combined,
            Agent::DrjioRls(s) => s.omega_bar = combined,
        }
    }
}

/// Where a run stopped because an agent produced a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence {
    pub algorithm: Algorithm,
    pub run: usize,
    pub iteration: usize,
    pub node: usize,
}

impl Divergence {
    pub fn to_error(self) -> Error {
        Error::Diverged {
            algorithm: self.algorithm.label().into(),
            iteration: self.iteration,
            node: self.node,
        }
    }
}

/// One algorithm on one realization.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    /// Network a-priori MSE per iteration (truncated on divergence).
    pub mse: Vec<f64>,
    /// Network mean-square deviation `‖ω̂_k − ω₀‖²` after each combine.
    pub msd: Vec<f64>,
    /// Reconstructed per-node estimates after the last iteration.
    pub final_estimates: Vec<CVector>,
    pub exchange: ExchangeStats,
    /// Checksum of the samples this algorithm consumed.
    pub consumed_checksum: u64,
    pub divergence: Option<Divergence>,
}

/// Runs one algorithm through the adapt / barrier / combine protocol.
pub fn run_algorithm(
    algorithm: Algorithm,
    config: &ScenarioConfig,
    setup: &ScenarioSetup,
    data: &RunData,
    run: usize,
) -> Result<AlgorithmRun> {
    let n = setup.weights.n_nodes();
    let params = Params {
        mu0: config.mu0,
        nlms_eps: config.nlms_eps,
        lambda: config.lambda,
        drjio: config.drjio_hyper(),
    };
    let mut agents = (0..n)
        .map(|_| Agent::new(algorithm, config))
        .collect::<Result<Vec<_>>>()?;
    let mut exchange = Exchange::new(n);
    let mut mse = Vec::with_capacity(data.samples.len());
    let mut msd = Vec::with_capacity(data.samples.len());
    let mut checksum = FNV_OFFSET;
    let mut divergence = None;
    let omega0 = &data.omega0.omega0;

    'outer: for (i, row) in data.samples.iter().enumerate() {
        let mut err = 0.0;
        for (k, (agent, sample)) in agents.iter_mut().zip(row).enumerate() {
            checksum_sample(&mut checksum, sample);
            err += (sample.d - agent.estimate().dotc(&sample.x)).norm_sqr();
            if agent.adapt(sample, &params).is_err() {
                divergence = Some(Divergence {
                    algorithm,
                    run,
                    iteration: i,
                    node: k,
                });
                break 'outer;
            }
            exchange.publish(k, agent.published())?;
        }
        mse.push(err / n as f64);
        let combined = exchange.combine_all(&setup.weights)?;
        for (agent, w) in agents.iter_mut().zip(combined) {
            agent.accept(w);
        }
        let dev: f64 = agents.iter().map(|a| (a.estimate() - omega0).norm_squared()).sum();
        msd.push(dev / n as f64);
    }

    Ok(AlgorithmRun {
        algorithm,
        mse,
        msd,
        final_estimates: agents.iter().map(Agent::estimate).collect(),
        exchange: exchange.stats(),
        consumed_checksum: checksum,
        divergence,
    })
}

/// All selected algorithms on one realization.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: usize,
    pub data_checksum: u64,
    pub algorithms: Vec<AlgorithmRun>,
}

pub fn simulate_run(config: &ScenarioConfig, setup: &ScenarioSetup, run: usize) -> Result<RunResult> {
    let data = generate_run(config, setup, run)?;
    let algorithms = config
        .algorithms
        .iter()
        .map(|&alg| {
            let r = run_algorithm(alg, config, setup, &data, run)?;
            if r.divergence.is_none() && r.consumed_checksum != data.checksum {
                return Err(Error::Config(format!(
                    "{alg} consumed a different sample stream in run {run}"
                )));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunResult {
        run,
        data_checksum: data.checksum,
        algorithms,
    })
}

/// Averaged results of a scenario.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    /// Average over the runs that did not diverge; `None` if all diverged.
    pub trace: Option<MseTrace>,
    pub msd: Option<Vec<f64>>,
    /// Per-run MSE traces in run order (diverged runs are truncated).
    pub run_traces: Vec<Vec<f64>>,
    /// Per-node estimates after the last iteration of run 0.
    pub final_estimates: Vec<CVector>,
    pub exchange: ExchangeStats,
    pub divergences: Vec<Divergence>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub setup: ScenarioSetup,
    pub summaries: Vec<AlgorithmSummary>,
    /// Per-run stream checksums, shared by every algorithm of that run.
    pub checksums: Vec<u64>,
}

impl ScenarioOutcome {
    pub fn summary(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.summaries.iter().find(|s| s.algorithm == algorithm)
    }

    /// Averaged traces of the algorithms that produced one.
    pub fn traces(&self) -> Vec<&MseTrace> {
        self.summaries.iter().filter_map(|s| s.trace.as_ref()).collect()
    }
}

/// Runs every selected algorithm on `config.runs` paired realizations in
/// parallel and averages the learning curves in run order.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let setup = ScenarioSetup::build(config)?;
    let results: Vec<RunResult> = (0..config.runs)
        .into_par_iter()
        .map(|run| simulate_run(config, &setup, run))
        .collect::<Result<_>>()?;

    let scenario = config.scenario.name();
    let summaries = config
        .algorithms
        .iter()
        .enumerate()
        .map(|(idx, &alg)| {
            let runs: Vec<&AlgorithmRun> = results.iter().map(|r| &r.algorithms[idx]).collect();
            let ok: Vec<&&AlgorithmRun> = runs.iter().filter(|r| r.divergence.is_none()).collect();
            let trace = if ok.is_empty() {
                None
            } else {
                let traces: Vec<MseTrace> = ok
                    .iter()
                    .map(|r| MseTrace::new(r.mse.clone(), alg.label(), scenario))
                    .collect();
                Some(average_traces(&traces)?)
            };
            let msd = (!ok.is_empty()).then(|| {
                let mut acc = vec![0.0; config.iterations];
                for r in &ok {
                    for (a, v) in acc.iter_mut().zip(&r.msd) {
                        *a += v;
                    }
                }
                acc.iter().map(|v| v / ok.len() as f64).collect()
            });
            let mut exchange = ExchangeStats::default();
            for r in &runs {
                exchange.merge(&r.exchange);
            }
            Ok(AlgorithmSummary {
                algorithm: alg,
                trace,
                msd,
                run_traces: runs.iter().map(|r| r.mse.clone()).collect(),
                final_estimates: runs[0].final_estimates.clone(),
                exchange,
                divergences: runs.iter().filter_map(|r| r.divergence).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScenarioOutcome {
        config: config.clone(),
        setup,
        summaries,
        checksums: results.iter().map(|r| r.data_checksum).collect(),
    })
}

/// One point of a rank sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: usize,
    pub algorithm: Algorithm,
    /// Run-averaged network MSE at the last iteration.
    pub mse: f64,
    pub diverged_runs: usize,
}

/// Final MSE of the reduced-rank algorithms for every `D` in `lo..=hi`.
pub fn run_rank_sweep(config: &ScenarioConfig, lo: usize, hi: usize) -> Result<Vec<SweepRow>> {
    if lo == 0 || lo > hi || hi > config.m {
        return Err(Error::Config(format!(
            "rank sweep needs 1 <= lo <= hi <= m (got {lo}:{hi}, m = {})",
            config.m
        )));
    }
    let algorithms: Vec<Algorithm> = config
        .algorithms
        .iter()
        .copied()
        .filter(|a| a.is_reduced_rank())
        .collect();
    if algorithms.is_empty() {
        return Err(Error::Config(
            "rank sweep needs DRJIO-NLMS or DRJIO-RLS among the algorithms".into(),
        ));
    }
    let mut rows = Vec::new();
    for d in lo..=hi {
        let cfg = ScenarioConfig {
            d,
            algorithms: algorithms.clone(),
            ..config.clone()
        };
        let outcome = run_scenario(&cfg)?;
        for s in &outcome.summaries {
            rows.push(SweepRow {
                d,
                algorithm: s.algorithm,
                mse: s
                    .trace
                    .as_ref()
                    .and_then(|t| t.per_iteration.last().copied())
                    .unwrap_or(f64::NAN),
                diverged_runs: s.divergences.len(),
            });
        }
    }
    Ok(rows)
}
