use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::drjio::DrjioNlmsHyper;
use crate::signal::ParameterKind;
use crate::{Error, Result};

/// The algorithms the runner can simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    DNlms,
    DRls,
    DrjioNlms,
    DrjioRls,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::DNlms,
        Algorithm::DRls,
        Algorithm::DrjioNlms,
        Algorithm::DrjioRls,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::DNlms => "dNLMS",
            Algorithm::DRls => "dRLS",
            Algorithm::DrjioNlms => "DRJIO-NLMS",
            Algorithm::DrjioRls => "DRJIO-RLS",
        }
    }

    pub fn is_reduced_rank(self) -> bool {
        matches!(self, Algorithm::DrjioNlms | Algorithm::DrjioRls)
    }

    /// Complex values each node publishes per iteration.
    pub fn payload_len(self, m: usize, d: usize) -> usize {
        if self.is_reduced_rank() {
            d
        } else {
            m
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm `{s}` (expected one of dNLMS, dRLS, DRJIO-NLMS, DRJIO-RLS)"
                ))
            })
    }
}

pub fn parse_algorithm_list(s: &str) -> Result<Vec<Algorithm>> {
    let mut out: Vec<Algorithm> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let a: Algorithm = part.parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("algorithm list is empty".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    WsnFull20,
    WsnFull60,
    WsnSparse100,
    WsnSparse20,
    Smartgrid14Bus,
    Custom,
}

impl ScenarioKind {
    pub const BUILTIN: [ScenarioKind; 5] = [
        ScenarioKind::WsnFull20,
        ScenarioKind::WsnFull60,
        ScenarioKind::WsnSparse100,
        ScenarioKind::WsnSparse20,
        ScenarioKind::Smartgrid14Bus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::WsnFull20 => "wsn-full-20",
            ScenarioKind::WsnFull60 => "wsn-full-60",
            ScenarioKind::WsnSparse100 => "wsn-sparse-100",
            ScenarioKind::WsnSparse20 => "wsn-sparse-20",
            ScenarioKind::Smartgrid14Bus => "smartgrid-14bus",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::WsnFull20 => "20-node sensor network, full-rank M=20, D=5",
            ScenarioKind::WsnFull60 => "20-node sensor network, full-rank M=60, D=5",
            ScenarioKind::WsnSparse100 => "20-node sensor network, sparse M=100 (5 nonzeros), D=5",
            ScenarioKind::WsnSparse20 => "20-node sensor network, sparse M=20 (3 nonzeros), D=10",
            ScenarioKind::Smartgrid14Bus => "IEEE 14-bus DC state estimation, M=42, D=10",
            ScenarioKind::Custom => "parameters taken from the config file",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::BUILTIN
            .into_iter()
            .chain([ScenarioKind::Custom])
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// How per-node AR(1) coefficients are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaDist {
    /// Real coefficient drawn once per node from `U[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// The same real coefficient at every node.
    Fixed(f64),
}

impl fmt::Display for AlphaDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaDist::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            AlphaDist::Fixed(a) => write!(f, "fixed:{a}"),
        }
    }
}

impl FromStr for AlphaDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid number `{v}` in alpha distribution")))
        };
        match parts.as_slice() {
            ["uniform", lo, hi] => Ok(AlphaDist::Uniform {
                lo: num(lo)?,
                hi: num(hi)?,
            }),
            ["fixed", a] => Ok(AlphaDist::Fixed(num(a)?)),
            [a] => Ok(AlphaDist::Fixed(num(a)?)),
            _ => Err(Error::Config(format!(
                "alpha must be `uniform:LO:HI`, `fixed:A` or a number, got `{s}`"
            ))),
        }
    }
}

/// Every constant of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub n_nodes: usize,
    pub m: usize,
    pub d: usize,
    pub iterations: usize,
    pub runs: usize,
    pub seed: u64,
    pub noise_var: f64,
    pub alpha: AlphaDist,
    pub parameter: ParameterKind,
    /// Nonzero entries of a sparse `ω₀`.
    pub nonzeros: usize,
    /// Mean neighbour count of the random topology.
    pub target_degree: f64,
    /// Edge-list file replacing the generated topology.
    pub topology_file: Option<PathBuf>,
    pub mu0: f64,
    pub eta0: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    pub delta_init: f64,
    pub nlms_eps: f64,
    pub drjio_eps: f64,
    pub omega_floor: f64,
    pub algorithms: Vec<Algorithm>,
}

impl ScenarioConfig {
    pub fn preset(kind: ScenarioKind) -> Self {
        let base = ScenarioConfig {
            scenario: kind,
            n_nodes: 20,
            m: 20,
            d: 5,
            iterations: 500,
            runs: 100,
            seed: 42,
            noise_var: 0.001,
            alpha: AlphaDist::Uniform { lo: 0.0, hi: 0.5 },
            parameter: ParameterKind::FullRank,
            nonzeros: 20,
            target_degree: 4.0,
            topology_file: None,
            mu0: 0.15,
            eta0: 0.5,
            gamma: 0.02,
            delta: 0.01,
            lambda: 0.99,
            delta_init: 0.11,
            nlms_eps: crate::baselines::DEFAULT_NLMS_EPS,
            drjio_eps: 1e-8,
            omega_floor: 0.1,
            algorithms: Algorithm::ALL.to_vec(),
        };
        match kind {
            ScenarioKind::WsnFull20 | ScenarioKind::Custom => base,
            ScenarioKind::WsnFull60 => ScenarioConfig {
                m: 60,
                nonzeros: 60,
                ..base
            },
            ScenarioKind::WsnSparse100 => ScenarioConfig {
                m: 100,
                parameter: ParameterKind::Sparse,
                nonzeros: 5,
                ..base
            },
            ScenarioKind::WsnSparse20 => ScenarioConfig {
                d: 10,
                parameter: ParameterKind::Sparse,
                nonzeros: 3,
                mu0: 0.3,
                ..base
            },
            ScenarioKind::Smartgrid14Bus => ScenarioConfig {
                n_nodes: 14,
                m: 42,
                d: 10,
                iterations: 1000,
                alpha: AlphaDist::Fixed(0.0),
                parameter: ParameterKind::AllOnes,
                nonzeros: 42,
                ..base
            },
        }
    }

    pub fn drjio_hyper(&self) -> DrjioNlmsHyper {
        DrjioNlmsHyper {
            mu0: self.mu0,
            eta0: self.eta0,
            gamma: self.gamma,
            delta: self.delta,
            eps: self.drjio_eps,
            omega_floor: self.omega_floor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_nodes == 0 {
            return fail("n_nodes must be at least 1".into());
        }
        if self.m == 0 {
            return fail("m must be at least 1".into());
        }
        if self.d == 0 || self.d > self.m {
            return fail(format!("d must satisfy 1 <= d <= m (got d = {}, m = {})", self.d, self.m));
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if !(self.noise_var >= 0.0 && self.noise_var.is_finite()) {
            return fail(format!("noise_var must be nonnegative (got {})", self.noise_var));
        }
        match self.alpha {
            AlphaDist::Uniform { lo, hi } if !(0.0 <= lo && lo <= hi && hi < 1.0) => {
                return fail(format!("alpha range must satisfy 0 <= lo <= hi < 1 (got {lo}..{hi})"))
            }
            AlphaDist::Fixed(a) if !(a.abs() < 1.0) => {
                return fail(format!("alpha must satisfy |alpha| < 1 (got {a})"))
            }
            _ => {}
        }
        if self.parameter == ParameterKind::Sparse && (self.nonzeros == 0 || self.nonzeros > self.m) {
            return fail(format!(
                "nonzeros must satisfy 1 <= nonzeros <= m (got {}, m = {})",
                self.nonzeros, self.m
            ));
        }
        if self.scenario == ScenarioKind::Smartgrid14Bus && self.n_nodes != 14 {
            return fail("the smart-grid scenario has exactly 14 nodes".into());
        }
        if self.topology_file.is_none()
            && self.scenario != ScenarioKind::Smartgrid14Bus
            && self.n_nodes > 1
            && !(self.target_degree > 0.0 && self.target_degree <= (self.n_nodes - 1) as f64)
        {
            return fail(format!(
                "target_degree must lie in (0, n_nodes - 1] (got {})",
                self.target_degree
            ));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return fail(format!("lambda must lie in (0, 1] (got {})", self.lambda));
        }
        if !(self.delta_init > 0.0) {
            return fail(format!("delta_init must be positive (got {})", self.delta_init));
        }
        if !(self.nlms_eps >= 0.0) {
            return fail(format!("nlms_eps must be nonnegative (got {})", self.nlms_eps));
        }
        self.drjio_hyper()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.algorithms.is_empty() {
            return fail("at least one algorithm must be selected".into());
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
        }
        match key {
            "scenario" => self.scenario = value.parse()?,
            "n_nodes" | "nodes" => self.n_nodes = num(key, value)?,
            "m" => self.m = num(key, value)?,
            "d" => self.d = num(key, value)?,
            "iterations" | "iters" => self.iterations = num(key, value)?,
            "runs" => self.runs = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "noise_var" => self.noise_var = num(key, value)?,
            "alpha" => self.alpha = value.parse()?,
            "parameter" => {
                self.parameter = ParameterKind::parse(value)
                    .ok_or_else(|| Error::Config(format!("unknown parameter kind `{value}`")))?
            }
            "nonzeros" => self.nonzeros = num(key, value)?,
            "target_degree" => self.target_degree = num(key, value)?,
            "topology_file" => self.topology_file = Some(PathBuf::from(value)),
            "mu0" => self.mu0 = num(key, value)?,
            "eta0" => self.eta0 = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            "delta_init" => self.delta_init = num(key, value)?,
            "nlms_eps" => self.nlms_eps = num(key, value)?,
            "drjio_eps" => self.drjio_eps = num(key, value)?,
            "omega_floor" => self.omega_floor = num(key, value)?,
            "algorithms" => self.algorithms = parse_algorithm_list(value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses flat `key = value` text into a configuration.
    ///
    /// A `scenario` key selects the preset the other keys are applied to;
    /// otherwise `base` is used. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str, base: ScenarioKind) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let kind = match pairs.iter().find(|(k, _)| k == "scenario") {
            Some((_, v)) => v.parse()?,
            None => base,
        };
        let mut cfg = ScenarioConfig::preset(kind);
        for (k, v) in &pairs {
            if k != "scenario" {
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }

    /// `key = value` lines for every resolved setting, readable by [`Self::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let algs: Vec<&str> = self.algorithms.iter().map(|a| a.label()).collect();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("scenario", self.scenario.name().into());
        kv("n_nodes", self.n_nodes.to_string());
        kv("m", self.m.to_string());
        kv("d", self.d.to_string());
        kv("iterations", self.iterations.to_string());
        kv("runs", self.runs.to_string());
        kv("seed", self.seed.to_string());
        kv("noise_var", self.noise_var.to_string());
        kv("alpha", self.alpha.to_string());
        kv("parameter", self.parameter.name().into());
        kv("nonzeros", self.nonzeros.to_string());
        kv("target_degree", self.target_degree.to_string());
        if let Some(p) = &self.topology_file {
            kv("topology_file", p.display().to_string());
        }
        kv("mu0", self.mu0.to_string());
        kv("eta0", self.eta0.to_string());
        kv("gamma", self.gamma.to_string());
        kv("delta", self.delta.to_string());
        kv("lambda", self.lambda.to_string());
        kv("delta_init", self.delta_init.to_string());
        kv("nlms_eps", self.nlms_eps.to_string());
        kv("drjio_eps", self.drjio_eps.to_string());
        kv("omega_floor", self.omega_floor.to_string());
        kv("algorithms", algs.join(","));
        out
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for k in ScenarioKind::BUILTIN.into_iter().chain([ScenarioKind::Custom]) {
            ScenarioConfig::preset(k).validate().unwrap();
        }
        let sg = ScenarioConfig::preset(ScenarioKind::Smartgrid14Bus);
        assert_eq!((sg.n_nodes, sg.m, sg.d, sg.iterations), (14, 42, 10, 1000));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ScenarioConfig::preset(ScenarioKind::WsnSparse20);
        cfg.algorithms = vec![Algorithm::DrjioRls, Algorithm::DNlms];
        cfg.topology_file = Some(PathBuf::from("net.txt"));
        let back = ScenarioConfig::from_text(&cfg.to_text(), ScenarioKind::Custom).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rank_above_length_is_rejected() {
        let cfg = ScenarioConfig::from_text("scenario = custom\nm = 4\nd = 6\n", ScenarioKind::Custom).unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("d must satisfy 1 <= d <= m"), "{err}");
    }

    #[test]
    fn bad_lines_are_reported() {
        assert!(matches!(
            ScenarioConfig::from_text("m 4", ScenarioKind::Custom),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(ScenarioConfig::from_text("colour = red", ScenarioKind::Custom).is_err());
        assert!(ScenarioConfig::from_text("m = four", ScenarioKind::Custom).is_err());
    }

    #[test]
    fn algorithm_lists() {
        assert_eq!(
            parse_algorithm_list("dnlms, DRJIO-RLS,dNLMS").unwrap(),
            vec![Algorithm::DNlms, Algorithm::DrjioRls]
        );
        assert!(parse_algorithm_list("").is_err());
        assert!(parse_algorithm_list("lms").is_err());
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!("uniform:0:0.5".parse::<AlphaDist>().unwrap(), AlphaDist::Uniform { lo: 0.0, hi: 0.5 });
        assert_eq!("0.3".parse::<AlphaDist>().unwrap(), AlphaDist::Fixed(0.3));
        assert!("gauss:1".parse::<AlphaDist>().is_err());
    }
}
