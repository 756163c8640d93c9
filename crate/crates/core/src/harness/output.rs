use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::runner::{ScenarioOutcome, SweepRow};
use crate::metrics::value_to_db;
use crate::Result;

pub const MSE_CSV_HEADER: &str = "iteration,algorithm,scenario,mse,mse_db,msd";
pub const SWEEP_CSV_HEADER: &str = "d,algorithm,scenario,mse,mse_db,diverged_runs";

/// Learning curves, one row per iteration per algorithm; iterations start at 1.
pub fn mse_csv(outcome: &ScenarioOutcome) -> String {
    let mut out = String::from(MSE_CSV_HEADER);
    out.push('\n');
    let scenario = outcome.config.scenario.name();
    for s in &outcome.summaries {
        let (Some(trace), Some(msd)) = (&s.trace, &s.msd) else {
            continue;
        };
        for (i, (&v, &dev)) in trace.per_iteration.iter().zip(msd).enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:.6},{:e}",
                i + 1,
                s.algorithm,
                scenario,
                v,
                value_to_db(v),
                dev
            );
        }
    }
    out
}

pub fn sweep_csv(scenario: &str, rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:.6},{}",
            r.d,
            r.algorithm,
            scenario,
            r.mse,
            value_to_db(r.mse),
            r.diverged_runs
        );
    }
    out
}

/// Resolved configuration, realized topology and per-node coefficients,
/// divergence counts and exchange statistics.
pub fn manifest(outcome: &ScenarioOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# resolved configuration");
    out.push_str(&outcome.config.to_text());
    let setup = &outcome.setup;
    let alphas: Vec<String> = setup.models.iter().map(|m| m.alpha.re.to_string()).collect();
    let _ = writeln!(out, "\n# realized network");
    let _ = writeln!(out, "node_alpha = {}", alphas.join(","));
    let _ = writeln!(out, "mean_degree = {}", setup.topology.mean_degree());
    let edges: Vec<String> = setup
        .topology
        .edges()
        .iter()
        .map(|(k, l)| format!("{}-{}", k + 1, l + 1))
        .collect();
    let _ = writeln!(out, "edges = {}", edges.join(" "));
    let _ = writeln!(out, "\n# results");
    for s in &outcome.summaries {
        let _ = writeln!(
            out,
            "{}: diverged_runs = {}, values_per_node_per_iteration = {}",
            s.algorithm,
            s.divergences.len(),
            s.exchange.values_per_message()
        );
        for d in &s.divergences {
            let _ = writeln!(
                out,
                "{}: run {} diverged at iteration {} on node {}",
                s.algorithm,
                d.run,
                d.iteration + 1,
                d.node + 1
            );
        }
    }
    out
}

/// Writes `mse.csv` and `manifest.txt` into `dir`, creating it if needed.
pub fn write_outputs(outcome: &ScenarioOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv = dir.join("mse.csv");
    let man = dir.join("manifest.txt");
    fs::write(&csv, mse_csv(outcome))?;
    fs::write(&man, manifest(outcome))?;
    Ok(vec![csv, man])
}
