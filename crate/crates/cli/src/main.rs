//! `drjio`: Monte Carlo simulator for distributed reduced-rank adaptive estimation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use drjio_core::harness::{
    parse_algorithm_list, run_rank_sweep, run_scenario, sweep_csv, write_outputs, ScenarioConfig, ScenarioKind,
};
use drjio_core::metrics::value_to_db;

#[derive(Parser, Debug)]
#[command(name = "drjio", version, about = "Distributed reduced-rank adaptive estimation simulator")]
struct Args {
    /// Built-in scenario used as the base configuration.
    #[arg(long)]
    scenario: Option<ScenarioKind>,

    /// Flat `key = value` configuration file applied on top of the scenario.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    runs: Option<usize>,

    #[arg(long)]
    iters: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Comma-separated list, e.g. `dNLMS,DRJIO-RLS`.
    #[arg(long)]
    algorithms: Option<String>,

    /// Sweep the reduced rank over `lo:hi` instead of a single run.
    #[arg(long, value_name = "LO:HI")]
    sweep_rank: Option<String>,

    /// Print the built-in scenarios and exit.
    #[arg(long)]
    list_scenarios: bool,
}

fn resolve(args: &Args) -> Result<ScenarioConfig> {
    let base = args.scenario.unwrap_or(ScenarioKind::WsnFull20);
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            // an explicit --scenario outranks a scenario key in the file
            let text = match args.scenario {
                Some(kind) => format!("scenario = {}\n{text}", kind.name()),
                None => text,
            };
            ScenarioConfig::from_text(&text, base).with_context(|| format!("in {}", path.display()))?
        }
        None => ScenarioConfig::preset(base),
    };
    if let Some(runs) = args.runs {
        cfg.runs = runs;
    }
    if let Some(iters) = args.iters {
        cfg.iterations = iters;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(list) = &args.algorithms {
        cfg.algorithms = parse_algorithm_list(list)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let Some((lo, hi)) = s.split_once(':') else {
        bail!("--sweep-rank expects LO:HI, got `{s}`");
    };
    let lo = lo.trim().parse().with_context(|| format!("invalid lower rank `{lo}`"))?;
    let hi = hi.trim().parse().with_context(|| format!("invalid upper rank `{hi}`"))?;
    Ok((lo, hi))
}

fn sweep(cfg: &ScenarioConfig, range: &str, out: &Path) -> Result<()> {
    let (lo, hi) = parse_range(range)?;
    let rows = run_rank_sweep(cfg, lo, hi)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("rank_sweep.csv"), sweep_csv(cfg.scenario.name(), &rows))?;
    let manifest = format!(
        "# resolved configuration\n{}\n# rank sweep\nrange = {lo}:{hi}\n",
        cfg.to_text()
    );
    fs::write(out.join("manifest.txt"), manifest)?;
    for r in &rows {
        println!("D = {:>3}  {:<11} {:>8.2} dB", r.d, r.algorithm, value_to_db(r.mse));
    }
    Ok(())
}

fn simulate(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    let outcome = run_scenario(cfg)?;
    let files = write_outputs(&outcome, out).with_context(|| format!("writing to {}", out.display()))?;
    let window = (cfg.iterations / 10).max(1);
    for s in &outcome.summaries {
        match &s.trace {
            Some(t) => println!(
                "{:<11} steady-state MSE {:>8.2} dB, {} of {} runs diverged",
                s.algorithm,
                value_to_db(t.steady_state(window)),
                s.divergences.len(),
                cfg.runs
            ),
            None => println!("{:<11} diverged in every run", s.algorithm),
        }
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn run(args: Args) -> Result<()> {
    if args.list_scenarios {
        for kind in ScenarioKind::BUILTIN {
            println!("{:<16} {}", kind.name(), kind.description());
        }
        return Ok(());
    }
    let cfg = resolve(&args)?;
    let start = Instant::now();
    match &args.sweep_rank {
        Some(range) => sweep(&cfg, range, &args.out)?,
        None => simulate(&cfg, &args.out)?,
    }
    eprintln!("finished in {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
