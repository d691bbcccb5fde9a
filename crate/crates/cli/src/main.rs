use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use gxmfg_cli::commands::with_jobs;
use gxmfg_cli::{run_estimate_sigma, run_eval, run_sample, run_solve, ConfigOverrides, ExperimentConfig};

#[derive(Parser, Debug)]
#[command(name = "gxmfg", version, about = "Graphex mean field games: sample, solve, evaluate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a graph from the power-law graphex.
    Sample(CommandArgs),
    /// Learn core and periphery equilibrium policies.
    Solve(CommandArgs),
    /// Compare predicted mean fields with simulations on sampled or real graphs.
    Eval(CommandArgs),
    /// Estimate σ of an edge-list network.
    EstimateSigma(CommandArgs),
}

#[derive(Args, Debug)]
struct CommandArgs {
    /// TOML file with any of the flag names as keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

impl CommandArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        self.overrides.or(file).resolve()
    }
}

type Runner = fn(&ExperimentConfig) -> Result<()>;

impl Command {
    fn split(self) -> (CommandArgs, Runner) {
        match self {
            Command::Sample(a) => (a, sample),
            Command::Solve(a) => (a, solve),
            Command::Eval(a) => (a, eval),
            Command::EstimateSigma(a) => (a, estimate),
        }
    }
}

fn main() -> Result<()> {
    let (args, runner) = Cli::parse().command.split();
    let cfg = args.resolve()?;
    with_jobs(cfg.jobs, || runner(&cfg))??;
    println!("outputs in {}", cfg.output_dir.display());
    Ok(())
}

fn sample(cfg: &ExperimentConfig) -> Result<()> {
    let s = run_sample(cfg)?;
    println!(
        "N={} |E|={} (sigma={}, nu={}, seed={})",
        s.num_nodes, s.num_edges, s.sigma, s.nu, s.seed
    );
    let hist: Vec<String> = s
        .degree_histogram
        .iter()
        .take(10)
        .map(|(k, n)| format!("{k}:{n}"))
        .collect();
    println!("degrees {}", hist.join(" "));
    Ok(())
}

fn solve(cfg: &ExperimentConfig) -> Result<()> {
    let (_, s) = run_solve(cfg)?;
    println!(
        "{} T={} M={} k_max={}: exploitability {:.6} -> {:.6} after {} iterations",
        s.model, s.horizon, s.classes, s.k_max, s.initial_exploitability, s.final_exploitability, s.iterations
    );
    Ok(())
}

fn eval(cfg: &ExperimentConfig) -> Result<()> {
    let s = run_eval(cfg)?;
    if let Some(sh) = s.sigma_hat {
        println!("sigma_hat={sh:.4}");
    }
    println!("{} exploitability {:.6}", s.model, s.exploitability);
    for row in &s.rows {
        let nu = row.nu.map_or("dataset".to_string(), |n| format!("nu={n}"));
        let core = row.delta_mu_core.map_or("-".to_string(), |c| format!("{:.4}", c.mean));
        println!(
            "{nu}: N~{:.0} delta_mu={:.4}±{:.4} core={core} ({} trials)",
            row.num_nodes.mean, row.delta_mu.mean, row.delta_mu.std, row.trials
        );
    }
    Ok(())
}

fn estimate(cfg: &ExperimentConfig) -> Result<()> {
    let s = run_estimate_sigma(cfg)?;
    println!("sigma_hat={:.6} (N={}, |E|={})", s.sigma_hat, s.num_nodes, s.num_edges);
    Ok(())
}
