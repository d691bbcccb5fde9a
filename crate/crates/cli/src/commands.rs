use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{ensure, Context, Result};
use gxmfg_core::game::MeanFieldGame;
use gxmfg_core::graphex::{degree_law, estimate_sigma, SamplerOptions};
use gxmfg_core::netio::{load_edge_list, write_edge_list, write_fields, write_report, write_trace, EdgeListSource};
use gxmfg_core::sim::{evaluate, EvalOptions, EvalReport, GraphSource, Prediction, Summary};
use gxmfg_core::solver::{solve_homd, CoreGrid, HomdSolution};
use gxmfg_core::{Graphex64, SampledGraph64};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub sigma: f64,
    pub nu: f64,
    pub seed: u64,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
}

/// Samples one graph; writes `graph.tsv` and `sample.json`.
pub fn run_sample(cfg: &ExperimentConfig) -> Result<SampleSummary> {
    cfg.persist()?;
    let graph = Graphex64::new(cfg.sigma)?.sample(cfg.nu, cfg.seed, &SamplerOptions::default())?;
    write_edge_list(&graph, &cfg.output("graph.tsv"))?;
    let summary = SampleSummary {
        sigma: cfg.sigma,
        nu: cfg.nu,
        seed: cfg.seed,
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        degree_histogram: graph.degree_histogram(),
    };
    write_report(&summary, &cfg.output("sample.json"))?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub model: String,
    pub sigma: f64,
    pub horizon: usize,
    pub classes: usize,
    pub k_max: usize,
    pub iterations: usize,
    pub initial_exploitability: f64,
    pub final_exploitability: f64,
}

/// Learns the core and periphery policies; writes `policy.json`,
/// `fields.csv`, `trace.csv` and `solve.json`.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<(HomdSolution<f64>, SolveSummary)> {
    cfg.persist()?;
    let (solution, summary) = solve_and_write(cfg, cfg.sigma)?;
    write_report(&summary, &cfg.output("solve.json"))?;
    Ok((solution, summary))
}

fn solve_and_write(cfg: &ExperimentConfig, sigma: f64) -> Result<(HomdSolution<f64>, SolveSummary)> {
    let game = cfg.game_model()?;
    let graphex = Graphex64::new(sigma)?;
    let solution = solve_homd(&game, &graphex, &cfg.core_config(), cfg.k_max)?;

    write_report(&solution.policy, &cfg.output("policy.json"))?;
    write_trace(&solution.exploitability, &cfg.output("trace.csv"))?;
    let law = degree_law(sigma, cfg.k_max)?;
    let prediction = Prediction::new(&solution.core_field, &solution.periphery_field, &law)?;
    let neighborhoods = solution.core_field.neighborhoods();
    let mut series = vec![
        ("overall".to_string(), prediction.overall.view()),
        ("core".to_string(), prediction.core.view()),
        ("core_neighborhood".to_string(), neighborhoods.view()),
    ];
    for k in 1..=cfg.k_max {
        series.push((format!("degree_{k}"), solution.periphery_field.degree(k)));
    }
    write_fields(&series, &cfg.output("fields.csv"))?;

    let trace = &solution.exploitability;
    let summary = SolveSummary {
        model: game.name().to_string(),
        sigma,
        horizon: game.horizon(),
        classes: cfg.classes,
        k_max: cfg.k_max,
        iterations: trace.len(),
        initial_exploitability: trace[0],
        final_exploitability: *trace.last().expect("at least one iteration"),
    };
    Ok((solution, summary))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    /// Stopping time of the sampled graphs; absent for a real network.
    pub nu: Option<f64>,
    pub trials: usize,
    pub num_nodes: Summary,
    pub delta_mu: Summary,
    pub delta_mu_core: Option<Summary>,
    pub delta_mu_degree: BTreeMap<usize, Summary>,
}

impl EvalRow {
    fn new(nu: Option<f64>, report: EvalReport) -> Self {
        let nodes: Vec<f64> = report.trials.iter().map(|t| t.num_nodes as f64).collect();
        Self {
            nu,
            trials: report.trials.len(),
            num_nodes: Summary::of(&nodes).expect("at least one trial"),
            delta_mu: report.delta_mu,
            delta_mu_core: report.delta_mu_core,
            delta_mu_degree: report.delta_mu_degree,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub model: String,
    /// Exponent the prediction was computed with.
    pub sigma: f64,
    /// Estimated exponent of the real network, if one was evaluated.
    pub sigma_hat: Option<f64>,
    pub dataset: Option<PathBuf>,
    /// Exploitability of the final core iterate.
    pub exploitability: f64,
    pub rows: Vec<EvalRow>,
}

/// Solves, then compares predicted and simulated mean fields.
///
/// With `dataset_path` set, σ is estimated from the network first and the
/// trials run on that fixed graph. Otherwise one row per `nu_list` entry,
/// each on freshly sampled graphs. Writes `eval.json` plus the solve outputs.
pub fn run_eval(cfg: &ExperimentConfig) -> Result<EvalSummary> {
    let real = match &cfg.dataset_path {
        Some(path) => {
            ensure!(path.is_file(), "dataset {} does not exist", path.display());
            Some(load_graph(path)?)
        }
        None => None,
    };
    cfg.persist()?;
    let sigma_hat = real.as_ref().map(estimate_sigma).transpose()?;
    let sigma = sigma_hat.unwrap_or(cfg.sigma);

    let (solution, solved) = solve_and_write(cfg, sigma)?;
    let game = cfg.game_model()?;
    let graphex = Graphex64::new(sigma)?;
    let grid = CoreGrid::new(&graphex, cfg.classes, cfg.alpha_star)?;
    let law = degree_law(sigma, cfg.k_max)?;
    let prediction = Prediction::new(&solution.core_field, &solution.periphery_field, &law)?;
    let opts = EvalOptions {
        trials: cfg.trials,
        seed: cfg.seed,
        k_max: cfg.k_max,
    };

    let rows = match &real {
        Some(graph) => {
            let report = evaluate(
                &game,
                &solution.policy,
                &grid,
                &prediction,
                &GraphSource::Fixed(graph),
                &opts,
            )?;
            vec![EvalRow::new(None, report)]
        }
        None => cfg
            .nu_list
            .iter()
            .map(|&nu| {
                let source = GraphSource::Sample {
                    graphex,
                    nu,
                    options: SamplerOptions::default(),
                };
                let report = evaluate(&game, &solution.policy, &grid, &prediction, &source, &opts)
                    .with_context(|| format!("evaluating at nu = {nu}"))?;
                Ok(EvalRow::new(Some(nu), report))
            })
            .collect::<Result<_>>()?,
    };
    let summary = EvalSummary {
        model: solved.model,
        sigma,
        sigma_hat,
        dataset: cfg.dataset_path.clone(),
        exploitability: solved.final_exploitability,
        rows,
    };
    write_report(&summary, &cfg.output("eval.json"))?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub dataset: PathBuf,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub sigma_hat: f64,
}

/// Estimates σ of `dataset_path`; writes `sigma.json`.
pub fn run_estimate_sigma(cfg: &ExperimentConfig) -> Result<SigmaEstimate> {
    let path = cfg
        .dataset_path
        .as_ref()
        .context("estimate-sigma needs --dataset-path")?;
    let graph = load_graph(path)?;
    cfg.persist()?;
    let estimate = SigmaEstimate {
        dataset: path.clone(),
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        sigma_hat: estimate_sigma(&graph)?,
    };
    write_report(&estimate, &cfg.output("sigma.json"))?;
    Ok(estimate)
}

fn load_graph(path: &std::path::Path) -> Result<SampledGraph64> {
    Ok(load_edge_list(&EdgeListSource::new(path))?)
}

/// Runs `f` on a pool with `jobs` workers, or on the global pool.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}
