use std::collections::BTreeMap;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{delta_mu, empirical_fields, simulate, Population};
use crate::error::{domain, Error, Result};
use crate::game::MeanFieldGame;
use crate::graphex::{DegreeLaw, Graphex, SampledGraph, SamplerOptions};
use crate::solver::{mix_overall, CoreField, CoreGrid, PeripheryField, PolicyBundle};
use crate::Scalar;

/// Limiting mean fields the simulation is compared against, all `[t][x]`.
#[derive(Clone, Debug)]
pub struct Prediction<T> {
    pub overall: Array2<T>,
    pub core: Array2<T>,
    pub periphery: PeripheryField<T>,
}

impl<T: Scalar> Prediction<T> {
    pub fn new(core: &CoreField<T>, periphery: &PeripheryField<T>, law: &DegreeLaw<T>) -> Result<Self> {
        let steps = core.horizon();
        let mut overall = Array2::zeros((steps, core.num_states()));
        for t in 0..steps {
            for (x, v) in mix_overall(core, periphery, law, t)?.into_iter().enumerate() {
                overall[[t, x]] = v;
            }
        }
        Ok(Self {
            overall,
            core: core.class_averages(),
            periphery: periphery.clone(),
        })
    }
}

/// Where each trial's graph comes from.
#[derive(Clone, Debug)]
pub enum GraphSource<'a, T> {
    /// A fresh graph per trial.
    Sample {
        graphex: Graphex<T>,
        nu: T,
        options: SamplerOptions,
    },
    /// One fixed graph; only initial states and dynamics vary.
    Fixed(&'a SampledGraph<T>),
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub trials: usize,
    pub seed: u64,
    pub k_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; zero for a single sample.
    pub std: f64,
    pub samples: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            mean,
            std,
            samples: values.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub graph_seed: Option<u64>,
    pub dynamics_seed: u64,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub delta_mu: f64,
    pub delta_mu_core: Option<f64>,
    pub delta_mu_degree: BTreeMap<usize, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub delta_mu: Summary,
    pub delta_mu_core: Option<Summary>,
    pub delta_mu_degree: BTreeMap<usize, Summary>,
    pub trials: Vec<TrialReport>,
}

/// Runs independent trials and compares empirical to predicted mean fields.
///
/// Trials run in parallel on the current rayon pool; each trial derives its
/// seeds from `(opts.seed, trial index)` so results do not depend on the
/// worker count.
pub fn evaluate<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    bundle: &PolicyBundle<T>,
    grid: &CoreGrid<T>,
    prediction: &Prediction<T>,
    source: &GraphSource<'_, T>,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if opts.trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    if prediction.overall.nrows() != game.horizon() {
        return Err(Error::Shape("prediction horizon differs from the game".into()));
    }
    let trials: Vec<TrialReport> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| run_trial(game, bundle, grid, prediction, source, opts, trial))
        .collect::<Result<_>>()?;

    let overall: Vec<f64> = trials.iter().map(|t| t.delta_mu).collect();
    let core: Vec<f64> = trials.iter().filter_map(|t| t.delta_mu_core).collect();
    let mut per_degree: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for t in &trials {
        for (&k, &v) in &t.delta_mu_degree {
            per_degree.entry(k).or_default().push(v);
        }
    }
    Ok(EvalReport {
        delta_mu: Summary::of(&overall).expect("at least one trial"),
        delta_mu_core: Summary::of(&core),
        delta_mu_degree: per_degree
            .into_iter()
            .filter_map(|(k, v)| Summary::of(&v).map(|s| (k, s)))
            .collect(),
        trials,
    })
}

fn run_trial<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    bundle: &PolicyBundle<T>,
    grid: &CoreGrid<T>,
    prediction: &Prediction<T>,
    source: &GraphSource<'_, T>,
    opts: &EvalOptions,
    trial: usize,
) -> Result<TrialReport> {
    let graph_seed = derive_seed(opts.seed, 2 * trial as u64);
    let dynamics_seed = derive_seed(opts.seed, 2 * trial as u64 + 1);
    let owned;
    let (graph, graph_seed) = match source {
        GraphSource::Sample { graphex, nu, options } => {
            owned = graphex.sample(*nu, graph_seed, options)?;
            (&owned, Some(graph_seed))
        }
        GraphSource::Fixed(g) => (*g, None),
    };
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let population = Population::new(graph, bundle, grid, opts.k_max)?;
    let run = simulate(game, &population, dynamics_seed)?;
    let emp = empirical_fields(&run, game.num_states(), opts.k_max);

    let delta = delta_mu(emp.overall.view(), prediction.overall.view())?.as_f64();
    let delta_core = match &emp.core {
        Some(c) => Some(delta_mu(c.view(), prediction.core.view())?.as_f64()),
        None => None,
    };
    let mut delta_degree = BTreeMap::new();
    for (&k, field) in &emp.by_degree {
        if k <= prediction.periphery.values().len_of(Axis(0)) {
            let d = delta_mu(field.view(), prediction.periphery.degree(k))?;
            delta_degree.insert(k, d.as_f64());
        }
    }
    Ok(TrialReport {
        graph_seed,
        dynamics_seed,
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        delta_mu: delta,
        delta_mu_core: delta_core,
        delta_mu_degree: delta_degree,
    })
}

/// SplitMix64 of `seed` offset by `index`.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_stats() {
        assert_eq!(Summary::of(&[]), None);
        assert_eq!(Summary::of(&[0.3]).unwrap().std, 0.0);
        let s = Summary::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std, s.samples), (2.0, 1.0, 3));
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 100);
    }
}
