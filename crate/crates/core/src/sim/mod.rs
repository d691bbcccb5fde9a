//! Agent-level play of learned policies on finite graphs, and the
//! total-variation metrics comparing empirical and predicted mean fields.

mod evaluate;
mod metrics;

pub use evaluate::{evaluate, EvalOptions, EvalReport, GraphSource, Prediction, Summary, TrialReport};
pub use metrics::{delta_mu, empirical_fields, EmpiricalFields};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::game::{DegreeClass, MeanFieldGame};
use crate::graphex::SampledGraph;
use crate::scalar::sample_categorical;
use crate::solver::{CoreGrid, PolicyBundle};
use crate::Scalar;

/// Which learned policy a node follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodePolicy {
    /// Deterministic periphery policy of this degree.
    Degree(usize),
    /// Stochastic policy of this core class.
    Core(usize),
}

/// Nodes of degree `1..=k_max` get the periphery policy of their degree; all
/// others get the core class containing `α(i) = i / √(2|E|)` (1-based `i`).
pub fn assign_policies<T: Scalar>(graph: &SampledGraph<T>, grid: &CoreGrid<T>, k_max: usize) -> Vec<NodePolicy> {
    let scale = T::from_count(2 * graph.num_edges()).sqrt();
    (0..graph.num_nodes())
        .map(|i| match graph.degree(i) {
            d @ 1.. if d <= k_max => NodePolicy::Degree(d),
            _ => NodePolicy::Core(grid.class_of(T::from_count(i + 1) / scale)),
        })
        .collect()
}

/// A graph together with the policy each of its nodes plays.
#[derive(Clone, Debug)]
pub struct Population<'a, T> {
    graph: &'a SampledGraph<T>,
    bundle: &'a PolicyBundle<T>,
    policies: Vec<NodePolicy>,
    k_max: usize,
}

impl<'a, T: Scalar> Population<'a, T> {
    pub fn new(
        graph: &'a SampledGraph<T>,
        bundle: &'a PolicyBundle<T>,
        grid: &CoreGrid<T>,
        k_max: usize,
    ) -> Result<Self> {
        if bundle.periphery_k_max() < k_max {
            return Err(domain(format!(
                "policy bundle covers degrees up to {} but k_max is {k_max}",
                bundle.periphery_k_max()
            )));
        }
        if bundle.num_classes() != grid.num_classes() {
            return Err(Error::Shape(
                "core grid and policy bundle disagree on class count".into(),
            ));
        }
        Ok(Self {
            graph,
            bundle,
            policies: assign_policies(graph, grid, k_max),
            k_max,
        })
    }

    pub fn graph(&self) -> &'a SampledGraph<T> {
        self.graph
    }

    pub fn policies(&self) -> &[NodePolicy] {
        &self.policies
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Finite degrees up to `k_max` use their own kernel; larger ones the core kernel.
    pub fn kernel_class(&self, node: usize) -> DegreeClass {
        match self.graph.degree(node) {
            d if d <= self.k_max => DegreeClass::Finite(d),
            _ => DegreeClass::Core,
        }
    }

    fn action(&self, node: usize, t: usize, state: usize, u: f64) -> usize {
        match self.policies[node] {
            NodePolicy::Degree(k) => self.bundle.periphery().expect("checked in new")[[k - 1, t, state]],
            NodePolicy::Core(c) => {
                let row = self.bundle.core().slice(ndarray::s![c, t, state, ..]);
                sample_categorical(row.as_slice().expect("contiguous policy row"), u)
            }
        }
    }
}

/// State trajectory `[t][node]` of one simulated run.
#[derive(Clone, Debug)]
pub struct SimulationRun<'g, T> {
    graph: &'g SampledGraph<T>,
    states: Vec<Vec<usize>>,
    seed: u64,
    rng: ChaCha8Rng,
}

impl<'g, T: Scalar> SimulationRun<'g, T> {
    /// Initial states drawn i.i.d. from `mu0`.
    pub fn new(graph: &'g SampledGraph<T>, mu0: &[T], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let initial = (0..graph.num_nodes())
            .map(|_| sample_categorical(mu0, rng.random()))
            .collect();
        Self {
            graph,
            states: vec![initial],
            seed,
            rng,
        }
    }

    pub fn graph(&self) -> &'g SampledGraph<T> {
        self.graph
    }

    /// `states()[t][i]` is the state of node `i` at time `t`.
    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Advances every node one step from the latest states.
    ///
    /// Each node reads only time-`t` states: its neighborhood is the empirical
    /// distribution of its neighbors' states, it draws an action from its
    /// policy, then a next state from the kernel of its degree class.
    pub fn step<G: MeanFieldGame<T> + ?Sized>(&mut self, game: &G, population: &Population<'_, T>) -> Result<()> {
        if !std::ptr::eq(population.graph, self.graph) {
            return Err(domain("population belongs to a different graph"));
        }
        let t = self.states.len() - 1;
        if t >= population.bundle.horizon() {
            return Err(domain(format!("no policy for time step {t}")));
        }
        let ns = game.num_states();
        let current = &self.states[t];
        let mut next = Vec::with_capacity(current.len());
        let mut nb = vec![T::zero(); ns];
        let mut kernel = vec![T::zero(); ns];
        for (node, &x) in current.iter().enumerate() {
            neighborhood_into(self.graph, current, node, &mut nb);
            let u = population.action(node, t, x, self.rng.random());
            game.transition_into(x, u, &nb, population.kernel_class(node), &mut kernel);
            next.push(sample_categorical(&kernel, self.rng.random()));
        }
        self.states.push(next);
        Ok(())
    }
}

/// Empirical state distribution of `node`'s neighbors; all zeros without neighbors.
pub fn neighborhood_into<T: Scalar>(graph: &SampledGraph<T>, states: &[usize], node: usize, out: &mut [T]) {
    out.iter_mut().for_each(|v| *v = T::zero());
    let nbrs = graph.neighbors(node);
    if nbrs.is_empty() {
        return;
    }
    for &j in nbrs {
        out[states[j]] += T::one();
    }
    let deg = T::from_count(nbrs.len());
    out.iter_mut().for_each(|v| *v /= deg);
}

/// Full trajectory over the game horizon.
pub fn simulate<'g, T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    population: &Population<'g, T>,
    seed: u64,
) -> Result<SimulationRun<'g, T>> {
    let mut run = SimulationRun::new(population.graph, game.initial_distribution(), seed);
    for _ in 1..game.horizon() {
        run.step(game, population)?;
    }
    Ok(run)
}
