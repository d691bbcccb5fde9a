use ndarray::{Array2, Array3, Array4};
use rayon::prelude::*;

use super::field::{CoreField, PeripheryField};
use super::mdp::{one_hot, QTable, TabularMdp};
use crate::error::{domain, Error, Result};
use crate::game::{DegreeClass, MeanFieldGame};
use crate::Scalar;

/// Largest number of neighbor-count vectors enumerated for one degree.
pub const MAX_COMPOSITIONS: usize = 100_000;

/// A possible neighborhood of a degree-`k` agent: neighbor counts per state.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborCounts<T> {
    pub counts: Vec<usize>,
    pub prob: T,
}

impl<T: Scalar> NeighborCounts<T> {
    /// Empirical neighborhood distribution `counts / k`.
    pub fn distribution(&self) -> Vec<T> {
        let k = T::from_count(self.counts.iter().sum());
        self.counts.iter().map(|&c| T::from_count(c) / k).collect()
    }
}

/// Multinomial law of the neighbor counts of a degree-`k` agent whose
/// neighbors are drawn independently from `core_nb`.
///
/// Compositions are listed in reverse lexicographic order, e.g. for `k = 2`
/// and two states: `(2, 0), (1, 1), (0, 2)`.
pub fn periphery_neighborhood_dist<T: Scalar>(core_nb: &[T], k: usize) -> Result<Vec<NeighborCounts<T>>> {
    if k == 0 {
        return Err(domain("degree must be at least 1"));
    }
    if core_nb.is_empty() {
        return Err(domain("empty state space"));
    }
    let count = binomial(k + core_nb.len() - 1, core_nb.len() - 1);
    if count > MAX_COMPOSITIONS as u128 {
        return Err(Error::Resource(format!(
            "{count} neighborhoods for degree {k} over {} states exceeds {MAX_COMPOSITIONS}",
            core_nb.len()
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut counts = vec![0; core_nb.len()];
    compositions(k, 0, &mut counts, &mut |c| {
        out.push(NeighborCounts {
            counts: c.to_vec(),
            prob: multinomial_pmf(c, core_nb),
        })
    });
    Ok(out)
}

fn compositions(remaining: usize, idx: usize, counts: &mut [usize], emit: &mut impl FnMut(&[usize])) {
    if idx + 1 == counts.len() {
        counts[idx] = remaining;
        emit(counts);
        return;
    }
    for c in (0..=remaining).rev() {
        counts[idx] = c;
        compositions(remaining - c, idx + 1, counts, emit);
    }
    counts[idx] = 0;
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn multinomial_pmf<T: Scalar>(counts: &[usize], probs: &[T]) -> T {
    // k! / Π c_j!, built up one factor at a time.
    let mut coef = T::one();
    let mut n = 0;
    let mut mass = T::one();
    for (&c, &p) in counts.iter().zip(probs) {
        for j in 1..=c {
            n += 1;
            coef = coef * T::from_count(n) / T::from_count(j);
        }
        mass *= p.powi(c as i32);
    }
    coef * mass
}

#[derive(Clone, Debug)]
pub struct PeripherySolution<T> {
    /// Greedy actions `[k-1][t][x]`.
    pub policies: Array3<usize>,
    /// Optimal Q-values per degree, index `k-1`.
    pub q: Vec<QTable<T>>,
    pub field: PeripheryField<T>,
}

/// The degree-`k` periphery as an MDP against a fixed core field, with
/// reward and kernel averaged over the multinomial neighborhood law at each
/// time step.
pub fn periphery_mdp<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    core: &CoreField<T>,
    k: usize,
) -> Result<TabularMdp<T>> {
    let (steps, ns, na) = (core.horizon(), game.num_states(), game.num_actions());
    let mut rewards = Array3::zeros((steps, ns, na));
    let mut kernels = Array4::zeros((steps, ns, na, ns));
    let mut buf = vec![T::zero(); ns];
    for t in 0..steps {
        for atom in periphery_neighborhood_dist(&core.neighborhood(t), k)? {
            if atom.prob == T::zero() {
                continue;
            }
            let g = atom.distribution();
            for x in 0..ns {
                for u in 0..na {
                    rewards[[t, x, u]] += atom.prob * game.reward(x, u, &g);
                    game.transition_into(x, u, &g, DegreeClass::Finite(k), &mut buf);
                    for (y, &p) in buf.iter().enumerate() {
                        kernels[[t, x, u, y]] += atom.prob * p;
                    }
                }
            }
        }
    }
    TabularMdp::new(rewards, kernels)
}

/// Optimal deterministic policies and mean fields for degrees `1..=k_max`.
pub fn solve_periphery<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    core: &CoreField<T>,
    k_max: usize,
) -> Result<PeripherySolution<T>> {
    if k_max == 0 {
        return Err(domain("k_max must be at least 1"));
    }
    if core.horizon() != game.horizon() || core.num_states() != game.num_states() {
        return Err(Error::Shape("core field does not match the game".into()));
    }
    let solved: Vec<(Array2<usize>, QTable<T>, Array2<T>)> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let mdp = periphery_mdp(game, core, k)?;
            let q = mdp.optimal_q();
            let actions = q.greedy();
            let mu = mdp.forward(
                game.initial_distribution(),
                one_hot(&actions, game.num_actions()).view(),
            );
            Ok((actions, q, mu))
        })
        .collect::<Result<_>>()?;

    let (steps, ns) = (game.horizon(), game.num_states());
    let mut policies = Array3::zeros((k_max, steps, ns));
    let mut values = Array3::zeros((k_max, steps, ns));
    let mut qs = Vec::with_capacity(k_max);
    for (k, (actions, q, mu)) in solved.into_iter().enumerate() {
        policies.index_axis_mut(ndarray::Axis(0), k).assign(&actions);
        values.index_axis_mut(ndarray::Axis(0), k).assign(&mu);
        qs.push(q);
    }
    Ok(PeripherySolution {
        policies,
        q: qs,
        field: PeripheryField::new(values),
    })
}
