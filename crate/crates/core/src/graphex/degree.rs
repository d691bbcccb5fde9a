use serde::{Deserialize, Serialize};

use super::SampledGraph;
use crate::error::{domain, Error, Result};
use crate::Scalar;

/// Limiting degree law `p_k = σ Γ(k - σ) / (k! Γ(1 - σ))` for `k = 1..=k_max`.
///
/// The probabilities sum to less than one; the remainder is the mass carried
/// by degrees above `k_max`, which the mixed prediction assigns to the core.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeLaw<T> {
    sigma_hat: T,
    probs: Vec<T>,
}

impl<T: Scalar> DegreeLaw<T> {
    pub fn sigma_hat(&self) -> T {
        self.sigma_hat
    }

    pub fn k_max(&self) -> usize {
        self.probs.len()
    }

    /// `p_1, …, p_kmax`.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// `p_k` for `1 <= k <= k_max`.
    pub fn p(&self, k: usize) -> T {
        self.probs[k - 1]
    }

    /// `1 - Σ_k p_k`.
    pub fn core_mass(&self) -> T {
        T::one() - self.probs.iter().copied().sum::<T>()
    }
}

/// Computes `p_k` by the recurrence `p_{k+1} = p_k (k - σ) / (k + 1)`, `p_1 = σ`.
pub fn degree_law<T: Scalar>(sigma_hat: T, k_max: usize) -> Result<DegreeLaw<T>> {
    if !(sigma_hat > T::zero() && sigma_hat < T::one()) {
        return Err(domain(format!("sigma_hat must lie in (0, 1), got {sigma_hat}")));
    }
    if k_max == 0 {
        return Err(domain("k_max must be at least 1"));
    }
    let mut probs = Vec::with_capacity(k_max);
    let mut p = sigma_hat;
    for k in 1..=k_max {
        probs.push(p);
        let kf = T::from_count(k);
        p = p * (kf - sigma_hat) / (kf + T::one());
    }
    Ok(DegreeLaw { sigma_hat, probs })
}

/// Degree-one plug-in estimate `N₁ / N`, clamped to `[0.01, 0.99]`.
pub fn estimate_sigma<T: Scalar>(graph: &SampledGraph<T>) -> Result<T> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let ones = graph.degrees().filter(|&d| d == 1).count();
    let ratio = T::from_count(ones) / T::from_count(graph.num_nodes());
    Ok(ratio.max(T::lit(0.01)).min(T::lit(0.99)))
}
