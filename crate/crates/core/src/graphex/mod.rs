//! Separable power-law graphexes and the finite graphs sampled from them.
//!
//! The kernel is `W(α, β) = (1 + α)^(-1/σ) (1 + β)^(-1/σ)` for `σ ∈ (0, 1)`.
//! Its marginal `ξ(α) = ∫ W(α, β) dβ` and total mass `ξ̄ = ∫∫ W` have closed
//! forms, which the sampler and the core discretization rely on.

mod degree;
mod graph;
mod sample;

pub use degree::{degree_law, estimate_sigma, DegreeLaw};
pub use graph::SampledGraph;
pub use sample::{PairSampling, SamplerOptions};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::Scalar;

/// Separable power-law graphex with parameter `σ ∈ (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graphex<T> {
    sigma: T,
}

impl<T: Scalar> Graphex<T> {
    pub fn new(sigma: T) -> Result<Self> {
        if !(sigma > T::zero() && sigma < T::one()) {
            return Err(domain(format!("sigma must lie in (0, 1), got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// One factor of the separable kernel, `(1 + α)^(-1/σ)`. No domain check.
    pub fn latent_weight(&self, alpha: T) -> T {
        (T::one() + alpha).powf(-self.sigma.recip())
    }

    /// `σ / (1 - σ)`, the integral of one kernel factor over `[0, ∞)`.
    fn factor_mass(&self) -> T {
        self.sigma / (T::one() - self.sigma)
    }

    pub fn kernel(&self, alpha: T, beta: T) -> Result<T> {
        check_latent(alpha)?;
        check_latent(beta)?;
        Ok(self.latent_weight(alpha) * self.latent_weight(beta))
    }

    /// Marginal `ξ(α) = (1 + α)^(-1/σ) · σ / (1 - σ)`.
    pub fn xi(&self, alpha: T) -> Result<T> {
        check_latent(alpha)?;
        Ok(self.latent_weight(alpha) * self.factor_mass())
    }

    /// Total mass `ξ̄ = (σ / (1 - σ))²`.
    pub fn xi_bar(&self) -> T {
        let m = self.factor_mass();
        m * m
    }

    /// Smallest latent `α` with `ν·ξ(α) < 1e-3`; candidates beyond it are
    /// almost surely isolated.
    pub fn truncation(&self, nu: T) -> T {
        let tol = T::lit(1e-3);
        let base = nu * self.factor_mass() / tol;
        (base.powf(self.sigma) - T::one()).max(T::zero())
    }
}

fn check_latent<T: Scalar>(alpha: T) -> Result<()> {
    if alpha.is_nan() || alpha < T::zero() {
        return Err(domain(format!("latent parameter must be nonnegative, got {alpha}")));
    }
    Ok(())
}
