use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{Graphex, SampledGraph};
use crate::error::{domain, Error, Result};
use crate::Scalar;

/// How candidate pairs are tested for an edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairSampling {
    /// One Bernoulli trial per unordered pair. O(n²).
    Exhaustive,
    /// Geometric skipping over latent-sorted candidates with thinning.
    /// Exact for the separable kernel, O(n + |E|).
    #[default]
    Skip,
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerOptions {
    /// Latent truncation; `None` uses [`Graphex::truncation`].
    pub alpha_max: Option<f64>,
    /// Upper bound on the expected candidate count `ν·α_max`.
    pub candidate_cap: f64,
    pub pairs: PairSampling,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            alpha_max: None,
            candidate_cap: 5.0e7,
            pairs: PairSampling::default(),
        }
    }
}

impl<T: Scalar> Graphex<T> {
    /// Samples `G_ν` from the unit-rate Poisson process on `[0, ν] × [0, α_max]`.
    ///
    /// Candidates are connected independently with probability `W(ϑ_i, ϑ_j)`
    /// and isolated candidates are discarded. Nodes of the result are ordered
    /// by ascending latent. The output is a pure function of the arguments.
    pub fn sample(&self, nu: T, seed: u64, opts: &SamplerOptions) -> Result<SampledGraph<T>> {
        let nu_f = nu.as_f64();
        if !(nu_f > 0.0 && nu_f.is_finite()) {
            return Err(domain(format!("nu must be positive and finite, got {nu}")));
        }
        let alpha_max = opts.alpha_max.unwrap_or_else(|| self.truncation(nu).as_f64());
        if !(alpha_max >= 0.0 && alpha_max.is_finite()) {
            return Err(domain(format!("invalid latent truncation {alpha_max}")));
        }
        let expected = nu_f * alpha_max;
        if expected > opts.candidate_cap {
            return Err(Error::Resource(format!(
                "expected candidate count {expected:.0} exceeds cap {:.0}",
                opts.candidate_cap
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = if expected > 0.0 {
            Poisson::new(expected)
                .map_err(|e| domain(e.to_string()))?
                .sample(&mut rng) as usize
        } else {
            0
        };
        let mut latents: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * alpha_max).collect();
        latents.sort_by(f64::total_cmp);

        let inv_sigma = 1.0 / self.sigma().as_f64();
        let weights: Vec<f64> = latents.iter().map(|a| (1.0 + a).powf(-inv_sigma)).collect();
        let edges = match opts.pairs {
            PairSampling::Exhaustive => exhaustive_pairs(&weights, &mut rng),
            PairSampling::Skip => skip_pairs(&weights, &mut rng),
        };

        let latents = latents.into_iter().map(T::lit).collect();
        SampledGraph::from_edges(count, edges, Some(latents), None, nu)
    }
}

fn exhaustive_pairs(weights: &[f64], rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            if rng.random::<f64>() < weights[i] * weights[j] {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Pair sampling for product kernels with non-increasing `weights`.
///
/// For fixed `u`, `w_u·w_v` is non-increasing in `v > u`, so the current
/// probability bounds every later pair: skip a geometric number of pairs at
/// that bound, then accept the landed pair with the ratio of its true
/// probability to the bound.
fn skip_pairs(weights: &[f64], rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let n = weights.len();
    let mut edges = Vec::new();
    for u in 0..n.saturating_sub(1) {
        let mut v = u + 1;
        let mut bound = (weights[u] * weights[v]).min(1.0);
        while v < n && bound > 0.0 {
            if bound < 1.0 {
                let r: f64 = rng.random();
                let skip = ((1.0 - r).ln() / (-bound).ln_1p()).floor();
                if skip >= (n - v) as f64 {
                    break;
                }
                v += skip as usize;
            }
            let p = (weights[u] * weights[v]).min(1.0);
            if rng.random::<f64>() < p / bound {
                edges.push((u, v));
            }
            bound = p;
            v += 1;
        }
    }
    edges
}
