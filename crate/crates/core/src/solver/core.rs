use ndarray::Array3;
use serde::{Deserialize, Serialize};

use super::field::{CoreField, CoreGrid};
use super::mdp::{QTable, TabularMdp};
use super::policy::PolicyBundle;
use crate::error::{domain, Error, Result};
use crate::game::{DegreeClass, MeanFieldGame};
use crate::Scalar;

/// Core mean field generated by the bundle's core policies.
///
/// Every class starts at `μ₀`. The step `t → t + 1` uses the neighborhood of
/// the time-`t` field for all classes at once.
pub fn forward_core<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    policy: &PolicyBundle<T>,
    grid: &CoreGrid<T>,
) -> Result<CoreField<T>> {
    let (classes, steps) = (grid.num_classes(), game.horizon());
    let (ns, na) = (game.num_states(), game.num_actions());
    if policy.core().dim() != (classes, steps, ns, na) {
        return Err(Error::Shape(format!(
            "policy {:?} for game with {classes} classes, horizon {steps}, {ns} states, {na} actions",
            policy.core().dim()
        )));
    }
    let mut values = Array3::zeros((classes, steps, ns));
    for i in 0..classes {
        for (x, &m) in game.initial_distribution().iter().enumerate() {
            values[[i, 0, x]] = m;
        }
    }
    let mut field = CoreField::new(values, grid.clone())?;
    let mut kernel = vec![T::zero(); ns * na * ns];
    for t in 0..steps.saturating_sub(1) {
        let nb = field.neighborhood(t);
        for x in 0..ns {
            for u in 0..na {
                let base = (x * na + u) * ns;
                game.transition_into(x, u, &nb, DegreeClass::Core, &mut kernel[base..base + ns]);
            }
        }
        let pi = policy.core();
        let values = field.values_mut();
        for i in 0..classes {
            let mut next = vec![T::zero(); ns];
            for x in 0..ns {
                let mass = values[[i, t, x]];
                for u in 0..na {
                    let w = mass * pi[[i, t, x, u]];
                    let base = (x * na + u) * ns;
                    for (y, n) in next.iter_mut().enumerate() {
                        *n += w * kernel[base + y];
                    }
                }
            }
            for (y, v) in next.into_iter().enumerate() {
                values[[i, t + 1, y]] = v;
            }
        }
    }
    Ok(field)
}

/// Largest gain any core class gets from best-responding to the field:
/// `max_i [Σ_x μ₀(x) max_u Q*_{i,0}(x, u) - Σ_x μ₀(x) Σ_u π_{i,0}(u|x) Q^π_{i,0}(x, u)]`.
pub fn exploitability<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    policy: &PolicyBundle<T>,
    field: &CoreField<T>,
) -> T {
    let mdp = TabularMdp::from_game(game, field.neighborhoods().view(), DegreeClass::Core);
    let best = mdp.optimal_q();
    exploitability_with(&mdp, &best, game.initial_distribution(), policy)
}

fn exploitability_with<T: Scalar>(mdp: &TabularMdp<T>, best: &QTable<T>, mu0: &[T], policy: &PolicyBundle<T>) -> T {
    let best_value = best.best_value(mu0);
    (0..policy.num_classes())
        .map(|i| {
            let pi = policy.core_class(i);
            best_value - mdp.policy_q(pi).policy_value(mu0, pi)
        })
        .fold(T::neg_infinity(), T::max)
}

/// Hyperparameters of the core learning stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreConfig<T> {
    /// Number of equal-width core classes `M`.
    pub classes: usize,
    /// Upper end `α*` of the core latent interval.
    pub alpha_star: T,
    /// Inverse step size `γ`.
    pub gamma: T,
    /// Number of mirror-descent iterations `τ_max`.
    pub iterations: usize,
}

impl<T: Scalar> Default for CoreConfig<T> {
    fn default() -> Self {
        Self {
            classes: 50,
            alpha_star: T::lit(5.0),
            gamma: T::lit(50.0),
            iterations: 5000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoreSolution<T> {
    pub policy: PolicyBundle<T>,
    pub field: CoreField<T>,
    /// Exploitability of the iterate entering each iteration.
    pub exploitability: Vec<T>,
}

/// Online mirror descent on the discretized core.
///
/// Each iteration runs the forward equation for the current policies, computes
/// optimal Q-values against the resulting neighborhoods, records the
/// exploitability, and takes one mirror-descent step. The returned field is
/// generated by the final policies.
pub fn solve_core<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    grid: &CoreGrid<T>,
    gamma: T,
    iterations: usize,
) -> Result<CoreSolution<T>> {
    if iterations == 0 {
        return Err(domain("at least one iteration is required"));
    }
    if !(gamma > T::zero() && gamma.is_finite()) {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    let mu0 = game.initial_distribution();
    let mut policy = PolicyBundle::uniform(
        grid.num_classes(),
        game.horizon(),
        game.num_states(),
        game.num_actions(),
    );
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let field = forward_core(game, &policy, grid)?;
        // The core neighborhood does not depend on the class, so one MDP and
        // one Q-table serve every class.
        let mdp = TabularMdp::from_game(game, field.neighborhoods().view(), DegreeClass::Core);
        let q = mdp.optimal_q();
        trace.push(exploitability_with(&mdp, &q, mu0, &policy));
        let per_class = vec![&q; grid.num_classes()];
        policy.omd_step(&per_class, gamma)?;
    }
    let field = forward_core(game, &policy, grid)?;
    Ok(CoreSolution {
        policy,
        field,
        exploitability: trace,
    })
}
