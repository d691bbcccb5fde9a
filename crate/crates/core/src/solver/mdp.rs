use ndarray::{Array2, Array3, Array4, ArrayView2, ArrayView3, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{DegreeClass, MeanFieldGame};
use crate::scalar::argmax;
use crate::Scalar;

/// State-action values over `t = 0..=T`, indexed `[t][x][u]`. Row `T` is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QTable<T> {
    values: Array3<T>,
}

impl<T: Scalar> QTable<T> {
    pub fn values(&self) -> &Array3<T> {
        &self.values
    }

    pub fn horizon(&self) -> usize {
        self.values.len_of(Axis(0)) - 1
    }

    pub fn get(&self, t: usize, x: usize, u: usize) -> T {
        self.values[[t, x, u]]
    }

    /// Greedy actions `[t][x]` for `t < T`, ties to the lowest action index.
    pub fn greedy(&self) -> Array2<usize> {
        let (steps, states) = (self.horizon(), self.values.len_of(Axis(1)));
        Array2::from_shape_fn((steps, states), |(t, x)| {
            argmax(self.values.slice(ndarray::s![t, x, ..]).iter().copied())
        })
    }

    /// `Σ_x μ₀(x) max_u Q[0](x, u)`.
    pub fn best_value(&self, mu0: &[T]) -> T {
        mu0.iter()
            .enumerate()
            .map(|(x, &m)| {
                let best = self
                    .values
                    .slice(ndarray::s![0, x, ..])
                    .iter()
                    .copied()
                    .fold(T::neg_infinity(), T::max);
                m * best
            })
            .sum()
    }

    /// `Σ_x μ₀(x) Σ_u π₀(u|x) Q[0](x, u)` for a stochastic policy `[t][x][u]`.
    pub fn policy_value(&self, mu0: &[T], policy: ArrayView3<T>) -> T {
        let mut total = T::zero();
        for (x, &m) in mu0.iter().enumerate() {
            for u in 0..self.values.len_of(Axis(2)) {
                total += m * policy[[0, x, u]] * self.values[[0, x, u]];
            }
        }
        total
    }
}

/// Finite-horizon MDP with time-dependent rewards `[t][x][u]` and kernels
/// `[t][x][u][x']`, no discounting and zero terminal value.
#[derive(Clone, Debug)]
pub struct TabularMdp<T> {
    rewards: Array3<T>,
    kernels: Array4<T>,
}

impl<T: Scalar> TabularMdp<T> {
    pub fn new(rewards: Array3<T>, kernels: Array4<T>) -> Result<Self> {
        let (t, x, u) = rewards.dim();
        if kernels.dim() != (t, x, u, x) {
            return Err(Error::Shape(format!(
                "rewards {:?} incompatible with kernels {:?}",
                rewards.dim(),
                kernels.dim()
            )));
        }
        Ok(Self { rewards, kernels })
    }

    /// Freezes a game along a fixed neighborhood sequence `[t][x]`.
    pub fn from_game<G: MeanFieldGame<T> + ?Sized>(game: &G, neighborhoods: ArrayView2<T>, class: DegreeClass) -> Self {
        let (steps, ns, na) = (neighborhoods.nrows(), game.num_states(), game.num_actions());
        let mut rewards = Array3::zeros((steps, ns, na));
        let mut kernels = Array4::zeros((steps, ns, na, ns));
        let mut buf = vec![T::zero(); ns];
        for t in 0..steps {
            let nb = neighborhoods.row(t).to_vec();
            for x in 0..ns {
                for u in 0..na {
                    rewards[[t, x, u]] = game.reward(x, u, &nb);
                    game.transition_into(x, u, &nb, class, &mut buf);
                    for (y, &p) in buf.iter().enumerate() {
                        kernels[[t, x, u, y]] = p;
                    }
                }
            }
        }
        Self { rewards, kernels }
    }

    pub fn horizon(&self) -> usize {
        self.rewards.len_of(Axis(0))
    }

    pub fn num_states(&self) -> usize {
        self.rewards.len_of(Axis(1))
    }

    pub fn num_actions(&self) -> usize {
        self.rewards.len_of(Axis(2))
    }

    pub fn rewards(&self) -> &Array3<T> {
        &self.rewards
    }

    pub fn kernels(&self) -> &Array4<T> {
        &self.kernels
    }

    /// Backward induction with a max backup.
    pub fn optimal_q(&self) -> QTable<T> {
        self.backward(Backup::Max)
    }

    /// Policy evaluation for a stochastic policy `[t][x][u]`.
    pub fn policy_q(&self, policy: ArrayView3<T>) -> QTable<T> {
        self.backward(Backup::Policy(policy))
    }

    fn backward(&self, backup: Backup<'_, T>) -> QTable<T> {
        let (steps, ns, na) = self.rewards.dim();
        let mut q = Array3::zeros((steps + 1, ns, na));
        let mut cont = vec![T::zero(); ns];
        for t in (0..steps).rev() {
            // cont[y] is the value of landing in y at time t + 1.
            if t + 1 < steps {
                for (y, c) in cont.iter_mut().enumerate() {
                    let next = (0..na).map(|u| q[[t + 1, y, u]]);
                    *c = match &backup {
                        Backup::Max => next.fold(T::neg_infinity(), T::max),
                        Backup::Policy(pi) => next.enumerate().map(|(u, v)| pi[[t + 1, y, u]] * v).sum(),
                    };
                }
            }
            for x in 0..ns {
                for u in 0..na {
                    let mut v = self.rewards[[t, x, u]];
                    for (y, &c) in cont.iter().enumerate() {
                        v += self.kernels[[t, x, u, y]] * c;
                    }
                    q[[t, x, u]] = v;
                }
            }
        }
        QTable { values: q }
    }

    /// State distributions `[t][x]` for `t < T` under a stochastic policy.
    pub fn forward(&self, mu0: &[T], policy: ArrayView3<T>) -> Array2<T> {
        let (steps, ns, na) = self.rewards.dim();
        let mut mu = Array2::zeros((steps, ns));
        for (x, &m) in mu0.iter().enumerate() {
            mu[[0, x]] = m;
        }
        for t in 0..steps.saturating_sub(1) {
            for x in 0..ns {
                let mass = mu[[t, x]];
                if mass == T::zero() {
                    continue;
                }
                for u in 0..na {
                    let w = mass * policy[[t, x, u]];
                    if w == T::zero() {
                        continue;
                    }
                    for y in 0..ns {
                        let add = w * self.kernels[[t, x, u, y]];
                        mu[[t + 1, y]] += add;
                    }
                }
            }
        }
        mu
    }
}

enum Backup<'a, T> {
    Max,
    Policy(ArrayView3<'a, T>),
}

/// Optimal Q-values along a fixed neighborhood sequence `[t][x]`.
pub fn q_backward<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    neighborhoods: ArrayView2<T>,
    class: DegreeClass,
) -> QTable<T> {
    TabularMdp::from_game(game, neighborhoods, class).optimal_q()
}

/// One-hot stochastic policy `[t][x][u]` from deterministic actions `[t][x]`.
pub fn one_hot<T: Scalar>(actions: &Array2<usize>, num_actions: usize) -> Array3<T> {
    let (steps, ns) = actions.dim();
    Array3::from_shape_fn((steps, ns, num_actions), |(t, x, u)| {
        if actions[[t, x]] == u {
            T::one()
        } else {
            T::zero()
        }
    })
}
