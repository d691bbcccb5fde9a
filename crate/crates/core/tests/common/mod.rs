#![allow(dead_code)]

use gxmfg_core::game::{degree_scaling, DegreeClass, MeanFieldGame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every state stays put.
pub struct IdentityGame {
    pub states: usize,
    pub horizon: usize,
    pub mu0: Vec<f64>,
}

impl MeanFieldGame<f64> for IdentityGame {
    fn num_states(&self) -> usize {
        self.states
    }
    fn num_actions(&self) -> usize {
        2
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn initial_distribution(&self) -> &[f64] {
        &self.mu0
    }
    fn transition_into(&self, x: usize, _: usize, _: &[f64], _: DegreeClass, out: &mut [f64]) {
        out.iter_mut().for_each(|p| *p = 0.0);
        out[x] = 1.0;
    }
    fn reward(&self, x: usize, u: usize, _: &[f64]) -> f64 {
        x as f64 - 0.5 * u as f64
    }
}

/// Jumps uniformly at random regardless of anything.
pub struct UniformGame {
    pub states: usize,
    pub horizon: usize,
    pub mu0: Vec<f64>,
}

impl MeanFieldGame<f64> for UniformGame {
    fn num_states(&self) -> usize {
        self.states
    }
    fn num_actions(&self) -> usize {
        2
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn initial_distribution(&self) -> &[f64] {
        &self.mu0
    }
    fn transition_into(&self, _: usize, _: usize, _: &[f64], _: DegreeClass, out: &mut [f64]) {
        let p = 1.0 / self.states as f64;
        out.iter_mut().for_each(|v| *v = p);
    }
    fn reward(&self, _: usize, _: usize, nb: &[f64]) -> f64 {
        nb[0]
    }
}

/// Dynamics independent of action and neighborhood; reward depends on (x, u)
/// only if `action_reward` is set.
pub struct DecoupledGame {
    pub horizon: usize,
    pub action_reward: bool,
}

impl MeanFieldGame<f64> for DecoupledGame {
    fn num_states(&self) -> usize {
        2
    }
    fn num_actions(&self) -> usize {
        2
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn initial_distribution(&self) -> &[f64] {
        &[0.3, 0.7]
    }
    fn transition_into(&self, x: usize, _: usize, _: &[f64], _: DegreeClass, out: &mut [f64]) {
        out[x] = 0.8;
        out[1 - x] = 0.2;
    }
    fn reward(&self, x: usize, u: usize, _: &[f64]) -> f64 {
        if self.action_reward {
            [[1.0, -1.0], [-2.0, 0.5]][x][u]
        } else {
            x as f64
        }
    }
}

/// Random two-state, two-action game whose kernel and reward depend on the
/// neighborhood's mass on state 1 and on the degree class.
pub struct TableGame {
    pub horizon: usize,
    pub mu0: Vec<f64>,
    logits: [[[f64; 2]; 2]; 2],
    slopes: [[[f64; 2]; 2]; 2],
    reward_base: [[f64; 2]; 2],
    reward_slope: [[f64; 2]; 2],
}

impl TableGame {
    pub fn random(seed: u64, horizon: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |scale: f64| rng.random_range(-scale..scale);
        let mut cube = |scale: f64| {
            let mut c = [[[0.0; 2]; 2]; 2];
            c.iter_mut().flatten().flatten().for_each(|v| *v = draw(scale));
            c
        };
        let logits = cube(2.0);
        let slopes = cube(3.0);
        let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let mut sq = || {
            let mut s = [[0.0; 2]; 2];
            s.iter_mut().flatten().for_each(|v| *v = rng2.random_range(-1.0..1.0));
            s
        };
        let reward_base = sq();
        let reward_slope = sq();
        let p0 = ChaCha8Rng::seed_from_u64(seed ^ 0x1234).random_range(0.05..0.95);
        Self {
            horizon,
            mu0: vec![p0, 1.0 - p0],
            logits,
            slopes,
            reward_base,
            reward_slope,
        }
    }
}

impl MeanFieldGame<f64> for TableGame {
    fn num_states(&self) -> usize {
        2
    }
    fn num_actions(&self) -> usize {
        2
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn initial_distribution(&self) -> &[f64] {
        &self.mu0
    }
    fn transition_into(&self, x: usize, u: usize, nb: &[f64], class: DegreeClass, out: &mut [f64]) {
        let f: f64 = degree_scaling(class);
        let z: Vec<f64> = (0..2)
            .map(|y| (self.logits[x][u][y] + f * self.slopes[x][u][y] * nb[1]).exp())
            .collect();
        let s: f64 = z.iter().sum();
        for y in 0..2 {
            out[y] = z[y] / s;
        }
    }
    fn reward(&self, x: usize, u: usize, nb: &[f64]) -> f64 {
        self.reward_base[x][u] + self.reward_slope[x][u] * nb[1]
    }
}

/// All deterministic Markov policies over `steps` steps and 2 states: each is
/// a `[t][x]` action table.
pub fn deterministic_policies(steps: usize) -> Vec<Vec<[usize; 2]>> {
    let n = 1usize << (2 * steps);
    (0..n)
        .map(|code| {
            (0..steps)
                .map(|t| [(code >> (2 * t)) & 1, (code >> (2 * t + 1)) & 1])
                .collect()
        })
        .collect()
}

/// Expected return from `(x, u)` at time `t0` to the horizon, by forward
/// propagation of the state distribution. `step(t, x, u)` gives the expected
/// reward and next-state distribution at time `t`.
pub fn forward_return(
    t0: usize,
    horizon: usize,
    x: usize,
    u: usize,
    policy: &[[usize; 2]],
    step: &dyn Fn(usize, usize, usize) -> (f64, [f64; 2]),
) -> f64 {
    let (r, next) = step(t0, x, u);
    let mut total = r;
    let mut dist = next;
    for t in t0 + 1..horizon {
        let mut new = [0.0; 2];
        for s in 0..2 {
            if dist[s] == 0.0 {
                continue;
            }
            let a = policy[t - t0 - 1][s];
            let (r, p) = step(t, s, a);
            total += dist[s] * r;
            new[0] += dist[s] * p[0];
            new[1] += dist[s] * p[1];
        }
        dist = new;
    }
    total
}

/// Best expected return over all deterministic continuation policies.
pub fn brute_force_q(
    t0: usize,
    horizon: usize,
    x: usize,
    u: usize,
    step: &dyn Fn(usize, usize, usize) -> (f64, [f64; 2]),
) -> f64 {
    deterministic_policies(horizon - t0 - 1)
        .iter()
        .map(|pi| forward_return(t0, horizon, x, u, pi, step))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Binomial pmf by direct product, for the periphery oracle.
pub fn binomial_pmf(k: usize, j: usize, p: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c *= (k - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32)
}
