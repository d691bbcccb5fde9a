//! Hybrid online mirror descent: mirror descent on the discretized core,
//! then an exact MDP solve for each periphery degree.

mod core;
mod field;
mod mdp;
mod periphery;
mod policy;

pub use self::core::{exploitability, forward_core, solve_core, CoreConfig, CoreSolution};
pub use field::{mix_overall, CoreField, CoreGrid, PeripheryField};
pub use mdp::{one_hot, q_backward, QTable, TabularMdp};
pub use periphery::{
    periphery_mdp, periphery_neighborhood_dist, solve_periphery, NeighborCounts, PeripherySolution, MAX_COMPOSITIONS,
};
pub use policy::{softmax_in_place, PolicyBundle};

use crate::error::Result;
use crate::game::MeanFieldGame;
use crate::graphex::Graphex;
use crate::Scalar;

/// Output of both learning stages.
#[derive(Clone, Debug)]
pub struct HomdSolution<T> {
    /// Core policies plus the periphery's greedy actions.
    pub policy: PolicyBundle<T>,
    pub core_field: CoreField<T>,
    pub periphery_field: PeripheryField<T>,
    pub periphery_q: Vec<QTable<T>>,
    pub exploitability: Vec<T>,
}

/// Runs both stages: core equilibrium learning, then the periphery for
/// degrees `1..=k_max` against the learned core field.
pub fn solve_homd<T: Scalar, G: MeanFieldGame<T> + ?Sized>(
    game: &G,
    graphex: &Graphex<T>,
    config: &CoreConfig<T>,
    k_max: usize,
) -> Result<HomdSolution<T>> {
    let grid = CoreGrid::new(graphex, config.classes, config.alpha_star)?;
    let core = solve_core(game, &grid, config.gamma, config.iterations)?;
    let periphery = solve_periphery(game, &core.field, k_max)?;
    let mut policy = core.policy;
    policy.set_periphery(periphery.policies);
    Ok(HomdSolution {
        policy,
        core_field: core.field,
        periphery_field: periphery.field,
        periphery_q: periphery.q,
        exploitability: core.exploitability,
    })
}
