//! Tabular mean field game interface and the built-in SIS, SIR and rumor
//! spreading games.

mod models;

pub use models::{EpidemicParams, GameKind, GameModel, RumorMass, RumorParams};

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Which kernel variant an agent uses: its finite degree, or the core limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegreeClass {
    Finite(usize),
    Core,
}

/// Contact saturation `f(k) = 2 / (1 + e^(-k/2)) - 1`, with `f = 1` for the core.
pub fn degree_scaling<T: Scalar>(class: DegreeClass) -> T {
    match class {
        DegreeClass::Core => T::one(),
        DegreeClass::Finite(k) => {
            let half = T::from_count(k) / T::lit(2.0);
            T::lit(2.0) / (T::one() + (-half).exp()) - T::one()
        }
    }
}

/// A finite-horizon tabular game with neighborhood-dependent dynamics.
///
/// `neighborhood` arguments are distributions over states (or the zero vector
/// for an agent without neighbors). Time steps run over `0..horizon()`.
pub trait MeanFieldGame<T: Scalar>: Send + Sync {
    fn num_states(&self) -> usize;

    fn num_actions(&self) -> usize;

    fn horizon(&self) -> usize;

    fn initial_distribution(&self) -> &[T];

    /// Writes `P(· | x, u, G)` into `out` (length `num_states()`).
    fn transition_into(&self, state: usize, action: usize, neighborhood: &[T], class: DegreeClass, out: &mut [T]);

    fn reward(&self, state: usize, action: usize, neighborhood: &[T]) -> T;

    fn transition(&self, state: usize, action: usize, neighborhood: &[T], class: DegreeClass) -> Vec<T> {
        let mut out = vec![T::zero(); self.num_states()];
        self.transition_into(state, action, neighborhood, class, &mut out);
        out
    }

    fn state_labels(&self) -> Vec<String> {
        (0..self.num_states()).map(|x| format!("x{x}")).collect()
    }

    fn action_labels(&self) -> Vec<String> {
        (0..self.num_actions()).map(|u| format!("u{u}")).collect()
    }

    fn name(&self) -> String {
        "custom".into()
    }
}
