use serde::{Deserialize, Serialize};

use super::{degree_scaling, DegreeClass, MeanFieldGame};
use crate::error::{domain, Result};
use crate::Scalar;

/// Rates and costs shared by the SIS and SIR games.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams<T> {
    pub infection_rate: T,
    pub recovery_rate: T,
    pub infection_cost: T,
    pub protection_cost: T,
}

impl<T: Scalar> EpidemicParams<T> {
    pub fn sis_default() -> Self {
        Self {
            infection_rate: T::lit(0.2),
            recovery_rate: T::lit(0.05),
            infection_cost: T::one(),
            protection_cost: T::lit(0.5),
        }
    }

    pub fn sir_default() -> Self {
        Self {
            infection_rate: T::lit(0.05),
            recovery_rate: T::lit(0.01),
            infection_cost: T::one(),
            protection_cost: T::lit(0.25),
        }
    }

    fn validate(&self) -> Result<()> {
        check_rate("infection rate", self.infection_rate)?;
        check_rate("recovery rate", self.recovery_rate)?;
        check_cost("infection cost", self.infection_cost)?;
        check_cost("protection cost", self.protection_cost)
    }
}

/// Which neighbor mass the propagation reward of the rumor game scales with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RumorMass {
    /// Neighbors still unaware of the rumor.
    #[default]
    Unaware,
    /// Neighbors in the plain aware state.
    Aware,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RumorParams<T> {
    pub spread_rate: T,
    pub propagation_cost: T,
    pub propagation_reward: T,
    pub reward_mass: RumorMass,
}

impl<T: Scalar> RumorParams<T> {
    pub fn rs_default() -> Self {
        Self {
            spread_rate: T::lit(0.3),
            propagation_cost: T::lit(0.8),
            propagation_reward: T::lit(0.5),
            reward_mass: RumorMass::Unaware,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GameKind<T> {
    Sis(EpidemicParams<T>),
    Sir(EpidemicParams<T>),
    Rs(RumorParams<T>),
}

/// One of the built-in games with its horizon and initial distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct GameModel<T> {
    kind: GameKind<T>,
    horizon: usize,
    mu0: Vec<T>,
}

// SIS/SIR states and the shared actions.
const S: usize = 0;
const I: usize = 1;
const R: usize = 2;
const PROTECT: usize = 1;

// Rumor states; action 1 is "propagate".
const PROPAGATE: usize = 1;
const UNAWARE: usize = 0;
const AWARE: usize = 1;
const QUIET: usize = 2;
const PROPAGATING: usize = 3;

impl<T: Scalar> GameModel<T> {
    /// States `{S, I}`, actions `{no protection, protection}`.
    pub fn sis(params: EpidemicParams<T>, horizon: usize, initial_infected: T) -> Result<Self> {
        params.validate()?;
        check_horizon(horizon)?;
        check_rate("initial infected mass", initial_infected)?;
        Ok(Self {
            kind: GameKind::Sis(params),
            horizon,
            mu0: vec![T::one() - initial_infected, initial_infected],
        })
    }

    /// States `{S, I, R}` with `R` absorbing.
    pub fn sir(params: EpidemicParams<T>, horizon: usize, initial_infected: T) -> Result<Self> {
        params.validate()?;
        check_horizon(horizon)?;
        check_rate("initial infected mass", initial_infected)?;
        Ok(Self {
            kind: GameKind::Sir(params),
            horizon,
            mu0: vec![T::one() - initial_infected, initial_infected, T::zero()],
        })
    }

    /// States `{unaware, aware, aware-quiet, aware-propagating}`.
    ///
    /// Unaware agents learn the rumor from propagating neighbors. An aware
    /// agent enters the state named by its action for one step and then
    /// returns to aware.
    pub fn rs(params: RumorParams<T>, horizon: usize, initial_aware: T) -> Result<Self> {
        check_rate("spread rate", params.spread_rate)?;
        check_cost("propagation cost", params.propagation_cost)?;
        check_cost("propagation reward", params.propagation_reward)?;
        check_horizon(horizon)?;
        check_rate("initial aware mass", initial_aware)?;
        Ok(Self {
            kind: GameKind::Rs(params),
            horizon,
            mu0: vec![T::one() - initial_aware, initial_aware, T::zero(), T::zero()],
        })
    }

    pub fn sis_default() -> Self {
        Self::sis(EpidemicParams::sis_default(), 500, T::lit(0.5)).expect("valid defaults")
    }

    pub fn sir_default() -> Self {
        Self::sir(EpidemicParams::sir_default(), 500, T::lit(0.1)).expect("valid defaults")
    }

    pub fn rs_default() -> Self {
        Self::rs(RumorParams::rs_default(), 50, T::lit(0.1)).expect("valid defaults")
    }

    pub fn kind(&self) -> &GameKind<T> {
        &self.kind
    }

    pub fn with_horizon(mut self, horizon: usize) -> Result<Self> {
        check_horizon(horizon)?;
        self.horizon = horizon;
        Ok(self)
    }
}

impl<T: Scalar> MeanFieldGame<T> for GameModel<T> {
    fn num_states(&self) -> usize {
        self.mu0.len()
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn initial_distribution(&self) -> &[T] {
        &self.mu0
    }

    fn transition_into(&self, state: usize, action: usize, nb: &[T], class: DegreeClass, out: &mut [T]) {
        out.iter_mut().for_each(|p| *p = T::zero());
        match &self.kind {
            GameKind::Sis(p) | GameKind::Sir(p) => {
                let recovered = if matches!(self.kind, GameKind::Sis(_)) { S } else { R };
                match state {
                    S if action == PROTECT => out[S] = T::one(),
                    S => {
                        let infect = p.infection_rate * nb[I] * degree_scaling(class);
                        out[I] = infect;
                        out[S] = T::one() - infect;
                    }
                    I => {
                        out[recovered] = p.recovery_rate;
                        out[I] = T::one() - p.recovery_rate;
                    }
                    _ => out[R] = T::one(),
                }
            }
            GameKind::Rs(p) => match state {
                UNAWARE => {
                    let learn = p.spread_rate * nb[PROPAGATING] * degree_scaling(class);
                    out[AWARE] = learn;
                    out[UNAWARE] = T::one() - learn;
                }
                AWARE => out[if action == PROPAGATE { PROPAGATING } else { QUIET }] = T::one(),
                _ => out[AWARE] = T::one(),
            },
        }
    }

    fn reward(&self, state: usize, action: usize, nb: &[T]) -> T {
        match &self.kind {
            GameKind::Sis(p) | GameKind::Sir(p) => {
                let mut cost = T::zero();
                if state == I {
                    cost += p.infection_cost;
                }
                if action == PROTECT {
                    cost += p.protection_cost;
                }
                -cost
            }
            GameKind::Rs(p) => {
                if state != PROPAGATING {
                    return T::zero();
                }
                let mass = match p.reward_mass {
                    RumorMass::Unaware => nb[UNAWARE],
                    RumorMass::Aware => nb[AWARE],
                };
                p.propagation_reward * mass - p.propagation_cost * (nb[QUIET] + nb[PROPAGATING])
            }
        }
    }

    fn state_labels(&self) -> Vec<String> {
        let names: &[&str] = match self.kind {
            GameKind::Sis(_) => &["S", "I"],
            GameKind::Sir(_) => &["S", "I", "R"],
            GameKind::Rs(_) => &["unaware", "aware", "quiet", "propagating"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    fn action_labels(&self) -> Vec<String> {
        let names = match self.kind {
            GameKind::Rs(_) => ["quiet", "propagate"],
            _ => ["unprotected", "protected"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    fn name(&self) -> String {
        match self.kind {
            GameKind::Sis(_) => "sis",
            GameKind::Sir(_) => "sir",
            GameKind::Rs(_) => "rs",
        }
        .into()
    }
}

fn check_rate<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(domain(format!("{what} must lie in [0, 1], got {v}")))
    }
}

fn check_cost<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite and nonnegative, got {v}")))
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(domain("horizon must be at least 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const NOT_PROTECT: usize = 0;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn sis_defaults_and_transitions() {
        let g = GameModel::<f64>::sis_default();
        assert_eq!(g.horizon(), 500);
        assert_eq!(g.initial_distribution(), &[0.5, 0.5]);
        let GameKind::Sis(p) = g.kind() else { panic!() };
        assert_eq!(
            *p,
            EpidemicParams {
                infection_rate: 0.2,
                recovery_rate: 0.05,
                infection_cost: 1.0,
                protection_cost: 0.5
            }
        );

        let nb = [0.5, 0.5];
        assert!(close(
            &g.transition(S, NOT_PROTECT, &nb, DegreeClass::Core),
            &[0.9, 0.1],
            1e-15
        ));
        let k2 = g.transition(S, NOT_PROTECT, &nb, DegreeClass::Finite(2));
        let infect = 0.1 * 0.5f64.tanh();
        assert!(close(&k2, &[1.0 - infect, infect], 1e-15));
        assert!((k2[I] - 0.04621).abs() < 1e-5);
        assert_eq!(g.transition(S, PROTECT, &[0.0, 1.0], DegreeClass::Core), vec![1.0, 0.0]);
        assert!(close(
            &g.transition(I, PROTECT, &nb, DegreeClass::Core),
            &[0.05, 0.95],
            1e-15
        ));
        assert_eq!(g.reward(I, PROTECT, &nb), -1.5);
        assert_eq!(g.reward(S, NOT_PROTECT, &nb), 0.0);
    }

    #[test]
    fn sir_defaults_and_transitions() {
        let g = GameModel::<f64>::sir_default();
        assert_eq!(g.initial_distribution(), &[0.9, 0.1, 0.0]);
        let GameKind::Sir(p) = g.kind() else { panic!() };
        assert_eq!(
            (p.infection_rate, p.recovery_rate, p.protection_cost),
            (0.05, 0.01, 0.25)
        );
        assert!(close(
            &g.transition(I, PROTECT, &[0.2, 0.3, 0.5], DegreeClass::Core),
            &[0.0, 0.99, 0.01],
            1e-15
        ));
        for u in 0..2 {
            for class in [DegreeClass::Core, DegreeClass::Finite(3)] {
                assert_eq!(g.transition(R, u, &[0.0, 1.0, 0.0], class), vec![0.0, 0.0, 1.0]);
            }
        }
    }

    #[test]
    fn rs_defaults_and_transitions() {
        let g = GameModel::<f64>::rs_default();
        assert_eq!(g.horizon(), 50);
        assert_eq!(g.initial_distribution(), &[0.9, 0.1, 0.0, 0.0]);
        let nb = [0.4, 0.3, 0.3, 0.0];
        for u in 0..2 {
            assert_eq!(
                g.transition(UNAWARE, u, &nb, DegreeClass::Core),
                vec![1.0, 0.0, 0.0, 0.0]
            );
            assert_eq!(g.transition(QUIET, u, &nb, DegreeClass::Core)[AWARE], 1.0);
            assert_eq!(g.transition(PROPAGATING, u, &nb, DegreeClass::Finite(1))[AWARE], 1.0);
        }
        assert_eq!(g.transition(AWARE, 1, &nb, DegreeClass::Core)[PROPAGATING], 1.0);
        assert_eq!(g.transition(AWARE, 0, &nb, DegreeClass::Core)[QUIET], 1.0);
        let spread = g.transition(UNAWARE, 0, &[0.0, 0.0, 0.0, 1.0], DegreeClass::Core);
        assert!(close(&spread, &[0.7, 0.3, 0.0, 0.0], 1e-15));

        assert_eq!(g.reward(PROPAGATING, 0, &[1.0, 0.0, 0.0, 0.0]), 0.5);
        assert_eq!(g.reward(AWARE, 1, &[1.0, 0.0, 0.0, 0.0]), 0.0);
        assert!((g.reward(PROPAGATING, 1, &[0.0, 0.5, 0.25, 0.25]) + 0.4).abs() < 1e-15);

        let literal = GameModel::rs(
            RumorParams {
                reward_mass: RumorMass::Aware,
                ..RumorParams::rs_default()
            },
            50,
            0.1,
        )
        .unwrap();
        assert_eq!(literal.reward(PROPAGATING, 0, &[1.0, 0.0, 0.0, 0.0]), 0.0);
        assert_eq!(literal.reward(PROPAGATING, 0, &[0.0, 1.0, 0.0, 0.0]), 0.5);
    }

    #[test]
    fn parameter_domains() {
        let bad_rate = EpidemicParams {
            infection_rate: 1.2,
            ..EpidemicParams::<f64>::sis_default()
        };
        assert!(GameModel::sis(bad_rate, 10, 0.5).is_err());
        let bad_cost = EpidemicParams {
            protection_cost: -1.0,
            ..EpidemicParams::<f64>::sis_default()
        };
        assert!(GameModel::sir(bad_cost, 10, 0.5).is_err());
        assert!(GameModel::sis(EpidemicParams::<f64>::sis_default(), 0, 0.5).is_err());
        assert!(GameModel::sis(EpidemicParams::<f64>::sis_default(), 5, 1.5).is_err());
        assert!(GameModel::rs(
            RumorParams {
                spread_rate: -0.1,
                ..RumorParams::<f64>::rs_default()
            },
            5,
            0.1
        )
        .is_err());
    }

    #[test]
    fn zero_neighborhood_never_infects() {
        let g = GameModel::<f64>::sis_default();
        assert_eq!(
            g.transition(S, NOT_PROTECT, &[0.0, 0.0], DegreeClass::Finite(0)),
            vec![1.0, 0.0]
        );
    }

    fn games() -> Vec<GameModel<f64>> {
        vec![
            GameModel::sis_default(),
            GameModel::sir_default(),
            GameModel::rs_default(),
        ]
    }

    fn random_dist(raw: &[f64], n: usize) -> Vec<f64> {
        let w: Vec<f64> = raw[..n].iter().map(|v| v + 1e-3).collect();
        let s: f64 = w.iter().sum();
        w.iter().map(|v| v / s).collect()
    }

    proptest! {
        #[test]
        fn transitions_are_distributions(raw in proptest::collection::vec(0.0f64..1.0, 4)) {
            for g in games() {
                let nb = random_dist(&raw, g.num_states());
                let classes = (1..=10).map(DegreeClass::Finite).chain([DegreeClass::Core]);
                for class in classes {
                    for x in 0..g.num_states() {
                        for u in 0..g.num_actions() {
                            let p = g.transition(x, u, &nb, class);
                            prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
                            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                            prop_assert!(g.reward(x, u, &nb).is_finite());
                        }
                    }
                }
            }
        }

        #[test]
        fn epidemic_costs_nonpositive(raw in proptest::collection::vec(0.0f64..1.0, 4)) {
            for g in [GameModel::<f64>::sis_default(), GameModel::sir_default()] {
                let nb = random_dist(&raw, g.num_states());
                for x in 0..g.num_states() {
                    for u in 0..2 {
                        let r = g.reward(x, u, &nb);
                        prop_assert!(r <= 0.0);
                        prop_assert_eq!(r == 0.0, x != I && u != PROTECT);
                    }
                }
            }
        }
    }
}
