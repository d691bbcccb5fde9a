use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use gxmfg_core::game::{EpidemicParams, GameModel, RumorMass, RumorParams};
use gxmfg_core::solver::CoreConfig;
use gxmfg_core::GameModel64;
use serde::{Deserialize, Serialize};

/// File name of the effective configuration written next to every output.
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GameName {
    Sis,
    Sir,
    Rs,
}

impl GameName {
    pub fn as_str(self) -> &'static str {
        match self {
            GameName::Sis => "sis",
            GameName::Sir => "sir",
            GameName::Rs => "rs",
        }
    }

    pub fn default_k_max(self) -> usize {
        match self {
            GameName::Rs => 6,
            _ => 8,
        }
    }

    fn default_horizon(self) -> usize {
        match self {
            GameName::Rs => 50,
            _ => 500,
        }
    }
}

/// `full` keeps each game's own horizon; `ci` shortens it to 50 steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Full,
    Ci,
}

pub const CI_HORIZON: usize = 50;

fn parse_mass(s: &str) -> std::result::Result<RumorMass, String> {
    match s {
        "unaware" => Ok(RumorMass::Unaware),
        "aware" => Ok(RumorMass::Aware),
        _ => Err(format!("expected `unaware` or `aware`, got `{s}`")),
    }
}

/// Every configuration key, all optional. Parsed from the TOML file and from
/// command-line flags; flags win.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[arg(long)]
    pub game: Option<GameName>,
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Graphex exponent for synthetic graphs.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Stopping time for `sample`.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Stopping times swept by synthetic `eval`, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub nu_list: Option<Vec<f64>>,
    /// Number of core classes.
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub alpha_star: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Mirror-descent iterations.
    #[arg(long)]
    pub tau_max: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Edge list for `eval` on a real network and for `estimate-sigma`.
    #[arg(long)]
    pub dataset_path: Option<PathBuf>,
    #[arg(long, short)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; all cores when unset.
    #[arg(long)]
    pub jobs: Option<usize>,

    #[arg(long)]
    pub infection_rate: Option<f64>,
    #[arg(long)]
    pub recovery_rate: Option<f64>,
    #[arg(long)]
    pub infection_cost: Option<f64>,
    #[arg(long)]
    pub protection_cost: Option<f64>,
    #[arg(long)]
    pub initial_infected: Option<f64>,

    #[arg(long)]
    pub spread_rate: Option<f64>,
    #[arg(long)]
    pub propagation_cost: Option<f64>,
    #[arg(long)]
    pub propagation_reward: Option<f64>,
    #[arg(long, value_parser = parse_mass)]
    pub reward_mass: Option<RumorMass>,
    #[arg(long)]
    pub initial_aware: Option<f64>,
}

macro_rules! merge_fields {
    ($hi:ident, $lo:ident; $($f:ident),* $(,)?) => {
        ConfigOverrides { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl ConfigOverrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Keys set in `self` take precedence over `lower`.
    pub fn or(self, lower: Self) -> Self {
        let hi = self;
        let lo = lower;
        merge_fields!(hi, lo;
            game, preset, sigma, nu, nu_list, classes, alpha_star, k_max, gamma, tau_max,
            horizon, trials, seed, dataset_path, output_dir, jobs,
            infection_rate, recovery_rate, infection_cost, protection_cost, initial_infected,
            spread_rate, propagation_cost, propagation_reward, reward_mass, initial_aware,
        )
    }

    /// Fills in defaults and validates.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let game = self.game.unwrap_or(GameName::Sis);
        let preset = self.preset.unwrap_or_default();
        let horizon = self.horizon.unwrap_or(match preset {
            Preset::Full => game.default_horizon(),
            Preset::Ci => CI_HORIZON,
        });

        let epidemic_keys = [
            self.infection_rate,
            self.recovery_rate,
            self.infection_cost,
            self.protection_cost,
            self.initial_infected,
        ];
        let rumor_keys = [
            self.spread_rate,
            self.propagation_cost,
            self.propagation_reward,
            self.initial_aware,
        ];
        let (epidemic, rumor) = match game {
            GameName::Sis | GameName::Sir => {
                if rumor_keys.iter().any(Option::is_some) || self.reward_mass.is_some() {
                    bail!("rumor parameters do not apply to the {} game", game.as_str());
                }
                let d = if game == GameName::Sis {
                    EpidemicParams::sis_default()
                } else {
                    EpidemicParams::sir_default()
                };
                let initial = if game == GameName::Sis { 0.5 } else { 0.1 };
                let p = EpidemicConfig {
                    infection_rate: self.infection_rate.unwrap_or(d.infection_rate),
                    recovery_rate: self.recovery_rate.unwrap_or(d.recovery_rate),
                    infection_cost: self.infection_cost.unwrap_or(d.infection_cost),
                    protection_cost: self.protection_cost.unwrap_or(d.protection_cost),
                    initial_infected: self.initial_infected.unwrap_or(initial),
                };
                (Some(p), None)
            }
            GameName::Rs => {
                if epidemic_keys.iter().any(Option::is_some) {
                    bail!("epidemic parameters do not apply to the rs game");
                }
                let d = RumorParams::<f64>::rs_default();
                let p = RumorConfig {
                    spread_rate: self.spread_rate.unwrap_or(d.spread_rate),
                    propagation_cost: self.propagation_cost.unwrap_or(d.propagation_cost),
                    propagation_reward: self.propagation_reward.unwrap_or(d.propagation_reward),
                    reward_mass: self.reward_mass.unwrap_or(d.reward_mass),
                    initial_aware: self.initial_aware.unwrap_or(0.1),
                };
                (None, Some(p))
            }
        };

        let cfg = ExperimentConfig {
            game,
            preset,
            sigma: self.sigma.unwrap_or(0.5),
            nu: self.nu.unwrap_or(10.0),
            nu_list: self.nu_list.unwrap_or_else(|| vec![10.0, 20.0, 50.0, 100.0, 200.0]),
            classes: self.classes.unwrap_or(50),
            alpha_star: self.alpha_star.unwrap_or(5.0),
            k_max: self.k_max.unwrap_or(game.default_k_max()),
            gamma: self.gamma.unwrap_or(50.0),
            tau_max: self.tau_max.unwrap_or(5000),
            horizon,
            trials: self.trials.unwrap_or(10),
            seed: self.seed.unwrap_or(0),
            dataset_path: self.dataset_path,
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            jobs: self.jobs,
            epidemic,
            rumor,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpidemicConfig {
    pub infection_rate: f64,
    pub recovery_rate: f64,
    pub infection_cost: f64,
    pub protection_cost: f64,
    pub initial_infected: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RumorConfig {
    pub spread_rate: f64,
    pub propagation_cost: f64,
    pub propagation_reward: f64,
    pub reward_mass: RumorMass,
    pub initial_aware: f64,
}

/// Fully resolved configuration. Serializes to the same flat keys that
/// [`ConfigOverrides`] reads, so a persisted config can be fed back in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameName,
    pub preset: Preset,
    pub sigma: f64,
    pub nu: f64,
    pub nu_list: Vec<f64>,
    pub classes: usize,
    pub alpha_star: f64,
    pub k_max: usize,
    pub gamma: f64,
    pub tau_max: usize,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub epidemic: Option<EpidemicConfig>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub rumor: Option<RumorConfig>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        ensure!(
            self.sigma > 0.0 && self.sigma < 1.0,
            "sigma must lie in (0, 1), got {}",
            self.sigma
        );
        ensure!(
            self.nu > 0.0 && self.nu.is_finite(),
            "nu must be positive, got {}",
            self.nu
        );
        ensure!(!self.nu_list.is_empty(), "nu_list is empty");
        ensure!(
            self.nu_list.iter().all(|&n| n > 0.0 && n.is_finite()),
            "nu_list entries must be positive"
        );
        ensure!(self.classes >= 1, "classes must be at least 1");
        ensure!(
            self.alpha_star > 0.0 && self.alpha_star.is_finite(),
            "alpha_star must be positive"
        );
        ensure!(self.k_max >= 1, "k_max must be at least 1");
        ensure!(self.gamma > 0.0 && self.gamma.is_finite(), "gamma must be positive");
        ensure!(self.tau_max >= 1, "tau_max must be at least 1");
        ensure!(self.horizon >= 1, "horizon must be at least 1");
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(self.jobs != Some(0), "jobs must be at least 1");
        // Surfaces parameter range errors early.
        self.game_model()?;
        Ok(())
    }

    pub fn game_model(&self) -> Result<GameModel64> {
        let model = match (self.game, self.epidemic, self.rumor) {
            (GameName::Sis, Some(p), _) => GameModel::sis(p.params(), self.horizon, p.initial_infected)?,
            (GameName::Sir, Some(p), _) => GameModel::sir(p.params(), self.horizon, p.initial_infected)?,
            (GameName::Rs, _, Some(p)) => GameModel::rs(
                RumorParams {
                    spread_rate: p.spread_rate,
                    propagation_cost: p.propagation_cost,
                    propagation_reward: p.propagation_reward,
                    reward_mass: p.reward_mass,
                },
                self.horizon,
                p.initial_aware,
            )?,
            _ => bail!("missing parameters for the {} game", self.game.as_str()),
        };
        Ok(model)
    }

    pub fn core_config(&self) -> CoreConfig<f64> {
        CoreConfig {
            classes: self.classes,
            alpha_star: self.alpha_star,
            gamma: self.gamma,
            iterations: self.tau_max,
        }
    }

    /// Creates the output directory and writes the effective config into it.
    pub fn persist(&self) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.output_dir).with_context(|| format!("creating {}", self.output_dir.display()))?;
        let path = self.output_dir.join(CONFIG_FILE);
        let text = toml::to_string(self).context("serializing config")?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

impl EpidemicConfig {
    fn params(&self) -> EpidemicParams<f64> {
        EpidemicParams {
            infection_rate: self.infection_rate,
            recovery_rate: self.recovery_rate,
            infection_cost: self.infection_cost,
            protection_cost: self.protection_cost,
        }
    }
}
