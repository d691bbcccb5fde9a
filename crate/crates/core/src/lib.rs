//! Learning equilibria of graphex mean field games.
//!
//! Agents sit on sparse power-law graphs sampled from a separable graphex.
//! High-degree "core" agents are handled by a mean field learned with online
//! mirror descent; low-degree "periphery" agents solve an exact MDP against
//! that core. [`sim`] plays the learned policies on finite graphs to measure
//! how close the limiting prediction is.
//!
//! Numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the common `f64` instantiation.

pub mod error;
pub mod game;
pub mod graphex;
pub mod netio;
mod scalar;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Graphex64 = graphex::Graphex<f64>;
pub type SampledGraph64 = graphex::SampledGraph<f64>;
pub type DegreeLaw64 = graphex::DegreeLaw<f64>;
pub type GameModel64 = game::GameModel<f64>;
pub type CoreField64 = solver::CoreField<f64>;
pub type PeripheryField64 = solver::PeripheryField<f64>;
pub type PolicyBundle64 = solver::PolicyBundle<f64>;
pub type QTable64 = solver::QTable<f64>;

pub type Graphex32 = graphex::Graphex<f32>;
pub type GameModel32 = game::GameModel<f32>;
pub type PolicyBundle32 = solver::PolicyBundle<f32>;
