//! Vanilla and variance-reduced temporal-difference policy evaluation with
//! linear features over finite Markov chains.
//!
//! The crate is organised bottom-up:
//!
//! * [`mdp`]: finite MDPs, policy folding, stationary distributions, samplers
//!   and mixing constants.
//! * [`model`]: feature maps, per-sample and mean pseudo-gradients, and the
//!   exact fixed point `θ* = −A⁻¹b`.
//! * [`algorithms`]: vanilla TD and the two VRTD variants.
//! * [`metrics`] and [`theory`]: error metrics and closed-form bounds.
//! * [`experiments`]: environment generators and the multi-run harness.
//! * [`config`] and [`cli`]: the `vrtd` command-line tool.

pub mod algorithms;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod mdp;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use mdp::{ControlledMdp, Mdp, MixingEstimate, StationaryDist, Transition};
pub use model::{FeatureMap, PseudoGradient, TdModel};
