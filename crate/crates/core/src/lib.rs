//! Trial and Error Learning (TEL) and Optimal Dynamical Learning (ODL) on a
//! binary resource-sharing game.
//!
//! * [`game`]: exact synchronous simulation of both controllers.
//! * [`montecarlo`]: seeded, parallel estimates of hitting time and
//!   stationary fraction.
//! * [`partitions`]: ordered repartitions and chain size formulas.
//! * [`tel_chain`], [`odl_chain`]: approximated Markov chains.
//! * [`analysis`]: fundamental matrix, stationary distribution, hitting times.
//!
//! Chain construction and analysis are generic over [`Scalar`] (`f64` and
//! `f32`); the simulation works in `f64`.

// Range checks are written as `!(x <= limit)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chain;
pub mod error;
pub mod game;
pub mod linalg;
pub mod montecarlo;
pub mod odl_chain;
pub mod partitions;
pub mod scalar;
pub mod tel_chain;

pub use analysis::{analyze, efht, fundamental_matrix, oracle_hitting_time, stationary, stationary_gth, verify_ergodic, AnalysisResult};
pub use chain::{ApproxChain, ChainExport, ChainState, Rates, StateKind};
pub use error::{Error, Result};
pub use game::{Algorithm, ControllerParams, Mood, NetworkState, PlayerState};
pub use linalg::Matrix;
pub use montecarlo::{estimate_alpha, estimate_efht, initial_collision_state, MonteCarloConfig};
pub use odl_chain::{build_odl_chain, build_odl_chain_with};
pub use partitions::{enumerate_rrc, full_chain_size, part, reduced_size, OrderedRepartition};
pub use scalar::Scalar;
pub use tel_chain::build_tel_chain;

pub type Chain64 = ApproxChain<f64>;
pub type Chain32 = ApproxChain<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Analysis64 = AnalysisResult<f64>;
pub type Analysis32 = AnalysisResult<f32>;
