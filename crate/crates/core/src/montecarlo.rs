//! Monte Carlo estimates of the EFHT and of the stationary fraction.
//!
//! Trial `t` draws from a ChaCha8 stream seeded with the master seed and
//! stream number `t`, so results do not depend on the number of worker
//! threads. The stationary-fraction run uses its own stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{step, Algorithm, ControllerParams, NetworkState, PlayerState};

pub const DEFAULT_EFHT_TRIALS: usize = 5000;
pub const DEFAULT_ALPHA_ITERATIONS: u64 = 1_000_000;
pub const DEFAULT_BURN_IN: u64 = 1000;
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

const ALPHA_STREAM: u64 = u64::MAX;
const ALPHA_BATCHES: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub algorithm: Algorithm,
    pub players: usize,
    pub resources: usize,
    pub params: ControllerParams,
    pub seed: u64,
    pub efht_trials: usize,
    pub alpha_iterations: u64,
    pub burn_in: u64,
    pub max_steps_per_trial: u64,
}

impl MonteCarloConfig {
    /// Default trial counts with default controller constants.
    pub fn new(algorithm: Algorithm, players: usize, resources: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            algorithm,
            players,
            resources,
            params: ControllerParams::defaults(epsilon, players),
            seed,
            efht_trials: DEFAULT_EFHT_TRIALS,
            alpha_iterations: DEFAULT_ALPHA_ITERATIONS,
            burn_in: DEFAULT_BURN_IN,
            max_steps_per_trial: DEFAULT_MAX_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.players == 0 {
            return Err(Error::InvalidParameter("at least one player required".into()));
        }
        if self.resources < self.players {
            return Err(Error::TooFewResources { players: self.players, resources: self.resources });
        }
        if self.efht_trials == 0 || self.alpha_iterations == 0 || self.max_steps_per_trial == 0 {
            return Err(Error::InvalidParameter("trial counts must be >= 1".into()));
        }
        self.params.validate(self.players)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// All players Content and aligned on resource 0.
pub fn initial_collision_state(players: usize, resources: usize) -> Result<NetworkState> {
    if players > resources {
        return Err(Error::TooFewResources { players, resources });
    }
    let u = u8::from(players == 1);
    NetworkState::new(vec![PlayerState::content_on(0, u); players], resources)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfhtEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Trials that reached the target.
    pub trials_used: usize,
    /// Trials stopped by the step cap, excluded from the mean.
    pub censored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// Batch-means standard error.
    pub std_error: f64,
}

fn hitting_time(config: &MonteCarloConfig, trial: u64) -> Result<Option<u64>> {
    let mut rng = config.rng(trial);
    let mut state = initial_collision_state(config.players, config.resources)?;
    for t in 0..=config.max_steps_per_trial {
        if state.is_orthogonal() {
            return Ok(Some(t));
        }
        if t < config.max_steps_per_trial {
            state = step(config.algorithm, &state, &config.params, &mut rng)?;
        }
    }
    Ok(None)
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean number of iterations from the full collision to the first state in
/// which all players use distinct resources.
pub fn estimate_efht(config: &MonteCarloConfig) -> Result<EfhtEstimate> {
    config.validate()?;
    let times: Vec<Option<u64>> = (0..config.efht_trials as u64)
        .into_par_iter()
        .map(|t| hitting_time(config, t))
        .collect::<Result<_>>()?;
    let hits: Vec<f64> = times.iter().flatten().map(|&t| t as f64).collect();
    let censored = times.len() - hits.len();
    if hits.is_empty() {
        return Err(Error::CapExhausted { trials: censored, cap: config.max_steps_per_trial });
    }
    if censored > 0 {
        log::warn!("{censored} of {} trials hit the step cap", times.len());
    }
    let (mean, std_error) = mean_and_error(&hits);
    Ok(EfhtEstimate { mean, std_error, trials_used: hits.len(), censored })
}

/// Fraction of iterations, after burn-in, spent all Content and aligned with
/// every player on a distinct resource.
pub fn estimate_alpha(config: &MonteCarloConfig) -> Result<AlphaEstimate> {
    config.validate()?;
    let mut rng = config.rng(ALPHA_STREAM);
    let mut state = initial_collision_state(config.players, config.resources)?;
    for _ in 0..config.burn_in {
        state = step(config.algorithm, &state, &config.params, &mut rng)?;
    }
    let total = config.alpha_iterations;
    let batches = ALPHA_BATCHES.min(total);
    let mut batch_means = Vec::with_capacity(batches as usize);
    let mut hits_total = 0u64;
    for b in 0..batches {
        let len = total / batches + u64::from(b < total % batches);
        let mut hits = 0u64;
        for _ in 0..len {
            if state.is_rc() && state.is_orthogonal() {
                hits += 1;
            }
            state = step(config.algorithm, &state, &config.params, &mut rng)?;
        }
        hits_total += hits;
        batch_means.push(hits as f64 / len as f64);
    }
    let (_, std_error) = mean_and_error(&batch_means);
    Ok(AlphaEstimate { alpha: hits_total as f64 / total as f64, std_error })
}
