//! Synchronous simulation of the TEL and ODL controllers on the binary
//! interference game: a player earns 1 when it is alone on its resource and
//! 0 otherwise.
//!
//! Resources are 0-based indices in `0..N`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mood {
    Content,
    Hopeful,
    Watchful,
    Discontent,
}

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Mood::Content => 'C',
            Mood::Hopeful => 'H',
            Mood::Watchful => 'W',
            Mood::Discontent => 'D',
        };
        write!(f, "{c}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Tel,
    Odl,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Tel => "tel",
            Algorithm::Odl => "odl",
        }
    }

    /// Number of moods the controller can take.
    pub fn mood_count(self) -> usize {
        match self {
            Algorithm::Tel => 4,
            Algorithm::Odl => 2,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tel" => Ok(Algorithm::Tel),
            "odl" => Ok(Algorithm::Odl),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayerState {
    pub mood: Mood,
    pub action: usize,
    pub benchmark_action: usize,
    pub utility: u8,
    pub benchmark_utility: u8,
}

impl PlayerState {
    /// Content player sitting on its benchmark.
    pub fn content_on(resource: usize, utility: u8) -> Self {
        Self {
            mood: Mood::Content,
            action: resource,
            benchmark_action: resource,
            utility,
            benchmark_utility: utility,
        }
    }

    pub fn is_aligned(&self) -> bool {
        self.action == self.benchmark_action && self.utility == self.benchmark_utility
    }
}

/// Full system state: one [`PlayerState`] per player plus the resource count.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkState {
    players: Vec<PlayerState>,
    resources: usize,
}

impl NetworkState {
    pub fn new(players: Vec<PlayerState>, resources: usize) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::InvalidParameter("at least one player required".into()));
        }
        for p in &players {
            for index in [p.action, p.benchmark_action] {
                if index >= resources {
                    return Err(Error::ResourceOutOfRange { index, resources });
                }
            }
            if p.utility > 1 || p.benchmark_utility > 1 {
                return Err(Error::InvalidParameter("utilities must be 0 or 1".into()));
            }
        }
        Ok(Self { players, resources })
    }

    pub fn players(&self) -> &[PlayerState] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn actions(&self) -> Vec<usize> {
        self.players.iter().map(|p| p.action).collect()
    }

    pub fn is_aligned(&self) -> bool {
        self.players.iter().all(PlayerState::is_aligned)
    }

    /// Recurrence class of the unperturbed process: aligned and all Content.
    pub fn is_rc(&self) -> bool {
        self.is_aligned() && self.players.iter().all(|p| p.mood == Mood::Content)
    }

    /// True when every player uses a distinct resource.
    pub fn is_orthogonal(&self) -> bool {
        let mut seen = vec![false; self.resources];
        self.players.iter().all(|p| !std::mem::replace(&mut seen[p.action], true))
    }
}

/// Controller constants. `G(x) = -nu1 x + nu2` is the TEL Content acceptance
/// exponent, `F(u) = -phi1 u + phi2` the TEL Discontent one, and `c` the ODL
/// exploration exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub epsilon: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub c: f64,
}

const BOUNDARY_SLACK: f64 = 1e-12;

impl ControllerParams {
    /// Defaults for `players` players: `G(1) = 0.01`, `F(0) = 1/(2K)`,
    /// `F(1) = 0` and `c = K`.
    pub fn defaults(epsilon: f64, players: usize) -> Self {
        let half_inv = 1.0 / (2.0 * players as f64);
        Self { epsilon, nu1: 0.48, nu2: 0.49, phi1: half_inv, phi2: half_inv, c: players as f64 }
    }

    pub fn validate(&self, players: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0,1), got {}", self.epsilon));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return bad(format!("c must be > 0, got {}", self.c));
        }
        if !(self.nu1 > 0.0) {
            return bad(format!("nu1 must be > 0, got {}", self.nu1));
        }
        let g = self.eval_g(1.0);
        if !(g > 0.0 && g < 0.5) {
            return bad(format!("G(1) = {g} outside (0, 1/2)"));
        }
        let f_max = 1.0 / (2.0 * players as f64);
        for u in [0.0, 1.0] {
            let f = self.eval_f(u);
            if f < -BOUNDARY_SLACK || f > f_max + BOUNDARY_SLACK {
                return bad(format!("F({u}) = {f} outside [0, 1/(2K)]"));
            }
        }
        Ok(())
    }

    pub fn eval_g(&self, delta_u: f64) -> f64 {
        -self.nu1 * delta_u + self.nu2
    }

    pub fn eval_f(&self, u: f64) -> f64 {
        -self.phi1 * u + self.phi2
    }

    /// Probability that a TEL Content experimenter adopts an improvement.
    pub fn content_acceptance(&self, delta_u: f64) -> f64 {
        self.epsilon.powf(self.eval_g(delta_u))
    }

    /// Probability that a TEL Discontent player settles on utility `u`.
    pub fn discontent_acceptance(&self, u: u8) -> f64 {
        self.epsilon.powf(self.eval_f(u as f64).max(0.0))
    }

    /// ODL exploration probability `epsilon^c`.
    pub fn odl_exploration(&self) -> f64 {
        self.epsilon.powf(self.c)
    }

    /// ODL benchmark acceptance `epsilon^(1-u)`.
    pub fn odl_acceptance(&self, u: u8) -> f64 {
        self.epsilon.powi(1 - u as i32)
    }
}

/// Source of randomness for one iteration. Implemented for every
/// [`rand::Rng`]; tests substitute scripted sources.
pub trait RandomSource {
    /// Uniform draw in `[0, 1)`.
    fn next_unit(&mut self) -> f64;
    /// Uniform draw in `0..n`, `n >= 1`.
    fn next_index(&mut self, n: usize) -> usize;

    fn bernoulli(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }
}

impl<R: rand::Rng + ?Sized> RandomSource for R {
    fn next_unit(&mut self) -> f64 {
        self.gen::<f64>()
    }

    fn next_index(&mut self, n: usize) -> usize {
        self.gen_range(0..n)
    }
}

/// Binary interference utility: 1 iff no other player shares the resource.
pub fn compute_utilities(actions: &[usize], resources: usize) -> Result<Vec<u8>> {
    let mut load = vec![0usize; resources];
    for &a in actions {
        if a >= resources {
            return Err(Error::ResourceOutOfRange { index: a, resources });
        }
        load[a] += 1;
    }
    Ok(actions.iter().map(|&a| u8::from(load[a] == 1)).collect())
}

fn occupancy_utilities(actions: &[usize], resources: usize) -> Vec<u8> {
    compute_utilities(actions, resources).expect("actions validated by NetworkState")
}

/// Uniform pick among all resources except `excluded`.
fn pick_other<R: RandomSource + ?Sized>(rng: &mut R, resources: usize, excluded: usize) -> usize {
    let r = rng.next_index(resources - 1);
    if r >= excluded {
        r + 1
    } else {
        r
    }
}

/// One synchronous TEL iteration.
pub fn tel_step<R: RandomSource + ?Sized>(
    state: &NetworkState,
    params: &ControllerParams,
    rng: &mut R,
) -> NetworkState {
    let n = state.resources;
    let mut experimented = vec![false; state.players.len()];
    let actions: Vec<usize> = state
        .players
        .iter()
        .enumerate()
        .map(|(k, p)| match p.mood {
            Mood::Content => {
                if rng.bernoulli(params.epsilon) && n > 1 {
                    experimented[k] = true;
                    pick_other(rng, n, p.benchmark_action)
                } else {
                    p.benchmark_action
                }
            }
            Mood::Hopeful | Mood::Watchful => p.benchmark_action,
            Mood::Discontent => rng.next_index(n),
        })
        .collect();
    let utilities = occupancy_utilities(&actions, n);

    let players = state
        .players
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (a, u) = (actions[k], utilities[k]);
            let mut next = PlayerState { action: a, utility: u, ..*p };
            let ub = p.benchmark_utility;
            match p.mood {
                Mood::Content if experimented[k] => {
                    if u > ub && rng.bernoulli(params.content_acceptance((u - ub) as f64)) {
                        next.benchmark_action = a;
                        next.benchmark_utility = u;
                    }
                }
                Mood::Content => {
                    next.mood = match u.cmp(&ub) {
                        std::cmp::Ordering::Greater => Mood::Hopeful,
                        std::cmp::Ordering::Less => Mood::Watchful,
                        std::cmp::Ordering::Equal => Mood::Content,
                    };
                }
                Mood::Hopeful => match u.cmp(&ub) {
                    std::cmp::Ordering::Greater => {
                        next.mood = Mood::Content;
                        next.benchmark_utility = u;
                    }
                    std::cmp::Ordering::Less => next.mood = Mood::Watchful,
                    std::cmp::Ordering::Equal => next.mood = Mood::Content,
                },
                Mood::Watchful => {
                    next.mood = match u.cmp(&ub) {
                        std::cmp::Ordering::Greater => Mood::Hopeful,
                        std::cmp::Ordering::Less => Mood::Discontent,
                        std::cmp::Ordering::Equal => Mood::Content,
                    };
                }
                Mood::Discontent => {
                    if rng.bernoulli(params.discontent_acceptance(u)) {
                        next.mood = Mood::Content;
                        next.benchmark_action = a;
                        next.benchmark_utility = u;
                    }
                }
            }
            next
        })
        .collect();
    NetworkState { players, resources: n }
}

/// One synchronous ODL iteration. Fails if a player is Hopeful or Watchful.
pub fn odl_step<R: RandomSource + ?Sized>(
    state: &NetworkState,
    params: &ControllerParams,
    rng: &mut R,
) -> Result<NetworkState> {
    if let Some((player, p)) = state
        .players
        .iter()
        .enumerate()
        .find(|(_, p)| matches!(p.mood, Mood::Hopeful | Mood::Watchful))
    {
        return Err(Error::InvalidMood { player, mood: p.mood });
    }
    let n = state.resources;
    let explore = params.odl_exploration();
    let actions: Vec<usize> = state
        .players
        .iter()
        .map(|p| match p.mood {
            Mood::Content if rng.bernoulli(explore) && n > 1 => pick_other(rng, n, p.benchmark_action),
            Mood::Content => p.benchmark_action,
            _ => rng.next_index(n),
        })
        .collect();
    let utilities = occupancy_utilities(&actions, n);

    let players = state
        .players
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (a, u) = (actions[k], utilities[k]);
            let mut next = PlayerState { action: a, utility: u, ..*p };
            let settle = |next: &mut PlayerState| {
                next.mood = Mood::Content;
                next.benchmark_action = a;
                next.benchmark_utility = u;
            };
            match p.mood {
                Mood::Content if u != p.benchmark_utility => {
                    if rng.bernoulli(params.odl_acceptance(u)) {
                        settle(&mut next);
                    } else {
                        next.mood = Mood::Discontent;
                    }
                }
                Mood::Content => {}
                _ => {
                    if rng.bernoulli(params.odl_acceptance(u)) {
                        settle(&mut next);
                    }
                }
            }
            next
        })
        .collect();
    Ok(NetworkState { players, resources: n })
}

/// Dispatch on the algorithm.
pub fn step<R: RandomSource + ?Sized>(
    algorithm: Algorithm,
    state: &NetworkState,
    params: &ControllerParams,
    rng: &mut R,
) -> Result<NetworkState> {
    match algorithm {
        Algorithm::Tel => Ok(tel_step(state, params, rng)),
        Algorithm::Odl => odl_step(state, params, rng),
    }
}
