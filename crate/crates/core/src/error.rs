use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resource index {index} out of range for {resources} resources")]
    ResourceOutOfRange { index: usize, resources: usize },

    #[error("resources must be ≥ players (got K={players}, N={resources})")]
    TooFewResources { players: usize, resources: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mood {mood:?} of player {player} is not valid for ODL")]
    InvalidMood { player: usize, mood: crate::game::Mood },

    #[error("state has {got} players, expected {expected}")]
    PlayerCount { expected: usize, got: usize },

    #[error("negative probability {value:e} at {context}")]
    NegativeProbability { value: f64, context: String },

    #[error("row {row} sums to {sum} (expected 1)")]
    RowSum { row: usize, sum: f64 },

    #[error("probability mass {value:e} routed to missing state {target}")]
    MissingState { target: String, value: f64 },

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("singular linear system")]
    Singular,

    #[error("stationary probability {value:e} of state {state} too small")]
    IllConditioned { state: usize, value: f64 },

    #[error("stationary vector invalid: {0}")]
    Stationary(String),

    #[error("all {trials} trials hit the step cap of {cap}")]
    CapExhausted { trials: usize, cap: u64 },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors that stem from a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NegativeProbability { .. }
                | Error::RowSum { .. }
                | Error::MissingState { .. }
                | Error::NotErgodic(_)
                | Error::Singular
                | Error::IllConditioned { .. }
                | Error::Stationary(_)
                | Error::CapExhausted { .. }
        )
    }
}
