//! Command line flags, the JSON config file that mirrors them, and the
//! resolved experiment grid.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use telodl::{Algorithm, ControllerParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoChoice {
    Tel,
    Odl,
    Both,
}

impl AlgoChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::Tel => vec![Algorithm::Tel],
            AlgoChoice::Odl => vec![Algorithm::Odl],
            AlgoChoice::Both => vec![Algorithm::Tel, Algorithm::Odl],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Approx,
    Mc,
    Both,
}

impl Method {
    pub fn approx(self) -> bool {
        matches!(self, Method::Approx | Method::Both)
    }

    pub fn mc(self) -> bool {
        matches!(self, Method::Mc | Method::Both)
    }
}

/// A number or a list/range string such as `3,5,7` or `3..10`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Int(usize),
    Float(f64),
    Text(String),
}

impl ListValue {
    fn text(&self) -> String {
        match self {
            ListValue::Int(v) => v.to_string(),
            ListValue::Float(v) => v.to_string(),
            ListValue::Text(s) => s.clone(),
        }
    }
}

/// Experiment flags shared by every grid command. Each one may also come
/// from `--config`; flags win over the file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GridArgs {
    #[arg(long, value_enum)]
    pub algo: Option<AlgoChoice>,
    /// Number of players: a value, a list `3,5,7` or a range `3..10`.
    #[arg(long)]
    pub players: Option<ListValue>,
    /// Number of resources; mutually exclusive with `--extra-resources`.
    #[arg(long)]
    pub resources: Option<usize>,
    /// Resources beyond the player count, N = K + d; list or range.
    #[arg(long)]
    pub extra_resources: Option<ListValue>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma list, or `a:b:n` for n points from 10^a to 10^b.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_grid: Option<String>,
    /// Read epsilon as the exploration probability of both algorithms, so
    /// ODL runs with epsilon^(1/c).
    #[arg(long)]
    #[serde(default)]
    pub match_epsilon: bool,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub nu1: Option<f64>,
    #[arg(long)]
    pub nu2: Option<f64>,
    #[arg(long)]
    pub phi1: Option<f64>,
    #[arg(long)]
    pub phi2: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub alpha_iters: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Step cap for a single hitting-time trial.
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of these flags as kebab-case keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl std::str::FromStr for ListValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(ListValue::Text(s.to_string()))
    }
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl GridArgs {
    /// Fill unset flags from the `--config` file, if any.
    pub fn with_config(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let file = load_config(&path)?;
        overlay!(self, file; algo, players, resources, extra_resources, epsilon, epsilon_grid, c, nu1, nu2,
            phi1, phi2, trials, alpha_iters, burn_in, max_steps, seed, method, out);
        self.match_epsilon |= file.match_epsilon;
        Ok(self)
    }

    pub fn algorithms(&self, default: AlgoChoice) -> Vec<Algorithm> {
        self.algo.unwrap_or(default).algorithms()
    }

    pub fn player_list(&self) -> Result<Vec<usize>, CliError> {
        let v = self.players.as_ref().ok_or_else(|| CliError::validation("--players is required"))?;
        parse_usize_list(&v.text())
    }

    /// `(K, N)` pairs in command order.
    pub fn sizes(&self) -> Result<Vec<(usize, usize)>, CliError> {
        let ks = self.player_list()?;
        let pairs: Vec<(usize, usize)> = match (self.resources, &self.extra_resources) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation("--resources and --extra-resources are mutually exclusive"))
            }
            (Some(n), None) => ks.iter().map(|&k| (k, n)).collect(),
            (None, Some(d)) => {
                let ds = parse_usize_list(&d.text())?;
                ks.iter().flat_map(|&k| ds.iter().map(move |&d| (k, k + d))).collect()
            }
            (None, None) => ks.iter().map(|&k| (k, k)).collect(),
        };
        for &(k, n) in &pairs {
            if k == 0 {
                return Err(CliError::validation("players must be >= 1"));
            }
            if n < k {
                return Err(CliError::Validation(telodl::Error::TooFewResources { players: k, resources: n }.to_string()));
            }
        }
        Ok(pairs)
    }

    pub fn epsilons(&self) -> Result<Vec<f64>, CliError> {
        let grid = match (&self.epsilon_grid, self.epsilon) {
            (Some(_), Some(_)) => return Err(CliError::validation("--epsilon and --epsilon-grid are mutually exclusive")),
            (Some(g), None) => parse_grid(g)?,
            (None, Some(e)) => vec![e],
            (None, None) => return Err(CliError::validation("--epsilon or --epsilon-grid is required")),
        };
        if grid.is_empty() {
            return Err(CliError::validation("epsilon grid is empty"));
        }
        if let Some(bad) = grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(CliError::validation(format!("epsilon must lie in (0,1), got {bad}")));
        }
        Ok(grid)
    }

    /// Controller parameters for one grid cell; `epsilon` is the grid value.
    pub fn controller(&self, algo: Algorithm, players: usize, epsilon: f64) -> Result<ControllerParams, CliError> {
        let mut p = ControllerParams::defaults(epsilon, players);
        p.c = self.c.unwrap_or(p.c);
        p.nu1 = self.nu1.unwrap_or(p.nu1);
        p.nu2 = self.nu2.unwrap_or(p.nu2);
        p.phi1 = self.phi1.unwrap_or(p.phi1);
        p.phi2 = self.phi2.unwrap_or(p.phi2);
        if algo == Algorithm::Odl && self.match_epsilon {
            p.epsilon = epsilon.powf(1.0 / p.c);
        }
        p.validate(players).map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(p)
    }
}

fn load_config(path: &Path) -> Result<GridArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// `3`, `3,5,7`, `3..10` (inclusive) or a mix such as `2,4..6`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Validation(format!("cannot parse `{s}` as a list of integers"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Validation(format!("empty list `{s}`")));
    }
    Ok(out)
}

/// Comma list of values, or `a:b:n` for `n` log-spaced points from `10^a`
/// to `10^b`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("cannot parse epsilon grid `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return Ok(match n {
            0 => vec![],
            1 => vec![10f64.powf(a)],
            _ => (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect(),
        });
    }
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| bad()))
        .collect()
}
