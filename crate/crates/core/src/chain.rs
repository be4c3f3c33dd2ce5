//! Approximated chains: labeled states grouped in sets around each reduced
//! recurrence class, a row-stochastic transition matrix, and the JSON export
//! format shared by the TEL and ODL builders.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::verify_ergodic;
use crate::error::{Error, Result};
use crate::game::Algorithm;
use crate::linalg::Matrix;
use crate::partitions::{enumerate_rrc, occupancy, up_neighbors, IndexedRepartition, OccupancyStats};
use crate::scalar::Scalar;

/// Kind of a state inside a set. Intermediary kinds have different meanings
/// for TEL and ODL; see the builder modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateKind {
    #[serde(rename = "RRC")]
    Rrc,
    Xi0,
    Xi1,
    Xi2,
    Xi3,
    Xi4,
}

impl StateKind {
    fn prefix(self) -> &'static str {
        match self {
            StateKind::Rrc => "Z",
            StateKind::Xi0 => "xi0",
            StateKind::Xi1 => "xi1",
            StateKind::Xi2 => "xi2",
            StateKind::Xi3 => "xi3",
            StateKind::Xi4 => "xi4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainState {
    pub n: usize,
    pub i: usize,
    pub kind: StateKind,
    pub label: String,
}

impl ChainState {
    pub fn new(n: usize, i: usize, kind: StateKind) -> Self {
        Self { n, i, kind, label: format!("{}_{}({})", kind.prefix(), n, i) }
    }
}

impl fmt::Display for ChainState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Rates entering the transition formulas.
///
/// `explore` is the probability that one Content player experiments in an
/// iteration; `accept` is the base of the acceptance exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates<T> {
    pub explore: T,
    pub accept: T,
}

impl<T: Scalar> Rates<T> {
    /// Same value for exploration and acceptance.
    pub fn uniform(epsilon: T) -> Self {
        Self { explore: epsilon, accept: epsilon }
    }

    /// ODL controller with constant `c`: exploration `epsilon^c`, acceptance
    /// base `epsilon`.
    pub fn from_controller(epsilon: T, c: T) -> Self {
        Self { explore: epsilon.powf(c), accept: epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("explore", self.explore), ("accept", self.accept)] {
            if !(v > T::zero() && v < T::one()) {
                return Err(Error::InvalidParameter(format!("{name} rate must lie in (0,1), got {v}")));
            }
        }
        Ok(())
    }

    /// Probability that at least one of `k` Content players experiments.
    pub fn at_least_one(&self, k: usize) -> T {
        T::one() - (T::one() - self.explore).powi(k as i32)
    }
}

/// A transition between kinds; the sets involved are implied by the row
/// function that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition<T> {
    pub from: StateKind,
    pub to: StateKind,
    pub prob: T,
}

pub(crate) fn tr<T>(from: StateKind, to: StateKind, prob: T) -> Transition<T> {
    Transition { from, to, prob }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaParams {
    pub explore: f64,
    pub accept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMeta {
    pub algo: Algorithm,
    #[serde(rename = "K")]
    pub players: usize,
    #[serde(rename = "N")]
    pub resources: usize,
    pub epsilon: f64,
    pub params: MetaParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxChain<T> {
    pub states: Vec<ChainState>,
    pub matrix: Matrix<T>,
    pub meta: ChainMeta,
}

impl<T: Scalar> ApproxChain<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn find(&self, n: usize, i: usize, kind: StateKind) -> Option<usize> {
        self.states.iter().position(|s| s.n == n && s.i == i && s.kind == kind)
    }

    /// All players on one resource.
    pub fn full_collision(&self) -> usize {
        self.find(1, 1, StateKind::Rrc).expect("every chain contains Z_1(1)")
    }

    /// All players on distinct resources.
    pub fn orthogonal(&self) -> usize {
        self.find(self.meta.players, 1, StateKind::Rrc).expect("every chain contains Z_K(1)")
    }

    /// Resolve `full-collision`, `orthogonal`, a label such as `Z_2(1)`, or
    /// a numeric state index.
    pub fn resolve(&self, name: &str) -> Result<usize> {
        match name {
            "full-collision" => Ok(self.full_collision()),
            "orthogonal" => Ok(self.orthogonal()),
            _ => {
                if let Some(k) = self.states.iter().position(|s| s.label == name) {
                    return Ok(k);
                }
                match name.parse::<usize>() {
                    Ok(k) if k < self.len() => Ok(k),
                    _ => Err(Error::UnknownState(name.to_string())),
                }
            }
        }
    }

    pub fn to_export(&self) -> ChainExport {
        ChainExport {
            meta: self.meta.clone(),
            states: self.states.clone(),
            matrix: self.matrix.map(|x| x.to_f64_lossy()).to_rows(),
        }
    }
}

/// On-disk JSON form of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainExport {
    pub meta: ChainMeta,
    pub states: Vec<ChainState>,
    pub matrix: Vec<Vec<f64>>,
}

impl ChainExport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain export is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("chain JSON: {e}")))
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn into_chain(self) -> Result<ApproxChain<f64>> {
        if self.matrix.len() != self.states.len() {
            return Err(Error::Dimension(format!(
                "{} states but {} matrix rows",
                self.states.len(),
                self.matrix.len()
            )));
        }
        let matrix = Matrix::from_rows(&self.matrix)?;
        if !matrix.is_square() {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        Ok(ApproxChain { states: self.states, matrix, meta: self.meta })
    }
}

/// A set of states around one reduced recurrence class, with its links to
/// neighboring sets.
#[derive(Debug, Clone)]
pub struct StateSet {
    pub rrc: IndexedRepartition,
    pub stats: OccupancyStats,
    pub kinds: Vec<StateKind>,
    /// `(source_size, target set)` for sets using one more resource.
    pub up: Vec<(usize, usize)>,
    /// `(source_size, source set)` for sets using one less resource, where
    /// `source_size` is the occupancy that was decremented on the way up.
    pub down: Vec<(usize, usize)>,
    pub first_state: usize,
}

impl StateSet {
    pub fn has(&self, kind: StateKind) -> bool {
        self.kinds.contains(&kind)
    }
}

/// Per-algorithm rules plugged into [`assemble`].
pub(crate) trait ChainRules<T: Scalar> {
    fn algorithm(&self) -> Algorithm;
    fn state_set(&self, set: &IndexedRepartition, stats: &OccupancyStats) -> Vec<StateKind>;
    fn intra(&self, stats: &OccupancyStats) -> Result<Vec<Transition<T>>>;
    fn up(&self, stats: &OccupancyStats, source_size: usize) -> Vec<Transition<T>>;
    fn down(&self, upper: &OccupancyStats, source_size: usize) -> Vec<Transition<T>>;
}

/// Enumerate the sets and wire the up/down links between them.
pub fn build_sets(
    players: usize,
    resources: usize,
    kinds: impl Fn(&IndexedRepartition, &OccupancyStats) -> Vec<StateKind>,
) -> Result<Vec<StateSet>> {
    let rrcs = enumerate_rrc(players, resources)?;
    let index: HashMap<_, _> = rrcs.iter().enumerate().map(|(k, r)| (r.repartition.clone(), k)).collect();
    let mut sets: Vec<StateSet> = Vec::with_capacity(rrcs.len());
    let mut first = 0;
    for rrc in rrcs {
        let stats = occupancy(&rrc.repartition);
        let kinds = kinds(&rrc, &stats);
        let size = kinds.len();
        sets.push(StateSet { rrc, stats, kinds, up: Vec::new(), down: Vec::new(), first_state: first });
        first += size;
    }
    for i in 0..sets.len() {
        for up in up_neighbors(&sets[i].rrc.repartition) {
            let j = index[&up.target];
            sets[i].up.push((up.source_size, j));
            sets[j].down.push((up.source_size, i));
        }
    }
    Ok(sets)
}

fn state_index(set: &StateSet, kind: StateKind) -> Option<usize> {
    set.kinds.iter().position(|&k| k == kind).map(|p| set.first_state + p)
}

pub(crate) fn assemble<T: Scalar, R: ChainRules<T>>(
    rules: &R,
    players: usize,
    resources: usize,
    meta: ChainMeta,
) -> Result<ApproxChain<T>> {
    if players < 2 {
        return Err(Error::InvalidParameter("approximated chains need at least 2 players".into()));
    }
    let sets = build_sets(players, resources, |r, s| rules.state_set(r, s))?;
    let states: Vec<ChainState> = sets
        .iter()
        .flat_map(|s| s.kinds.iter().map(move |&k| ChainState::new(s.rrc.n, s.rrc.i, k)))
        .collect();
    let dim = states.len();
    let mut matrix = Matrix::<T>::zeros(dim, dim);
    let tol = T::row_tolerance();

    let mut place = |from_set: &StateSet, to_set: &StateSet, t: Transition<T>| -> Result<()> {
        let Some(row) = state_index(from_set, t.from) else {
            return Ok(());
        };
        if t.prob < -tol || !t.prob.is_finite() {
            return Err(Error::NegativeProbability {
                value: t.prob.to_f64_lossy(),
                context: format!("{} -> {:?} of {}", states[row], t.to, to_set.rrc.repartition),
            });
        }
        if t.prob <= T::zero() {
            return Ok(());
        }
        let Some(col) = state_index(to_set, t.to) else {
            return Err(Error::MissingState {
                target: format!("{:?} of {}", t.to, to_set.rrc.repartition),
                value: t.prob.to_f64_lossy(),
            });
        };
        matrix[(row, col)] += t.prob;
        Ok(())
    };

    for set in &sets {
        for t in rules.intra(&set.stats)? {
            place(set, set, t)?;
        }
        for &(size, j) in &set.up {
            for t in rules.up(&set.stats, size) {
                place(set, &sets[j], t)?;
            }
        }
        for &(size, i) in &set.down {
            for t in rules.down(&set.stats, size) {
                place(set, &sets[i], t)?;
            }
        }
    }

    for (r, state) in states.iter().enumerate() {
        let sum = matrix.row(r).iter().fold(T::zero(), |s, &x| s + x);
        if !((sum - T::one()).abs() <= tol) {
            return Err(Error::RowSum { row: r, sum: sum.to_f64_lossy() });
        }
        if let Some(&x) = matrix.row(r).iter().find(|&&x| x > T::one() + tol) {
            return Err(Error::NegativeProbability {
                value: x.to_f64_lossy(),
                context: format!("entry above 1 in row {state}"),
            });
        }
    }
    let (states, matrix) = prune_unreachable(states, matrix);
    let report = verify_ergodic(&matrix);
    if !report.ergodic {
        return Err(Error::NotErgodic(report.diagnostic()));
    }
    Ok(ApproxChain { states, matrix, meta })
}

/// Drop states that no path from the first state (the full collision)
/// reaches. Such states carry no stationary mass and never lie on a path
/// between reachable states.
fn prune_unreachable<T: Scalar>(states: Vec<ChainState>, matrix: Matrix<T>) -> (Vec<ChainState>, Matrix<T>) {
    let dim = states.len();
    let mut seen = vec![false; dim];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(r) = stack.pop() {
        for (c, &x) in matrix.row(r).iter().enumerate() {
            if x > T::zero() && !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    if seen.iter().all(|&s| s) {
        return (states, matrix);
    }
    let keep: Vec<usize> = (0..dim).filter(|&k| seen[k]).collect();
    for (k, s) in states.iter().enumerate().filter(|(k, _)| !seen[*k]) {
        log::debug!("dropping unreachable state {s} ({k})");
    }
    let mut pruned = Matrix::zeros(keep.len(), keep.len());
    for (a, &r) in keep.iter().enumerate() {
        for (b, &c) in keep.iter().enumerate() {
            pruned[(a, b)] = matrix[(r, c)];
        }
    }
    let states = keep.iter().map(|&k| states[k].clone()).collect();
    (states, pruned)
}

/// Conservation residue `1 - sum(others)`. Tiny negative round-off is
/// passed through so that [`assemble`] can reject real violations.
pub(crate) fn residue<T: Scalar>(others: &[T]) -> T {
    others.iter().fold(T::one(), |acc, &x| acc - x)
}
