//! Ordered repartitions of K players over N resources and the bookkeeping
//! that links them.
//!
//! An [`OrderedRepartition`] is the occupancy vector sorted in non-increasing
//! order. It labels a reduced recurrence class: every all-Content aligned
//! state with the same sorted occupancy behaves identically under relabeling
//! of players and of resources.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedRepartition {
    counts: Vec<usize>,
}

impl OrderedRepartition {
    /// Sorts `counts` in non-increasing order.
    pub fn new(mut counts: Vec<usize>) -> Self {
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Self { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of resources (length of the vector).
    pub fn resources(&self) -> usize {
        self.counts.len()
    }

    pub fn players(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of occupied resources.
    pub fn used(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Resources holding exactly `p` players.
    pub fn resources_with(&self, p: usize) -> usize {
        self.counts.iter().filter(|&&c| c == p).count()
    }

    /// The all-distinct repartition `(1,..,1,0,..,0)`.
    pub fn is_orthogonal(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }

    /// Matches `(2,..,2,1,0,..,0)` with at least one 2.
    pub fn is_pairs_and_single(&self) -> bool {
        let used = &self.counts[..self.used()];
        match used.split_last() {
            Some((&1, rest)) => !rest.is_empty() && rest.iter().all(|&c| c == 2),
            _ => false,
        }
    }
}

impl fmt::Display for OrderedRepartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Occupancy statistics of a repartition.
///
/// `big(p)` counts resources holding exactly `p` players, `small(p)` counts
/// players that share their resource with `p - 1` others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyStats {
    by_size: BTreeMap<usize, usize>,
    players: usize,
    resources: usize,
}

impl OccupancyStats {
    pub fn big(&self, p: usize) -> usize {
        self.by_size.get(&p).copied().unwrap_or(0)
    }

    pub fn small(&self, p: usize) -> usize {
        p * self.big(p)
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    /// Resources holding two or more players.
    pub fn crowded(&self) -> usize {
        self.resources - self.big(0) - self.big(1)
    }
}

pub fn occupancy(s: &OrderedRepartition) -> OccupancyStats {
    let mut by_size = BTreeMap::new();
    for &c in s.counts() {
        *by_size.entry(c).or_insert(0) += 1;
    }
    OccupancyStats { by_size, players: s.players(), resources: s.resources() }
}

/// Number of partitions of `x` into exactly `n` positive parts.
pub fn part(x: usize, n: usize) -> u64 {
    let mut table = vec![vec![0u64; n + 1]; x + 1];
    for xi in 0..=x {
        for ni in 1..=n {
            table[xi][ni] = if ni > xi {
                0
            } else if ni == xi || ni == 1 {
                1
            } else {
                table[xi - 1][ni - 1] + table[xi - ni][ni]
            };
        }
    }
    if n == 0 {
        u64::from(x == 0)
    } else {
        table[x][n]
    }
}

/// Partitions of `total` into exactly `parts` parts, largest first, in
/// lexicographically decreasing order.
fn partitions_into(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, parts: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // Each remaining part needs at least 1.
        if remaining < parts {
            return;
        }
        let hi = max.min(remaining - (parts - 1));
        for v in (1..=hi).rev() {
            // The rest must fit under v.
            if v * parts < remaining {
                break;
            }
            prefix.push(v);
            rec(remaining - v, parts - 1, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, total, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn check_sizes(players: usize, resources: usize) -> Result<()> {
    if players == 0 {
        return Err(Error::InvalidParameter("at least one player required".into()));
    }
    if resources < players {
        return Err(Error::TooFewResources { players, resources });
    }
    Ok(())
}

/// A repartition together with its position in the canonical enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedRepartition {
    /// Occupied resources.
    pub n: usize,
    /// 1-based index among repartitions using `n` resources.
    pub i: usize,
    pub repartition: OrderedRepartition,
}

/// All reduced recurrence classes for `players` players on `resources`
/// resources, grouped by `n` ascending and lexicographically decreasing
/// inside each group.
pub fn enumerate_rrc(players: usize, resources: usize) -> Result<Vec<IndexedRepartition>> {
    check_sizes(players, resources)?;
    let mut out = Vec::new();
    for n in 1..=players.min(resources) {
        for (idx, mut p) in partitions_into(players, n).into_iter().enumerate() {
            p.resize(resources, 0);
            out.push(IndexedRepartition { n, i: idx + 1, repartition: OrderedRepartition { counts: p } });
        }
    }
    Ok(out)
}

/// Ordered repartition of an action vector (0-based resource indices).
pub fn reduce(actions: &[usize], resources: usize) -> Result<OrderedRepartition> {
    let mut d = vec![0usize; resources];
    for &a in actions {
        if a >= resources {
            return Err(Error::ResourceOutOfRange { index: a, resources });
        }
        d[a] += 1;
    }
    Ok(OrderedRepartition::new(d))
}

/// One way to occupy a new resource: a player leaves a resource holding
/// `source_size` players.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpNeighbor {
    /// Occupancy of the resource that loses a player.
    pub source_size: usize,
    /// Resources in the source holding `source_size` players.
    pub multiplicity: usize,
    pub target: OrderedRepartition,
}

/// Repartitions reachable by moving one player from a crowded resource to a
/// free one. One entry per distinct crowded size.
pub fn up_neighbors(s: &OrderedRepartition) -> Vec<UpNeighbor> {
    let used = s.used();
    if used >= s.resources() {
        return Vec::new();
    }
    let stats = occupancy(s);
    let mut out: Vec<UpNeighbor> = Vec::new();
    for k in 0..used {
        let v = s.counts[k];
        if v <= 1 || out.iter().any(|u| u.source_size == v) {
            continue;
        }
        let mut w = s.counts.clone();
        w[k] -= 1;
        w[used] = 1;
        out.push(UpNeighbor {
            source_size: v,
            multiplicity: stats.big(v),
            target: OrderedRepartition::new(w),
        });
    }
    out
}

/// Inverse of [`up_neighbors`]: drop one singleton of `t` and grow the
/// leftmost resource holding `source_size - 1` players.
pub fn down_from(t: &OrderedRepartition, source_size: usize) -> Option<OrderedRepartition> {
    if source_size < 2 {
        return None;
    }
    let mut w = t.counts.clone();
    let last_one = w.iter().rposition(|&c| c == 1)?;
    w[last_one] = 0;
    let grow = w.iter().position(|&c| c == source_size - 1)?;
    w[grow] += 1;
    Some(OrderedRepartition::new(w))
}

/// States of the unreduced chain: `(moods * N^2 * 2)^K`.
pub fn full_chain_size(moods: u64, resources: u64, players: u32) -> BigUint {
    BigUint::from(moods * resources * resources * 2).pow(players)
}

/// Number of reduced recurrence classes.
pub fn reduced_size(players: usize, resources: usize) -> u64 {
    (1..=players.min(resources)).map(|n| part(players, n)).sum()
}
