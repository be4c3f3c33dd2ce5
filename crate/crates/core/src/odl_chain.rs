//! Approximated ODL chain.
//!
//! Each set holds `Z` plus:
//!
//! * `Xi1`: a player alone on its resource is Discontent,
//! * `Xi2`: two players alone on their resources are Discontent,
//! * `Xi3`: one of two players sharing a resource is Discontent.
//!
//! `explore` is the probability that a given Content player experiments,
//! `accept` the probability that a player accepts a lower utility (one
//! more factor per player accepting). At most two players are Discontent at
//! once.

use crate::chain::StateKind::{self, Rrc, Xi1, Xi2, Xi3};
use crate::chain::{assemble, residue, tr, ApproxChain, ChainMeta, ChainRules, MetaParams, Rates, Transition};
use crate::error::Result;
use crate::game::Algorithm;
use crate::partitions::{IndexedRepartition, OccupancyStats, OrderedRepartition};
use crate::scalar::Scalar;

/// States present in the set of `s`.
pub fn odl_state_set(s: &OrderedRepartition) -> Vec<StateKind> {
    let mut kinds = vec![Rrc];
    let alone = s.resources_with(1);
    if alone >= 1 {
        kinds.push(Xi1);
    }
    if alone >= 2 {
        kinds.push(Xi2);
    }
    if s.resources_with(2) >= 1 {
        kinds.push(Xi3);
    }
    kinds
}

/// Counts of one set as scalars.
struct Counts<T> {
    k: T,
    n: T,
    n1: T,
    m0: T,
    m1: T,
    /// Resources holding two players or more.
    crowded: T,
    /// Players sharing their resource.
    shared: T,
    /// Players alone on their resource.
    single: T,
    pk: T,
    e: T,
    r: T,
}

impl<T: Scalar> Counts<T> {
    fn new(stats: &OccupancyStats, rates: &Rates<T>) -> Self {
        let c = T::count;
        Self {
            k: c(stats.players()),
            n: c(stats.resources()),
            n1: c(stats.resources() - 1),
            m0: c(stats.big(0)),
            m1: c(stats.big(1)),
            crowded: c(stats.crowded()),
            shared: c(stats.players() - stats.small(1)),
            single: c(stats.small(1)),
            pk: rates.at_least_one(stats.players()),
            e: rates.accept,
            r: T::one() - rates.accept,
        }
    }

    fn two() -> T {
        T::count(2)
    }
}

/// Transitions between the states of one set. The self-loops subtract the
/// total mass leaving towards neighboring sets.
pub fn odl_intra_row<T: Scalar>(stats: &OccupancyStats, rates: &Rates<T>) -> Vec<Transition<T>> {
    let x = Counts::new(stats, rates);
    let one = T::one();
    let two = Counts::<T>::two();
    let three = T::count(3);
    let (n, n1, m0, m1, e, r) = (x.n, x.n1, x.m0, x.m1, x.e, x.r);
    let m2 = T::count(stats.small(2));

    // Z
    let z_xi1 = x.pk * (x.shared - m2) / x.k * m1 / n1 * r;
    let z_xi2 = x.pk * x.single / x.k * (m1 - one) / n1 * r * r;
    let z_xi3 = x.pk * m2 / x.k * m1 / n1 * two * e * r;
    let z_up_z = x.pk * x.shared / x.k * m0 / n1;
    let z_up_xi1 = x.pk * x.shared / x.k * (n - m1 - m0 - one) / n1 * r;
    let z_up_xi2 = x.pk * x.shared / x.k * m1 / n1 * r * r;
    let z_down_z = x.pk * x.single / x.k * (x.crowded / n1 * e + (m1 - one) / n1 * e * e);
    let z_down_xi3 = x.pk * x.single / x.k * (m1 - one) / n1 * two * e * r;

    // Xi1
    let xi1_z = (m0 + one) / n;
    let xi1_xi2 = (m1 - one) / n * r * r;
    let xi1_down_z = x.crowded / n * e + (m1 - one) / n * e * e;
    let xi1_down_xi3 = (m1 - one) / n * two * e * r;

    // Xi2
    let xi2_z = (m0 + two) / n * (m0 + one) / n;
    let xi2_xi1 = two * (m0 + two) / n * x.crowded / n * r;
    let xi2_down_z = (m0 + two) / n * (m1 - one) / n * e * e + two * (m0 + two) / n * x.crowded / n * e;
    let xi2_down_xi1 = two * x.crowded / n * e * x.crowded / n * r
        + two * (m1 - two) / n * e * e * (x.crowded + one) / n * r;
    let xi2_down_xi2 = two * x.crowded / n * e * (m1 - two) / n * r * r + (m1 - two) / n * e * e * (m1 - three) / n * r * r;
    let xi2_down_xi3 = (m0 + two) / n * (m1 - one) / n * two * e * r;

    // Xi3
    let xi3_z = e / n + m1 / n * e * e;
    let xi3_up = m0 / n + (n - m1 - m0 - one) / n * r + m1 / n * r * r;

    vec![
        tr(Rrc, Xi1, z_xi1),
        tr(Rrc, Xi2, z_xi2),
        tr(Rrc, Xi3, z_xi3),
        tr(Rrc, Rrc, residue(&[z_xi1, z_xi2, z_xi3, z_up_z, z_up_xi1, z_up_xi2, z_down_z, z_down_xi3])),
        tr(Xi1, Rrc, xi1_z),
        tr(Xi1, Xi2, xi1_xi2),
        tr(Xi1, Xi1, residue(&[xi1_z, xi1_xi2, xi1_down_z, xi1_down_xi3])),
        tr(Xi2, Rrc, xi2_z),
        tr(Xi2, Xi1, xi2_xi1),
        tr(Xi2, Xi2, residue(&[xi2_z, xi2_xi1, xi2_down_z, xi2_down_xi1, xi2_down_xi2, xi2_down_xi3])),
        tr(Xi3, Rrc, xi3_z),
        tr(Xi3, Xi3, residue(&[xi3_z, xi3_up])),
    ]
}

/// Transitions to the set obtained by moving a player off a resource holding
/// `source_size` players onto a free one.
pub fn odl_up_row<T: Scalar>(stats: &OccupancyStats, source_size: usize, rates: &Rates<T>) -> Vec<Transition<T>> {
    let x = Counts::new(stats, rates);
    let one = T::one();
    let (n, n1, m0, m1, r) = (x.n, x.n1, x.m0, x.m1, x.r);
    let w = x.pk * T::count(stats.small(source_size)) / x.k;
    let mut out = vec![
        tr(Rrc, Rrc, w * m0 / n1),
        tr(Rrc, Xi1, w * (n - m1 - m0 - one) / n1 * r),
        tr(Rrc, Xi2, w * m1 / n1 * r * r),
    ];
    if source_size == 2 {
        out.extend([
            tr(Xi3, Rrc, m0 / n),
            tr(Xi3, Xi1, (n - m1 - m0 - one) / n * r),
            tr(Xi3, Xi2, m1 / n * r * r),
        ]);
    }
    out
}

/// Transitions from the upper set (statistics `upper`) back down to the set
/// it was reached from by decrementing a resource of `source_size` players.
pub fn odl_down_row<T: Scalar>(upper: &OccupancyStats, source_size: usize, rates: &Rates<T>) -> Vec<Transition<T>> {
    let x = Counts::new(upper, rates);
    let one = T::one();
    let two = Counts::<T>::two();
    let three = T::count(3);
    let (n, n1, m0, m1, e, r) = (x.n, x.n1, x.m0, x.m1, x.e, x.r);
    let lead = x.pk * x.single / x.k;
    let rest = source_size - 1;
    if rest > 1 {
        let mw = T::count(upper.big(rest));
        vec![
            tr(Rrc, Rrc, lead * mw / n1 * e),
            tr(Xi1, Rrc, mw / n * e),
            tr(Xi2, Rrc, two * (m0 + two) / n * mw / n * e),
            tr(Xi2, Xi1, two * mw / n * e * x.crowded / n * r),
            tr(Xi2, Xi2, two * mw / n * e * (m1 - two) / n * r * r),
        ]
    } else {
        vec![
            tr(Rrc, Rrc, lead * (m1 - one) / n1 * e * e),
            tr(Rrc, Xi3, lead * (m1 - one) / n1 * two * e * r),
            tr(Xi1, Rrc, (m1 - one) / n * e * e),
            tr(Xi1, Xi3, (m1 - one) / n * two * e * r),
            tr(Xi2, Rrc, (m0 + two) / n * (m1 - one) / n * e * e),
            tr(Xi2, Xi1, two * (m1 - two) / n * e * e * (x.crowded + one) / n * r),
            tr(Xi2, Xi2, (m1 - two) / n * e * e * (m1 - three) / n * r * r),
            tr(Xi2, Xi3, (m0 + two) / n * (m1 - one) / n * two * e * r),
        ]
    }
}

struct OdlRules<T> {
    rates: Rates<T>,
}

impl<T: Scalar> ChainRules<T> for OdlRules<T> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Odl
    }

    fn state_set(&self, set: &IndexedRepartition, _stats: &OccupancyStats) -> Vec<StateKind> {
        odl_state_set(&set.repartition)
    }

    fn intra(&self, stats: &OccupancyStats) -> Result<Vec<Transition<T>>> {
        Ok(odl_intra_row(stats, &self.rates))
    }

    fn up(&self, stats: &OccupancyStats, source_size: usize) -> Vec<Transition<T>> {
        odl_up_row(stats, source_size, &self.rates)
    }

    fn down(&self, upper: &OccupancyStats, source_size: usize) -> Vec<Transition<T>> {
        odl_down_row(upper, source_size, &self.rates)
    }
}

/// Build the approximated ODL chain with the same `epsilon` for exploration
/// and acceptance.
pub fn build_odl_chain<T: Scalar>(players: usize, resources: usize, epsilon: T) -> Result<ApproxChain<T>> {
    build_odl_chain_with(players, resources, Rates::uniform(epsilon), None)
}

/// Build the approximated ODL chain with explicit rates. `c` is only
/// recorded in the metadata.
pub fn build_odl_chain_with<T: Scalar>(
    players: usize,
    resources: usize,
    rates: Rates<T>,
    c: Option<f64>,
) -> Result<ApproxChain<T>> {
    rates.validate()?;
    let meta = ChainMeta {
        algo: Algorithm::Odl,
        players,
        resources,
        epsilon: rates.accept.to_f64_lossy(),
        params: MetaParams { explore: rates.explore.to_f64_lossy(), accept: rates.accept.to_f64_lossy(), c },
    };
    let rules = OdlRules { rates };
    debug_assert_eq!(rules.algorithm(), Algorithm::Odl);
    assemble(&rules, players, resources, meta)
}
