//! Approximated TEL chain.
//!
//! Each set holds the reduced recurrence class `Z` and up to five
//! intermediary states:
//!
//! * `Xi0`: a player alone on its resource is Hopeful,
//! * `Xi1`: a player alone on its resource is Watchful,
//! * `Xi2`: a player alone on its resource is Discontent,
//! * `Xi3`: two formerly alone players share a resource, one is Watchful,
//! * `Xi4`: two formerly alone players share a resource, one is Discontent.
//!
//! At most one Content player experiments per iteration, and only from `Z`
//! (plus the single `Xi1 -> Xi2` exception that keeps the chain ergodic).
//! A Discontent player settles on a free resource with probability 1 and
//! on an occupied one with probability `epsilon^(1/2K)`.

use crate::chain::{assemble, residue, tr, ApproxChain, ChainMeta, ChainRules, MetaParams, Rates, Transition};
use crate::error::Result;
use crate::game::Algorithm;
use crate::partitions::{IndexedRepartition, OccupancyStats, OrderedRepartition};
use crate::scalar::Scalar;
use crate::chain::StateKind::{self, Rrc, Xi0, Xi1, Xi2, Xi3, Xi4};

/// States present in the set of `s`.
pub fn tel_state_set(s: &OrderedRepartition) -> Vec<StateKind> {
    let alone = s.resources_with(1);
    match alone {
        0 => vec![Rrc],
        1 if s.is_pairs_and_single() => vec![Rrc, Xi1, Xi2],
        1 => vec![Rrc, Xi0, Xi1, Xi2],
        _ => vec![Rrc, Xi0, Xi1, Xi2, Xi3, Xi4],
    }
}

struct Ctx<T> {
    k: usize,
    n: T,
    n_minus_1: T,
    rates: Rates<T>,
    /// `epsilon^(1/2K)`: a Discontent player settling on an occupied resource.
    settle: T,
}

impl<T: Scalar> Ctx<T> {
    fn new(stats: &OccupancyStats, epsilon: T) -> Self {
        let k = stats.players();
        let rates = Rates::uniform(epsilon);
        Self {
            k,
            n: T::count(stats.resources()),
            n_minus_1: T::count(stats.resources() - 1),
            rates,
            settle: epsilon.powf(T::one() / T::count(2 * k)),
        }
    }

    fn pk(&self) -> T {
        self.rates.at_least_one(self.k)
    }
}

fn c<T: Scalar>(x: usize) -> T {
    T::count(x)
}

/// Signed count, for factors such as `M(1) - 2` that may vanish or go
/// negative only when multiplied by a zero.
fn sc<T: Scalar>(x: usize, minus: usize) -> T {
    T::count(x) - T::count(minus)
}

/// Transitions between the states of one set, self-loops included. The
/// self-loops subtract the total mass leaving towards neighboring sets.
pub fn tel_intra_row<T: Scalar>(stats: &OccupancyStats, epsilon: T) -> Vec<Transition<T>> {
    let x = Ctx::new(stats, epsilon);
    let (k, nn) = (c::<T>(x.k), x.n);
    let (m0, m1) = (stats.big(0), stats.big(1));
    let crowded = stats.crowded();
    let pk = x.pk();

    let z_xi1 = pk * sc::<T>(x.k, 1) / k * c::<T>(m1) / x.n_minus_1;
    let z_up = pk * sc::<T>(x.k, stats.small(1)) / k * c::<T>(m0) / x.n_minus_1;

    let xi1_xi2 = x.rates.at_least_one(x.k - 1) / x.n_minus_1;

    let xi2_z = c::<T>(m0 + 1) / nn;
    let xi2_xi3 = sc::<T>(m1, 1) / nn * x.settle;
    let xi2_down = c::<T>(crowded) / nn * x.settle;

    let xi4_xi0 = c::<T>(m0 + 1) / nn;
    let xi4_xi3 = sc::<T>(m1, 2) / nn * x.settle;
    let xi4_down = c::<T>(crowded + 1) / nn * x.settle;

    vec![
        tr(Rrc, Xi1, z_xi1),
        tr(Rrc, Rrc, residue(&[z_xi1, z_up])),
        tr(Xi1, Xi2, xi1_xi2),
        tr(Xi1, Rrc, residue(&[xi1_xi2])),
        tr(Xi2, Rrc, xi2_z),
        tr(Xi2, Xi3, xi2_xi3),
        tr(Xi2, Xi2, residue(&[xi2_z, xi2_xi3, xi2_down])),
        tr(Xi3, Xi4, T::one()),
        tr(Xi4, Xi0, xi4_xi0),
        tr(Xi4, Xi3, xi4_xi3),
        tr(Xi4, Xi4, residue(&[xi4_xi0, xi4_xi3, xi4_down])),
        tr(Xi0, Rrc, T::one()),
    ]
}

/// Transitions from the set with statistics `stats` to the set obtained by
/// moving a player off a resource holding `source_size` players.
pub fn tel_up_row<T: Scalar>(stats: &OccupancyStats, source_size: usize, epsilon: T) -> Vec<Transition<T>> {
    let x = Ctx::new(stats, epsilon);
    let p = x.pk() * c::<T>(stats.small(source_size)) / c::<T>(x.k) * c::<T>(stats.big(0)) / x.n_minus_1;
    if source_size > 2 {
        vec![tr(Rrc, Rrc, p)]
    } else {
        // The player left behind is now alone and turns Hopeful.
        vec![tr(Rrc, Xi0, p)]
    }
}

/// Transitions from the upper set (statistics `upper`) back down to the set
/// it was reached from by decrementing a resource of `source_size` players.
pub fn tel_down_row<T: Scalar>(upper: &OccupancyStats, source_size: usize, epsilon: T) -> Vec<Transition<T>> {
    let x = Ctx::new(upper, epsilon);
    let rest = source_size - 1;
    if rest >= 2 {
        let p = c::<T>(upper.big(rest)) / x.n * x.settle;
        vec![tr(Xi2, Rrc, p), tr(Xi4, Xi0, p)]
    } else {
        vec![tr(Xi4, Rrc, x.settle / x.n)]
    }
}

struct TelRules<T> {
    epsilon: T,
}

impl<T: Scalar> ChainRules<T> for TelRules<T> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Tel
    }

    fn state_set(&self, set: &IndexedRepartition, _stats: &OccupancyStats) -> Vec<StateKind> {
        tel_state_set(&set.repartition)
    }

    fn intra(&self, stats: &OccupancyStats) -> Result<Vec<Transition<T>>> {
        Ok(tel_intra_row(stats, self.epsilon))
    }

    fn up(&self, stats: &OccupancyStats, source_size: usize) -> Vec<Transition<T>> {
        tel_up_row(stats, source_size, self.epsilon)
    }

    fn down(&self, upper: &OccupancyStats, source_size: usize) -> Vec<Transition<T>> {
        tel_down_row(upper, source_size, self.epsilon)
    }
}

/// Build the approximated TEL chain for `players` players, `resources`
/// resources and experimentation probability `epsilon`.
pub fn build_tel_chain<T: Scalar>(players: usize, resources: usize, epsilon: T) -> Result<ApproxChain<T>> {
    let rates = Rates::uniform(epsilon);
    rates.validate()?;
    let e = epsilon.to_f64_lossy();
    let meta = ChainMeta {
        algo: Algorithm::Tel,
        players,
        resources,
        epsilon: e,
        params: MetaParams { explore: e, accept: e, c: None },
    };
    let rules = TelRules { epsilon };
    debug_assert_eq!(rules.algorithm(), Algorithm::Tel);
    assemble(&rules, players, resources, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::occupancy;

    fn rep(v: &[usize]) -> OrderedRepartition {
        OrderedRepartition::new(v.to_vec())
    }

    fn find(ts: &[Transition<f64>], from: StateKind, to: StateKind) -> f64 {
        ts.iter().filter(|t| t.from == from && t.to == to).map(|t| t.prob).sum()
    }

    #[test]
    fn state_sets() {
        assert_eq!(tel_state_set(&rep(&[3, 0, 0])), vec![Rrc]);
        assert_eq!(tel_state_set(&rep(&[2, 1, 0])), vec![Rrc, Xi1, Xi2]);
        assert_eq!(tel_state_set(&rep(&[1, 1, 1])), vec![Rrc, Xi0, Xi1, Xi2, Xi3, Xi4]);
        assert_eq!(tel_state_set(&rep(&[3, 1, 0, 0])), vec![Rrc, Xi0, Xi1, Xi2]);
    }

    #[test]
    fn intra_values() {
        let st = occupancy(&rep(&[2, 1, 0]));
        let t = tel_intra_row(&st, 0.1);
        // P(3) = 1 - 0.9^3 = 0.271.
        assert!((find(&t, Rrc, Xi1) - 0.271 * (2.0 / 3.0) * 0.5).abs() < 1e-15);
        assert!((find(&t, Xi2, Rrc) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(find(&t, Xi3, Xi4), 1.0);
        assert_eq!(find(&t, Xi0, Rrc), 1.0);
    }

    #[test]
    fn up_values() {
        let t = tel_up_row(&occupancy(&rep(&[3, 0, 0])), 3, 0.1f64);
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].from, t[0].to), (Rrc, Rrc));
        assert!((t[0].prob - 0.271).abs() < 1e-15);
        let t = tel_up_row(&occupancy(&rep(&[2, 1, 0])), 2, 0.1f64);
        assert_eq!((t[0].from, t[0].to), (Rrc, Xi0));
        assert!((t[0].prob - 0.271 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn down_values() {
        // From (2,1,0) down to (3,0,0): source size 3, two remain.
        let t = tel_down_row(&occupancy(&rep(&[2, 1, 0])), 3, 0.01);
        let settle = 0.01f64.powf(1.0 / 6.0);
        assert!((find(&t, Xi2, Rrc) - settle / 3.0).abs() < 1e-15);
        assert!((find(&t, Xi2, Rrc) - 0.154_720).abs() < 1e-6);
        assert_eq!(find(&t, Xi4, Rrc), 0.0);
        // From (1,1,1) down to (2,1,0): source size 2.
        let t = tel_down_row(&occupancy(&rep(&[1, 1, 1])), 2, 0.01);
        assert!((find(&t, Xi4, Rrc) - settle / 3.0).abs() < 1e-15);
        assert_eq!(find(&t, Xi2, Rrc), 0.0);
    }

    #[test]
    fn small_chains() {
        let c = build_tel_chain(3, 3, 0.01f64).unwrap();
        assert_eq!(c.len(), 10);
        let c = build_tel_chain(2, 2, 0.01f64).unwrap();
        assert_eq!(c.len(), 7);
        assert!(build_tel_chain(4, 3, 0.01f64).is_err());
        assert!(build_tel_chain(3, 3, 1.5f64).is_err());
    }

    #[test]
    fn f32_chain_is_stochastic() {
        let c = build_tel_chain(4, 6, 0.05f32).unwrap();
        for r in 0..c.len() {
            let s: f32 = c.matrix.row(r).iter().sum();
            assert!((s - 1.0).abs() < 1e-5);
        }
    }
}
