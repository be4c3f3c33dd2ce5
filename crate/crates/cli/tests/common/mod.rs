//! Exact full chains for small instances, enumerated from the controller
//! rules independently of the simulator.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use telodl::linalg::Lu;
use telodl::{Algorithm, ControllerParams, Matrix, Mood, NetworkState, PlayerState};

fn utilities(actions: &[usize]) -> Vec<u8> {
    actions.iter().map(|a| u8::from(actions.iter().filter(|b| *b == a).count() == 1)).collect()
}

fn with(p: &PlayerState, mood: Mood, a: usize, u: u8, update: bool) -> PlayerState {
    PlayerState {
        mood,
        action: a,
        utility: u,
        benchmark_action: if update { a } else { p.benchmark_action },
        benchmark_utility: if update { u } else { p.benchmark_utility },
    }
}

fn choices(p: &PlayerState, n: usize, explore: f64) -> Vec<(usize, bool, f64)> {
    match p.mood {
        Mood::Content => {
            let mut v = vec![(p.benchmark_action, false, 1.0 - explore)];
            for r in (0..n).filter(|&r| r != p.benchmark_action) {
                v.push((r, true, explore / (n - 1) as f64));
            }
            v
        }
        Mood::Hopeful | Mood::Watchful => vec![(p.benchmark_action, false, 1.0)],
        Mood::Discontent => (0..n).map(|r| (r, false, 1.0 / n as f64)).collect(),
    }
}

fn update(alg: Algorithm, p: &PlayerState, a: usize, u: u8, exp: bool, q: &ControllerParams) -> Vec<(PlayerState, f64)> {
    use std::cmp::Ordering::*;
    let ub = p.benchmark_utility;
    let branch = |acc: f64, yes: PlayerState, no: PlayerState| vec![(yes, acc), (no, 1.0 - acc)];
    match alg {
        Algorithm::Tel => match (p.mood, u.cmp(&ub)) {
            (Mood::Content, Greater) if exp => {
                let acc = q.epsilon.powf(-q.nu1 * f64::from(u - ub) + q.nu2);
                branch(acc, with(p, Mood::Content, a, u, true), with(p, Mood::Content, a, u, false))
            }
            (Mood::Content, _) if exp => vec![(with(p, Mood::Content, a, u, false), 1.0)],
            (Mood::Content, Greater) => vec![(with(p, Mood::Hopeful, a, u, false), 1.0)],
            (Mood::Content, Less) => vec![(with(p, Mood::Watchful, a, u, false), 1.0)],
            (Mood::Content, Equal) => vec![(with(p, Mood::Content, a, u, false), 1.0)],
            (Mood::Hopeful, Greater) => {
                let mut s = with(p, Mood::Content, a, u, false);
                s.benchmark_utility = u;
                vec![(s, 1.0)]
            }
            (Mood::Hopeful, Less) => vec![(with(p, Mood::Watchful, a, u, false), 1.0)],
            (Mood::Hopeful, Equal) => vec![(with(p, Mood::Content, a, u, false), 1.0)],
            (Mood::Watchful, Greater) => vec![(with(p, Mood::Hopeful, a, u, false), 1.0)],
            (Mood::Watchful, Less) => vec![(with(p, Mood::Discontent, a, u, false), 1.0)],
            (Mood::Watchful, Equal) => vec![(with(p, Mood::Content, a, u, false), 1.0)],
            (Mood::Discontent, _) => {
                let acc = q.epsilon.powf((-q.phi1 * f64::from(u) + q.phi2).max(0.0));
                branch(acc, with(p, Mood::Content, a, u, true), with(p, Mood::Discontent, a, u, false))
            }
        },
        Algorithm::Odl => {
            let acc = q.epsilon.powi(1 - i32::from(u));
            match p.mood {
                Mood::Content if u == ub => vec![(with(p, Mood::Content, a, u, false), 1.0)],
                _ => branch(acc, with(p, Mood::Content, a, u, true), with(p, Mood::Discontent, a, u, false)),
            }
        }
    }
}

/// Exact next-state distribution of one synchronous iteration.
pub fn next_states(alg: Algorithm, state: &[PlayerState], n: usize, q: &ControllerParams) -> HashMap<Vec<PlayerState>, f64> {
    let explore = match alg {
        Algorithm::Tel => q.epsilon,
        Algorithm::Odl => q.epsilon.powf(q.c),
    };
    let mut joint: Vec<(Vec<usize>, Vec<bool>, f64)> = vec![(vec![], vec![], 1.0)];
    for p in state {
        joint = joint
            .into_iter()
            .flat_map(|(a, e, w)| {
                choices(p, n, explore).into_iter().map(move |(ai, ei, wi)| {
                    let (mut a, mut e) = (a.clone(), e.clone());
                    a.push(ai);
                    e.push(ei);
                    (a, e, w * wi)
                })
            })
            .collect();
    }
    let mut out = HashMap::new();
    for (actions, exp, w) in joint {
        let u = utilities(&actions);
        let mut partial: Vec<(Vec<PlayerState>, f64)> = vec![(vec![], w)];
        for (k, p) in state.iter().enumerate() {
            partial = partial
                .into_iter()
                .flat_map(|(s, w)| {
                    update(alg, p, actions[k], u[k], exp[k], q).into_iter().map(move |(ps, wp)| {
                        let mut s = s.clone();
                        s.push(ps);
                        (s, w * wp)
                    })
                })
                .collect();
        }
        for (s, p) in partial {
            if p > 0.0 {
                *out.entry(s).or_insert(0.0) += p;
            }
        }
    }
    out
}

pub struct FullChain {
    pub states: Vec<Vec<PlayerState>>,
    pub matrix: Matrix<f64>,
}

impl FullChain {
    /// All states reachable from all players Content on resource 0.
    pub fn enumerate(alg: Algorithm, k: usize, n: usize, q: &ControllerParams) -> Self {
        let start = vec![PlayerState::content_on(0, u8::from(k == 1)); k];
        let mut index: HashMap<Vec<PlayerState>, usize> = HashMap::new();
        let mut states = vec![start.clone()];
        let mut rows: Vec<HashMap<Vec<PlayerState>, f64>> = Vec::new();
        index.insert(start, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let next = next_states(alg, &states[i], n, q);
            for s in next.keys() {
                if !index.contains_key(s) {
                    index.insert(s.clone(), states.len());
                    states.push(s.clone());
                    queue.push_back(states.len() - 1);
                }
            }
            if rows.len() <= i {
                rows.resize(i + 1, HashMap::new());
            }
            rows[i] = next;
        }
        let dim = states.len();
        let mut matrix = Matrix::zeros(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            for (s, p) in row {
                matrix[(i, index[s])] += p;
            }
        }
        Self { states, matrix }
    }

    fn net(&self, k: usize, n: usize) -> NetworkState {
        NetworkState::new(self.states[k].clone(), n).unwrap()
    }

    pub fn is_orthogonal(&self, k: usize) -> bool {
        let s = &self.states[k];
        s.iter().enumerate().all(|(a, p)| s[..a].iter().all(|q| q.action != p.action))
    }

    /// Expected steps from state 0 until all players use distinct resources.
    pub fn efht(&self) -> f64 {
        let keep: Vec<usize> = (0..self.states.len()).filter(|&k| !self.is_orthogonal(k)).collect();
        if !keep.contains(&0) {
            return 0.0;
        }
        let mut a = Matrix::zeros(keep.len(), keep.len());
        for (r, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                a[(r, c)] = f64::from(u8::from(r == c)) - self.matrix[(i, j)];
            }
        }
        let t = Lu::factor(&a).unwrap().solve_refined(&a, &vec![1.0; keep.len()]);
        t[keep.iter().position(|&k| k == 0).unwrap()]
    }

    /// Stationary mass of the aligned all-Content states with distinct actions.
    pub fn alpha(&self, n: usize) -> f64 {
        let pi = telodl::stationary_gth(&self.matrix).unwrap();
        (0..self.states.len())
            .filter(|&k| self.is_orthogonal(k) && self.net(k, n).is_rc())
            .map(|k| pi[k])
            .sum()
    }
}
