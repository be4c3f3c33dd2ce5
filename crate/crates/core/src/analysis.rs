//! Analytics for ergodic chains based on the generalized fundamental matrix
//! `F = (I - P + 1 b^t)^-1`: stationary distribution `pi = b^t F` and
//! expected first hitting times `E_i[T_j] = (F_jj - F_ij) / pi_j`.

use std::collections::VecDeque;

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::scalar::Scalar;

/// Stationary probabilities below this make the hitting-time formula
/// unusable.
pub const MIN_TARGET_PROBABILITY: f64 = 1e-15;
/// Below this a conditioning warning is logged.
pub const WARN_TARGET_PROBABILITY: f64 = 1e-12;

fn check_square<T: Scalar>(p: &Matrix<T>) -> Result<usize> {
    if !p.is_square() || p.rows() == 0 {
        return Err(Error::Dimension(format!("{}x{} transition matrix", p.rows(), p.cols())));
    }
    Ok(p.rows())
}

/// `I - P + 1 b^t`.
fn kemeny_system<T: Scalar>(p: &Matrix<T>, b: &[T]) -> Result<Matrix<T>> {
    let n = check_square(p)?;
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, expected {n}", b.len())));
    }
    let bsum = b.iter().fold(T::zero(), |s, &x| s + x);
    if bsum == T::zero() {
        return Err(Error::InvalidParameter("b^t 1 must be nonzero".into()));
    }
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { T::one() } else { T::zero() };
            a[(i, j)] = id - p[(i, j)] + b[j];
        }
    }
    Ok(a)
}

/// Generalized fundamental matrix for the ergodic chain `p`.
pub fn fundamental_matrix<T: Scalar>(p: &Matrix<T>, b: &[T]) -> Result<Matrix<T>> {
    let a = kemeny_system(p, b)?;
    let n = a.rows();
    let f = Lu::factor(&a)?.inverse();
    let residual = a.mul(&f).max_abs_diff(&Matrix::identity(n));
    if !(residual <= T::solve_tolerance() * T::count(n)) {
        return Err(Error::Singular);
    }
    Ok(f)
}

/// `pi = b^t F`. Drift of the sum beyond 1e-6 is an error; smaller drift is
/// normalized away.
pub fn stationary<T: Scalar>(f: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let mut pi = f.left_mul(b);
    let sum = pi.iter().fold(T::zero(), |s, &x| s + x);
    let drift = (sum - T::one()).abs();
    if !(drift <= T::drift_tolerance()) {
        return Err(Error::Stationary(format!("sum {sum} drifts from 1")));
    }
    if let Some((state, &v)) = pi.iter().enumerate().find(|(_, &v)| !(v > T::zero())) {
        return Err(Error::Stationary(format!("component {state} = {v} is not positive")));
    }
    pi.iter_mut().for_each(|x| *x /= sum);
    Ok(pi)
}

/// Stationary distribution by Grassmann-Taksar-Heyman elimination. Free of
/// subtractions, so every component keeps full relative accuracy even when
/// it lies far below the rounding level of `b^t F`.
pub fn stationary_gth<T: Scalar>(p: &Matrix<T>) -> Result<Vec<T>> {
    let n = check_square(p)?;
    let mut a = p.clone();
    for k in (1..n).rev() {
        let s = (0..k).fold(T::zero(), |s, j| s + a[(k, j)]);
        if !(s > T::zero()) {
            return Err(Error::NotErgodic(format!("state {k} has no path to lower states")));
        }
        for i in 0..k {
            a[(i, k)] /= s;
        }
        for i in 0..k {
            let aik = a[(i, k)];
            if aik == T::zero() {
                continue;
            }
            for j in 0..k {
                a[(i, j)] = a[(i, j)] + aik * a[(k, j)];
            }
        }
    }
    let mut pi = vec![T::zero(); n];
    pi[0] = T::one();
    for k in 1..n {
        pi[k] = (0..k).fold(T::zero(), |s, i| s + pi[i] * a[(i, k)]);
    }
    let sum = pi.iter().fold(T::zero(), |s, &x| s + x);
    pi.iter_mut().for_each(|x| *x /= sum);
    Ok(pi)
}

/// Expected first hitting time of `j` from `i`.
pub fn efht<T: Scalar>(f: &Matrix<T>, pi: &[T], i: usize, j: usize) -> Result<T> {
    if i >= pi.len() || j >= pi.len() {
        return Err(Error::Dimension(format!("state index out of range ({i}, {j})")));
    }
    if i == j {
        return Ok(T::zero());
    }
    let pj = pi[j];
    if !(pj >= T::of(MIN_TARGET_PROBABILITY)) {
        return Err(Error::IllConditioned { state: j, value: pj.to_f64_lossy() });
    }
    if pj < T::of(WARN_TARGET_PROBABILITY) {
        warn!("stationary probability {pj} of target state {j} is tiny; hitting time is ill-conditioned");
    }
    Ok((f[(j, j)] - f[(i, j)]) / pj)
}

/// Hitting time from the first-step equations `t_j = 0`,
/// `t_k = 1 + sum_l P_kl t_l`.
pub fn oracle_hitting_time<T: Scalar>(p: &Matrix<T>, i: usize, j: usize) -> Result<T> {
    let n = check_square(p)?;
    if i >= n || j >= n {
        return Err(Error::Dimension(format!("state index out of range ({i}, {j})")));
    }
    if i == j {
        return Ok(T::zero());
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != j).collect();
    let mut a = Matrix::zeros(n - 1, n - 1);
    for (r, &k) in keep.iter().enumerate() {
        for (c, &l) in keep.iter().enumerate() {
            let id = if r == c { T::one() } else { T::zero() };
            a[(r, c)] = id - p[(k, l)];
        }
    }
    let ones = vec![T::one(); n - 1];
    let t = Lu::factor(&a)?.solve_refined(&a, &ones);
    let pos = keep.iter().position(|&k| k == i).expect("i != j");
    Ok(t[pos])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgodicityReport {
    pub ergodic: bool,
    /// States not reachable from state 0.
    pub unreachable: Vec<usize>,
    /// States that cannot reach state 0.
    pub cannot_return: Vec<usize>,
    /// Period of the chain (meaningful when irreducible).
    pub period: usize,
}

impl ErgodicityReport {
    pub fn diagnostic(&self) -> String {
        if self.ergodic {
            return "ergodic".into();
        }
        let mut parts = Vec::new();
        if !self.unreachable.is_empty() {
            parts.push(format!("unreachable states {:?}", self.unreachable));
        }
        if !self.cannot_return.is_empty() {
            parts.push(format!("states that cannot return {:?}", self.cannot_return));
        }
        if self.period > 1 {
            parts.push(format!("period {}", self.period));
        }
        parts.join("; ")
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let lu = level[u].expect("queued states have a level");
        for &v in &adj[u] {
            if level[v].is_none() {
                level[v] = Some(lu + 1);
                queue.push_back(v);
            }
        }
    }
    level
}

/// Irreducibility and aperiodicity of the positive-entry digraph.
pub fn verify_ergodic<T: Scalar>(p: &Matrix<T>) -> ErgodicityReport {
    let n = p.rows();
    let mut fwd = vec![Vec::new(); n];
    let mut back = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if p[(i, j)] > T::zero() {
                fwd[i].push(j);
                back[j].push(i);
            }
        }
    }
    if n == 0 {
        return ErgodicityReport { ergodic: false, unreachable: vec![], cannot_return: vec![], period: 0 };
    }
    let level = bfs(&fwd, 0);
    let unreachable: Vec<usize> = (0..n).filter(|&k| level[k].is_none()).collect();
    let cannot_return: Vec<usize> = bfs(&back, 0)
        .iter()
        .enumerate()
        .filter_map(|(k, l)| l.is_none().then_some(k))
        .collect();
    let mut period = 0;
    for u in 0..n {
        for &v in &fwd[u] {
            if let (Some(lu), Some(lv)) = (level[u], level[v]) {
                period = gcd(period, (lu + 1).abs_diff(lv));
            }
        }
    }
    let ergodic = unreachable.is_empty() && cannot_return.is_empty() && period == 1;
    ErgodicityReport { ergodic, unreachable, cannot_return, period }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals<T> {
    /// `max_i |sum_j P_ij - 1|`.
    pub row_sum: T,
    /// `max_j |(pi P)_j - pi_j|`.
    pub stationarity: T,
    /// `max |(I - P + 1 b^t) F - I|`.
    pub solve: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult<T> {
    pub pi: Vec<T>,
    pub efht: T,
    pub alpha: T,
    pub residuals: Residuals<T>,
}

/// Stationary distribution, EFHT from `from` to `to`, and `alpha = pi[to]`,
/// using `b = 1`.
///
/// `pi` comes from [`stationary_gth`] and must agree with `b^t F` within the
/// solve tolerance; the former resolves states whose stationary mass is
/// below the rounding level of the latter.
pub fn analyze<T: Scalar>(p: &Matrix<T>, from: usize, to: usize) -> Result<AnalysisResult<T>> {
    let n = check_square(p)?;
    let report = verify_ergodic(p);
    if !report.ergodic {
        return Err(Error::NotErgodic(report.diagnostic()));
    }
    let b = vec![T::one(); n];
    let f = fundamental_matrix(p, &b)?;
    let pi = stationary_gth(p)?;
    let btf = f.left_mul(&b);
    let gap = pi.iter().zip(&btf).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    if !(gap <= T::solve_tolerance()) {
        return Err(Error::Stationary(format!("b^t F differs from the stationary vector by {gap}")));
    }
    let efht = efht(&f, &pi, from, to)?;

    let row_sum = (0..n).fold(T::zero(), |m, i| {
        let s = p.row(i).iter().fold(T::zero(), |s, &x| s + x);
        m.max((s - T::one()).abs())
    });
    let pip = p.left_mul(&pi);
    let stationarity = pip.iter().zip(&pi).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let solve = kemeny_system(p, &b)?.mul(&f).max_abs_diff(&Matrix::identity(n));
    if !(stationarity <= T::solve_tolerance()) {
        return Err(Error::Stationary(format!("|pi P - pi| = {stationarity}")));
    }
    Ok(AnalysisResult {
        alpha: pi[to],
        pi,
        efht,
        residuals: Residuals { row_sum, stationarity, solve },
    })
}
