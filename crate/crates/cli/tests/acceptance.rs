//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured values (visible with `--nocapture`).
//!
//! ODL is compared with TEL at matched exploration: for a grid value `e` the
//! ODL controller runs with `epsilon = e^(1/c)`, `c = K`, so both explore
//! with probability `e`.

mod common;

use std::collections::HashSet;
use std::process::Command;

use common::FullChain;
use telodl::{
    analyze, build_odl_chain, build_odl_chain_with, build_tel_chain, enumerate_rrc, estimate_alpha, estimate_efht,
    full_chain_size, oracle_hitting_time, part, verify_ergodic, Algorithm, Chain64, ControllerParams,
    MonteCarloConfig, Rates,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Controller parameters at matched exploration probability `e`.
fn controller(alg: Algorithm, k: usize, e: f64) -> ControllerParams {
    match alg {
        Algorithm::Tel => ControllerParams::defaults(e, k),
        Algorithm::Odl => ControllerParams::defaults(e.powf(1.0 / k as f64), k),
    }
}

fn approx(alg: Algorithm, k: usize, n: usize, e: f64) -> Chain64 {
    match alg {
        Algorithm::Tel => build_tel_chain(k, n, e).unwrap(),
        Algorithm::Odl => {
            let q = controller(alg, k, e);
            build_odl_chain_with(k, n, Rates::from_controller(q.epsilon, q.c), Some(q.c)).unwrap()
        }
    }
}

fn approx_metrics(alg: Algorithm, k: usize, n: usize, e: f64) -> (f64, f64) {
    let c = approx(alg, k, n, e);
    let r = analyze(&c.matrix, c.full_collision(), c.orthogonal()).unwrap();
    (r.efht, r.alpha)
}

/// Slope and coefficient of determination of a least-squares line.
fn fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

/// All chains of the construction grid: TEL, ODL with one epsilon for both
/// rates, and ODL at matched exploration.
fn construction_grid() -> Vec<(String, Chain64)> {
    let mut out = Vec::new();
    for k in 2..=8 {
        for n in [k, k + 2] {
            for e in [1e-1, 1e-2, 1e-3] {
                let tag = |a: &str| format!("{a} K={k} N={n} eps={e}");
                out.push((tag("tel"), build_tel_chain(k, n, e).unwrap()));
                out.push((tag("odl"), build_odl_chain(k, n, e).unwrap()));
                out.push((tag("odl-matched"), approx(Algorithm::Odl, k, n, e)));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    ensure(full_chain_size(4, 3, 3).to_string() == "373248", || "full_chain_size(4,3,3)".into())?;
    ensure(part(4, 2) == 2 && part(4, 3) == 1, || "Part(4,2), Part(4,3)".into())?;
    let rrc = enumerate_rrc(4, 4).unwrap();
    let with = |n: usize| -> Vec<Vec<usize>> {
        rrc.iter().filter(|r| r.n == n).map(|r| r.repartition.counts().to_vec()).collect()
    };
    ensure(with(2) == vec![vec![3, 1, 0, 0], vec![2, 2, 0, 0]], || format!("n=2: {:?}", with(2)))?;
    ensure(with(3) == vec![vec![2, 1, 1, 0]], || format!("n=3: {:?}", with(3)))?;
    Ok("S=373248, Part(4,2)=2, Part(4,3)=1".into())
}

fn criterion_2(chains: &[(String, Chain64)]) -> Outcome {
    for (tag, c) in chains {
        for r in 0..c.len() {
            let row = c.matrix.row(r);
            ensure(row.iter().all(|&x| (0.0..=1.0).contains(&x)), || format!("{tag}: entry outside [0,1]"))?;
            let s: f64 = row.iter().sum();
            ensure((s - 1.0).abs() <= 1e-12, || format!("{tag}: row {r} sums to {s}"))?;
        }
        ensure(verify_ergodic(&c.matrix).ergodic, || format!("{tag}: not ergodic"))?;
        let mut links = HashSet::new();
        for (i, a) in c.states.iter().enumerate() {
            for (j, b) in c.states.iter().enumerate() {
                if c.matrix[(i, j)] > 0.0 && (a.n, a.i) != (b.n, b.i) {
                    links.insert(((a.n, a.i), (b.n, b.i)));
                }
            }
        }
        for &(a, b) in &links {
            ensure(links.contains(&(b, a)), || format!("{tag}: {a:?} -> {b:?} has no return"))?;
        }
    }
    Ok(format!("{} chains", chains.len()))
}

fn criterion_3(chains: &[(String, Chain64)]) -> Outcome {
    let (mut worst_rel, mut worst_res) = (0f64, 0f64);
    for (tag, c) in chains {
        let (i, j) = (c.full_collision(), c.orthogonal());
        let r = analyze(&c.matrix, i, j).map_err(|e| format!("{tag}: {e}"))?;
        let oracle = oracle_hitting_time(&c.matrix, i, j).map_err(|e| format!("{tag}: {e}"))?;
        let rel = (r.efht - oracle).abs() / oracle;
        let pip = c.matrix.left_mul(&r.pi);
        let res = pip.iter().zip(&r.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_rel = worst_rel.max(rel);
        worst_res = worst_res.max(res);
        ensure(rel <= 1e-8, || format!("{tag}: efht {} vs oracle {oracle}", r.efht))?;
        ensure(res <= 1e-9, || format!("{tag}: |piP - pi| = {res:e}"))?;
        ensure(r.alpha == r.pi[j], || format!("{tag}: alpha != pi[target]"))?;
    }
    Ok(format!("max efht rel err {worst_rel:.1e}, max |piP-pi| {worst_res:.1e}"))
}

fn criterion_4() -> Outcome {
    let e = 1e-2;
    let mut notes = Vec::new();
    for alg in [Algorithm::Tel, Algorithm::Odl] {
        let q = controller(alg, 2, e);
        let full = FullChain::enumerate(alg, 2, 2, &q);
        ensure(full.states.len() <= 1024, || format!("{alg}: {} full states", full.states.len()))?;
        let (exact_efht, exact_alpha) = (full.efht(), full.alpha(2));
        let mut cfg = MonteCarloConfig::new(alg, 2, 2, q.epsilon, 2024);
        cfg.params = q;
        let mc_e = estimate_efht(&cfg).map_err(|x| x.to_string())?;
        let mc_a = estimate_alpha(&cfg).map_err(|x| x.to_string())?;
        ensure(mc_e.trials_used == cfg.efht_trials, || format!("{alg}: censored trials"))?;
        let ze = (mc_e.mean - exact_efht).abs() / mc_e.std_error;
        let za = (mc_a.alpha - exact_alpha).abs() / mc_a.std_error;
        ensure(ze <= 3.0, || format!("{alg}: efht exact {exact_efht} vs mc {} +- {}", mc_e.mean, mc_e.std_error))?;
        ensure(za <= 3.0, || format!("{alg}: alpha exact {exact_alpha} vs mc {} +- {}", mc_a.alpha, mc_a.std_error))?;
        let (ae, _) = approx_metrics(alg, 2, 2, e);
        let ratio = ae / exact_efht;
        ensure((0.5..=2.0).contains(&ratio), || format!("{alg}: approx/exact efht = {ratio}"))?;
        notes.push(format!("{alg} z_efht={ze:.2} z_alpha={za:.2} approx/exact={ratio:.3}"));
    }
    Ok(notes.join("; "))
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for alg in [Algorithm::Tel, Algorithm::Odl] {
        let mut prev: Option<(f64, f64)> = None;
        let mut errs = Vec::new();
        for e in [5e-2, 2e-2, 1e-2] {
            let (ae, _) = approx_metrics(alg, 3, 3, e);
            let q = controller(alg, 3, e);
            let mut cfg = MonteCarloConfig::new(alg, 3, 3, q.epsilon, 77);
            cfg.params = q;
            let mc = estimate_efht(&cfg).map_err(|x| x.to_string())?;
            let rel = (ae - mc.mean).abs() / mc.mean;
            // Delta-method standard error of the relative error.
            let se = ae * mc.std_error / (mc.mean * mc.mean);
            ensure(rel <= 0.5, || format!("{alg} eps={e}: relative error {rel:.3}"))?;
            if let Some((r0, s0)) = prev {
                let slack = 1.96 * (s0 * s0 + se * se).sqrt();
                ensure(rel <= r0 + slack, || format!("{alg} eps={e}: relative error grew {r0:.3} -> {rel:.3}"))?;
            }
            prev = Some((rel, se));
            errs.push(format!("{rel:.3}"));
        }
        notes.push(format!("{alg} rel err {}", errs.join(" ")));
    }
    Ok(notes.join("; "))
}

fn criterion_6() -> Outcome {
    let grid: Vec<f64> = (0..7).map(|i| 10f64.powf(-1.5 - 0.25 * i as f64)).collect();
    let (mut x_e, mut y_e, mut x_a, mut y_a) = (vec![], vec![], vec![], vec![]);
    for &e in &grid {
        let (efht, alpha) = approx_metrics(Algorithm::Tel, 3, 3, e);
        x_e.push((1.0 / e).ln());
        y_e.push(efht.ln());
        x_a.push(e.ln());
        y_a.push((1.0 - alpha).ln());
    }
    let (s1, r1) = fit(&x_e, &y_e);
    let (s2, r2) = fit(&x_a, &y_a);
    ensure(y_e.windows(2).all(|w| w[1] > w[0]), || "efht not increasing in 1/eps".into())?;
    ensure(y_a.windows(2).all(|w| w[1] < w[0]), || "1-alpha not increasing in eps".into())?;
    ensure(s1 > 0.0 && r1 >= 0.9, || format!("log efht vs log 1/eps: slope {s1}, R2 {r1}"))?;
    ensure(s2 > 0.0 && r2 >= 0.9, || format!("log(1-alpha) vs log eps: slope {s2}, R2 {r2}"))?;
    Ok(format!("efht slope {s1:.3} R2 {r1:.4}; 1-alpha slope {s2:.3} R2 {r2:.4}"))
}

fn criterion_7() -> Outcome {
    let ks: Vec<usize> = (3..=10).collect();
    let (mut tel, mut odl) = (vec![], vec![]);
    for &k in &ks {
        let t = approx_metrics(Algorithm::Tel, k, k, 1e-3);
        let o = approx_metrics(Algorithm::Odl, k, k, 1e-3);
        ensure(t.1 > o.1, || format!("K={k}: TEL alpha {} <= ODL alpha {}", t.1, o.1))?;
        tel.push(t.0.ln());
        odl.push(o.0.ln());
    }
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let lk: Vec<f64> = kf.iter().map(|k| k.ln()).collect();
    let (so, ro) = fit(&kf, &odl);
    let (st, rt) = fit(&lk, &tel);
    ensure(so > 0.0 && ro >= 0.9, || format!("ODL log efht vs K: slope {so}, R2 {ro}"))?;
    ensure(st > 0.0 && rt >= 0.9, || format!("TEL log efht vs log K: slope {st}, R2 {rt}"))?;
    Ok(format!("ODL log efht ~ {so:.3} K (R2 {ro:.4}); TEL log efht ~ {st:.3} log K (R2 {rt:.4})"))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for alg in [Algorithm::Tel, Algorithm::Odl] {
        for e in [1e-1, 1e-2, 1e-3] {
            let (e3, a3) = approx_metrics(alg, 3, 3, e);
            let (e5, a5) = approx_metrics(alg, 3, 5, e);
            ensure(e5 < e3, || format!("{alg} eps={e}: efht {e3} -> {e5}"))?;
            ensure(a5 > a3, || format!("{alg} eps={e}: alpha {a3} -> {a5}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (algo, eps) pairs"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_telodl")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn criterion_9() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["simulate", "--players", "3", "--epsilon", "0.05", "--method", "both", "--trials", "300", "--alpha-iters", "50000", "--seed", "5"],
        &["sweep", "--players", "2..4", "--extra-resources", "0,2", "--epsilon-grid", "-1:-2:3", "--match-epsilon", "--method", "both", "--trials", "100", "--alpha-iters", "20000", "--seed", "9"],
        &["complexity", "--players", "2..6"],
    ];
    for args in runs {
        let a = run_cli(args)?;
        let b = run_cli(args)?;
        ensure(a == b, || format!("{args:?}: output differs between runs"))?;
        ensure(!a.is_empty(), || format!("{args:?}: empty output"))?;
    }
    let mut other: Vec<&str> = runs[0].to_vec();
    *other.last_mut().unwrap() = "6";
    ensure(run_cli(runs[0])? != run_cli(&other)?, || "seed has no effect".into())?;
    Ok(format!("{} commands byte-identical", runs.len()))
}

fn report(id: usize, name: &str, outcome: Outcome) {
    match outcome {
        Ok(detail) => println!("criterion {id} ({name}): PASS: {detail}"),
        Err(why) => {
            println!("criterion {id} ({name}): FAIL: {why}");
            panic!("criterion {id} failed: {why}");
        }
    }
}

#[test]
fn criterion_1_exact_constants() {
    report(1, "exact constants", criterion_1());
}

#[test]
fn criterion_2_construction_invariants() {
    report(2, "construction invariants", criterion_2(&construction_grid()));
}

#[test]
fn criterion_3_analytics_cross_oracle() {
    report(3, "analytics cross-oracle", criterion_3(&construction_grid()));
}

#[test]
fn criterion_4_small_instance_ground_truth() {
    report(4, "small-instance ground truth", criterion_4());
}

#[test]
fn criterion_5_approximation_vs_monte_carlo() {
    report(5, "approximation vs Monte Carlo", criterion_5());
}

#[test]
fn criterion_6_tel_epsilon_trend() {
    report(6, "TEL epsilon trend", criterion_6());
}

#[test]
fn criterion_7_tel_vs_odl_in_k() {
    report(7, "TEL vs ODL in K", criterion_7());
}

#[test]
fn criterion_8_n_sensitivity() {
    report(8, "N sensitivity", criterion_8());
}

#[test]
fn criterion_9_cli_determinism() {
    report(9, "CLI determinism", criterion_9());
}
