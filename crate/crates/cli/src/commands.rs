use std::path::PathBuf;

use clap::Args;
use log::{info, warn};
use rayon::prelude::*;
use telodl::{
    analyze, build_odl_chain, build_odl_chain_with, build_tel_chain, estimate_alpha, estimate_efht, full_chain_size,
    reduced_size, verify_ergodic, Algorithm, Chain64, ChainExport, ControllerParams, MonteCarloConfig, Rates,
};

use crate::options::{AlgoChoice, GridArgs, Method};
use crate::table::{self, GridRow, NA};
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Chain JSON written by `chain build`.
    #[arg(long)]
    pub chain: PathBuf,
    #[arg(long, default_value = "full-collision")]
    pub from: String,
    #[arg(long, default_value = "orthogonal")]
    pub to: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Approximated chain for one cell. ODL rates follow the controller:
/// exploration `epsilon^c`, acceptance `epsilon`.
pub fn approx_chain(algo: Algorithm, k: usize, n: usize, grid_eps: f64, p: &ControllerParams) -> telodl::Result<Chain64> {
    match algo {
        Algorithm::Tel => build_tel_chain(k, n, grid_eps),
        Algorithm::Odl => build_odl_chain_with(k, n, Rates::from_controller(p.epsilon, p.c), Some(p.c)),
    }
}

pub fn chain_build(args: GridArgs) -> Result<(), CliError> {
    let args = args.with_config()?;
    let algo = match args.algo {
        Some(AlgoChoice::Tel) => Algorithm::Tel,
        Some(AlgoChoice::Odl) => Algorithm::Odl,
        _ => return Err(CliError::validation("chain build needs --algo tel or --algo odl")),
    };
    let sizes = args.sizes()?;
    let eps = args.epsilons()?;
    let (&[(k, n)], &[e]) = (sizes.as_slice(), eps.as_slice()) else {
        return Err(CliError::validation("chain build takes a single K, N and epsilon"));
    };
    let p = args.controller(algo, k, e)?;
    let chain = approx_chain(algo, k, n, e, &p)?;
    let ergodic = verify_ergodic(&chain.matrix);
    let summary = format!("states: {}\nergodic: {}", chain.len(), ergodic.ergodic);
    let json = chain.to_export().to_json();
    match &args.out {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            println!("{json}");
            eprintln!("{summary}");
        }
    }
    if !ergodic.ergodic {
        return Err(CliError::Numerical(ergodic.diagnostic()));
    }
    Ok(())
}

pub fn chain_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let chain = ChainExport::read(&args.chain)?.into_chain()?;
    let (i, j) = (chain.resolve(&args.from)?, chain.resolve(&args.to)?);
    let res = analyze(&chain.matrix, i, j)?;
    let m = &chain.meta;
    let record = vec![
        m.algo.to_string(),
        m.players.to_string(),
        m.resources.to_string(),
        table::num(m.epsilon),
        "approx".into(),
        table::num(res.efht),
        table::num(res.alpha),
        NA.into(),
    ];
    table::write_csv(args.out.as_deref(), &table::ANALYZE_HEADER, &[record])
}

struct Cell {
    algo: Algorithm,
    k: usize,
    n: usize,
    eps: f64,
    params: ControllerParams,
    mc: Option<MonteCarloConfig>,
}

fn mc_config(args: &GridArgs, cell_params: ControllerParams, algo: Algorithm, k: usize, n: usize) -> Result<MonteCarloConfig, CliError> {
    let mut cfg = MonteCarloConfig::new(algo, k, n, cell_params.epsilon, args.seed.unwrap_or(0));
    cfg.params = cell_params;
    cfg.efht_trials = args.trials.unwrap_or(cfg.efht_trials);
    cfg.alpha_iterations = args.alpha_iters.unwrap_or(cfg.alpha_iterations);
    cfg.burn_in = args.burn_in.unwrap_or(cfg.burn_in);
    cfg.max_steps_per_trial = args.max_steps.unwrap_or(cfg.max_steps_per_trial);
    cfg.validate()?;
    Ok(cfg)
}

impl Cell {
    fn row(&self, method: &'static str, metric: &'static str) -> GridRow {
        GridRow {
            algo: self.algo.as_str(),
            players: self.k,
            resources: self.n,
            epsilon: self.eps,
            method,
            metric,
            value: None,
            std_error: None,
            seed: None,
            trials: None,
        }
    }

    fn label(&self) -> String {
        format!("{} K={} N={} epsilon={}", self.algo, self.k, self.n, self.eps)
    }

    /// Rows for this cell and the number of failed metrics.
    fn run(&self, method: Method) -> (Vec<GridRow>, usize) {
        let mut rows = Vec::new();
        let mut failed = 0;
        if method.approx() {
            let (mut efht, mut alpha) = (self.row("approx", "efht"), self.row("approx", "alpha"));
            match approx_chain(self.algo, self.k, self.n, self.eps, &self.params)
                .and_then(|c| analyze(&c.matrix, c.full_collision(), c.orthogonal()))
            {
                Ok(r) => {
                    efht.value = Some(r.efht);
                    alpha.value = Some(r.alpha);
                }
                Err(e) => {
                    warn!("{}: approx failed: {e}", self.label());
                    failed += 2;
                }
            }
            rows.extend([efht, alpha]);
        }
        if let Some(cfg) = &self.mc {
            let mut efht = self.row("mc", "efht");
            efht.seed = Some(cfg.seed);
            match estimate_efht(cfg) {
                Ok(e) => {
                    if e.censored > 0 {
                        warn!("{}: {} trials hit the step cap and were dropped", self.label(), e.censored);
                    }
                    efht.value = Some(e.mean);
                    efht.std_error = Some(e.std_error);
                    efht.trials = Some(e.trials_used as u64);
                }
                Err(e) => {
                    warn!("{}: mc efht failed: {e}", self.label());
                    failed += 1;
                }
            }
            let mut alpha = self.row("mc", "alpha");
            alpha.seed = Some(cfg.seed);
            match estimate_alpha(cfg) {
                Ok(a) => {
                    alpha.value = Some(a.alpha);
                    alpha.std_error = Some(a.std_error);
                    alpha.trials = Some(cfg.alpha_iterations);
                }
                Err(e) => {
                    warn!("{}: mc alpha failed: {e}", self.label());
                    failed += 1;
                }
            }
            rows.extend([efht, alpha]);
        }
        (rows, failed)
    }
}

/// Run every (algo, K, N, epsilon) cell. Cells run in parallel; rows come out
/// in grid order.
pub fn run_grid(args: &GridArgs, default_algo: AlgoChoice, default_method: Method) -> Result<(Vec<GridRow>, usize), CliError> {
    let method = args.method.unwrap_or(default_method);
    let algos = args.algorithms(default_algo);
    let sizes = args.sizes()?;
    let eps = args.epsilons()?;
    let mut cells = Vec::new();
    for &algo in &algos {
        for &(k, n) in &sizes {
            for &e in &eps {
                let params = args.controller(algo, k, e)?;
                let mc = if method.mc() { Some(mc_config(args, params, algo, k, n)?) } else { None };
                cells.push(Cell { algo, k, n, eps: e, params, mc });
            }
        }
    }
    info!("running {} cells", cells.len());
    let results: Vec<(Vec<GridRow>, usize)> = cells.par_iter().map(|c| c.run(method)).collect();
    let failed = results.iter().map(|r| r.1).sum();
    Ok((results.into_iter().flat_map(|r| r.0).collect(), failed))
}

fn write_grid(args: &GridArgs, rows: &[GridRow], failed: usize) -> Result<(), CliError> {
    let records: Vec<Vec<String>> = rows.iter().map(GridRow::record).collect();
    table::write_csv(args.out.as_deref(), &table::GRID_HEADER, &records)?;
    if failed > 0 {
        return Err(CliError::Partial { failed, total: rows.len() });
    }
    Ok(())
}

pub fn simulate(args: GridArgs) -> Result<(), CliError> {
    let args = args.with_config()?;
    if args.sizes()?.len() != 1 {
        return Err(CliError::validation("simulate takes a single K and N; use sweep for grids"));
    }
    let (rows, failed) = run_grid(&args, AlgoChoice::Both, Method::Mc)?;
    write_grid(&args, &rows, failed)
}

pub fn sweep(args: GridArgs) -> Result<(), CliError> {
    let args = args.with_config()?;
    let (rows, failed) = run_grid(&args, AlgoChoice::Both, Method::Approx)?;
    write_grid(&args, &rows, failed)
}

/// State counts of the full and reduced chains against the approximated
/// chains, per (K, N).
pub fn complexity(args: GridArgs) -> Result<(), CliError> {
    let args = args.with_config()?;
    let sizes = args.sizes()?;
    let records: Vec<Result<Vec<String>, CliError>> = sizes
        .par_iter()
        .map(|&(k, n)| {
            let tel = build_tel_chain::<f64>(k, n, 0.01)?.len();
            let odl = build_odl_chain::<f64>(k, n, 0.01)?.len();
            Ok(vec![
                k.to_string(),
                n.to_string(),
                full_chain_size(4, n as u64, k as u32).to_string(),
                full_chain_size(2, n as u64, k as u32).to_string(),
                reduced_size(k, n).to_string(),
                tel.to_string(),
                odl.to_string(),
            ])
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    table::write_csv(args.out.as_deref(), &table::COMPLEXITY_HEADER, &records)
}
