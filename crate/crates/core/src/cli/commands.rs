use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::merge_config;
use super::{AsymArgs, Command, InputArgs, Outcome, RoundsArgs, SweepArgs, VerifyArgs, EXIT_CHECK_FAILED};
use crate::asymptotics::{asym_p_opt, asym_p_opt_kappa};
use crate::error::{HackError, Result};
use crate::fidelity::{named_unitary, p_chi_rotated, p_me_rotated, p_pg_rotated, UnitaryFamily};
use crate::matrix_io::{matrix_to_json, read_matrix, MatrixFile};
use crate::optimizer::{fidelity_report, optimize_probe, optimize_probe_rotated, Method, OptimizerConfig};
use crate::random::{haar_unitary, parse_seed, random_probe, SeedSpec};
use crate::rounds::{run_rounds, RoundRecord, RoundScrambler, RoundStrategy, RoundsConfig};
use crate::tensor::{rotate_pi_half, ComplexMatrix, ScramblerDims};
use crate::verify::{mean_sd, run_verify, Suite};

const UNITARITY_TOL: f64 = 1e-8;

pub(super) fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Fidelity(a) => cmd_fidelity(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Asym(a) => cmd_asym(a),
        Command::Rounds(a) => cmd_rounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Uo(a) => cmd_uo(a),
    }
}

/// Writes to `out` when given, otherwise hands the text back for stdout.
fn emit(text: String, out: Option<&Path>, exit_code: i32) -> Result<Outcome> {
    match out {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(Outcome { output: String::new(), exit_code })
        }
        None => Ok(Outcome { output: text, exit_code }),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output structs serialize") + "\n"
}

fn seed_spec(s: Option<&str>) -> Result<SeedSpec> {
    s.map_or(Ok(SeedSpec::new(0, 0)), str::parse)
}

fn load_scrambler(a: &InputArgs) -> Result<(ComplexMatrix, ScramblerDims)> {
    let dims = ScramblerDims::parse(a.dims.as_deref().unwrap_or("2,2,2,2"))?;
    let haar = a.haar.unwrap_or(false);
    let sources = a.input.is_some() as u8 + a.family.is_some() as u8 + haar as u8;
    if sources > 1 {
        return Err(HackError::Argument("give only one of --input, --family and --haar".into()));
    }
    let u = if let Some(path) = &a.input {
        read_matrix(path)?
    } else {
        let family = if haar {
            UnitaryFamily::Haar(seed_spec(a.seed.as_deref())?)
        } else {
            match a.family.as_deref().unwrap_or("haar").parse()? {
                UnitaryFamily::Haar(_) => UnitaryFamily::Haar(seed_spec(a.seed.as_deref())?),
                f => f,
            }
        };
        named_unitary(&family, &dims)?
    };
    if u.shape() != (dims.total(), dims.total()) {
        return Err(HackError::Shape(format!(
            "scrambler is {}x{} but dims ({dims}) need {2}x{2}",
            u.rows(),
            u.cols(),
            dims.total()
        )));
    }
    let defect = u.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(HackError::Validation(format!("input is not unitary: ‖U†U − I‖₂ = {defect:e}")));
    }
    Ok((u, dims))
}

fn optimizer_config(a: &InputArgs) -> Result<OptimizerConfig> {
    let d = OptimizerConfig::default();
    let cfg = OptimizerConfig {
        method: a.method.as_deref().map_or(Ok(d.method), str::parse::<Method>)?,
        step_eps: a.step_eps.unwrap_or(d.step_eps),
        tol: a.tol.unwrap_or(d.tol),
        max_iters: a.max_iters.unwrap_or(d.max_iters),
        cutoff: None,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_fidelity(a: InputArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let (u, dims) = load_scrambler(&a)?;
    let report = fidelity_report(&u, &dims, &optimizer_config(&a)?)?;
    emit(to_json(&report), a.out.as_deref(), 0)
}

#[derive(Serialize)]
struct OptimizeOutput {
    p_opt: f64,
    iterations: usize,
    converged: bool,
    stagnated: bool,
    chi_opt: MatrixFile,
}

fn cmd_optimize(a: InputArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let (u, dims) = load_scrambler(&a)?;
    let start = a.start_seed.as_deref().map(str::parse::<SeedSpec>).transpose()?;
    let r = optimize_probe(&u, &dims, &optimizer_config(&a)?, start)?;
    if let Some(p) = &a.trace_out {
        std::fs::write(p, r.trace.to_csv())?;
    }
    let out = OptimizeOutput {
        p_opt: r.p_opt,
        iterations: r.trace.iterations(),
        converged: r.trace.converged,
        stagnated: r.trace.stagnated,
        chi_opt: MatrixFile::from(r.chi_opt.chi()),
    };
    emit(to_json(&out), a.out.as_deref(), 0)
}

fn cmd_uo(a: InputArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let (u, dims) = load_scrambler(&a)?;
    emit(matrix_to_json(&rotate_pi_half(&u, &dims)?) + "\n", a.out.as_deref(), 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepStrategy {
    Me,
    Pg,
    Opt,
    Rand,
}

impl SweepStrategy {
    pub const fn all() -> [Self; 4] {
        [Self::Me, Self::Pg, Self::Opt, Self::Rand]
    }

    fn name(self) -> &'static str {
        match self {
            Self::Me => "me",
            Self::Pg => "pg",
            Self::Opt => "opt",
            Self::Rand => "rand",
        }
    }

    fn parse_list(s: &str) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let st = match tok {
                "me" => Self::Me,
                "pg" => Self::Pg,
                "opt" => Self::Opt,
                "rand" => Self::Rand,
                other => {
                    return Err(HackError::Argument(format!("unknown strategy '{other}' (expected me, pg, opt, rand)")))
                }
            };
            if !out.contains(&st) {
                out.push(st);
            }
        }
        if out.is_empty() {
            return Err(HackError::Argument("no strategies selected".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub grid: Vec<ScramblerDims>,
    pub trials: usize,
    pub strategies: Vec<SweepStrategy>,
    pub master_seed: u64,
    pub workers: usize,
}

impl SweepConfig {
    /// Parses grid tuples, naming the offending one on failure.
    pub fn parse_grid(items: &[String]) -> Result<Vec<ScramblerDims>> {
        let mut grid = Vec::new();
        for item in items {
            for tok in item.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                grid.push(
                    ScramblerDims::parse(tok)
                        .map_err(|e| HackError::Argument(format!("invalid grid point '{tok}': {e}")))?,
                );
            }
        }
        if grid.is_empty() {
            return Err(HackError::Argument("sweep grid is empty".into()));
        }
        Ok(grid)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub dims: ScramblerDims,
    pub strategy: SweepStrategy,
    pub trials: usize,
    pub mean: Option<f64>,
    pub stddev: Option<f64>,
    pub asym_prediction: f64,
    pub error: Option<String>,
}

pub const SWEEP_CSV_HEADER: &str = "d_a,d_b,d_k,d_l,kappa,strategy,trials,mean,stddev,asym_prediction,error";

fn trial_values(dims: &ScramblerDims, strategies: &[SweepStrategy], seed: SeedSpec) -> Result<Vec<f64>> {
    let u = haar_unitary(dims.total(), seed)?;
    let uo = rotate_pi_half(&u, dims)?;
    strategies
        .iter()
        .map(|s| match s {
            SweepStrategy::Me => p_me_rotated(&uo, dims),
            SweepStrategy::Pg => p_pg_rotated(&uo, dims).map(|r| r.0),
            SweepStrategy::Opt => optimize_probe_rotated(&uo, dims, &OptimizerConfig::default(), None).map(|r| r.p_opt),
            SweepStrategy::Rand => {
                let probe = random_probe(dims.d_b, seed.child(1))?;
                p_chi_rotated(&uo, dims, &probe).map(|r| r.0)
            }
        })
        .collect()
}

/// Trial `t` at grid point `p` uses stream `p·trials + t`; results are merged
/// in grid and trial order regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.trials == 0 {
        return Err(HackError::Argument("trials must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| HackError::Argument(format!("cannot start worker pool: {e}")))?;
    let jobs: Vec<(usize, usize)> = (0..cfg.grid.len()).flat_map(|p| (0..cfg.trials).map(move |t| (p, t))).collect();
    let results: Vec<Result<Vec<f64>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| {
                let seed = SeedSpec::new(cfg.master_seed, (p * cfg.trials + t) as u64);
                trial_values(&cfg.grid[p], &cfg.strategies, seed)
            })
            .collect()
    });

    let mut rows = Vec::new();
    for (p, dims) in cfg.grid.iter().enumerate() {
        let chunk = &results[p * cfg.trials..(p + 1) * cfg.trials];
        let asym = asym_p_opt(dims).p_opt_mean;
        let failure = chunk.iter().find_map(|r| r.as_ref().err().map(|e| e.to_string()));
        for (si, &strategy) in cfg.strategies.iter().enumerate() {
            let row = match &failure {
                Some(reason) => SweepRow {
                    dims: *dims,
                    strategy,
                    trials: cfg.trials,
                    mean: None,
                    stddev: None,
                    asym_prediction: asym,
                    error: Some(reason.clone()),
                },
                None => {
                    let vals: Vec<f64> = chunk.iter().map(|r| r.as_ref().expect("checked")[si]).collect();
                    let (mean, sd) = mean_sd(&vals);
                    SweepRow {
                        dims: *dims,
                        strategy,
                        trials: cfg.trials,
                        mean: Some(mean),
                        stddev: Some(sd),
                        asym_prediction: asym,
                        error: None,
                    }
                }
            };
            rows.push(row);
        }
        eprintln!("sweep: point {} ({dims}) done", p + 1);
    }
    Ok(rows)
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut s = String::from(SWEEP_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let d = r.dims;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            d.d_a,
            d.d_b,
            d.d_k,
            d.d_l,
            d.kappa(),
            r.strategy.name(),
            r.trials,
            opt(r.mean),
            opt(r.stddev),
            r.asym_prediction,
            csv_escape(r.error.as_deref().unwrap_or(""))
        );
    }
    s
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn cmd_sweep(a: SweepArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let grid = SweepConfig::parse_grid(a.dims.as_deref().unwrap_or(&["8,8,8,8".to_string()]))?;
    let cfg = SweepConfig {
        grid,
        trials: a.trials.unwrap_or(20),
        strategies: SweepStrategy::parse_list(a.strategies.as_deref().unwrap_or("me,pg,opt,rand"))?,
        master_seed: a.seed.as_deref().map_or(Ok(0), parse_seed)?,
        workers: a.workers.unwrap_or_else(default_workers),
    };
    let rows = run_sweep(&cfg)?;
    emit(sweep_csv(&rows), a.out.as_deref(), 0)
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| HackError::Argument(format!("invalid {what} '{t}': {e}"))))
        .collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || HackError::Argument(format!("invalid dA:dK pair '{t}'"));
            let (x, y) = t.split_once(':').ok_or_else(bad)?;
            Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn cmd_asym(a: AsymArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let kappas = parse_f64_list(a.kappa.as_deref().unwrap_or("0.5,1,2,4"), "kappa")?;
    let pairs = parse_pairs(a.da_dk.as_deref().unwrap_or("2:2,8:8"))?;
    let mut s = String::from("kappa,d_A,d_K,I_kappa,p_opt_mean\n");
    for &(d_a, d_k) in &pairs {
        for &k in &kappas {
            let p = asym_p_opt_kappa(k, d_a, d_k)?;
            let _ = writeln!(s, "{},{},{},{},{}", p.kappa, p.d_a, p.d_k, p.i_kappa, p.p_opt_mean);
        }
    }
    emit(s, a.out.as_deref(), 0)
}

fn cmd_rounds(a: RoundsArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let d_m = a.dm.unwrap_or(2);
    let d_b = a.db.unwrap_or(4);
    let master = a.seed.as_deref().map_or(Ok(0), parse_seed)?;
    let strategy: RoundStrategy = a.strategy.as_deref().unwrap_or("me_assumed").parse()?;
    let scrambler = match a.family.as_deref().unwrap_or("haar") {
        "haar" => RoundScrambler::Haar,
        "swap" => RoundScrambler::Swap,
        other => return Err(HackError::Argument(format!("rounds family must be haar or swap, got '{other}'"))),
    };
    let n_seeds = a.seeds.unwrap_or(1);
    if n_seeds == 0 {
        return Err(HackError::Argument("seeds must be positive".into()));
    }
    let configs: Vec<RoundsConfig> = (0..n_seeds)
        .map(|i| {
            let mut c = RoundsConfig::new(d_m, d_b, a.rounds.unwrap_or(3), strategy, SeedSpec::new(master, i));
            c.scrambler = scrambler;
            c.degrade_f = a.degrade_f;
            if let Some(l) = a.compress_limit {
                c.compress_limit = l;
            }
            c
        })
        .collect();
    configs[0].validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.workers.unwrap_or_else(default_workers).max(1))
        .build()
        .map_err(|e| HackError::Argument(format!("cannot start worker pool: {e}")))?;
    let runs: Vec<Result<Vec<RoundRecord>>> = pool.install(|| configs.par_iter().map(run_rounds).collect());
    let mut s = String::from("seed,");
    s.push_str(crate::rounds::ROUNDS_CSV_HEADER);
    s.push('\n');
    for (i, run) in runs.into_iter().enumerate() {
        for rec in run? {
            let _ = writeln!(s, "{i},{}", rec.csv_row());
        }
    }
    emit(s, a.out.as_deref(), 0)
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome> {
    let a = merge_config(&a, a.config.as_deref())?;
    let suites: Vec<Suite> = match &a.suite {
        Some(list) => list.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        None => Suite::ALL.to_vec(),
    };
    let seed = a.seed.as_deref().map_or(Ok(2024), parse_seed)?;
    let summary = run_verify(&suites, seed)?;
    let code = if summary.all_passed { 0 } else { EXIT_CHECK_FAILED };
    emit(to_json(&summary), a.out.as_deref(), code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_list_parsing() {
        assert_eq!(SweepStrategy::parse_list("opt, me,opt").unwrap(), vec![SweepStrategy::Opt, SweepStrategy::Me]);
        assert!(SweepStrategy::parse_list("best").is_err());
        assert!(SweepStrategy::parse_list("").is_err());
    }

    #[test]
    fn grid_errors_name_the_tuple() {
        let err = SweepConfig::parse_grid(&["2,2,2,2;2,3,4,5".to_string()]).unwrap_err();
        assert!(err.to_string().contains("2,3,4,5"));
    }

    #[test]
    fn pairs_parse() {
        assert_eq!(parse_pairs("2:2, 8:4").unwrap(), vec![(2, 2), (8, 4)]);
        assert!(parse_pairs("8").is_err());
    }
}
