//! Self-checks of the library's invariants, reported as data.
//!
//! Each suite samples a fixed, seeded set of instances and returns one
//! [`Check`] per property with the measured worst case and its threshold.
//! A failing property is a result, not an error.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;

use crate::asymptotics::{hyp2f1, mth_moment};
use crate::error::{HackError, Result};
use crate::fidelity::{
    p_hack_formula, p_hack_oracle, p_hp_dual, p_me, p_pg, post_recovery_state, trade_off_terms, two_qubit_exact,
    HackingStrategy, ProbeOperator,
};
use crate::optimizer::{optimize_probe, OptimizerConfig};
use crate::random::{haar_unitary, random_probe, MarchenkoPastur, SeedSpec};
use crate::tensor::{
    abs_polar_parts, default_cutoff, partial_trace_first, rotate_pi_half, ComplexMatrix, ScramblerDims, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Bounds,
    Oracle,
    Duality,
    TwoQubit,
    TradeOff,
    Moments,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Bounds, Suite::Oracle, Suite::Duality, Suite::TwoQubit, Suite::TradeOff, Suite::Moments];
}

impl FromStr for Suite {
    type Err = HackError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "bounds" => Ok(Self::Bounds),
            "oracle" => Ok(Self::Oracle),
            "duality" => Ok(Self::Duality),
            "two_qubit" => Ok(Self::TwoQubit),
            "trade_off" | "tradeoff" => Ok(Self::TradeOff),
            "moments" => Ok(Self::Moments),
            other => Err(HackError::Argument(format!(
                "unknown suite '{other}' (expected bounds, oracle, duality, two-qubit, trade-off or moments)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    /// Passes when `measured ≤ threshold`.
    fn at_most(suite: Suite, name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self { suite, name: name.into(), passed: measured <= threshold, measured, threshold }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub all_passed: bool,
    pub checks: Vec<Check>,
}

/// Every `(d_A, d_B, d_K, d_L)` with entries drawn from `values` for the
/// first three and `d_L = d_A·d_B/d_K` integral.
pub fn layouts(values: &[usize]) -> Vec<ScramblerDims> {
    let mut out = Vec::new();
    for &a in values {
        for &b in values {
            for &k in values {
                if (a * b) % k == 0 {
                    out.push(ScramblerDims::new(a, b, k, a * b / k).expect("positive dims"));
                }
            }
        }
    }
    out
}

/// Haar unitary on `C^N` used as a random recovery.
fn random_recovery(dims: &ScramblerDims, seed: SeedSpec) -> Result<ComplexMatrix> {
    haar_unitary(dims.recovery_dim(), seed)
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    let s = |stream: u64| SeedSpec::new(seed, stream);
    let cfg = OptimizerConfig::default();
    let mut checks = Vec::new();
    match suite {
        Suite::Bounds => {
            let mut chain = f64::NEG_INFINITY;
            let mut upper = f64::NEG_INFINITY;
            let mut square = f64::NEG_INFINITY;
            for (i, dims) in layouts(&[2, 3, 4]).into_iter().enumerate() {
                for t in 0..3u64 {
                    let u = haar_unitary(dims.total(), s(1000 * i as u64 + t))?;
                    let me = p_me(&u, &dims)?;
                    let (pg, _) = p_pg(&u, &dims)?;
                    let opt = optimize_probe(&u, &dims, &cfg, None)?.p_opt;
                    chain = chain.max(me - pg).max(pg - opt);
                    upper = upper.max(opt - 1.0);
                    if dims.is_square_case() && dims.d_a == dims.d_b {
                        square = square.max((1.0 - me) - 4.0 * (1.0 - opt));
                    }
                }
            }
            checks.push(Check::at_most(suite, "p_me <= p_pg <= p_opt (max violation)", chain, 1e-9));
            checks.push(Check::at_most(suite, "p_opt <= 1 (max excess)", upper, 1e-9));
            checks.push(Check::at_most(suite, "1 - p_me <= 4(1 - p_opt) (max violation)", square, 1e-9));
        }
        Suite::Oracle => {
            let mut worst: f64 = 0.0;
            let all = layouts(&[2, 3]);
            for t in 0..40u64 {
                let dims = all[t as usize % all.len()];
                let u = haar_unitary(dims.total(), s(t))?;
                let strat = HackingStrategy::new(
                    random_recovery(&dims, s(t).child(1))?,
                    random_probe(dims.d_b, s(t).child(2))?,
                )?;
                worst = worst.max((p_hack_formula(&u, &dims, &strat)? - p_hack_oracle(&u, &dims, &strat)?).abs());
            }
            checks.push(Check::at_most(suite, "|formula - state vector| (max)", worst, 1e-10));
        }
        Suite::Duality => {
            for d_b in [2usize, 3, 4] {
                let dims = ScramblerDims::square(2, d_b)?;
                let k2 = dims.kappa().powi(2);
                let mut worst: f64 = 0.0;
                let mut ratio = 0.0;
                let n = 5;
                for t in 0..n {
                    let u = haar_unitary(dims.total(), s(100 * d_b as u64 + t))?;
                    let opt = optimize_probe(&u, &dims, &cfg, None)?.p_opt;
                    let hp = p_hp_dual(&u, &dims, 1e-13, 20_000)?.p_hp;
                    worst = worst.max((hp - opt / k2).abs());
                    ratio += hp / opt / n as f64;
                }
                checks.push(Check::at_most(
                    suite,
                    format!("kappa={}: |p_hp - p_opt/kappa^2| (max); mean p_hp/p_opt = {ratio}", dims.kappa()),
                    worst,
                    1e-6,
                ));
            }
        }
        Suite::TwoQubit => {
            let dims = ScramblerDims::square(2, 2)?;
            let mut trace_dev: f64 = 0.0;
            let mut chi_dev: f64 = 0.0;
            let me = ProbeOperator::maximally_entangled(2);
            for t in 0..50u64 {
                let u = haar_unitary(4, s(t))?;
                let params = two_qubit_exact(&u)?;
                let uo = rotate_pi_half(&u, &dims)?;
                let absdag = abs_polar_parts(&uo, default_cutoff(&uo))?.absdag;
                let tr = partial_trace_first(&absdag, 2, 2)?;
                let expect = ComplexMatrix::identity(2).scale_real(2.0 * params.c_prime);
                trace_dev = trace_dev.max(tr.distance(&expect));
                let chi = optimize_probe(&u, &dims, &cfg, None)?.chi_opt;
                chi_dev = chi_dev.max(1.0 - chi.overlap(&me));
            }
            checks.push(Check::at_most(suite, "||Tr_L|Uo^dag| - 2c'I||_2 (max)", trace_dev, 1e-9));
            checks.push(Check::at_most(suite, "1 - fidelity(chi_opt, I/sqrt2) (max)", chi_dev, 1e-6));
        }
        Suite::TradeOff => {
            let mut worst = f64::NEG_INFINITY;
            let all = layouts(&[2, 3]);
            for t in 0..100u64 {
                let dims = all[t as usize % all.len()];
                let u = haar_unitary(dims.total(), s(t))?;
                let strat = HackingStrategy::new(
                    random_recovery(&dims, s(t).child(1))?,
                    random_probe(dims.d_b, s(t).child(2))?,
                )?;
                let to = post_recovery_state(&u, &dims, &strat)?.trade_off();
                worst = worst.max(-to.slack());
            }
            checks.push(Check::at_most(suite, "f_ext + f_post - 1 - p_hack (max)", worst, 1e-9));
            let dims = ScramblerDims::square(2, 2)?;
            let n = dims.recovery_dim();
            let mut v = vec![C64::new(0.0, 0.0); 4 * n];
            for a in 0..2 {
                v[a * n + 2 + a] = C64::new(1.0 / 2f64.sqrt(), 0.0);
            }
            let sat = trade_off_terms(&v, &dims, 1)?.slack().abs();
            checks.push(Check::at_most(suite, "orthogonal residual saturation |slack|", sat, 1e-9));
        }
        Suite::Moments => {
            let g = (hyp2f1(0.5, -0.5, 2.0, 1.0)? - 8.0 / (3.0 * PI)).abs();
            checks.push(Check::at_most(suite, "|2F1(1/2,-1/2;2;1) - 8/(3pi)|", g, 1e-10));
            let m1 = [0.25, 0.5, 1.0]
                .iter()
                .map(|&l| mth_moment(1.0, l).map(|v| (v - 1.0).abs()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            checks.push(Check::at_most(suite, "|mth_moment(1, lambda) - 1| (max)", m1, 1e-12));
            for lambda in [0.25, 1.0] {
                let mp = MarchenkoPastur::new(lambda)?;
                let xs = mp.sample(200_000, &mut s(7).rng());
                for m in [0.5, 2.0] {
                    let vals: Vec<f64> = xs.iter().map(|x| x.powf(m)).collect();
                    let (mean, sd) = mean_sd(&vals);
                    let z = (mean - mth_moment(m, lambda)?).abs() / (sd / (vals.len() as f64).sqrt());
                    checks.push(Check::at_most(
                        suite,
                        format!("MP sample mean of x^{m} at lambda={lambda} vs 2F1 (sigmas)"),
                        z,
                        3.0,
                    ));
                }
            }
        }
    }
    Ok(checks)
}

pub(crate) fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

pub fn run_verify(suites: &[Suite], seed: u64) -> Result<VerifySummary> {
    let mut checks = Vec::new();
    for &suite in suites {
        checks.extend(run_suite(suite, seed)?);
    }
    Ok(VerifySummary { all_passed: checks.iter().all(|c| c.passed), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_respect_the_product_constraint() {
        let l = layouts(&[2, 3, 4]);
        assert!(l.iter().all(|d| d.d_a * d.d_b == d.d_k * d.d_l));
        assert!(l.iter().any(|d| d.kappa() > 1.0));
        assert!(l.iter().any(|d| d.kappa() < 1.0));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("two-qubit".parse::<Suite>().unwrap(), Suite::TwoQubit);
        assert!("nope".parse::<Suite>().is_err());
    }
}
