//! Repeated extraction from a black-hole-like scrambler.
//!
//! Layout per round: Alice's qudit `A` (dimension `d_M`) with reference `A′`
//! falls into the interior `B` (dimension `D_B`); the scrambler maps
//! `A⊗B → K⊗L` with `K` the new interior and `L` the emitted radiation. Bob
//! holds `B′` from the previous round, applies his recovery on `L⊗B′` and
//! obtains `K″⊗A″`. The pair `(K, K″)` is the next round's probe; `(A′, A″)`
//! is archived in `Env`.
//!
//! The global state is stored as `Φ[K, K″, Env]`. After each round `Env` is
//! compressed to at most `compress_limit` Schmidt vectors across the
//! `(K,K″) | Env` cut; it never needs more than `D_B²`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HackError, Result};
use crate::fidelity::{
    apply_probe, named_unitary, optimal_recovery, p_me_rotated, JointState, ProbeOperator, UnitaryFamily,
};
use crate::limits::check_elements;
use crate::random::{haar_state_orthogonal, haar_unitary, SeedSpec};
use crate::tensor::{
    max_entangled_vector, rotate_pi_half, svd, vdot, vector_norm, ComplexMatrix, ScramblerDims, StateVector, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundStrategy {
    /// Polar recovery of `U°`, as if the probe were maximally entangled.
    MeAssumed,
    /// Recovery maximizing the mixed-probe fidelity of the actual reduced probe.
    PgAdaptive,
}

impl FromStr for RoundStrategy {
    type Err = HackError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "me_assumed" => Ok(Self::MeAssumed),
            "pg_adaptive" => Ok(Self::PgAdaptive),
            other => Err(HackError::Argument(format!(
                "unknown round strategy '{other}' (expected me_assumed or pg_adaptive)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundScrambler {
    /// Fresh Haar unitary every round.
    Haar,
    /// Perfect mirror: the infalling qudit leaves unscrambled.
    Swap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundsConfig {
    pub d_m: usize,
    pub d_b: usize,
    pub n_rounds: usize,
    pub strategy: RoundStrategy,
    pub seed: SeedSpec,
    pub compress_limit: usize,
    /// Degrade the initial probe to this fidelity with the maximally entangled state.
    pub degrade_f: Option<f64>,
    pub scrambler: RoundScrambler,
}

impl RoundsConfig {
    pub fn new(d_m: usize, d_b: usize, n_rounds: usize, strategy: RoundStrategy, seed: SeedSpec) -> Self {
        Self {
            d_m,
            d_b,
            n_rounds,
            strategy,
            seed,
            compress_limit: d_b * d_b,
            degrade_f: None,
            scrambler: RoundScrambler::Haar,
        }
    }

    /// Largest state held during a round: `D_B²·d_M²·E` with `E` the archive
    /// size entering the last round.
    pub fn memory_requirement(&self) -> u128 {
        let archive_cap = self.compress_limit.min(self.d_b * self.d_b) as u128;
        let mut archive: u128 = 1;
        for _ in 1..self.n_rounds {
            archive = (archive * (self.d_m * self.d_m) as u128).min(archive_cap.max(1));
        }
        (self.d_b * self.d_b * self.d_m * self.d_m) as u128 * archive
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_m == 0 || self.d_b == 0 || self.n_rounds == 0 || self.compress_limit == 0 {
            return Err(HackError::Argument(
                "d_M, D_B, the number of rounds and compress_limit must be positive".into(),
            ));
        }
        if let Some(f) = self.degrade_f {
            if !(f > 0.0 && f <= 1.0) {
                return Err(HackError::Argument(format!("degrade fidelity must lie in (0, 1], got {f}")));
            }
        }
        check_elements("rounds simulation state", self.memory_requirement())
    }

    fn dims(&self) -> Result<ScramblerDims> {
        ScramblerDims::black_hole(self.d_m, self.d_b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Joint fidelity of both pairs with the target, archive traced out.
    pub p_hack: f64,
    pub f_ext: f64,
    pub f_post: f64,
    /// `1 + p_hack − f_ext − f_post`.
    pub tradeoff_slack: f64,
    /// Squared Schmidt weight discarded by the archive compression.
    pub truncation_error: f64,
    /// `|‖Φ‖ − 1|` after the round's unitaries, before compression.
    pub norm_error: f64,
    /// Fidelity the same scrambler would give a fresh maximally entangled probe.
    pub p_fresh: f64,
}

pub const ROUNDS_CSV_HEADER: &str = "round,p_hack,f_ext,f_post,slack,truncation_error";

impl RoundRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.round, self.p_hack, self.f_ext, self.f_post, self.tradeoff_slack, self.truncation_error
        )
    }
}

pub fn records_to_csv(records: &[RoundRecord]) -> String {
    let mut s = String::from(ROUNDS_CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Pure probe on `B⊗B′` with squared overlap `f` with the maximally
/// entangled state: `√f·e^{iθ}·ψ_ME + √(1−f)·w`, where `e^{iθ}` is the phase
/// of the input's overlap with `ψ_ME` and `w` is the normalized part of the
/// input orthogonal to `ψ_ME`, or a Haar direction when that part vanishes.
pub fn degrade_probe(state: &[C64], target_fidelity: f64, seed: SeedSpec) -> Result<StateVector> {
    if !(target_fidelity > 0.0 && target_fidelity <= 1.0) {
        return Err(HackError::Argument(format!("target fidelity must lie in (0, 1], got {target_fidelity}")));
    }
    let d = (state.len() as f64).sqrt().round() as usize;
    if d * d != state.len() || d == 0 {
        return Err(HackError::Shape(format!("probe state length {} is not a square", state.len())));
    }
    if d == 1 {
        return Err(HackError::Argument("no orthogonal probe direction exists for D_B = 1".into()));
    }
    let n = vector_norm(state);
    if (n - 1.0).abs() > 1e-8 {
        return Err(HackError::Argument(format!("probe state has norm {n}, expected 1")));
    }
    let me = max_entangled_vector(d, d);
    let ov = vdot(&me, state);
    if target_fidelity == 1.0 && ov.norm_sqr() >= 1.0 - 1e-15 {
        return Ok(state.to_vec());
    }
    let phase = if ov.norm() > 1e-12 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    let mut w: StateVector = state.iter().zip(&me).map(|(s, m)| s - ov * m).collect();
    let wn = vector_norm(&w);
    if wn > 1e-8 {
        w.iter_mut().for_each(|z| *z /= wn);
    } else {
        w = haar_state_orthogonal(&me, &mut seed.rng())?;
    }
    let (a, b) = (target_fidelity.sqrt(), (1.0 - target_fidelity).sqrt());
    Ok(me.iter().zip(&w).map(|(m, x)| phase * m * a + x * b).collect())
}

/// Global state `Φ[K, K″, Env]`.
struct GlobalState {
    amps: StateVector,
    d_b: usize,
    env: usize,
}

impl GlobalState {
    fn at(&self, b: usize, bp: usize, e: usize) -> C64 {
        self.amps[(b * self.d_b + bp) * self.env + e]
    }

    /// Columns of `[(B,B′), Env]`.
    fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.d_b * self.d_b, self.env, self.amps.clone()).expect("state entries are finite")
    }
}

/// Eigen-decomposition of the probe's reduced state as `(weight, χ)` pairs,
/// dominant first.
fn probe_components(state: &GlobalState) -> Result<Vec<(f64, ProbeOperator)>> {
    let f = svd(&state.as_matrix())?;
    let total: f64 = f.singulars.iter().map(|s| s * s).sum();
    let mut out = Vec::new();
    for (k, s) in f.singulars.iter().enumerate() {
        let w = s * s / total;
        if w <= 1e-14 {
            break;
        }
        let phi: StateVector = (0..f.left.rows()).map(|i| f.left[(i, k)]).collect();
        out.push((w, ProbeOperator::from_state_vector(&phi, state.d_b)?));
    }
    Ok(out)
}

const MM_MAX_ITERS: usize = 500;
const MM_TOL: f64 = 1e-13;

/// Maximizes `Σ pᵢ |Tr[R·Xᵢ]|²` over unitaries by the minorize-maximize update
/// `R ← polar(Σ pᵢ conj(tᵢ)·Xᵢ)`, `tᵢ = Tr[R·Xᵢ]`, which never decreases the
/// objective. Starts from the optimum of the dominant component.
fn mixed_probe_recovery(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    comps: &[(f64, ProbeOperator)],
) -> Result<ComplexMatrix> {
    let xs: Vec<ComplexMatrix> = comps.iter().map(|(_, p)| apply_probe(uo, dims, p.chi())).collect::<Result<_>>()?;
    let mut r = optimal_recovery(&xs[0], dims)?;
    if comps.len() == 1 {
        return Ok(r);
    }
    let objective = |r: &ComplexMatrix| -> (f64, Vec<C64>) {
        let ts: Vec<C64> = xs.iter().map(|x| (r * x).trace()).collect();
        let v = comps.iter().zip(&ts).map(|((w, _), t)| w * t.norm_sqr()).sum();
        (v, ts)
    };
    let (mut value, mut ts) = objective(&r);
    for _ in 0..MM_MAX_ITERS {
        let mut acc = ComplexMatrix::zeros(xs[0].rows(), xs[0].cols());
        for (((w, _), t), x) in comps.iter().zip(&ts).zip(&xs) {
            acc = &acc + &x.scale(t.conj() * *w);
        }
        let candidate = optimal_recovery(&acc, dims)?;
        let (v, t2) = objective(&candidate);
        if v < value {
            break;
        }
        let gain = v - value;
        r = candidate;
        value = v;
        ts = t2;
        if gain < MM_TOL {
            break;
        }
    }
    Ok(r)
}

/// Runs the protocol and returns one record per round.
pub fn run_rounds(cfg: &RoundsConfig) -> Result<Vec<RoundRecord>> {
    cfg.validate()?;
    let dims = cfg.dims()?;
    let (d_m, d_b) = (cfg.d_m, cfg.d_b);

    let mut probe = max_entangled_vector(d_b, d_b);
    if let Some(f) = cfg.degrade_f {
        probe = degrade_probe(&probe, f, cfg.seed.child(u64::MAX))?;
    }
    let mut state = GlobalState { amps: probe, d_b, env: 1 };
    let mut records = Vec::with_capacity(cfg.n_rounds);

    for round in 1..=cfg.n_rounds {
        let u = match cfg.scrambler {
            RoundScrambler::Haar => haar_unitary(dims.total(), cfg.seed.child(round as u64))?,
            RoundScrambler::Swap => named_unitary(&UnitaryFamily::Swap, &dims)?,
        };
        let uo = rotate_pi_half(&u, &dims)?;
        let p_fresh = p_me_rotated(&uo, &dims)?;
        let r = match cfg.strategy {
            RoundStrategy::MeAssumed => optimal_recovery(&uo, &dims)?,
            RoundStrategy::PgAdaptive => mixed_probe_recovery(&uo, &dims, &probe_components(&state)?)?,
        };
        let env = state.env;

        // S[(a, j), (a′, b′, e)] = δ_{aa′}/√d_M · Φ[j, b′, e]
        let amp = 1.0 / (d_m as f64).sqrt();
        let cols = d_m * d_b * env;
        let mut s = ComplexMatrix::zeros(d_m * d_b, cols);
        for a in 0..d_m {
            for j in 0..d_b {
                for bp in 0..d_b {
                    for e in 0..env {
                        s[(a * d_b + j, (a * d_b + bp) * env + e)] = state.at(j, bp, e) * amp;
                    }
                }
            }
        }
        // T[(k, i), (a′, b′, e)]
        let t = &u * &s;
        // Y[(i, b′), (k, a′, e)]
        let mut y = ComplexMatrix::zeros(d_m * d_b, d_b * d_m * env);
        for k in 0..d_b {
            for i in 0..d_m {
                for ap in 0..d_m {
                    for bp in 0..d_b {
                        for e in 0..env {
                            y[(i * d_b + bp, (k * d_m + ap) * env + e)] = t[(k * d_m + i, (ap * d_b + bp) * env + e)];
                        }
                    }
                }
            }
        }
        // Z[o, (k, a′, e)], o = k″·d_M + a″
        let z = &r * &y;
        let out = d_b * d_m;
        let mut joint = vec![C64::new(0.0, 0.0); d_b * d_m * out * env];
        for o in 0..out {
            for col in 0..d_b * d_m * env {
                let (ka, e) = (col / env, col % env);
                joint[(ka * out + o) * env + e] = z[(o, col)];
            }
        }
        let norm_error = (vector_norm(&joint) - 1.0).abs();
        if norm_error > 1e-8 {
            return Err(HackError::InternalConsistency(format!(
                "global state lost normalization in round {round}: error {norm_error:e}"
            )));
        }
        let js = JointState::new(joint, dims, env)?;
        let to = js.trade_off();
        let joint = js.into_amplitudes();

        // Archive (A′, A″): Φ′[k, k″, (a′, a″, e)].
        let env2 = d_m * d_m * env;
        let mut next = vec![C64::new(0.0, 0.0); d_b * d_b * env2];
        for k in 0..d_b {
            for ap in 0..d_m {
                for kc in 0..d_b {
                    for a2 in 0..d_m {
                        for e in 0..env {
                            let src = ((k * d_m + ap) * out + kc * d_m + a2) * env + e;
                            let dst = (k * d_b + kc) * env2 + (ap * d_m + a2) * env + e;
                            next[dst] = joint[src];
                        }
                    }
                }
            }
        }
        let (compressed, truncation_error) = compress(next, d_b, env2, cfg.compress_limit)?;
        state = compressed;

        records.push(RoundRecord {
            round,
            p_hack: to.p_joint,
            f_ext: to.f_ext,
            f_post: to.f_post,
            tradeoff_slack: to.slack(),
            truncation_error,
            norm_error,
            p_fresh,
        });
    }
    Ok(records)
}

/// Keeps at most `limit` Schmidt vectors across `(K,K″) | Env` and
/// renormalizes; returns the discarded squared weight.
fn compress(amps: StateVector, d_b: usize, env: usize, limit: usize) -> Result<(GlobalState, f64)> {
    let keep_max = limit.min(d_b * d_b);
    if env <= keep_max {
        return Ok((GlobalState { amps, d_b, env }, 0.0));
    }
    let m = ComplexMatrix::new(d_b * d_b, env, amps)?;
    let f = svd(&m)?;
    let keep = keep_max.min(f.singulars.len());
    let total: f64 = f.singulars.iter().map(|s| s * s).sum();
    let kept: f64 = f.singulars[..keep].iter().map(|s| s * s).sum();
    let scale = 1.0 / kept.sqrt();
    let rows = d_b * d_b;
    let mut out = vec![C64::new(0.0, 0.0); rows * keep];
    for i in 0..rows {
        for j in 0..keep {
            out[i * keep + j] = f.left[(i, j)] * (f.singulars[j] * scale);
        }
    }
    Ok((GlobalState { amps: out, d_b, env: keep }, (total - kept).max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_mirror_is_perfect_every_round() {
        let mut cfg = RoundsConfig::new(2, 4, 3, RoundStrategy::MeAssumed, SeedSpec::new(1, 0));
        cfg.scrambler = RoundScrambler::Swap;
        for rec in run_rounds(&cfg).unwrap() {
            assert!((rec.p_hack - 1.0).abs() < 1e-10);
            assert!((rec.f_ext - 1.0).abs() < 1e-10);
            assert!((rec.f_post - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn degrade_hits_the_target_overlap() {
        let me = max_entangled_vector(3, 3);
        for f in [0.3, 0.8, 1.0] {
            let v = degrade_probe(&me, f, SeedSpec::new(4, 0)).unwrap();
            assert!((vector_norm(&v) - 1.0).abs() < 1e-12);
            assert!((vdot(&me, &v).norm_sqr() - f).abs() < 1e-10);
        }
        assert_eq!(degrade_probe(&me, 1.0, SeedSpec::new(4, 0)).unwrap(), me);
    }

    #[test]
    fn degrade_rejects_bad_input() {
        let me = max_entangled_vector(2, 2);
        assert!(degrade_probe(&me, 0.0, SeedSpec::new(1, 0)).is_err());
        assert!(degrade_probe(&me, 1.2, SeedSpec::new(1, 0)).is_err());
        assert!(degrade_probe(&[C64::new(1.0, 0.0)], 0.5, SeedSpec::new(1, 0)).is_err());
    }

    #[test]
    fn memory_cap_rejected_before_running() {
        let mut cfg = RoundsConfig::new(8, 64, 4, RoundStrategy::MeAssumed, SeedSpec::new(1, 0));
        cfg.compress_limit = usize::MAX;
        assert!(matches!(run_rounds(&cfg), Err(HackError::DimensionLimit { .. })));
    }

    #[test]
    fn compression_below_schmidt_rank_records_loss() {
        let mut cfg = RoundsConfig::new(2, 2, 3, RoundStrategy::PgAdaptive, SeedSpec::new(2, 0));
        cfg.compress_limit = 1;
        let recs = run_rounds(&cfg).unwrap();
        assert!(recs.iter().any(|r| r.truncation_error > 0.0));
        for r in &recs {
            assert!(r.tradeoff_slack >= -1e-9);
        }
    }
}
