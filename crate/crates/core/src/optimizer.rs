//! Maximization of `f(χ) = ‖(I_L⊗χ)U°‖₁` over unit-norm probes.
//!
//! With `M = (I_L⊗χ)U° = UΣV†`, the recovery maximizing `Tr[RM]` is the polar
//! factor and `|M†|⁻¹M = UV†`. Holding that recovery fixed, the best probe is
//! `G/‖G‖₂` with `G = Tr_L[|M†|⁻¹M·U°†]`. Alternating the two exact steps is
//! the fixed-point method; its fidelity never decreases. The gradient method
//! follows `δf/δZ† = (G − ‖M‖₁·Z/‖Z‖₂)/(2‖Z‖₂)` for an unnormalized `Z`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HackError, Result};
use crate::fidelity::apply_probe;
use crate::fidelity::{p_me_rotated, p_pg_rotated, two_qubit_exact, FidelityReport, ProbeOperator};
use crate::random::{random_probe, SeedSpec};
use crate::tensor::{
    abs_polar_parts, default_cutoff, partial_trace_first, rotate_pi_half, ComplexMatrix, ScramblerDims,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    GradientAscent,
}

impl FromStr for Method {
    type Err = HackError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_point" => Ok(Self::FixedPoint),
            "gradient_ascent" => Ok(Self::GradientAscent),
            other => {
                Err(HackError::Argument(format!("unknown method '{other}' (expected fixed_point or gradient_ascent)")))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Initial step ε of the gradient method.
    pub step_eps: f64,
    /// Stop once the fidelity changes by less than this between iterations.
    pub tol: f64,
    pub max_iters: usize,
    /// Relative singular-value cutoff; `None` uses the size-scaled default.
    pub cutoff: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { method: Method::FixedPoint, step_eps: 1.0, tol: 1e-12, max_iters: 10_000, cutoff: None }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(HackError::Argument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(HackError::Argument("max_iters must be at least 1".into()));
        }
        if !self.step_eps.is_finite() || self.step_eps <= 0.0 {
            return Err(HackError::Argument(format!("step_eps must be positive, got {}", self.step_eps)));
        }
        if let Some(c) = self.cutoff {
            if c.is_nan() || c <= 0.0 {
                return Err(HackError::Argument(format!("cutoff must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub fidelity: f64,
    /// `‖χ_{k+1} − χ_k‖₂`; zero for the last recorded point.
    pub delta_chi: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvergenceTrace {
    pub points: Vec<TracePoint>,
    pub converged: bool,
    /// Set when the gradient method exhausted its step halvings.
    pub stagnated: bool,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.points.len()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,fidelity,delta_chi\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{}", p.iteration, p.fidelity, p.delta_chi);
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub p_opt: f64,
    pub chi_opt: ProbeOperator,
    pub trace: ConvergenceTrace,
}

/// Everything one evaluation at `χ = Z/‖Z‖₂` produces.
struct Evaluation {
    fidelity: f64,
    trace_norm: f64,
    /// `G = Tr_L[|M†|⁻¹M·U°†]`.
    g: ComplexMatrix,
}

fn evaluate(uo: &ComplexMatrix, dims: &ScramblerDims, chi: &ComplexMatrix, cutoff: Option<f64>) -> Result<Evaluation> {
    let m = apply_probe(uo, dims, chi)?;
    let parts = abs_polar_parts(&m, cutoff.unwrap_or_else(|| default_cutoff(&m)))?;
    let g = partial_trace_first(&(&parts.isometry_part * &uo.adjoint()), dims.d_l, dims.d_b)?;
    Ok(Evaluation {
        fidelity: parts.trace_norm * parts.trace_norm / dims.fidelity_norm(),
        trace_norm: parts.trace_norm,
        g,
    })
}

fn unit(z: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = z.frobenius_norm();
    if n == 0.0 || !n.is_finite() {
        return Err(HackError::Argument("probe iterate must be nonzero".into()));
    }
    Ok(z.scale_real(1.0 / n))
}

/// `δf/δZ†` at `Z`, with `f(Z) = ‖(I_L⊗Z/‖Z‖₂)U°‖₁`.
pub fn operator_gradient(
    u: &ComplexMatrix,
    dims: &ScramblerDims,
    z: &ComplexMatrix,
    cutoff: Option<f64>,
) -> Result<ComplexMatrix> {
    let uo = rotate_pi_half(u, dims)?;
    gradient_rotated(&uo, dims, z, cutoff)
}

fn gradient_rotated(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    z: &ComplexMatrix,
    cutoff: Option<f64>,
) -> Result<ComplexMatrix> {
    let zn = z.frobenius_norm();
    let chi = unit(z)?;
    let ev = evaluate(uo, dims, &chi, cutoff)?;
    Ok((&ev.g - &chi.scale_real(ev.trace_norm)).scale_real(0.5 / zn))
}

#[derive(Clone, Debug)]
pub struct AscentStep {
    pub z: ComplexMatrix,
    pub fidelity: f64,
    /// Step size actually taken.
    pub step_eps: f64,
    pub halvings: usize,
    /// No halving produced a non-decreasing fidelity; `z` is unchanged.
    pub stagnated: bool,
}

const MAX_HALVINGS: usize = 30;

/// One backtracking step of
/// `Z ← (1 − (ε/2)·‖M‖₁/‖Z‖₂)·Z + (ε/2)·G`.
pub fn ascent_step(
    u: &ComplexMatrix,
    dims: &ScramblerDims,
    z: &ComplexMatrix,
    cfg: &OptimizerConfig,
) -> Result<AscentStep> {
    if cfg.method != Method::GradientAscent {
        return Err(HackError::Argument("ascent_step needs method gradient_ascent".into()));
    }
    cfg.validate()?;
    let uo = rotate_pi_half(u, dims)?;
    let chi = unit(z)?;
    let ev = evaluate(&uo, dims, &chi, cfg.cutoff)?;
    ascent_step_rotated(&uo, dims, z, &ev, cfg.step_eps, cfg.cutoff)
}

fn ascent_step_rotated(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    z: &ComplexMatrix,
    ev: &Evaluation,
    eps0: f64,
    cutoff: Option<f64>,
) -> Result<AscentStep> {
    let zn = z.frobenius_norm();
    let mut eps = eps0;
    for halvings in 0..=MAX_HALVINGS {
        let next = &z.scale_real(1.0 - 0.5 * eps * ev.trace_norm / zn) + &ev.g.scale_real(0.5 * eps);
        if next.frobenius_norm() > 0.0 {
            let f = evaluate(uo, dims, &unit(&next)?, cutoff)?.fidelity;
            if f >= ev.fidelity {
                return Ok(AscentStep { z: next, fidelity: f, step_eps: eps, halvings, stagnated: false });
            }
        }
        eps *= 0.5;
    }
    Ok(AscentStep { z: z.clone(), fidelity: ev.fidelity, step_eps: eps, halvings: MAX_HALVINGS, stagnated: true })
}

/// Maximizes the probe fidelity from `Z₁ = I_B`, or from a random probe when
/// `seed` is given. Returns the best probe seen (phase-gauged) and its value.
pub fn optimize_probe(
    u: &ComplexMatrix,
    dims: &ScramblerDims,
    cfg: &OptimizerConfig,
    seed: Option<SeedSpec>,
) -> Result<OptimizeResult> {
    let uo = rotate_pi_half(u, dims)?;
    optimize_probe_rotated(&uo, dims, cfg, seed)
}

pub fn optimize_probe_rotated(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    cfg: &OptimizerConfig,
    seed: Option<SeedSpec>,
) -> Result<OptimizeResult> {
    cfg.validate()?;
    let start = match seed {
        Some(s) => random_probe(dims.d_b, s)?.chi().clone(),
        None => ComplexMatrix::identity(dims.d_b),
    };
    match cfg.method {
        Method::FixedPoint => fixed_point(uo, dims, start, cfg),
        Method::GradientAscent => gradient_ascent(uo, dims, start, cfg),
    }
}

fn finish(best_chi: ComplexMatrix, best: f64, trace: ConvergenceTrace) -> Result<OptimizeResult> {
    Ok(OptimizeResult { p_opt: best, chi_opt: ProbeOperator::normalized(best_chi)?.gauge_fixed(), trace })
}

fn fixed_point(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    start: ComplexMatrix,
    cfg: &OptimizerConfig,
) -> Result<OptimizeResult> {
    let mut chi = unit(&start)?;
    let mut trace = ConvergenceTrace::default();
    let mut best = f64::NEG_INFINITY;
    let mut best_chi = chi.clone();
    let mut prev: Option<f64> = None;
    for iteration in 1..=cfg.max_iters {
        let ev = evaluate(uo, dims, &chi, cfg.cutoff)?;
        if ev.fidelity > best {
            best = ev.fidelity;
            best_chi = chi.clone();
        }
        let done = prev.is_some_and(|p| (ev.fidelity - p).abs() < cfg.tol);
        let next = if done || iteration == cfg.max_iters {
            None
        } else {
            Some(unit(&ev.g).map_err(|_| HackError::Degenerate("probe update vanished".into()))?)
        };
        let delta_chi = next.as_ref().map_or(0.0, |n| n.distance(&chi));
        trace.points.push(TracePoint { iteration, fidelity: ev.fidelity, delta_chi });
        if done {
            trace.converged = true;
            break;
        }
        prev = Some(ev.fidelity);
        match next {
            Some(n) => chi = n,
            None => break,
        }
    }
    finish(best_chi, best, trace)
}

fn gradient_ascent(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    start: ComplexMatrix,
    cfg: &OptimizerConfig,
) -> Result<OptimizeResult> {
    let mut z = start;
    let mut trace = ConvergenceTrace::default();
    let mut ev = evaluate(uo, dims, &unit(&z)?, cfg.cutoff)?;
    let mut eps = cfg.step_eps;
    for iteration in 1..=cfg.max_iters {
        if iteration == cfg.max_iters {
            trace.points.push(TracePoint { iteration, fidelity: ev.fidelity, delta_chi: 0.0 });
            break;
        }
        let step = ascent_step_rotated(uo, dims, &z, &ev, eps, cfg.cutoff)?;
        let delta_chi = unit(&step.z)?.distance(&unit(&z)?);
        trace.points.push(TracePoint { iteration, fidelity: ev.fidelity, delta_chi });
        if step.stagnated {
            trace.stagnated = true;
            break;
        }
        let change = step.fidelity - ev.fidelity;
        // A step that needed no halving may try a larger one next time.
        eps = if step.halvings == 0 { (2.0 * step.step_eps).min(cfg.step_eps) } else { step.step_eps };
        z = step.z;
        ev = evaluate(uo, dims, &unit(&z)?, cfg.cutoff)?;
        if change.abs() < cfg.tol {
            trace.points.push(TracePoint { iteration: iteration + 1, fidelity: ev.fidelity, delta_chi: 0.0 });
            trace.converged = true;
            break;
        }
    }
    let best = ev.fidelity;
    finish(unit(&z)?, best, trace)
}

/// ME, PG and optimized fidelities of one scrambler.
pub fn fidelity_report(u: &ComplexMatrix, dims: &ScramblerDims, cfg: &OptimizerConfig) -> Result<FidelityReport> {
    let uo = rotate_pi_half(u, dims)?;
    let p_me = p_me_rotated(&uo, dims)?;
    let (p_pg, _) = p_pg_rotated(&uo, dims)?;
    let opt = optimize_probe_rotated(&uo, dims, cfg, None)?;
    let two_qubit =
        if dims.d_a == 2 && dims.d_b == 2 && dims.is_square_case() { Some(two_qubit_exact(u)?) } else { None };
    Ok(FidelityReport {
        d_a: dims.d_a,
        d_b: dims.d_b,
        d_k: dims.d_k,
        d_l: dims.d_l,
        kappa: dims.kappa(),
        p_me,
        p_pg,
        p_opt: opt.p_opt,
        iterations: opt.trace.iterations(),
        converged: opt.trace.converged,
        residual_bound_chain: (p_pg - p_me).min(opt.p_opt - p_pg),
        two_qubit,
        chi_opt: opt.chi_opt,
    })
}
