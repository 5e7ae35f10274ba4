//! Large-dimension predictions for Haar-random scramblers.
//!
//! The singular values of `U°/√(d_B·d_L)` follow a Marčenko–Pastur law whose
//! half-moment `I_κ = ₂F₁(½, −½; 2; κ⁻²)` fixes the averaged optimal fidelity.

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{HackError, Result};
use crate::tensor::ScramblerDims;

const SERIES_REL_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 100_000;

fn is_non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for real parameters and
/// `z ∈ [0, 1]`.
///
/// The power series is summed by term recursion. At `z = 1` a terminating
/// series is summed directly, otherwise the Gauss value
/// `Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b))` is used and requires `c − a − b > 0`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if ![a, b, c, z].iter().all(|x| x.is_finite()) {
        return Err(HackError::Argument("hyp2f1 parameters must be finite".into()));
    }
    if is_non_positive_integer(c) {
        return Err(HackError::Argument(format!("hyp2f1: c = {c} is a non-positive integer")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(HackError::Argument(format!("hyp2f1: z = {z} outside [0, 1]")));
    }
    let terminates = is_non_positive_integer(a) || is_non_positive_integer(b);
    if z == 1.0 && !terminates {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(HackError::Argument(format!("hyp2f1 diverges at z = 1 when c − a − b = {s} ≤ 0")));
        }
        return Ok(gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b)));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() < SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    Ok(sum)
}

/// `I_κ = ₂F₁(½, −½; 2; κ⁻²)` for `κ ≥ 1`.
pub fn half_moment_i(kappa: f64) -> Result<f64> {
    if !kappa.is_finite() || kappa < 1.0 {
        return Err(HackError::Argument(format!("half_moment_i needs kappa ≥ 1, got {kappa}; use 1/kappa below one")));
    }
    hyp2f1(0.5, -0.5, 2.0, 1.0 / (kappa * kappa))
}

/// Second-order expansion `I_κ ≈ 1 − 1/(8κ²)`.
pub fn half_moment_i_approx(kappa: f64) -> f64 {
    1.0 - 1.0 / (8.0 * kappa * kappa)
}

/// `m`-th moment `₂F₁(1−m, −m; 2; λ)` of the Marčenko–Pastur law with ratio
/// `λ ∈ (0, 1]`, defined for `m > −½`.
pub fn mth_moment(m: f64, lambda: f64) -> Result<f64> {
    if !m.is_finite() || m <= -0.5 {
        return Err(HackError::Argument(format!("mth_moment needs m > -1/2, got {m}")));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(HackError::Argument(format!("mth_moment needs lambda in (0, 1], got {lambda}")));
    }
    hyp2f1(1.0 - m, -m, 2.0, lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    KappaGe1,
    KappaLt1,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub kappa: f64,
    pub d_a: usize,
    pub d_k: usize,
    pub i_kappa: f64,
    pub p_opt_mean: f64,
    pub branch: Branch,
}

/// Haar-averaged optimal fidelity at `κ` with finite-size correction
/// `(1 − I²)/(d_A·d_K)`. Below `κ = 1` the half-moment is taken at `1/κ` and
/// the leading term scales by `κ²`.
pub fn asym_p_opt_kappa(kappa: f64, d_a: usize, d_k: usize) -> Result<AsymptoticPrediction> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(HackError::Argument(format!("kappa must be positive, got {kappa}")));
    }
    if d_a == 0 || d_k == 0 {
        return Err(HackError::Argument("d_A and d_K must be positive".into()));
    }
    let dadk = (d_a * d_k) as f64;
    let (branch, i_kappa, lead) = if kappa >= 1.0 {
        let i = half_moment_i(kappa)?;
        (Branch::KappaGe1, i, i * i)
    } else {
        let i = half_moment_i(1.0 / kappa)?;
        (Branch::KappaLt1, i, kappa * kappa * i * i)
    };
    Ok(AsymptoticPrediction { kappa, d_a, d_k, i_kappa, p_opt_mean: lead + (1.0 - i_kappa * i_kappa) / dadk, branch })
}

pub fn asym_p_opt(dims: &ScramblerDims) -> AsymptoticPrediction {
    asym_p_opt_kappa(dims.kappa(), dims.d_a, dims.d_k).expect("validated dims give a positive kappa")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_series_at_zero() {
        assert_eq!(hyp2f1(0.5, -0.5, 2.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn gauss_endpoint_gives_eight_over_three_pi() {
        let v = hyp2f1(0.5, -0.5, 2.0, 1.0).unwrap();
        assert!((v - 8.0 / (3.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn low_order_moments_are_polynomials() {
        for lambda in [0.25, 0.5, 1.0] {
            assert!((mth_moment(1.0, lambda).unwrap() - 1.0).abs() < 1e-15);
            assert!((mth_moment(2.0, lambda).unwrap() - (1.0 + lambda)).abs() < 1e-14);
            let m3 = 1.0 + 3.0 * lambda + lambda * lambda;
            assert!((mth_moment(3.0, lambda).unwrap() - m3).abs() < 1e-13);
        }
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(hyp2f1(0.5, 0.5, 0.0, 0.5).is_err());
        assert!(hyp2f1(0.5, 0.5, -2.0, 0.5).is_err());
        assert!(hyp2f1(0.5, 0.5, 2.0, 1.5).is_err());
        assert!(hyp2f1(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(half_moment_i(0.5).is_err());
        assert!(mth_moment(-0.5, 1.0).is_err());
        assert!(mth_moment(1.0, 0.0).is_err());
    }

    #[test]
    fn large_kappa_tends_to_one() {
        assert!((half_moment_i(1e6).unwrap() - 1.0).abs() < 1e-10);
        let p = asym_p_opt_kappa(1e6, 4, 4).unwrap();
        assert!((p.p_opt_mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn second_order_approximation_is_close_at_large_kappa() {
        for k in [2.0, 4.0, 10.0] {
            let d = (half_moment_i(k).unwrap() - half_moment_i_approx(k)).abs();
            assert!(d < 0.2 / k.powi(4));
        }
    }
}
