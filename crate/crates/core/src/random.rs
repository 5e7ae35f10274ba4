//! Reproducible random ensembles.
//!
//! Every sampler takes a [`SeedSpec`]: a master seed plus a stream index that
//! selects an independent ChaCha20 keystream. Monte Carlo trials get one stream
//! each, so results do not depend on how trials are scheduled.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HackError, Result};
use crate::fidelity::ProbeOperator;
use crate::limits::check_elements;
use crate::tensor::{vdot, vector_norm, ComplexMatrix, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Deterministic sub-stream, for callers that need several independent
    /// draws (e.g. one scrambler per round) under a single trial seed.
    pub fn child(&self, index: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_index: splitmix64(self.stream_index ^ splitmix64(index.wrapping_add(0x5EED))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parses a seed given as decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse::<u64>(),
    };
    parsed.map_err(|e| HackError::Argument(format!("invalid seed '{s}': {e}")))
}

impl FromStr for SeedSpec {
    type Err = HackError;

    /// `"<seed>"` or `"<seed>:<stream>"`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((m, k)) => Ok(Self::new(parse_seed(m)?, parse_seed(k)?)),
            None => Ok(Self::new(parse_seed(s)?, 0)),
        }
    }
}

fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with `E|z|² = 1` entries.
pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn haar_unitary(dim: usize, seed: SeedSpec) -> Result<ComplexMatrix> {
    haar_unitary_with(dim, &mut seed.rng())
}

/// Haar unitary from a Ginibre sample: QR, then the columns of Q are rephased
/// by the phases of R's diagonal so the law is exactly Haar.
pub fn haar_unitary_with<R: Rng>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(HackError::Argument("Haar dimension must be positive".into()));
    }
    check_elements("Haar unitary", dim as u128 * dim as u128)?;
    let g = ginibre(dim, dim, rng).to_nalgebra();
    let qr = QR::new(g);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(&q))
}

/// Random probe from a normalized Ginibre sample.
pub fn random_probe(d_b: usize, seed: SeedSpec) -> Result<ProbeOperator> {
    if d_b == 0 {
        return Err(HackError::Argument("probe dimension must be positive".into()));
    }
    ProbeOperator::normalized(ginibre(d_b, d_b, &mut seed.rng()))
}

/// Uniformly random unit vector (the first column of a Haar unitary).
pub fn haar_state<R: Rng>(dim: usize, rng: &mut R) -> StateVector {
    let mut v: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
    let n = vector_norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// Random unit vector orthogonal to the unit vector `to`.
pub fn haar_state_orthogonal<R: Rng>(to: &[C64], rng: &mut R) -> Result<StateVector> {
    if to.len() < 2 {
        return Err(HackError::Argument("no orthogonal direction exists in dimension 1".into()));
    }
    loop {
        let mut v = haar_state(to.len(), rng);
        let ov = vdot(to, &v);
        v.iter_mut().zip(to).for_each(|(x, t)| *x -= ov * t);
        let n = vector_norm(&v);
        if n > 1e-6 {
            v.iter_mut().for_each(|z| *z /= n);
            return Ok(v);
        }
    }
}

const MP_GRID: usize = 100_001;

/// Marčenko–Pastur law with ratio `λ ∈ (0, 1]`, density
/// `√((λ₊−x)(x−λ₋)) / (2πλx)` on `[λ₋, λ₊]`, `λ± = (1 ± √λ)²`.
///
/// Sampling inverts a CDF tabulated in the angle `θ` of
/// `x = (1+λ) − 2√λ·cos θ`, where the density becomes the bounded function
/// `(2/π)·sin²θ / x(θ)`; this keeps the table accurate at the `1/√x` edge
/// of the `λ = 1` law.
#[derive(Clone, Debug)]
pub struct MarchenkoPastur {
    lambda: f64,
    cdf: Vec<f64>,
}

impl MarchenkoPastur {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(HackError::Argument(format!("Marchenko-Pastur ratio must lie in (0, 1], got {lambda}")));
        }
        let h = PI / (MP_GRID - 1) as f64;
        let g: Vec<f64> = (0..MP_GRID).map(|k| Self::theta_density(lambda, k as f64 * h)).collect();
        let mut cdf = Vec::with_capacity(MP_GRID);
        cdf.push(0.0);
        let mut acc = 0.0;
        for k in 1..MP_GRID {
            acc += 0.5 * h * (g[k - 1] + g[k]);
            cdf.push(acc);
        }
        let total = acc;
        cdf.iter_mut().for_each(|c| *c /= total);
        Ok(Self { lambda, cdf })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(λ₋, λ₊)`.
    pub fn support(&self) -> (f64, f64) {
        let s = self.lambda.sqrt();
        ((1.0 - s).powi(2), (1.0 + s).powi(2))
    }

    /// Density in `x`.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * self.lambda * x)
    }

    fn x_of_theta(lambda: f64, theta: f64) -> f64 {
        (1.0 + lambda) - 2.0 * lambda.sqrt() * theta.cos()
    }

    /// Density with respect to θ.
    fn theta_density(lambda: f64, theta: f64) -> f64 {
        if lambda == 1.0 {
            // sin²θ / (2 − 2cos θ) simplifies exactly.
            return (1.0 + theta.cos()) / PI;
        }
        let s = theta.sin();
        (2.0 / PI) * s * s / Self::x_of_theta(lambda, theta)
    }

    /// Inverse CDF with linear interpolation in θ.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let k = match self.cdf.binary_search_by(|c| c.total_cmp(&u)) {
            Ok(k) => k.min(MP_GRID - 2),
            Err(k) => k.saturating_sub(1).min(MP_GRID - 2),
        };
        let (c0, c1) = (self.cdf[k], self.cdf[k + 1]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        let h = PI / (MP_GRID - 1) as f64;
        let theta = (k as f64 + frac.clamp(0.0, 1.0)) * h;
        let (lo, hi) = self.support();
        Self::x_of_theta(self.lambda, theta).clamp(lo, hi)
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.random::<f64>())).collect()
    }
}

pub fn marchenko_pastur_sample(lambda: f64, n: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    let mp = MarchenkoPastur::new(lambda)?;
    Ok(mp.sample(n, &mut seed.rng()))
}
