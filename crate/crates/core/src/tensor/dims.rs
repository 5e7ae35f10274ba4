use serde::{Deserialize, Serialize};

use crate::error::{HackError, Result};

/// Subsystem dimensions of a scrambler `U: A⊗B → K⊗L`.
///
/// Alice owns the input `A` and output `K`; Bob owns the input `B` (plus the
/// reference `B'` of the same size) and the output `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScramblerDims {
    pub d_a: usize,
    pub d_b: usize,
    pub d_k: usize,
    pub d_l: usize,
}

impl ScramblerDims {
    pub fn new(d_a: usize, d_b: usize, d_k: usize, d_l: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_k == 0 || d_l == 0 {
            return Err(HackError::Argument(format!("dimensions must be positive, got ({d_a},{d_b},{d_k},{d_l})")));
        }
        if d_a * d_b != d_k * d_l {
            return Err(HackError::Argument(format!(
                "dimensions ({d_a},{d_b},{d_k},{d_l}) violate d_A·d_B = d_K·d_L ({} != {})",
                d_a * d_b,
                d_k * d_l
            )));
        }
        let dims = Self { d_a, d_b, d_k, d_l };
        debug_assert!((dims.kappa_from_all() - dims.kappa()).abs() <= 1e-12 * dims.kappa());
        Ok(dims)
    }

    /// Square layout `K ≅ A`, `L ≅ B`.
    pub fn square(d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(d_a, d_b, d_a, d_b)
    }

    /// Black-hole layout: a `d_m`-dimensional qudit falls into a `d_bh`-dimensional
    /// interior and an equal-size qudit is emitted.
    pub fn black_hole(d_m: usize, d_bh: usize) -> Result<Self> {
        Self::new(d_m, d_bh, d_bh, d_m)
    }

    /// Parses `"dA,dB,dK,dL"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| {
                p.trim().parse::<usize>().map_err(|e| HackError::Argument(format!("bad dimension '{p}' in '{s}': {e}")))
            })
            .collect::<Result<_>>()?;
        match parts[..] {
            [a, b, k, l] => Self::new(a, b, k, l),
            _ => Err(HackError::Argument(format!("expected four comma-separated dimensions dA,dB,dK,dL, got '{s}'"))),
        }
    }

    /// κ = d_B / d_K.
    pub fn kappa(&self) -> f64 {
        self.d_b as f64 / self.d_k as f64
    }

    fn kappa_from_all(&self) -> f64 {
        ((self.d_b * self.d_l) as f64 / (self.d_a * self.d_k) as f64).sqrt()
    }

    /// Side of the scrambler matrix, `d_A·d_B`.
    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    /// Rows of the rotated operator: the `L⊗B'` space.
    pub fn rotated_rows(&self) -> usize {
        self.d_l * self.d_b
    }

    /// Columns of the rotated operator: the `K⊗A'` space.
    pub fn rotated_cols(&self) -> usize {
        self.d_k * self.d_a
    }

    /// Side of the recovery unitary.
    ///
    /// Equals `d_L·d_B` whenever κ ≥ 1. For κ < 1 Bob's `L⊗B'` is too small to
    /// hold the `K⊗A''` target and is embedded into a `d_K·d_A` space.
    pub fn recovery_dim(&self) -> usize {
        self.rotated_rows().max(self.rotated_cols())
    }

    /// Normalization `d_A²·d_K` of the hacking fidelity.
    pub fn fidelity_norm(&self) -> f64 {
        (self.d_a * self.d_a * self.d_k) as f64
    }

    pub fn is_square_case(&self) -> bool {
        self.d_a == self.d_k && self.d_b == self.d_l
    }
}

impl std::fmt::Display for ScramblerDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.d_a, self.d_b, self.d_k, self.d_l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_agrees_with_symmetric_definition() {
        for (a, b, k, l) in [(2, 4, 2, 4), (4, 8, 4, 8), (2, 3, 3, 2), (3, 4, 2, 6), (2, 2, 4, 1)] {
            let d = ScramblerDims::new(a, b, k, l).unwrap();
            assert!((d.kappa() - d.kappa_from_all()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_inconsistent_products() {
        let err = ScramblerDims::new(2, 3, 2, 2).unwrap_err();
        assert!(err.to_string().contains("(2,3,2,2)"));
        assert!(ScramblerDims::parse("2,2,2").is_err());
        assert_eq!(ScramblerDims::parse(" 4, 8,4,8").unwrap(), ScramblerDims::square(4, 8).unwrap());
    }
}
