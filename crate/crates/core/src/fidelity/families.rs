use std::str::FromStr;

use crate::error::{HackError, Result};
use crate::random::{haar_unitary, SeedSpec};
use crate::tensor::{ComplexMatrix, ScramblerDims, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitaryFamily {
    /// `I_A ⊗ I_B`; needs `d_K = d_A`.
    Identity,
    /// `|a⟩_A|b⟩_B ↦ |b⟩_K|a⟩_L`; needs `d_K = d_B`.
    Swap,
    /// `I_A⊗|0⟩⟨0|_B + X_A⊗(I_B − |0⟩⟨0|_B)`; needs `d_A = d_K = 2`.
    ControlledX,
    Haar(SeedSpec),
}

impl FromStr for UnitaryFamily {
    type Err = HackError;

    /// Parses the names `identity`, `swap`, `controlled_x`; `haar` takes
    /// seed 0 and is normally built with an explicit seed instead.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "swap" => Ok(Self::Swap),
            "controlled_x" => Ok(Self::ControlledX),
            "haar" => Ok(Self::Haar(SeedSpec::new(0, 0))),
            other => Err(HackError::Argument(format!(
                "unknown unitary family '{other}' (expected identity, swap, controlled_x or haar)"
            ))),
        }
    }
}

pub fn named_unitary(family: &UnitaryFamily, dims: &ScramblerDims) -> Result<ComplexMatrix> {
    let ScramblerDims { d_a, d_b, d_k, d_l } = *dims;
    let n = dims.total();
    let one = C64::new(1.0, 0.0);
    match family {
        UnitaryFamily::Identity => {
            if d_k != d_a {
                return Err(HackError::Argument(format!("identity needs d_K = d_A, got ({dims})")));
            }
            Ok(ComplexMatrix::identity(n))
        }
        UnitaryFamily::Swap => {
            if d_k != d_b {
                return Err(HackError::Argument(format!("swap needs d_K = d_B, got ({dims})")));
            }
            let mut u = ComplexMatrix::zeros(n, n);
            for a in 0..d_a {
                for b in 0..d_b {
                    u[(b * d_l + a, a * d_b + b)] = one;
                }
            }
            Ok(u)
        }
        UnitaryFamily::ControlledX => {
            if d_a != 2 || d_k != 2 {
                return Err(HackError::Argument(format!(
                    "controlled_x needs a qubit control, d_A = d_K = 2, got ({dims})"
                )));
            }
            let mut u = ComplexMatrix::zeros(n, n);
            for a in 0..2 {
                for b in 0..d_b {
                    let out_a = if b == 0 { a } else { 1 - a };
                    u[(out_a * d_b + b, a * d_b + b)] = one;
                }
            }
            Ok(u)
        }
        UnitaryFamily::Haar(seed) => haar_unitary(n, *seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_swap_permutation() {
        let dims = ScramblerDims::square(2, 2).unwrap();
        let u = named_unitary(&UnitaryFamily::Swap, &dims).unwrap();
        for (col, row) in [0, 2, 1, 3].into_iter().enumerate() {
            assert_eq!(u[(row, col)], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn families_are_unitary() {
        let dims = ScramblerDims::new(2, 3, 2, 3).unwrap();
        for f in [UnitaryFamily::Identity, UnitaryFamily::ControlledX, UnitaryFamily::Haar(SeedSpec::new(1, 1))] {
            assert!(named_unitary(&f, &dims).unwrap().unitarity_defect() < 1e-12);
        }
        let dims = ScramblerDims::new(2, 3, 3, 2).unwrap();
        assert!(named_unitary(&UnitaryFamily::Swap, &dims).unwrap().unitarity_defect() < 1e-15);
    }

    #[test]
    fn unknown_family_is_an_argument_error() {
        assert!(matches!("cnot".parse::<UnitaryFamily>(), Err(HackError::Argument(_))));
        let dims = ScramblerDims::new(2, 3, 3, 2).unwrap();
        assert!(named_unitary(&UnitaryFamily::Identity, &dims).is_err());
    }
}
