//! Brute-force evaluation of the hacking protocol on explicit state vectors.
//!
//! Nothing here touches `U°`: the input state is built, `U` and `R` are
//! applied as matrices on their own registers, and the target overlap is read
//! off directly.

use super::tradeoff::JointState;
use super::HackingStrategy;
use crate::error::Result;
use crate::limits::check_elements;
use crate::tensor::{ComplexMatrix, ScramblerDims, C64};

/// Post-recovery state on `K ⊗ A′ ⊗ Out`, where `Out = C^N` carries Bob's
/// output and the target pair `(K″, A″)` sits at `Out` index `k″·d_A + a″`.
///
/// Input: `(1/√d_A) Σ_a |a⟩_A|a⟩_{A′} ⊗ Σ_j |j⟩_B χ|j⟩_{B′}`. `U` acts on `A⊗B`,
/// then `R` acts on `L⊗B′` embedded as the leading `d_L·d_B` coordinates of
/// `C^N`.
pub fn post_recovery_state(u: &ComplexMatrix, dims: &ScramblerDims, strat: &HackingStrategy) -> Result<JointState> {
    strat.check_dims(dims)?;
    let ScramblerDims { d_a, d_b, d_k, d_l } = *dims;
    let n = dims.recovery_dim();
    check_elements("oracle state", (d_k * d_a * n) as u128)?;
    check_elements("oracle input state", (dims.total() * d_a * d_b) as u128)?;
    if u.shape() != (dims.total(), dims.total()) {
        return Err(crate::error::HackError::Shape(format!(
            "scrambler must be {0}x{0} for dims ({dims}), got {1}x{2}",
            dims.total(),
            u.rows(),
            u.cols()
        )));
    }
    let chi = strat.probe().chi();
    let r = strat.recovery();

    // Input as a matrix S[(a, j), (a′, b′)]: the A⊗B part indexes rows so
    // that `U ⊗ I` becomes a left multiplication.
    let amp = 1.0 / (d_a as f64).sqrt();
    let s = ComplexMatrix::from_fn(d_a * d_b, d_a * d_b, |row, col| {
        let (a, j) = (row / d_b, row % d_b);
        let (ap, bp) = (col / d_b, col % d_b);
        if a == ap {
            chi[(bp, j)] * amp
        } else {
            C64::new(0.0, 0.0)
        }
    });
    // T[(k, i), (a′, b′)]
    let t = u * &s;

    let mut phi = vec![C64::new(0.0, 0.0); d_k * d_a * n];
    for k in 0..d_k {
        for ap in 0..d_a {
            let base = (k * d_a + ap) * n;
            for i in 0..d_l {
                for bp in 0..d_b {
                    let x = t[(k * d_l + i, ap * d_b + bp)];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let input = i * d_b + bp;
                    for o in 0..n {
                        phi[base + o] += r[(o, input)] * x;
                    }
                }
            }
        }
    }
    JointState::new(phi, *dims, 1)
}

pub fn p_hack_oracle(u: &ComplexMatrix, dims: &ScramblerDims, strat: &HackingStrategy) -> Result<f64> {
    Ok(post_recovery_state(u, dims, strat)?.target_overlap())
}
