//! Hayden–Preskill decoding as the dual of hacking.
//!
//! The decoder is parametrized by a coisometry `W^⊤ : L⊗B′ → K⊗A` and enters
//! through `R = W^⊤·F` with `F` the swap of the two `B`-sized factors. The
//! optimal decoding fidelity `max_W ‖Tr_L[U°W^⊤F]‖₂² / (d_A·d_B²)` is found by
//! alternating exact maximizations over `W` (polar factor) and over a unit
//! dual vector `Y` (Cauchy–Schwarz), starting from `Y = I/√d_B`.

use serde::Serialize;

use crate::error::{HackError, Result};
use crate::tensor::{
    kron_identity_left, partial_trace_first, polar_contraction, rotate_pi_half, ComplexMatrix, ScramblerDims, C64,
};

#[derive(Clone, Debug, Serialize)]
pub struct HpDualResult {
    pub p_hp: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Swap of `C^d ⊗ C^d`.
fn swap(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for x in 0..d {
        for y in 0..d {
            f[(y * d + x, x * d + y)] = C64::new(1.0, 0.0);
        }
    }
    f
}

pub fn p_hp_dual(u: &ComplexMatrix, dims: &ScramblerDims, tol: f64, max_iters: usize) -> Result<HpDualResult> {
    if !dims.is_square_case() {
        return Err(HackError::Unsupported(format!(
            "the decoding dual is defined for d_A = d_K and d_B = d_L, got ({dims})"
        )));
    }
    if tol.is_nan() || tol <= 0.0 || max_iters == 0 {
        return Err(HackError::Argument("tol must be positive and max_iters at least 1".into()));
    }
    let (d_a, d_b) = (dims.d_a, dims.d_b);
    let uo = rotate_pi_half(u, dims)?;
    let f = swap(d_b);
    let norm = (d_a * d_b * d_b) as f64;

    let uo_f = |wt: &ComplexMatrix| -> ComplexMatrix { &(&uo * wt) * &f };
    let w_step = |y: &ComplexMatrix| -> Result<ComplexMatrix> {
        // Maximizes Re Tr(W^⊤ N) with N = F (I⊗Y†) U°.
        let iy = kron_identity_left(d_b, &y.adjoint());
        polar_contraction(&(&(&f * &iy) * &uo))
    };

    let y0 = ComplexMatrix::identity(d_b).scale_real(1.0 / (d_b as f64).sqrt());
    let mut t = partial_trace_first(&uo_f(&w_step(&y0)?), d_b, d_b)?;
    let mut value = t.frobenius_norm().powi(2) / norm;
    let mut iterations = 1;
    let mut converged = false;
    while iterations < max_iters {
        let tn = t.frobenius_norm();
        if tn == 0.0 {
            return Err(HackError::Degenerate("decoder overlap vanished".into()));
        }
        let y = t.scale_real(1.0 / tn);
        t = partial_trace_first(&uo_f(&w_step(&y)?), d_b, d_b)?;
        let next = t.frobenius_norm().powi(2) / norm;
        iterations += 1;
        let delta = (next - value).abs();
        value = value.max(next);
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(HpDualResult { p_hp: value, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_matrix_is_an_involution() {
        let f = swap(3);
        assert_eq!(&f * &f, ComplexMatrix::identity(9));
    }

    #[test]
    fn non_square_layout_is_unsupported() {
        let dims = ScramblerDims::new(2, 3, 3, 2).unwrap();
        let u = ComplexMatrix::identity(6);
        assert!(matches!(p_hp_dual(&u, &dims, 1e-12, 100), Err(HackError::Unsupported(_))));
    }
}
