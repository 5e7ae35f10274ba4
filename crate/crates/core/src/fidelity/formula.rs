use super::{HackingStrategy, ProbeOperator};
use crate::error::{HackError, Result};
use crate::tensor::{
    abs_polar_parts, default_cutoff, nuclear_norm, partial_trace_first, polar_unitary, rotate_pi_half, ComplexMatrix,
    ScramblerDims, C64,
};

fn check_rotated(uo: &ComplexMatrix, dims: &ScramblerDims) -> Result<()> {
    if uo.shape() != (dims.rotated_rows(), dims.rotated_cols()) {
        return Err(HackError::Shape(format!(
            "rotated operator must be {}x{} for dims ({dims}), got {}x{}",
            dims.rotated_rows(),
            dims.rotated_cols(),
            uo.rows(),
            uo.cols()
        )));
    }
    Ok(())
}

fn check_probe(probe: &ProbeOperator, dims: &ScramblerDims) -> Result<()> {
    if probe.d_b() != dims.d_b {
        return Err(HackError::Shape(format!("probe acts on dimension {}, expected d_B = {}", probe.d_b(), dims.d_b)));
    }
    Ok(())
}

/// `M = (I_L ⊗ χ)·U°`, evaluated block by block.
pub fn apply_probe(uo: &ComplexMatrix, dims: &ScramblerDims, chi: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_rotated(uo, dims)?;
    let (d_b, d_l) = (dims.d_b, dims.d_l);
    if chi.shape() != (d_b, d_b) {
        return Err(HackError::Shape(format!("probe must be {d_b}x{d_b}, got {}x{}", chi.rows(), chi.cols())));
    }
    let cols = uo.cols();
    let mut out = ComplexMatrix::zeros(uo.rows(), cols);
    for i in 0..d_l {
        for bp in 0..d_b {
            for j in 0..d_b {
                let c = chi[(bp, j)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..cols {
                    out[(i * d_b + bp, col)] += c * uo[(i * d_b + j, col)];
                }
            }
        }
    }
    Ok(out)
}

/// `Tr[R·M]` with `R` on `C^N` acting on `M`'s rows through the leading
/// `d_L·d_B` coordinates and producing the target `K⊗A''` in the leading
/// `d_K·d_A` coordinates.
fn leading_trace(r: &ComplexMatrix, m: &ComplexMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for c in 0..m.cols() {
        for o in 0..m.rows() {
            acc += r[(c, o)] * m[(o, c)];
        }
    }
    acc
}

/// `Tr[R(I_L⊗χ)U°]` for a precomputed `U°`.
pub fn hack_amplitude(uo: &ComplexMatrix, dims: &ScramblerDims, strat: &HackingStrategy) -> Result<C64> {
    strat.check_dims(dims)?;
    let m = apply_probe(uo, dims, strat.probe().chi())?;
    Ok(leading_trace(strat.recovery(), &m))
}

pub fn p_hack_formula(u: &ComplexMatrix, dims: &ScramblerDims, strat: &HackingStrategy) -> Result<f64> {
    p_hack_rotated(&rotate_pi_half(u, dims)?, dims, strat)
}

pub fn p_hack_rotated(uo: &ComplexMatrix, dims: &ScramblerDims, strat: &HackingStrategy) -> Result<f64> {
    Ok(hack_amplitude(uo, dims, strat)?.norm_sqr() / dims.fidelity_norm())
}

/// Recovery unitary on `C^N` attaining `Tr[R·M] = ‖M‖₁`: the polar factor of
/// `M` zero-padded to `N x N`.
pub fn optimal_recovery(m: &ComplexMatrix, dims: &ScramblerDims) -> Result<ComplexMatrix> {
    let n = dims.recovery_dim();
    polar_unitary(&m.zero_padded(n, n))
}

pub fn p_me(u: &ComplexMatrix, dims: &ScramblerDims) -> Result<f64> {
    p_me_rotated(&rotate_pi_half(u, dims)?, dims)
}

/// `‖U°‖₁² / (d_A²·d_B·d_K)`.
pub fn p_me_rotated(uo: &ComplexMatrix, dims: &ScramblerDims) -> Result<f64> {
    check_rotated(uo, dims)?;
    let t = nuclear_norm(uo)?;
    Ok(t * t / (dims.fidelity_norm() * dims.d_b as f64))
}

pub fn p_pg(u: &ComplexMatrix, dims: &ScramblerDims) -> Result<(f64, ProbeOperator)> {
    p_pg_rotated(&rotate_pi_half(u, dims)?, dims)
}

/// `‖Tr_L|U°†|‖₂² / (d_A²·d_K)` and `χ̃ = Tr_L|U°†| / ‖Tr_L|U°†|‖₂`.
pub fn p_pg_rotated(uo: &ComplexMatrix, dims: &ScramblerDims) -> Result<(f64, ProbeOperator)> {
    check_rotated(uo, dims)?;
    let parts = abs_polar_parts(uo, default_cutoff(uo))?;
    let t = partial_trace_first(&parts.absdag, dims.d_l, dims.d_b)?;
    let n = t.frobenius_norm();
    let probe = ProbeOperator::normalized(t)?;
    Ok((n * n / dims.fidelity_norm(), probe))
}

pub fn p_chi(u: &ComplexMatrix, dims: &ScramblerDims, probe: &ProbeOperator) -> Result<(f64, ComplexMatrix)> {
    p_chi_rotated(&rotate_pi_half(u, dims)?, dims, probe)
}

/// `‖(I_L⊗χ)U°‖₁² / (d_A²·d_K)` and the recovery realizing it.
pub fn p_chi_rotated(uo: &ComplexMatrix, dims: &ScramblerDims, probe: &ProbeOperator) -> Result<(f64, ComplexMatrix)> {
    check_probe(probe, dims)?;
    let m = apply_probe(uo, dims, probe.chi())?;
    let t = nuclear_norm(&m)?;
    Ok((t * t / dims.fidelity_norm(), optimal_recovery(&m, dims)?))
}

pub fn p_mixed_probe(
    u: &ComplexMatrix,
    dims: &ScramblerDims,
    weights: &[f64],
    chis: &[ProbeOperator],
    r: &ComplexMatrix,
) -> Result<f64> {
    p_mixed_probe_rotated(&rotate_pi_half(u, dims)?, dims, weights, chis, r)
}

/// `Σᵢ pᵢ |Tr[R(I⊗χᵢ)U°]|² / (d_A²·d_K)` for a probe mixture.
pub fn p_mixed_probe_rotated(
    uo: &ComplexMatrix,
    dims: &ScramblerDims,
    weights: &[f64],
    chis: &[ProbeOperator],
    r: &ComplexMatrix,
) -> Result<f64> {
    if weights.len() != chis.len() || weights.is_empty() {
        return Err(HackError::Argument(format!(
            "mixture needs matching non-empty weights and probes, got {} and {}",
            weights.len(),
            chis.len()
        )));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(HackError::Argument("mixture weights must be non-negative".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(HackError::Argument(format!("mixture weights sum to {sum}, expected 1")));
    }
    let n = dims.recovery_dim();
    if r.shape() != (n, n) {
        return Err(HackError::Shape(format!(
            "recovery must be {n}x{n} for dims ({dims}), got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    let mut acc = 0.0;
    for (w, chi) in weights.iter().zip(chis) {
        check_probe(chi, dims)?;
        let m = apply_probe(uo, dims, chi.chi())?;
        acc += w * leading_trace(r, &m).norm_sqr();
    }
    Ok(acc / dims.fidelity_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::named_unitary;
    use crate::fidelity::UnitaryFamily;
    use crate::random::{haar_unitary, random_probe, SeedSpec};
    use crate::tensor::kron_identity_left;

    fn dims2() -> ScramblerDims {
        ScramblerDims::square(2, 2).unwrap()
    }

    #[test]
    fn apply_probe_matches_explicit_kron() {
        let dims = ScramblerDims::new(2, 3, 3, 2).unwrap();
        let u = haar_unitary(6, SeedSpec::new(3, 0)).unwrap();
        let uo = rotate_pi_half(&u, &dims).unwrap();
        let chi = random_probe(3, SeedSpec::new(3, 1)).unwrap();
        let direct = &kron_identity_left(2, chi.chi()) * &uo;
        assert!(apply_probe(&uo, &dims, chi.chi()).unwrap().distance(&direct) < 1e-14);
    }

    #[test]
    fn swap_is_perfectly_hackable() {
        let u = named_unitary(&UnitaryFamily::Swap, &dims2()).unwrap();
        assert!((p_me(&u, &dims2()).unwrap() - 1.0).abs() < 1e-12);
        let (p, _) = p_pg(&u, &dims2()).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let probe = ProbeOperator::maximally_entangled(2);
        let (pc, r) = p_chi(&u, &dims2(), &probe).unwrap();
        assert!((pc - 1.0).abs() < 1e-12);
        let strat = HackingStrategy::new(r, probe).unwrap();
        assert!((p_hack_formula(&u, &dims2(), &strat).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_hits_the_minimum() {
        let u = ComplexMatrix::identity(4);
        assert!((p_me(&u, &dims2()).unwrap() - 0.25).abs() < 1e-12);
        let probe = ProbeOperator::maximally_entangled(2);
        let (pc, r) = p_chi(&u, &dims2(), &probe).unwrap();
        assert!((pc - 0.25).abs() < 1e-12);
        let strat = HackingStrategy::new(r, probe).unwrap();
        assert!((p_hack_formula(&u, &dims2(), &strat).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn max_entangled_p_chi_is_p_me() {
        for (dims, s) in [
            (ScramblerDims::new(2, 4, 2, 4).unwrap(), 1),
            (ScramblerDims::new(3, 2, 2, 3).unwrap(), 2),
            (ScramblerDims::new(2, 3, 3, 2).unwrap(), 3),
        ] {
            let u = haar_unitary(dims.total(), SeedSpec::new(11, s)).unwrap();
            let (pc, _) = p_chi(&u, &dims, &ProbeOperator::maximally_entangled(dims.d_b)).unwrap();
            assert!((pc - p_me(&u, &dims).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn controlled_x_rewards_a_tailored_probe() {
        let dims = ScramblerDims::new(2, 3, 2, 3).unwrap();
        let u = named_unitary(&UnitaryFamily::ControlledX, &dims).unwrap();
        let chi = ComplexMatrix::from_real_diag(&[1.0, 1.0, 0.0]);
        let probe = ProbeOperator::normalized(chi).unwrap();
        let (pc, _) = p_chi(&u, &dims, &probe).unwrap();
        assert!(pc > p_me(&u, &dims).unwrap() + 1e-3);
    }

    #[test]
    fn mixture_validates_weights() {
        let dims = dims2();
        let u = ComplexMatrix::identity(4);
        let p = ProbeOperator::maximally_entangled(2);
        let r = ComplexMatrix::identity(4);
        assert!(p_mixed_probe(&u, &dims, &[0.5], std::slice::from_ref(&p), &r).is_err());
        assert!(p_mixed_probe(&u, &dims, &[0.5, 0.6], &[p.clone(), p.clone()], &r).is_err());
        let single = p_mixed_probe(&u, &dims, &[1.0], std::slice::from_ref(&p), &r).unwrap();
        let strat = HackingStrategy::new(r, p).unwrap();
        assert!((single - p_hack_formula(&u, &dims, &strat).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let dims = ScramblerDims::new(2, 3, 3, 2).unwrap();
        let u = ComplexMatrix::identity(4);
        assert!(matches!(p_me(&u, &dims), Err(HackError::Shape(_))));
        let u = ComplexMatrix::identity(6);
        let probe = ProbeOperator::maximally_entangled(2);
        assert!(matches!(p_chi(&u, &dims, &probe), Err(HackError::Shape(_))));
    }
}
