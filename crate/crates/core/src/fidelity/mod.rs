//! Hacking fidelities of a scrambler `U: A⊗B → K⊗L`.
//!
//! Everything closed-form is expressed through the rotated operator
//! `U° : K⊗A → L⊗B` and the probe-dressed `M = (I_L⊗χ)U°`. The state-vector
//! oracle in [`oracle`] recomputes the same numbers from scratch and pins the
//! index conventions.

mod duality;
mod families;
mod formula;
mod oracle;
mod tradeoff;
mod two_qubit;

use serde::{Serialize, Serializer};

use crate::error::{HackError, Result};
use crate::matrix_io::MatrixFile;
use crate::tensor::{ComplexMatrix, ScramblerDims, StateVector, C64};

pub use duality::{p_hp_dual, HpDualResult};
pub use families::{named_unitary, UnitaryFamily};
pub use formula::{
    apply_probe, hack_amplitude, optimal_recovery, p_chi, p_chi_rotated, p_hack_formula, p_hack_rotated, p_me,
    p_me_rotated, p_mixed_probe, p_mixed_probe_rotated, p_pg, p_pg_rotated,
};
pub use oracle::{p_hack_oracle, post_recovery_state};
pub use tradeoff::{trade_off_terms, JointState, TradeOff};
pub use two_qubit::{two_qubit_exact, TwoQubitParams};

/// Bob's probe `|φ⟩_{BB′} = Σ_j |j⟩_B ⊗ χ|j⟩_{B′}`, stored as `χ` with
/// `‖χ‖₂ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOperator {
    chi: ComplexMatrix,
}

const PROBE_NORM_TOL: f64 = 1e-10;

impl ProbeOperator {
    /// Wraps an already-normalized square `chi`.
    pub fn new(chi: ComplexMatrix) -> Result<Self> {
        if !chi.is_square() {
            return Err(HackError::Shape(format!("probe operator must be square, got {}x{}", chi.rows(), chi.cols())));
        }
        let n = chi.frobenius_norm();
        if (n - 1.0).abs() > PROBE_NORM_TOL {
            return Err(HackError::Argument(format!("probe operator has norm {n}, expected 1")));
        }
        Ok(Self { chi })
    }

    /// Rescales `m` to unit Frobenius norm.
    pub fn normalized(m: ComplexMatrix) -> Result<Self> {
        let n = m.frobenius_norm();
        if n == 0.0 {
            return Err(HackError::Degenerate("zero operator cannot be normalized into a probe".into()));
        }
        Self::new(m.scale_real(1.0 / n))
    }

    /// `χ = I/√d_B`.
    pub fn maximally_entangled(d_b: usize) -> Self {
        Self { chi: ComplexMatrix::identity(d_b).scale_real(1.0 / (d_b as f64).sqrt()) }
    }

    /// Reads `χ` off a probe state vector on `B⊗B′`: `χ[b′, b] = φ[b·d_B + b′]`.
    pub fn from_state_vector(phi: &[C64], d_b: usize) -> Result<Self> {
        if phi.len() != d_b * d_b {
            return Err(HackError::Shape(format!("probe state has {} amplitudes, expected {}", phi.len(), d_b * d_b)));
        }
        Self::new(ComplexMatrix::from_fn(d_b, d_b, |bp, b| phi[b * d_b + bp]))
    }

    pub fn state_vector(&self) -> StateVector {
        let d = self.d_b();
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        for b in 0..d {
            for bp in 0..d {
                v[b * d + bp] = self.chi[(bp, b)];
            }
        }
        v
    }

    pub fn chi(&self) -> &ComplexMatrix {
        &self.chi
    }

    pub fn d_b(&self) -> usize {
        self.chi.rows()
    }

    /// Squared overlap of the probe state with the maximally entangled state:
    /// `|Tr χ|² / d_B`.
    pub fn max_entangled_fidelity(&self) -> f64 {
        self.chi.trace().norm_sqr() / self.d_b() as f64
    }

    /// Squared overlap `|Tr(χ₁†χ₂)|²` of the two probe states.
    pub fn overlap(&self, other: &ProbeOperator) -> f64 {
        self.chi.inner(&other.chi).norm_sqr()
    }

    /// Global phase fixed so the largest-magnitude entry is real and
    /// non-negative (first such entry in row-major order on ties).
    pub fn gauge_fixed(&self) -> Self {
        let mut best = C64::new(0.0, 0.0);
        for z in self.chi.entries() {
            if z.norm() > best.norm() {
                best = *z;
            }
        }
        if best.norm() == 0.0 {
            return self.clone();
        }
        let phase = best.conj() / best.norm();
        Self { chi: self.chi.scale(phase) }
    }
}

impl Serialize for ProbeOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from(&self.chi).serialize(s)
    }
}

/// A recovery unitary on `L⊗B′` (embedded in `C^N`,
/// `N = max(d_L·d_B, d_K·d_A)`) paired with a probe.
#[derive(Clone, Debug)]
pub struct HackingStrategy {
    recovery: ComplexMatrix,
    probe: ProbeOperator,
}

const RECOVERY_UNITARITY_TOL: f64 = 1e-10;

impl HackingStrategy {
    pub fn new(recovery: ComplexMatrix, probe: ProbeOperator) -> Result<Self> {
        if !recovery.is_square() {
            return Err(HackError::Shape(format!(
                "recovery must be square, got {}x{}",
                recovery.rows(),
                recovery.cols()
            )));
        }
        let defect = recovery.unitarity_defect();
        if defect > RECOVERY_UNITARITY_TOL * (recovery.rows() as f64).sqrt().max(1.0) {
            return Err(HackError::Validation(format!("recovery is not unitary: ‖R†R − I‖₂ = {defect:e}")));
        }
        Ok(Self { recovery, probe })
    }

    pub fn recovery(&self) -> &ComplexMatrix {
        &self.recovery
    }

    pub fn probe(&self) -> &ProbeOperator {
        &self.probe
    }

    pub(crate) fn check_dims(&self, dims: &ScramblerDims) -> Result<()> {
        let n = dims.recovery_dim();
        if self.recovery.rows() != n {
            return Err(HackError::Shape(format!(
                "recovery must act on dimension {n} for dims ({dims}), got {}",
                self.recovery.rows()
            )));
        }
        if self.probe.d_b() != dims.d_b {
            return Err(HackError::Shape(format!(
                "probe acts on dimension {}, expected d_B = {}",
                self.probe.d_b(),
                dims.d_b
            )));
        }
        Ok(())
    }
}

/// Summary of the strategy hierarchy for one scrambler.
#[derive(Clone, Debug, Serialize)]
pub struct FidelityReport {
    pub d_a: usize,
    pub d_b: usize,
    pub d_k: usize,
    pub d_l: usize,
    pub kappa: f64,
    pub p_me: f64,
    pub p_pg: f64,
    pub p_opt: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `min(p_pg − p_me, p_opt − p_pg)`; non-negative up to round-off.
    pub residual_bound_chain: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub two_qubit: Option<TwoQubitParams>,
    pub chi_opt: ProbeOperator,
}

impl FidelityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_state_vector_round_trip() {
        let chi = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let p = ProbeOperator::normalized(chi).unwrap();
        let v = p.state_vector();
        assert!((crate::tensor::vector_norm(&v) - 1.0).abs() < 1e-12);
        assert_eq!(ProbeOperator::from_state_vector(&v, 3).unwrap(), p);
    }

    #[test]
    fn max_entangled_probe_has_unit_fidelity() {
        let p = ProbeOperator::maximally_entangled(4);
        assert!((p.max_entangled_fidelity() - 1.0).abs() < 1e-15);
        assert!((p.chi().frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_probe_rejected() {
        assert!(ProbeOperator::new(ComplexMatrix::identity(2)).is_err());
        assert!(ProbeOperator::normalized(ComplexMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn gauge_makes_largest_entry_real() {
        let chi = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(0.0, (i + 2 * j) as f64));
        let p = ProbeOperator::normalized(chi).unwrap().gauge_fixed();
        let z = p.chi()[(0, 1)];
        assert!(z.im.abs() < 1e-15 && z.re > 0.0);
    }

    #[test]
    fn non_unitary_recovery_rejected() {
        let r = ComplexMatrix::from_real_diag(&[1.0, 0.5]);
        assert!(HackingStrategy::new(r, ProbeOperator::maximally_entangled(2)).is_err());
    }
}
