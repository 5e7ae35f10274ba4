//! Extraction versus entanglement-recycling fidelities of a post-recovery
//! state.
//!
//! Register layout (first factor major): `K ⊗ A′ ⊗ Out ⊗ Env`. `Out = C^N` is
//! viewed as `Q ⊗ K″ ⊗ A″` through `o = q·(d_K·d_A) + k″·d_A + a″`; indices
//! `o ≥ N` are absent (zero amplitude). `Env` is anything else that stays
//! entangled with the system, e.g. earlier rounds.

use serde::Serialize;

use crate::error::{HackError, Result};
use crate::tensor::{vector_norm, ScramblerDims, StateVector, C64};

const NORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct JointState {
    amplitudes: StateVector,
    dims: ScramblerDims,
    out_dim: usize,
    env_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeOff {
    /// Fidelity of the `A′A″` pair with the maximally entangled state.
    pub f_ext: f64,
    /// Fidelity of the `KK″` pair with the maximally entangled state.
    pub f_post: f64,
    /// Expectation of the joint projector onto both maximally entangled pairs.
    pub p_joint: f64,
}

impl TradeOff {
    /// `1 + p_joint − f_ext − f_post`, non-negative for every state.
    pub fn slack(&self) -> f64 {
        1.0 + self.p_joint - self.f_ext - self.f_post
    }
}

impl JointState {
    /// `Out` has dimension `dims.recovery_dim()`.
    pub fn new(amplitudes: StateVector, dims: ScramblerDims, env_dim: usize) -> Result<Self> {
        let out_dim = dims.recovery_dim();
        let expect = dims.d_k * dims.d_a * out_dim * env_dim;
        if env_dim == 0 || amplitudes.len() != expect {
            return Err(HackError::Shape(format!(
                "joint state for dims ({dims}) with env {env_dim} needs {expect} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let n = vector_norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(HackError::Argument(format!("joint state has norm {n}, expected 1")));
        }
        Ok(Self { amplitudes, dims, out_dim, env_dim })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> StateVector {
        self.amplitudes
    }

    pub fn dims(&self) -> &ScramblerDims {
        &self.dims
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    fn pair_block(&self) -> usize {
        self.dims.d_k * self.dims.d_a
    }

    fn q_dim(&self) -> usize {
        self.out_dim.div_ceil(self.pair_block())
    }

    /// Amplitude at `(k, a′, o, e)`, zero when `o` falls outside `Out`.
    fn amp(&self, k: usize, ap: usize, o: usize, e: usize) -> C64 {
        if o >= self.out_dim {
            return C64::new(0.0, 0.0);
        }
        let idx = ((k * self.dims.d_a + ap) * self.out_dim + o) * self.env_dim + e;
        self.amplitudes[idx]
    }

    fn out_index(&self, q: usize, kc: usize, a2: usize) -> usize {
        q * self.pair_block() + kc * self.dims.d_a + a2
    }

    /// Overlap with the ideal target restricted to Bob's leading `K″⊗A″`
    /// block (`q = 0`), with `Env` traced out. For `Env = C` this is the
    /// hacking fidelity.
    pub fn target_overlap(&self) -> f64 {
        self.joint_block(0)
    }

    fn joint_block(&self, q: usize) -> f64 {
        let (d_k, d_a) = (self.dims.d_k, self.dims.d_a);
        let mut total = 0.0;
        for e in 0..self.env_dim {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d_k {
                for a in 0..d_a {
                    s += self.amp(k, a, self.out_index(q, k, a), e);
                }
            }
            total += s.norm_sqr();
        }
        total / (d_k * d_a) as f64
    }

    pub fn trade_off(&self) -> TradeOff {
        let (d_k, d_a) = (self.dims.d_k, self.dims.d_a);
        let q_dim = self.q_dim();

        let mut f_ext = 0.0;
        for k in 0..d_k {
            for q in 0..q_dim {
                for kc in 0..d_k {
                    for e in 0..self.env_dim {
                        let s: C64 = (0..d_a).map(|a| self.amp(k, a, self.out_index(q, kc, a), e)).sum();
                        f_ext += s.norm_sqr();
                    }
                }
            }
        }
        f_ext /= d_a as f64;

        let mut f_post = 0.0;
        for ap in 0..d_a {
            for q in 0..q_dim {
                for a2 in 0..d_a {
                    for e in 0..self.env_dim {
                        let s: C64 = (0..d_k).map(|k| self.amp(k, ap, self.out_index(q, k, a2), e)).sum();
                        f_post += s.norm_sqr();
                    }
                }
            }
        }
        f_post /= d_k as f64;

        let p_joint = (0..q_dim).map(|q| self.joint_block(q)).sum();
        TradeOff { f_ext, f_post, p_joint }
    }
}

/// Trade-off quantities of a normalized state in the layout above.
pub fn trade_off_terms(amplitudes: &[C64], dims: &ScramblerDims, env_dim: usize) -> Result<TradeOff> {
    Ok(JointState::new(amplitudes.to_vec(), *dims, env_dim)?.trade_off())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(dims: &ScramblerDims) -> StateVector {
        let n = dims.recovery_dim();
        let mut v = vec![C64::new(0.0, 0.0); dims.d_k * dims.d_a * n];
        let amp = 1.0 / ((dims.d_k * dims.d_a) as f64).sqrt();
        for k in 0..dims.d_k {
            for a in 0..dims.d_a {
                v[(k * dims.d_a + a) * n + k * dims.d_a + a] = C64::new(amp, 0.0);
            }
        }
        v
    }

    #[test]
    fn target_state_scores_one() {
        for dims in [ScramblerDims::square(2, 2).unwrap(), ScramblerDims::new(2, 3, 3, 2).unwrap()] {
            let t = trade_off_terms(&target(&dims), &dims, 1).unwrap();
            assert!((t.f_ext - 1.0).abs() < 1e-14);
            assert!((t.f_post - 1.0).abs() < 1e-14);
            assert!((t.p_joint - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_residual_saturates() {
        // Extracted pair perfect, residual pair |0⟩_K|1⟩_{K″}.
        let dims = ScramblerDims::square(2, 2).unwrap();
        let n = dims.recovery_dim();
        let mut v = vec![C64::new(0.0, 0.0); 2 * 2 * n];
        let amp = 1.0 / 2f64.sqrt();
        for a in 0..2 {
            v[a * n + 2 + a] = C64::new(amp, 0.0);
        }
        let t = trade_off_terms(&v, &dims, 1).unwrap();
        assert!((t.f_ext - 1.0).abs() < 1e-14);
        assert!(t.f_post.abs() < 1e-14);
        assert!(t.p_joint.abs() < 1e-14);
        assert!(t.slack().abs() < 1e-14);
    }

    #[test]
    fn rejects_unnormalized_or_misshapen_input() {
        let dims = ScramblerDims::square(2, 2).unwrap();
        let mut v = target(&dims);
        v[0] *= 2.0;
        assert!(matches!(trade_off_terms(&v, &dims, 1), Err(HackError::Argument(_))));
        assert!(matches!(trade_off_terms(&v[1..], &dims, 1), Err(HackError::Shape(_))));
    }
}
