//! Dense complex linear algebra for bipartite operators.
//!
//! Product bases are ordered with the first factor major: `|x⟩⊗|y⟩` sits at
//! index `x·d_y + y`. Every reshuffling and partial trace in the crate is
//! written in that convention.

mod dims;
mod linalg;
mod matrix;
mod ops;

pub use dims::ScramblerDims;
pub use linalg::{
    abs_polar_parts, default_cutoff, nuclear_norm, polar_contraction, polar_unitary, psd_sqrt, schatten_norm,
    singular_values, svd, AbsPolarParts, SchattenP, SvdFactors,
};
pub use matrix::{ComplexMatrix, StateVector, C64};
pub use ops::{
    kron, kron_identity_left, max_entangled_vector, partial_trace_first, partial_trace_second, rotate_pi_half,
    unrotate_pi_half, vdot, vector_norm,
};
