//! Hacking fidelity of bipartite quantum scramblers.
//!
//! A scrambler `U: A⊗B → K⊗L` hides Alice's input `A` across its outputs. A
//! hacker holding a probe entangled with `B` and access to `L` tries to pull
//! Alice's state out while leaving a maximally entangled pair behind. This
//! crate evaluates that fidelity in closed form through the rotated operator
//! `U°`, optimizes the probe, predicts Haar averages from random-matrix
//! asymptotics and simulates repeated extraction rounds.
//!
//! Dimensions obey `d_A·d_B = d_K·d_L`; `κ = d_B/d_K`.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fidelity;
pub mod limits;
pub mod matrix_io;
pub mod optimizer;
pub mod random;
pub mod rounds;
pub mod tensor;
pub mod verify;

pub use error::{HackError, Result};
pub use tensor::{ComplexMatrix, ScramblerDims, C64};
