//! Collectibility of multipartite quantum states.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: density matrices, pure states, partial transposition,
//!   Schmidt decomposition and negativity.
//! * [`collect`]: the product functionals over locally orthonormal
//!   separable bases and their multi-start maximisation.
//! * [`bounds`]: the purity-constrained bound on products of matrix
//!   elements, PPT bounds and critical purities.
//! * [`werner`]: generalized Werner states and their closed-form
//!   collectibility and thresholds.
//! * [`pseudopure`]: the two-qubit test built from complementary
//!   measurements and two-copy interference, including a click simulator.
//! * [`cli`]: the command-line front end.

pub mod bounds;
pub mod cli;
pub mod collect;
mod error;
pub mod pseudopure;
pub mod qcore;
pub mod werner;

pub use error::{Error, Result};
pub use qcore::{ComplexMatrix, DensityMatrix, PureState, TensorShape, C64};

use serde::Serialize;

/// Outcome of an entanglement (or NPPT) test.
///
/// A test can only ever certify entanglement; failing to do so says nothing
/// about separability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    EntangledDetected,
    Inconclusive,
}

impl Verdict {
    /// `EntangledDetected` iff `value > threshold + guard`.
    pub fn above(value: f64, threshold: f64, guard: f64) -> Self {
        if value > threshold + guard {
            Verdict::EntangledDetected
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn is_detected(self) -> bool {
        self == Verdict::EntangledDetected
    }
}
