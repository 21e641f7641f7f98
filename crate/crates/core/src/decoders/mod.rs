//! Classical erasure decoders on the syndrome system `h_E x_E = s`, and
//! the outcome taxonomy used to score them against the true error.

mod engine;

use crate::codes::{CssCode, ErrorType};
use crate::gf2::{BitVector, SparseBitMatrix};
use engine::StallPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    Solved,
    NonConvergent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecodeStats {
    /// Symbolic guesses introduced by inactivation.
    pub num_inactivations: usize,
    /// Larger dimension of the core system `C g = b` (0 when no guess was made).
    pub core_dim: usize,
    pub num_hard_guesses: usize,
    /// Erased bits pinned by the dual-peeling stage.
    pub num_fixed_bits: usize,
    pub peel_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    /// Length-`n` error estimate, zero outside the erased set.
    pub estimate: BitVector,
    pub status: DecodeStatus,
    pub stats: DecodeStats,
}

impl DecodeResult {
    pub fn is_solved(&self) -> bool {
        self.status == DecodeStatus::Solved
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    DegenerateSuccess,
    LogicalFailure,
    NonConvergent,
}

impl Outcome {
    pub fn is_failure(self) -> bool {
        matches!(self, Outcome::LogicalFailure | Outcome::NonConvergent)
    }
}

/// Plain peeling. Returns the decode result and the stopping set (global
/// qubit indices); the result is `Solved` iff the stopping set is empty.
pub fn peel(h: &SparseBitMatrix, erased: &[usize], s: &BitVector) -> (DecodeResult, Vec<usize>) {
    let out = engine::run(h, erased, s, StallPolicy::Stop);
    (out.result, out.residual)
}

/// Erased qubits in the order plain peeling resolves them. The order
/// depends only on the erasure pattern, not on the syndrome.
pub fn peeling_order(h: &SparseBitMatrix, erased: &[usize]) -> Vec<usize> {
    let s = BitVector::zeros(h.num_rows());
    engine::run(h, erased, &s, StallPolicy::Stop).order
}

/// Peeling that, when stuck, sets the heaviest remaining column (lowest
/// index on ties) to zero and continues. A final syndrome mismatch makes
/// the result `NonConvergent`.
pub fn hard_guess_peel(h: &SparseBitMatrix, erased: &[usize], s: &BitVector) -> DecodeResult {
    engine::run(h, erased, s, StallPolicy::GuessZero).result
}

/// Inactivation decoding: peel, inactivate the heaviest column (lowest
/// index on ties) whenever peeling stalls, then solve the core on the
/// guesses by elimination and back-substitute.
///
/// Among all solutions the one returned is the same one
/// [`crate::oracle::ml_decode_ge`] returns, so the two can be compared
/// trial by trial.
pub fn inactivation_decode(h: &SparseBitMatrix, erased: &[usize], s: &BitVector) -> DecodeResult {
    engine::run(h, erased, s, StallPolicy::Inactivate).result
}

/// Scores an estimate against the true error of type `side`.
pub fn classify(
    estimate: &BitVector,
    truth: &BitVector,
    code: &CssCode,
    side: ErrorType,
    status: DecodeStatus,
) -> Outcome {
    if status == DecodeStatus::NonConvergent {
        return Outcome::NonConvergent;
    }
    let mut diff = estimate.clone();
    diff ^= truth;
    if diff.is_zero() {
        return Outcome::Success;
    }
    if code.stabilizer_space(side).contains(&diff) {
        return Outcome::DegenerateSuccess;
    }
    if code.checks(side).mul_vec(&diff).is_zero() {
        Outcome::LogicalFailure
    } else {
        Outcome::NonConvergent
    }
}
