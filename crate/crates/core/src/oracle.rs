//! Exact reference computations: ML erasure decoding by full elimination,
//! the dimension of the fully erased stabilizer space, and the number of
//! erased logical degrees of freedom.

use crate::channel::complement;
use crate::codes::{CssCode, ErrorType};
use crate::decoders::{DecodeResult, DecodeStats, DecodeStatus};
use crate::gf2::{rank, solve_affine, BitVector, SparseBitMatrix};

/// ML decoding over erasures by eliminating the whole erased system.
///
/// All consistent solutions are equally likely, so the canonical one
/// (free variables zero) is an ML choice. An inconsistent syndrome gives
/// `NonConvergent` with a zero estimate.
pub fn ml_decode_ge(h: &SparseBitMatrix, erased: &[usize], s: &BitVector) -> DecodeResult {
    let sub = h.select_columns(erased);
    let mut estimate = BitVector::zeros(h.num_cols());
    let status = match solve_affine(&sub, s) {
        Ok(x) => {
            for l in x.iter_ones() {
                estimate.set(erased[l], true);
            }
            DecodeStatus::Solved
        }
        Err(_) => DecodeStatus::NonConvergent,
    };
    DecodeResult {
        estimate,
        status,
        stats: DecodeStats::default(),
    }
}

/// Dimension of `{u^T hx : support inside the complement of known}` modulo
/// combinations that vanish, i.e. `rank(hx) - rank(hx restricted to known)`.
pub fn fully_erased_dim(hx: &SparseBitMatrix, known: &[usize]) -> usize {
    rank(hx) - rank(&hx.select_columns(known))
}

/// Number of independent logical operators of type `side` supported on
/// the erased set.
pub fn erased_logical_dim(code: &CssCode, erased: &[usize], side: ErrorType) -> usize {
    let kernel_dim = erased.len() - rank(&code.checks(side).select_columns(erased));
    let known = complement(erased, code.n());
    kernel_dim - fully_erased_dim(code.stabilizers(side), &known)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OraclePrediction {
    pub fully_erased_dim: usize,
    pub erased_logical_dim: usize,
}

impl OraclePrediction {
    /// `1 - 2^-l`: with `l` erased logical degrees of freedom, a canonical
    /// tie-break lands in the true logical coset with probability `2^-l`.
    pub fn ml_failure_probability(&self) -> f64 {
        1.0 - 0.5f64.powi(self.erased_logical_dim as i32)
    }
}

pub fn predict(code: &CssCode, erased: &[usize], side: ErrorType) -> OraclePrediction {
    let known = complement(erased, code.n());
    OraclePrediction {
        fully_erased_dim: fully_erased_dim(code.stabilizers(side), &known),
        erased_logical_dim: erased_logical_dim(code, erased, side),
    }
}

/// Probability that an ML decoder fails on at least one of the two sides.
pub fn trial_failure_probability(code: &CssCode, erased: &[usize]) -> f64 {
    let l: usize = ErrorType::BOTH
        .iter()
        .map(|&side| erased_logical_dim(code, erased, side))
        .sum();
    1.0 - 0.5f64.powi(l as i32)
}
