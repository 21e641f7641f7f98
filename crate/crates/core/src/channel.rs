//! Quantum erasure channel sampling and the per-trial seeding contract.
//!
//! A trial's random stream is ChaCha8 keyed by the master seed with the
//! trial index as the stream id, so trial `t` can be regenerated on its own
//! without replaying trials `0..t`.

use crate::codes::{CssCode, ErrorType};
use crate::gf2::{BitVector, SparseBitMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of a single Monte Carlo trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialSeed {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// One draw from the erasure channel together with its syndromes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureInstance {
    /// Erased qubits, ascending.
    pub erased: Vec<usize>,
    pub x_error: BitVector,
    pub z_error: BitVector,
    /// `hz * x_error`
    pub s_x: BitVector,
    /// `hx * z_error`
    pub s_z: BitVector,
}

impl ErasureInstance {
    /// Builds an instance from a known error, computing both syndromes.
    pub fn from_errors(
        code: &CssCode,
        erased: Vec<usize>,
        x_error: BitVector,
        z_error: BitVector,
    ) -> Self {
        let s_x = syndrome(code.hz(), &x_error);
        let s_z = syndrome(code.hx(), &z_error);
        Self {
            erased,
            x_error,
            z_error,
            s_x,
            s_z,
        }
    }

    pub fn error(&self, side: ErrorType) -> &BitVector {
        match side {
            ErrorType::X => &self.x_error,
            ErrorType::Z => &self.z_error,
        }
    }

    pub fn syndrome(&self, side: ErrorType) -> &BitVector {
        match side {
            ErrorType::X => &self.s_x,
            ErrorType::Z => &self.s_z,
        }
    }

    /// Complement of the erased set, ascending.
    pub fn known(&self, n: usize) -> Vec<usize> {
        complement(&self.erased, n)
    }
}

/// Ascending complement of a sorted index set within `0..n`.
pub fn complement(sorted: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n.saturating_sub(sorted.len()));
    let mut it = sorted.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

/// `h * e` over GF(2).
pub fn syndrome(h: &SparseBitMatrix, e: &BitVector) -> BitVector {
    h.mul_vec(e)
}

/// Samples an erasure pattern with rate `p` and a uniform Pauli on every
/// erased qubit.
///
/// Stream layout: one erasure draw per qubit in ascending order, then an
/// X bit and a Z bit for each erased qubit in ascending order.
pub fn sample(code: &CssCode, p: f64, seed: TrialSeed) -> ErasureInstance {
    assert!((0.0..=1.0).contains(&p), "erasure rate {p} outside [0, 1]");
    let n = code.n();
    let mut rng = seed.rng();
    let erased: Vec<usize> = (0..n).filter(|_| rng.gen_bool(p)).collect();
    let mut x_error = BitVector::zeros(n);
    let mut z_error = BitVector::zeros(n);
    for &q in &erased {
        x_error.set(q, rng.gen::<bool>());
        z_error.set(q, rng.gen::<bool>());
    }
    ErasureInstance::from_errors(code, erased, x_error, z_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::surface_code;

    #[test]
    fn extreme_rates() {
        let code = surface_code(3).unwrap();
        let none = sample(&code, 0.0, TrialSeed::new(1, 0));
        assert!(none.erased.is_empty());
        assert!(none.x_error.is_zero() && none.z_error.is_zero());
        assert!(none.s_x.is_zero() && none.s_z.is_zero());
        let all = sample(&code, 1.0, TrialSeed::new(1, 0));
        assert_eq!(all.erased.len(), code.n());
    }

    #[test]
    fn replay_is_bit_identical() {
        let code = surface_code(5).unwrap();
        for t in 0..20 {
            let seed = TrialSeed::new(99, t);
            assert_eq!(sample(&code, 0.4, seed), sample(&code, 0.4, seed));
        }
        assert_ne!(
            sample(&code, 0.4, TrialSeed::new(99, 0)),
            sample(&code, 0.4, TrialSeed::new(99, 1))
        );
    }

    #[test]
    fn errors_live_on_erasures() {
        let code = surface_code(3).unwrap();
        for t in 0..10_000 {
            let inst = sample(&code, 0.3, TrialSeed::new(5, t));
            let mut mask = vec![false; code.n()];
            for &q in &inst.erased {
                mask[q] = true;
            }
            assert!(inst.x_error.iter_ones().all(|q| mask[q]));
            assert!(inst.z_error.iter_ones().all(|q| mask[q]));
        }
    }

    #[test]
    fn erasure_fraction_within_three_sigma() {
        let code = surface_code(3).unwrap();
        let trials = 100_000u64;
        let total: usize = (0..trials)
            .map(|t| sample(&code, 0.3, TrialSeed::new(11, t)).erased.len())
            .sum();
        let draws = (code.n() as u64 * trials) as f64;
        let mean = total as f64 / draws;
        let sigma = (0.3f64 * 0.7 / draws).sqrt();
        assert!(
            (mean - 0.3).abs() < 3.0 * sigma,
            "mean {mean}, sigma {sigma}"
        );
    }

    #[test]
    fn syndrome_basics() {
        let code = surface_code(3).unwrap();
        let n = code.n();
        assert!(syndrome(code.hz(), &BitVector::zeros(n)).is_zero());
        assert!(syndrome(code.hz(), &code.hx().row_vector(2)).is_zero());
        let e = BitVector::from_support(n, [4]);
        let col: Vec<usize> = code.hz().column_supports()[4].clone();
        assert_eq!(syndrome(code.hz(), &e).support(), col);
    }

    #[test]
    fn degeneracy_invariance() {
        let code = surface_code(4).unwrap();
        let inst = sample(&code, 0.5, TrialSeed::new(3, 3));
        for r in 0..code.hx().num_rows() {
            let mut e = inst.x_error.clone();
            e ^= &code.hx().row_vector(r);
            assert_eq!(syndrome(code.hz(), &e), inst.s_x);
        }
    }

    #[test]
    fn complement_of_set() {
        assert_eq!(complement(&[1, 3], 5), vec![0, 2, 4]);
        assert_eq!(complement(&[], 2), vec![0, 1]);
    }
}
