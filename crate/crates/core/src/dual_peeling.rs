//! Row elimination on the stabilizer matrix that exposes fully erased
//! stabilizers, and the decoding pipeline that uses them.
//!
//! Two rules act on the working copy of the stabilizer rows:
//!
//! * Rule 1: a known column with exactly two incident rows merges the
//!   second row into the first and drops it.
//! * Rule 2: a row with exactly one known column `j` is added to every
//!   other row containing `j`, then dropped, since no fully erased
//!   combination can use it.
//!
//! Whenever a row runs out of known columns it is a fully erased
//! stabilizer: it is recorded and its lowest erased qubit is fixed to
//! zero and treated as known from then on.

use crate::channel::{complement, ErasureInstance};
use crate::codes::{CssCode, ErrorType};
use crate::decoders::{hard_guess_peel, inactivation_decode, peel, DecodeResult};
use crate::gf2::{xor_sorted, SparseBitMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualConfig {
    pub rule1: bool,
    pub rule2: bool,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            rule1: true,
            rule2: true,
        }
    }
}

impl DualConfig {
    pub fn rule1_only() -> Self {
        Self {
            rule1: true,
            rule2: false,
        }
    }

    pub fn rule2_only() -> Self {
        Self {
            rule1: false,
            rule2: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualPeelOutput {
    /// Supports of the fully erased stabilizers, in discovery order.
    pub fully_erased: Vec<Vec<usize>>,
    /// `fixed_qubits[t]` lies in `fully_erased[t]`.
    pub fixed_qubits: Vec<usize>,
    /// Original known set plus the fixed qubits, ascending.
    pub known: Vec<usize>,
}

/// Working state of dual peeling on one stabilizer matrix.
#[derive(Clone, Debug)]
pub struct DualState {
    config: DualConfig,
    rows: Vec<Vec<usize>>,
    alive: Vec<bool>,
    known: Vec<bool>,
    known_degree: Vec<usize>,
    /// alive rows containing each column, unordered
    col_rows: Vec<Vec<usize>>,
    rule1_queue: Vec<usize>,
    rule2_queue: Vec<usize>,
    zero_queue: Vec<usize>,
    fully_erased: Vec<Vec<usize>>,
    fixed_qubits: Vec<usize>,
}

impl DualState {
    pub fn new(hx: &SparseBitMatrix, known: &[usize], config: DualConfig) -> Self {
        let n = hx.num_cols();
        let mut known_mask = vec![false; n];
        for &q in known {
            known_mask[q] = true;
        }
        let mut state = Self {
            config,
            rows: hx.rows().to_vec(),
            alive: vec![true; hx.num_rows()],
            known: known_mask,
            known_degree: vec![0; hx.num_rows()],
            col_rows: vec![Vec::new(); n],
            rule1_queue: Vec::new(),
            rule2_queue: Vec::new(),
            zero_queue: Vec::new(),
            fully_erased: Vec::new(),
            fixed_qubits: Vec::new(),
        };
        for r in 0..state.rows.len() {
            for &c in &state.rows[r] {
                state.col_rows[c].push(r);
            }
            state.known_degree[r] = state.rows[r].iter().filter(|&&c| state.known[c]).count();
            if state.rows[r].is_empty() {
                state.alive[r] = false;
            } else {
                state.notify_row(r);
            }
        }
        for c in 0..n {
            state.notify_column(c);
        }
        state
    }

    pub fn known_degree(&self, row: usize) -> usize {
        self.known_degree[row]
    }

    pub fn is_known(&self, q: usize) -> bool {
        self.known[q]
    }

    /// Supports of the rows still in play.
    pub fn alive_rows(&self) -> impl Iterator<Item = &[usize]> {
        self.rows
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(|(r, _)| r.as_slice())
    }

    pub fn fully_erased(&self) -> &[Vec<usize>] {
        &self.fully_erased
    }

    pub fn fixed_qubits(&self) -> &[usize] {
        &self.fixed_qubits
    }

    pub fn set_config(&mut self, config: DualConfig) {
        self.config = config;
    }

    fn notify_row(&mut self, r: usize) {
        match self.known_degree[r] {
            0 => self.zero_queue.push(r),
            1 => self.rule2_queue.push(r),
            _ => {}
        }
    }

    fn notify_column(&mut self, c: usize) {
        if self.known[c] && self.col_rows[c].len() == 2 {
            self.rule1_queue.push(c);
        }
    }

    /// Moves qubit `q` into the known set.
    pub fn add_known(&mut self, q: usize) {
        if self.known[q] {
            return;
        }
        self.known[q] = true;
        for k in 0..self.col_rows[q].len() {
            let r = self.col_rows[q][k];
            self.known_degree[r] += 1;
            self.notify_row(r);
        }
        self.notify_column(q);
    }

    fn kill_row(&mut self, r: usize) {
        self.alive[r] = false;
        for &c in &self.rows[r] {
            let list = &mut self.col_rows[c];
            let pos = list
                .iter()
                .position(|&x| x == r)
                .expect("incidence out of sync");
            list.swap_remove(pos);
        }
        for k in 0..self.rows[r].len() {
            let c = self.rows[r][k];
            self.notify_column(c);
        }
    }

    /// `rows[target] ^= rows[source]`, keeping incidence and degrees in sync.
    fn add_row(&mut self, target: usize, source: usize) {
        let merged = xor_sorted(&self.rows[target], &self.rows[source]);
        for k in 0..self.rows[source].len() {
            let c = self.rows[source][k];
            let list = &mut self.col_rows[c];
            match list.iter().position(|&x| x == target) {
                Some(pos) => {
                    list.swap_remove(pos);
                }
                None => list.push(target),
            }
        }
        self.known_degree[target] = merged.iter().filter(|&&c| self.known[c]).count();
        self.rows[target] = merged;
        for k in 0..self.rows[source].len() {
            let c = self.rows[source][k];
            self.notify_column(c);
        }
        if self.rows[target].is_empty() {
            self.alive[target] = false;
        } else {
            self.notify_row(target);
        }
    }

    /// Rule 1 on known column `j`. Returns false if `j` no longer qualifies.
    pub fn rule1_step(&mut self, j: usize) -> bool {
        if !self.known[j] || self.col_rows[j].len() != 2 {
            return false;
        }
        let (a, b) = (self.col_rows[j][0], self.col_rows[j][1]);
        let (keep, drop) = (a.min(b), a.max(b));
        self.add_row(keep, drop);
        self.kill_row(drop);
        true
    }

    /// Rule 2 on row `i`. Returns false if `i` no longer qualifies.
    pub fn rule2_step(&mut self, i: usize) -> bool {
        if !self.alive[i] || self.known_degree[i] != 1 {
            return false;
        }
        let j = *self.rows[i]
            .iter()
            .find(|&&c| self.known[c])
            .expect("one known column");
        let others: Vec<usize> = self.col_rows[j]
            .iter()
            .copied()
            .filter(|&r| r != i)
            .collect();
        for r in others {
            self.add_row(r, i);
        }
        self.kill_row(i);
        true
    }

    fn record_zero_rows(&mut self) {
        while let Some(r) = self.zero_queue.pop() {
            if !self.alive[r] || self.known_degree[r] != 0 {
                continue;
            }
            let support = self.rows[r].clone();
            let q = support[0];
            self.fully_erased.push(support);
            self.fixed_qubits.push(q);
            self.add_known(q);
        }
    }

    /// Applies the enabled rules until none applies: Rule 1 to exhaustion,
    /// then a single Rule 2 step, repeated.
    pub fn run(&mut self) {
        loop {
            self.record_zero_rows();
            if self.config.rule1 {
                if let Some(j) = self.rule1_queue.pop() {
                    self.rule1_step(j);
                    continue;
                }
            } else {
                self.rule1_queue.clear();
            }
            if self.config.rule2 {
                if let Some(i) = self.rule2_queue.pop() {
                    self.rule2_step(i);
                    continue;
                }
            } else {
                self.rule2_queue.clear();
            }
            if self.zero_queue.is_empty() {
                break;
            }
        }
    }

    pub fn into_output(self) -> DualPeelOutput {
        let known = self
            .known
            .iter()
            .enumerate()
            .filter(|(_, &k)| k)
            .map(|(q, _)| q)
            .collect();
        DualPeelOutput {
            fully_erased: self.fully_erased,
            fixed_qubits: self.fixed_qubits,
            known,
        }
    }
}

/// Runs dual peeling on `hx` with known columns `known` to completion.
pub fn dual_peel(hx: &SparseBitMatrix, known: &[usize], config: DualConfig) -> DualPeelOutput {
    let mut state = DualState::new(hx, known, config);
    state.run();
    state.into_output()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Peel,
    HardGuess,
    Inactivation,
}

/// Dual peeling on the stabilizers of `side`, then the chosen engine on
/// the erased set with the fixed qubits pinned to zero.
pub fn stab_assisted_decode(
    code: &CssCode,
    inst: &ErasureInstance,
    side: ErrorType,
    engine: Engine,
) -> DecodeResult {
    let n = code.n();
    let out = dual_peel(
        code.stabilizers(side),
        &complement(&inst.erased, n),
        DualConfig::default(),
    );
    let mut fixed = vec![false; n];
    for &q in &out.fixed_qubits {
        fixed[q] = true;
    }
    let reduced: Vec<usize> = inst.erased.iter().copied().filter(|&q| !fixed[q]).collect();
    let h = code.checks(side);
    let s = inst.syndrome(side);
    let mut result = match engine {
        Engine::Peel => peel(h, &reduced, s).0,
        Engine::HardGuess => hard_guess_peel(h, &reduced, s),
        Engine::Inactivation => inactivation_decode(h, &reduced, s),
    };
    result.stats.num_fixed_bits = out.fixed_qubits.len();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::surface_code;
    use crate::decoders::{classify, Outcome};
    use crate::gf2::BitVector;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn no_erasures_fixes_nothing() {
        let code = surface_code(3).unwrap();
        let all: Vec<usize> = (0..code.n()).collect();
        let out = dual_peel(code.hx(), &all, DualConfig::default());
        assert!(out.fully_erased.is_empty() && out.fixed_qubits.is_empty());
        assert_eq!(out.known, all);
    }

    #[test]
    fn all_erased_fixes_rank_many() {
        let code = surface_code(3).unwrap();
        let out = dual_peel(code.hx(), &[], DualConfig::default());
        assert_eq!(out.fixed_qubits.len(), 6);
    }

    #[test]
    fn single_erased_face() {
        let code = surface_code(3).unwrap();
        let face = sorted(code.lattice().unwrap().face_edges[4].clone());
        let known = complement(&face, code.n());
        for config in [
            DualConfig::default(),
            DualConfig::rule1_only(),
            DualConfig::rule2_only(),
        ] {
            let out = dual_peel(code.hx(), &known, config);
            assert_eq!(out.fully_erased, vec![face.clone()]);
            assert_eq!(out.fixed_qubits, vec![face[0]]);
        }
    }

    #[test]
    fn two_adjacent_faces_merge_into_six_edges() {
        // faces (0,1) and (1,1) of the d=3 lattice share a horizontal edge
        let code = surface_code(3).unwrap();
        let lat = code.lattice().unwrap();
        let (f1, f2) = (&lat.face_edges[1], &lat.face_edges[4]);
        let shared: Vec<usize> = f1.iter().copied().filter(|e| f2.contains(e)).collect();
        assert_eq!(shared.len(), 1);
        let union = xor_sorted(&sorted(f1.clone()), &sorted(f2.clone()));
        let known = complement(&union, code.n());
        let mut state = DualState::new(code.hx(), &known, DualConfig::rule1_only());
        assert!(state.rule1_step(shared[0]));
        state.run();
        assert_eq!(union.len(), 6);
        assert_eq!(state.fully_erased(), &[union]);
    }

    #[test]
    fn identical_rows_vanish_without_counting() {
        let h = SparseBitMatrix::from_dense(3, &[&[1, 1, 0], &[1, 1, 0]]);
        let out = dual_peel(&h, &[0], DualConfig::rule1_only());
        assert!(out.fully_erased.is_empty());
    }

    #[test]
    fn repetition_pivot_trace() {
        let h = SparseBitMatrix::from_dense(3, &[&[1, 1, 0], &[0, 1, 1]]);
        let mut state = DualState::new(&h, &[0], DualConfig::rule2_only());
        assert!(state.rule2_step(0));
        let rows: Vec<&[usize]> = state.alive_rows().collect();
        assert_eq!(rows, vec![&[1, 2][..]]);
        // the untouched row lies inside the erased set {1, 2}
        state.run();
        assert_eq!(state.fully_erased(), &[vec![1, 2]]);
        assert_eq!(crate::oracle::fully_erased_dim(&h, &[0]), 1);
    }

    #[test]
    fn rule2_removes_pivot_column_from_other_rows() {
        let h = SparseBitMatrix::from_dense(4, &[&[1, 1, 0, 0], &[1, 0, 1, 1]]);
        let mut state = DualState::new(&h, &[0, 3], DualConfig::rule2_only());
        assert_eq!(state.known_degree(0), 1);
        assert!(state.rule2_step(0));
        let rows: Vec<&[usize]> = state.alive_rows().collect();
        assert_eq!(rows, vec![&[1, 2, 3][..]]);
        assert_eq!(state.known_degree(1), 1);
    }

    #[test]
    fn stab_assisted_on_erased_face_is_degenerate() {
        let code = surface_code(3).unwrap();
        let face = sorted(code.lattice().unwrap().face_edges[4].clone());
        let truth = BitVector::from_support(code.n(), face.iter().copied());
        let inst =
            ErasureInstance::from_errors(&code, face, truth.clone(), BitVector::zeros(code.n()));
        for engine in [Engine::Peel, Engine::HardGuess, Engine::Inactivation] {
            let res = stab_assisted_decode(&code, &inst, ErrorType::X, engine);
            assert!(res.is_solved());
            assert_eq!(res.stats.num_fixed_bits, 1);
            assert_eq!(res.stats.num_inactivations + res.stats.num_hard_guesses, 0);
            assert!(res.estimate.is_zero());
            assert_eq!(
                classify(&res.estimate, &truth, &code, ErrorType::X, res.status),
                Outcome::DegenerateSuccess
            );
        }
    }

    #[test]
    fn stab_assisted_without_erasures() {
        let code = surface_code(3).unwrap();
        let z = BitVector::zeros(code.n());
        let inst = ErasureInstance::from_errors(&code, vec![], z.clone(), z);
        let res = stab_assisted_decode(&code, &inst, ErrorType::Z, Engine::Inactivation);
        assert!(res.is_solved() && res.estimate.is_zero());
    }
}
