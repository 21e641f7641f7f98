//! Peeling on the erased Tanner subgraph, with optional symbolic guesses.
//!
//! Every resolved erased variable is kept as an affine form
//! `constant + sum of guesses`. Each check row accumulates the forms of
//! the variables substituted into it, so once no active variable remains
//! the unconsumed rows are exactly the core equations `C g = b`.

use super::{DecodeResult, DecodeStats, DecodeStatus};
use crate::gf2::{nullspace_basis, solve_affine, BitVector, SparseBitMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum StallPolicy {
    /// Stop and report the stopping set.
    Stop,
    /// Set the chosen column to zero and keep peeling.
    GuessZero,
    /// Replace the chosen column by a fresh symbolic guess.
    Inactivate,
}

/// `constant + <guesses, g>` over GF(2). `guesses` is a packed bit set
/// that only grows as far as its highest guess index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Affine {
    constant: bool,
    guesses: Vec<u64>,
}

impl Affine {
    fn constant(bit: bool) -> Self {
        Self {
            constant: bit,
            guesses: Vec::new(),
        }
    }

    fn guess(index: usize) -> Self {
        let mut guesses = vec![0; index / 64 + 1];
        guesses[index / 64] = 1 << (index % 64);
        Self {
            constant: false,
            guesses,
        }
    }

    fn xor_assign(&mut self, other: &Affine) {
        self.constant ^= other.constant;
        if self.guesses.len() < other.guesses.len() {
            self.guesses.resize(other.guesses.len(), 0);
        }
        for (a, b) in self.guesses.iter_mut().zip(&other.guesses) {
            *a ^= b;
        }
    }

    fn has_guesses(&self) -> bool {
        self.guesses.iter().any(|w| *w != 0)
    }

    fn guess_parity(&self, g: &BitVector) -> bool {
        self.guesses
            .iter()
            .zip(g.words())
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    fn guess_support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.guesses.iter().enumerate() {
            let mut word = w;
            while word != 0 {
                out.push(wi * 64 + word.trailing_zeros() as usize);
                word &= word - 1;
            }
        }
        out
    }
}

struct PeelState<'a> {
    col_ptr: &'a [u32],
    col_rows: &'a [u32],
    rhs: Vec<Affine>,
    consumed: Vec<bool>,
    values: Vec<Option<Affine>>,
    queue: Vec<u32>,
    /// number of unresolved erased columns in each row
    deg: Vec<u32>,
    /// xor of the unresolved local column indices in each row
    acc: Vec<u32>,
    unresolved: usize,
    order: Vec<u32>,
}

impl PeelState<'_> {
    /// Fixes column `l` to `value` and substitutes it into every open row.
    fn resolve(&mut self, l: u32, value: Affine) {
        let (lo, hi) = (
            self.col_ptr[l as usize] as usize,
            self.col_ptr[l as usize + 1] as usize,
        );
        for &r in &self.col_rows[lo..hi] {
            let r = r as usize;
            if self.consumed[r] {
                continue;
            }
            self.rhs[r].xor_assign(&value);
            self.deg[r] -= 1;
            self.acc[r] ^= l;
            if self.deg[r] == 1 {
                self.queue.push(r as u32);
            }
        }
        self.values[l as usize] = Some(value);
        self.unresolved -= 1;
        self.order.push(l);
    }
}

/// Output of one engine run before conversion to a [`DecodeResult`].
pub(crate) struct EngineOutput {
    pub result: DecodeResult,
    /// Unresolved erased qubits (global indices) when the policy is `Stop`.
    pub residual: Vec<usize>,
    /// Erased qubits in the order they were resolved.
    pub order: Vec<usize>,
}

/// Decodes `h_E x_E = s` for the erased columns `erased` (ascending).
pub(crate) fn run(
    h: &SparseBitMatrix,
    erased: &[usize],
    s: &BitVector,
    policy: StallPolicy,
) -> EngineOutput {
    assert_eq!(
        s.len(),
        h.num_rows(),
        "syndrome length must equal check count"
    );
    debug_assert!(
        erased.windows(2).all(|w| w[0] < w[1]),
        "erased set must be ascending"
    );
    let n = h.num_cols();
    let m = h.num_rows();
    let e = erased.len();

    let mut local = vec![u32::MAX; n];
    for (k, &q) in erased.iter().enumerate() {
        local[q] = k as u32;
    }

    // erased-column adjacency in CSR form
    let mut col_count = vec![0u32; e + 1];
    let mut deg = vec![0u32; m];
    let mut acc = vec![0u32; m];
    for (r, row) in h.rows().iter().enumerate() {
        for &c in row {
            let l = local[c];
            if l != u32::MAX {
                col_count[l as usize + 1] += 1;
                deg[r] += 1;
                acc[r] ^= l;
            }
        }
    }
    for k in 0..e {
        col_count[k + 1] += col_count[k];
    }
    let col_ptr = col_count;
    let mut fill = col_ptr.clone();
    let mut col_rows = vec![0u32; col_ptr[e] as usize];
    for (r, row) in h.rows().iter().enumerate() {
        for &c in row {
            let l = local[c];
            if l != u32::MAX {
                col_rows[fill[l as usize] as usize] = r as u32;
                fill[l as usize] += 1;
            }
        }
    }

    // stall order: heaviest column first, ties to the lowest index; built on the first stall
    let mut order: Vec<u32> = Vec::new();
    let mut next_candidate = 0usize;

    let mut state = PeelState {
        col_ptr: &col_ptr,
        col_rows: &col_rows,
        rhs: (0..m).map(|r| Affine::constant(s.get(r))).collect(),
        consumed: vec![false; m],
        values: vec![None; e],
        queue: (0..m as u32).filter(|&r| deg[r as usize] == 1).collect(),
        deg,
        acc,
        unresolved: e,
        order: Vec::with_capacity(e),
    };
    let mut stats = DecodeStats::default();

    loop {
        while let Some(r) = state.queue.pop() {
            let r = r as usize;
            if state.consumed[r] || state.deg[r] != 1 {
                continue;
            }
            state.consumed[r] = true;
            let l = state.acc[r];
            let value = std::mem::take(&mut state.rhs[r]);
            state.resolve(l, value);
            stats.peel_steps += 1;
        }
        if state.unresolved == 0 || policy == StallPolicy::Stop {
            break;
        }
        if order.is_empty() {
            order = (0..e as u32).collect();
            order.sort_by_key(|&l| {
                (
                    std::cmp::Reverse(col_ptr[l as usize + 1] - col_ptr[l as usize]),
                    l,
                )
            });
        }
        while state.values[order[next_candidate] as usize].is_some() {
            next_candidate += 1;
        }
        let l = order[next_candidate];
        let value = match policy {
            StallPolicy::GuessZero => {
                stats.num_hard_guesses += 1;
                Affine::constant(false)
            }
            StallPolicy::Inactivate => {
                stats.num_inactivations += 1;
                Affine::guess(stats.num_inactivations - 1)
            }
            StallPolicy::Stop => unreachable!(),
        };
        state.resolve(l, value);
    }
    let PeelState {
        rhs,
        consumed,
        values,
        deg,
        order,
        ..
    } = state;

    let residual: Vec<usize> = (0..e)
        .filter(|&l| values[l].is_none())
        .map(|l| erased[l])
        .collect();
    // unconsumed rows with no active variable left are the remaining equations
    let leftover: Vec<&Affine> = (0..m)
        .filter(|&r| !consumed[r] && deg[r] == 0)
        .map(|r| &rhs[r])
        .collect();

    let guesses = stats.num_inactivations;
    let mut status = DecodeStatus::Solved;
    let mut g = BitVector::zeros(guesses);
    let mut kernel = Vec::new();
    if guesses > 0 {
        let core_rows: Vec<&Affine> = leftover
            .iter()
            .copied()
            .filter(|a| a.constant || a.has_guesses())
            .collect();
        let core = SparseBitMatrix::from_rows(
            guesses,
            core_rows.iter().map(|a| a.guess_support()).collect(),
        )
        .expect("guess indices are in range");
        let b = BitVector::from_bools(&core_rows.iter().map(|a| a.constant).collect::<Vec<_>>());
        stats.core_dim = core.num_rows().max(guesses);
        match solve_affine(&core, &b) {
            Ok(sol) => {
                g = sol;
                kernel = nullspace_basis(&core);
            }
            Err(_) => status = DecodeStatus::NonConvergent,
        }
    } else if leftover.iter().any(|a| a.constant) || !residual.is_empty() {
        status = DecodeStatus::NonConvergent;
    }

    let mut local_solution = BitVector::zeros(e);
    for (l, v) in values.iter().enumerate() {
        if let Some(v) = v {
            if v.constant ^ v.guess_parity(&g) {
                local_solution.set(l, true);
            }
        }
    }
    if status == DecodeStatus::Solved && !kernel.is_empty() {
        let directions: Vec<BitVector> = kernel
            .iter()
            .map(|k| {
                BitVector::from_support(
                    e,
                    values
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| v.as_ref().is_some_and(|v| v.guess_parity(k)))
                        .map(|(l, _)| l),
                )
            })
            .collect();
        canonicalize(&mut local_solution, directions);
    }

    let mut estimate = BitVector::zeros(n);
    for l in local_solution.iter_ones() {
        estimate.set(erased[l], true);
    }
    EngineOutput {
        result: DecodeResult {
            estimate,
            status,
            stats,
        },
        residual,
        order: order.into_iter().map(|l| erased[l as usize]).collect(),
    }
}

/// Moves `x` within `x + span(directions)` to the representative that is
/// zero on every column left free by lowest-pivot elimination of the
/// erased system.
///
/// The free columns are exactly the highest set positions of a
/// fully reduced "highest-bit" echelon basis of the solution kernel, so
/// clearing `x` on those positions picks the same solution as
/// [`crate::gf2::solve_affine`] does on the full system.
fn canonicalize(x: &mut BitVector, directions: Vec<BitVector>) {
    let mut basis: Vec<(usize, BitVector)> = Vec::with_capacity(directions.len());
    for mut v in directions {
        for (lead, b) in &basis {
            if v.get(*lead) {
                v ^= b;
            }
        }
        let Some(lead) = v.last_one() else { continue };
        for (_, b) in basis.iter_mut() {
            if b.get(lead) {
                *b ^= &v;
            }
        }
        basis.push((lead, v));
    }
    for (lead, b) in &basis {
        if x.get(*lead) {
            *x ^= b;
        }
    }
}
