use super::{BitVector, SparseBitMatrix};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("linear system has no solution")]
pub struct Inconsistent;

/// Pivot bookkeeping produced by [`row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSystem {
    /// `pivot_map[c]` is the row of the reduced matrix whose leading one
    /// sits in column `c`, or `None` for a free column.
    pub pivot_map: Vec<Option<usize>>,
    pub free_columns: Vec<usize>,
    pub consistent: bool,
}

impl ReducedSystem {
    pub fn rank(&self) -> usize {
        self.pivot_map.iter().flatten().count()
    }

    /// Pivot columns in row order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut cols: Vec<(usize, usize)> = self
            .pivot_map
            .iter()
            .enumerate()
            .filter_map(|(c, r)| r.map(|r| (r, c)))
            .collect();
        cols.sort_unstable();
        cols.into_iter().map(|(_, c)| c).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    pub system: ReducedSystem,
    /// Reduced row echelon form; pivot rows first, in pivot-column order.
    pub matrix: SparseBitMatrix,
    pub rhs: BitVector,
}

/// Dense Gauss-Jordan elimination. Returns the pivot rows (as dense
/// vectors), their pivot columns, and the transformed right-hand side for
/// every row (pivot rows first, then the remaining rows in their final order).
struct Eliminated {
    rows: Vec<BitVector>,
    rhs: Vec<bool>,
    pivots: Vec<usize>,
}

fn eliminate(m: &SparseBitMatrix, rhs: Option<&BitVector>) -> Eliminated {
    let mut rows = m.to_dense_rows();
    let mut b: Vec<bool> = match rhs {
        Some(v) => (0..m.num_rows()).map(|i| v.get(i)).collect(),
        None => vec![false; m.num_rows()],
    };
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..m.num_cols() {
        if next == rows.len() {
            break;
        }
        // lowest-index row at or below `next` with a one in `col`
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        b.swap(next, found);
        let (head, tail) = rows.split_at_mut(next);
        let (pivot, rest) = tail.split_first_mut().expect("pivot row exists");
        let pivot_b = b[next];
        for (r, row) in head.iter_mut().enumerate() {
            if row.get(col) {
                *row ^= &*pivot;
                b[r] ^= pivot_b;
            }
        }
        for (k, row) in rest.iter_mut().enumerate() {
            if row.get(col) {
                *row ^= &*pivot;
                b[next + 1 + k] ^= pivot_b;
            }
        }
        pivots.push(col);
        next += 1;
    }
    Eliminated {
        rows,
        rhs: b,
        pivots,
    }
}

/// Reduces `[m | rhs]` to reduced row echelon form. Pivots are chosen by
/// lowest column index, then lowest row index, so the output is a pure
/// function of the input.
pub fn row_reduce(m: &SparseBitMatrix, rhs: &BitVector) -> RowReduction {
    assert_eq!(rhs.len(), m.num_rows(), "rhs length must equal row count");
    let e = eliminate(m, Some(rhs));
    let rank = e.pivots.len();
    let mut pivot_map = vec![None; m.num_cols()];
    for (r, &c) in e.pivots.iter().enumerate() {
        pivot_map[c] = Some(r);
    }
    let free_columns = (0..m.num_cols())
        .filter(|&c| pivot_map[c].is_none())
        .collect();
    let consistent = !e.rhs[rank..].iter().any(|&b| b);
    let matrix = SparseBitMatrix::from_rows(
        m.num_cols(),
        e.rows.iter().map(BitVector::support).collect(),
    )
    .expect("eliminated rows stay in range");
    RowReduction {
        system: ReducedSystem {
            pivot_map,
            free_columns,
            consistent,
        },
        matrix,
        rhs: BitVector::from_bools(&e.rhs),
    }
}

pub fn rank(m: &SparseBitMatrix) -> usize {
    eliminate(m, None).pivots.len()
}

/// One solution of `m x = rhs` with every free variable set to zero.
pub fn solve_affine(m: &SparseBitMatrix, rhs: &BitVector) -> Result<BitVector, Inconsistent> {
    assert_eq!(rhs.len(), m.num_rows(), "rhs length must equal row count");
    let e = eliminate(m, Some(rhs));
    let rank = e.pivots.len();
    if e.rhs[rank..].iter().any(|&b| b) {
        return Err(Inconsistent);
    }
    let mut x = BitVector::zeros(m.num_cols());
    for (r, &c) in e.pivots.iter().enumerate() {
        if e.rhs[r] {
            x.set(c, true);
        }
    }
    Ok(x)
}

/// Basis of the right kernel `{v : m v = 0}`, one vector per free column
/// in ascending order. The vector for free column `f` is one at `f`, zero
/// at every other free column.
pub fn nullspace_basis(m: &SparseBitMatrix) -> Vec<BitVector> {
    let e = eliminate(m, None);
    let n = m.num_cols();
    let mut is_pivot = vec![false; n];
    for &c in &e.pivots {
        is_pivot[c] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVector::zeros(n);
            v.set(f, true);
            for (r, &c) in e.pivots.iter().enumerate() {
                if e.rows[r].get(f) {
                    v.set(c, true);
                }
            }
            v
        })
        .collect()
}

pub fn in_row_space(m: &SparseBitMatrix, v: &BitVector) -> bool {
    RowSpace::new(m).contains(v)
}

/// Precomputed echelon basis of a row space, for repeated membership queries.
#[derive(Clone, Debug)]
pub struct RowSpace {
    num_cols: usize,
    basis: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(m: &SparseBitMatrix) -> Self {
        let e = eliminate(m, None);
        let rank = e.pivots.len();
        let mut basis = e.rows;
        basis.truncate(rank);
        Self {
            num_cols: m.num_cols(),
            basis,
            pivots: e.pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Clears `v` against the basis; the remainder is zero iff `v` is a member.
    pub fn reduce(&self, v: &mut BitVector) {
        assert_eq!(
            v.len(),
            self.num_cols,
            "vector length must equal column count"
        );
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                *v ^= row;
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` to the space if it is independent; returns whether it was.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        let Some(p) = w.iter_ones().next() else {
            return false;
        };
        for (row, _) in self.basis.iter_mut().zip(&self.pivots) {
            if row.get(p) {
                *row ^= &w;
            }
        }
        self.basis.push(w);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: rank by brute-force enumeration of the row span size.
    fn span_rank(m: &SparseBitMatrix) -> usize {
        let rows = m.to_dense_rows();
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << rows.len()) {
            let mut acc = BitVector::zeros(m.num_cols());
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc ^= r;
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(rank(&SparseBitMatrix::identity(3)), 3);
        assert_eq!(rank(&SparseBitMatrix::zeros(4, 7)), 0);
        assert_eq!(rank(&SparseBitMatrix::zeros(0, 5)), 0);
        assert_eq!(rank(&SparseBitMatrix::zeros(5, 0)), 0);
    }

    #[test]
    fn rank_matches_span_enumeration() {
        let m = SparseBitMatrix::from_dense(
            5,
            &[
                &[1, 1, 0, 0, 1],
                &[0, 1, 1, 0, 0],
                &[1, 0, 1, 0, 1],
                &[0, 0, 0, 1, 1],
                &[1, 1, 1, 1, 0],
            ],
        );
        assert_eq!(rank(&m), span_rank(&m));
    }

    #[test]
    fn row_reduce_upper_triangular() {
        let m = SparseBitMatrix::from_dense(2, &[&[1, 1], &[0, 1]]);
        let s = BitVector::from_support(2, [0, 1]);
        let red = row_reduce(&m, &s);
        assert!(red.system.consistent);
        assert!(red.system.free_columns.is_empty());
        assert_eq!(solve_affine(&m, &s).unwrap().support(), vec![1]);
    }

    #[test]
    fn row_reduce_contradiction() {
        let m = SparseBitMatrix::from_dense(2, &[&[1, 1], &[1, 1]]);
        let s = BitVector::from_support(2, [0]);
        let red = row_reduce(&m, &s);
        assert!(!red.system.consistent);
        assert_eq!(red.system.free_columns, vec![1]);
        assert_eq!(solve_affine(&m, &s), Err(Inconsistent));
    }

    #[test]
    fn row_reduce_is_rref() {
        let m = SparseBitMatrix::from_dense(4, &[&[0, 1, 1, 0], &[1, 1, 0, 1], &[1, 0, 1, 1]]);
        let red = row_reduce(&m, &BitVector::zeros(3));
        assert_eq!(red.system.pivot_columns(), vec![0, 1]);
        assert_eq!(red.matrix.row(0), &[0, 2, 3]);
        assert_eq!(red.matrix.row(1), &[1, 2]);
        assert!(red.matrix.row(2).is_empty());
    }

    #[test]
    fn solve_trivial_systems() {
        let rhs = BitVector::from_support(3, [0, 2]);
        assert_eq!(
            solve_affine(&SparseBitMatrix::identity(3), &rhs).unwrap(),
            rhs
        );
        let z = SparseBitMatrix::zeros(3, 4);
        assert_eq!(
            solve_affine(&z, &BitVector::zeros(3)).unwrap(),
            BitVector::zeros(4)
        );
        assert_eq!(solve_affine(&z, &rhs), Err(Inconsistent));
    }

    #[test]
    fn nullspace_trivial() {
        assert!(nullspace_basis(&SparseBitMatrix::identity(3)).is_empty());
        let basis = nullspace_basis(&SparseBitMatrix::from_dense(2, &[&[1, 1]]));
        assert_eq!(basis, vec![BitVector::from_support(2, [0, 1])]);
        let empty = nullspace_basis(&SparseBitMatrix::zeros(0, 3));
        assert_eq!(empty.len(), 3);
        assert_eq!(empty[2].support(), vec![2]);
    }

    #[test]
    fn row_space_membership() {
        let m = SparseBitMatrix::from_dense(4, &[&[1, 1, 0, 0], &[0, 1, 1, 0]]);
        assert!(in_row_space(&m, &m.row_vector(0)));
        assert!(in_row_space(&m, &BitVector::zeros(4)));
        assert!(in_row_space(&m, &BitVector::from_support(4, [0, 2])));
        assert!(!in_row_space(&m, &BitVector::from_support(4, [3])));
        let mut rs = RowSpace::new(&m);
        assert!(!rs.insert(&BitVector::from_support(4, [0, 2])));
        assert!(rs.insert(&BitVector::from_support(4, [2, 3])));
        assert_eq!(rs.rank(), 3);
        assert!(rs.contains(&BitVector::from_support(4, [0, 3])));
    }
}
