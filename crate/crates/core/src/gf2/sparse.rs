use super::BitVector;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("row {row}: column index {col} out of range for {num_cols} columns")]
    ColumnOutOfRange {
        row: usize,
        col: usize,
        num_cols: usize,
    },
    #[error("row {row}: column index {col} appears more than once")]
    DuplicateEntry { row: usize, col: usize },
}

/// Sparse matrix over GF(2), stored as sorted row supports.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseBitMatrix {
    num_cols: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseBitMatrix {
    pub fn zeros(num_rows: usize, num_cols: usize) -> Self {
        Self {
            num_cols,
            rows: vec![Vec::new(); num_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            num_cols: n,
            rows: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from row supports, sorting each row. Rejects
    /// out-of-range and repeated column indices.
    pub fn from_rows(num_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self, MatrixError> {
        let mut rows = rows;
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(MatrixError::DuplicateEntry { row: r, col: w[0] });
                }
            }
            if let Some(&last) = row.last() {
                if last >= num_cols {
                    return Err(MatrixError::ColumnOutOfRange {
                        row: r,
                        col: last,
                        num_cols,
                    });
                }
            }
        }
        Ok(Self { num_cols, rows })
    }

    /// Builds a matrix from a dense 0/1 table. Convenient in tests.
    pub fn from_dense(num_cols: usize, dense: &[&[u8]]) -> Self {
        let rows = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), num_cols, "dense row has wrong width");
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(c, _)| c)
                    .collect()
            })
            .collect();
        Self { num_cols, rows }
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    pub fn push_row(&mut self, support: Vec<usize>) -> Result<(), MatrixError> {
        let row_index = self.rows.len();
        let checked = Self::from_rows(self.num_cols, vec![support]).map_err(|e| match e {
            MatrixError::ColumnOutOfRange { col, num_cols, .. } => MatrixError::ColumnOutOfRange {
                row: row_index,
                col,
                num_cols,
            },
            MatrixError::DuplicateEntry { col, .. } => MatrixError::DuplicateEntry {
                row: row_index,
                col,
            },
        })?;
        self.rows.extend(checked.rows);
        Ok(())
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector::from_support(self.num_cols, self.rows[i].iter().copied())
    }

    pub fn to_dense_rows(&self) -> Vec<BitVector> {
        (0..self.num_rows()).map(|i| self.row_vector(i)).collect()
    }

    /// Column supports: entry `c` lists the rows with a one in column `c`, ascending.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.num_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                cols[c].push(r);
            }
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        Self {
            num_cols: self.num_rows(),
            rows: self.column_supports(),
        }
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(
            v.len(),
            self.num_cols,
            "vector length must equal column count"
        );
        BitVector::from_support(
            self.num_rows(),
            self.rows
                .iter()
                .enumerate()
                .filter(|(_, row)| v.parity_on(row))
                .map(|(r, _)| r),
        )
    }

    /// Submatrix on the given columns; column `k` of the result is column
    /// `columns[k]` of `self`. `columns` must be distinct.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.num_cols];
        for (k, &c) in columns.iter().enumerate() {
            local[c] = k;
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: Vec<usize> = row
                    .iter()
                    .filter_map(|&c| (local[c] != usize::MAX).then_some(local[c]))
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        Self {
            num_cols: columns.len(),
            rows,
        }
    }

    /// Row-major Kronecker product: entry ((a, b), (i, j)) lives at row
    /// `a * other.rows + b` and column `i * other.cols + j`.
    pub fn kron(&self, other: &SparseBitMatrix) -> Self {
        let mut rows = Vec::with_capacity(self.num_rows() * other.num_rows());
        for a in &self.rows {
            for b in &other.rows {
                let mut row = Vec::with_capacity(a.len() * b.len());
                for &i in a {
                    row.extend(b.iter().map(|&j| i * other.num_cols + j));
                }
                rows.push(row);
            }
        }
        Self {
            num_cols: self.num_cols * other.num_cols,
            rows,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &SparseBitMatrix) -> Self {
        assert_eq!(
            self.num_rows(),
            other.num_rows(),
            "hstack row count mismatch"
        );
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                a.iter()
                    .copied()
                    .chain(b.iter().map(|&c| c + self.num_cols))
                    .collect()
            })
            .collect();
        Self {
            num_cols: self.num_cols + other.num_cols,
            rows,
        }
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &SparseBitMatrix) -> Self {
        assert_eq!(
            self.num_cols, other.num_cols,
            "vstack column count mismatch"
        );
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self {
            num_cols: self.num_cols,
            rows,
        }
    }

    /// First `(self row, other row)` pair with odd overlap, scanning `self`
    /// rows in order; `None` when `self * other^T = 0`.
    pub fn first_odd_overlap(&self, other: &SparseBitMatrix) -> Option<(usize, usize)> {
        assert_eq!(self.num_cols, other.num_cols);
        let cols = other.column_supports();
        let mut hits = vec![0u32; other.num_rows()];
        let mut touched = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                for &o in &cols[c] {
                    if hits[o] == 0 {
                        touched.push(o);
                    }
                    hits[o] += 1;
                }
            }
            touched.sort_unstable();
            let bad = touched.iter().copied().find(|&o| hits[o] % 2 == 1);
            for &o in &touched {
                hits[o] = 0;
            }
            touched.clear();
            if let Some(o) = bad {
                return Some((r, o));
            }
        }
        None
    }
}

/// Symmetric difference of two ascending index lists.
pub fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_validates() {
        assert_eq!(
            SparseBitMatrix::from_rows(3, vec![vec![0, 3]]),
            Err(MatrixError::ColumnOutOfRange {
                row: 0,
                col: 3,
                num_cols: 3
            })
        );
        assert_eq!(
            SparseBitMatrix::from_rows(3, vec![vec![1], vec![2, 2]]),
            Err(MatrixError::DuplicateEntry { row: 1, col: 2 })
        );
        let m = SparseBitMatrix::from_rows(4, vec![vec![3, 0, 2]]).unwrap();
        assert_eq!(m.row(0), &[0, 2, 3]);
    }

    #[test]
    fn mul_vec_picks_columns() {
        let m = SparseBitMatrix::from_dense(3, &[&[1, 1, 0], &[0, 1, 1]]);
        let e = BitVector::from_support(3, [1]);
        assert_eq!(m.mul_vec(&e).support(), vec![0, 1]);
        assert!(m.mul_vec(&BitVector::zeros(3)).is_zero());
    }

    #[test]
    fn kron_and_stack_shapes() {
        let a = SparseBitMatrix::from_dense(2, &[&[1, 1]]);
        let i2 = SparseBitMatrix::identity(2);
        let k = a.kron(&i2);
        assert_eq!((k.num_rows(), k.num_cols()), (2, 4));
        assert_eq!(k.row(0), &[0, 2]);
        assert_eq!(k.row(1), &[1, 3]);
        let h = k.hstack(&i2);
        assert_eq!(h.row(1), &[1, 3, 5]);
        assert_eq!(h.vstack(&h).num_rows(), 4);
    }

    #[test]
    fn transpose_roundtrip() {
        let m = SparseBitMatrix::from_dense(3, &[&[1, 0, 1], &[0, 1, 1]]);
        let t = m.transpose();
        assert_eq!(t.row(2), &[0, 1]);
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn select_columns_reorders() {
        let m = SparseBitMatrix::from_dense(4, &[&[1, 0, 1, 1]]);
        assert_eq!(m.select_columns(&[3, 1, 0]).row(0), &[0, 2]);
    }

    #[test]
    fn xor_sorted_merges() {
        assert_eq!(xor_sorted(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert!(xor_sorted(&[2], &[2]).is_empty());
    }
}
