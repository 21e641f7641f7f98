//! Sparse linear algebra over GF(2).
//!
//! Matrices keep sorted row supports as the source of truth. Elimination
//! works on packed dense rows internally and always pivots on the lowest
//! column index, then the lowest row index, so every result is
//! reproducible bit for bit.

mod bitvec;
mod elimination;
mod sparse;

pub use bitvec::BitVector;
pub use elimination::{
    in_row_space, nullspace_basis, rank, row_reduce, solve_affine, Inconsistent, ReducedSystem,
    RowReduction, RowSpace,
};
pub use sparse::{xor_sorted, MatrixError, SparseBitMatrix};
