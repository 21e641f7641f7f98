use super::CssCode;
use crate::gf2::SparseBitMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("surface code distance must be at least 2, got {0}")]
    DistanceTooSmall(usize),
    #[error("hypergraph product input has a zero dimension ({rows}x{cols})")]
    EmptyInput { rows: usize, cols: usize },
}

/// Hypergraph product of two classical check matrices.
///
/// `hx = [h1 (x) I_n2 | I_m1 (x) h2^T]`, `hz = [I_n1 (x) h2 | h1^T (x) I_m2]`,
/// with the `n1*n2` left-block qubits first and row-major Kronecker indexing.
pub fn hgp(h1: &SparseBitMatrix, h2: &SparseBitMatrix) -> Result<CssCode, ConstructionError> {
    for h in [h1, h2] {
        if h.num_rows() == 0 || h.num_cols() == 0 {
            return Err(ConstructionError::EmptyInput {
                rows: h.num_rows(),
                cols: h.num_cols(),
            });
        }
    }
    let (m1, n1) = (h1.num_rows(), h1.num_cols());
    let (m2, n2) = (h2.num_rows(), h2.num_cols());
    let hx = h1
        .kron(&SparseBitMatrix::identity(n2))
        .hstack(&SparseBitMatrix::identity(m1).kron(&h2.transpose()));
    let hz = SparseBitMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&SparseBitMatrix::identity(m2)));
    let name = format!("hgp-{m1}x{n1}-{m2}x{n2}");
    Ok(CssCode::new(name, hx, hz).expect("hypergraph products are valid CSS codes"))
}

/// Uniformly random `rows x cols` check matrix with no zero row or column,
/// drawn by rejection from a seeded stream.
pub fn random_check_matrix(rows: usize, cols: usize, seed: u64) -> SparseBitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let supports: Vec<Vec<usize>> = (0..rows)
            .map(|_| (0..cols).filter(|_| rng.gen::<bool>()).collect())
            .collect();
        let m = SparseBitMatrix::from_rows(cols, supports).expect("indices in range");
        let col_ok = m.column_supports().iter().all(|c| !c.is_empty());
        let row_ok = m.rows().iter().all(|r| !r.is_empty());
        if col_ok && row_ok {
            return m;
        }
    }
}

/// Seeds of the two 3x6 factors of the shipped hypergraph-product instance.
pub const SHIPPED_HGP_SEEDS: (u64, u64) = (2026, 7);

/// The hypergraph product of two fixed random 3x6 check matrices used in
/// tests and the CLI (`hgp:shipped`).
pub fn shipped_hgp() -> CssCode {
    let h1 = random_check_matrix(3, 6, SHIPPED_HGP_SEEDS.0);
    let h2 = random_check_matrix(3, 6, SHIPPED_HGP_SEEDS.1);
    let code = hgp(&h1, &h2).expect("nonempty factors");
    CssCode::from_parts(
        "hgp-shipped",
        code.hx().clone(),
        code.hz().clone(),
        code.k(),
    )
}
