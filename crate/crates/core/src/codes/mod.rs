//! CSS codes: construction, validation, logical operators and bundle IO.

mod hgp;
mod io;
mod surface;

use crate::gf2::{nullspace_basis, rank, BitVector, RowSpace, SparseBitMatrix};
use std::sync::OnceLock;
use thiserror::Error;

pub use hgp::{hgp, random_check_matrix, shipped_hgp, ConstructionError};
pub use io::{load, read_matrix_market, save, write_matrix_market, BundleError};
pub use surface::{surface_code, SurfaceLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("hx has {hx_cols} columns but hz has {hz_cols}")]
    ColumnMismatch { hx_cols: usize, hz_cols: usize },
    #[error("X-check row {x_row} and Z-check row {z_row} overlap on an odd number of qubits")]
    Anticommuting { x_row: usize, z_row: usize },
    #[error("stored k = {stored} but n - rank(hx) - rank(hz) = {computed}")]
    LogicalCount { stored: usize, computed: i64 },
}

/// Which Pauli component an error vector describes.
///
/// X errors are detected by the Z-type checks `hz` and are equivalent up
/// to X-type stabilizers (rows of `hx`); Z errors are the mirror image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorType {
    X,
    Z,
}

impl ErrorType {
    pub const BOTH: [ErrorType; 2] = [ErrorType::X, ErrorType::Z];
}

/// A CSS code given by its X-type and Z-type check matrices.
#[derive(Debug)]
pub struct CssCode {
    name: String,
    hx: SparseBitMatrix,
    hz: SparseBitMatrix,
    k: usize,
    lattice: Option<SurfaceLattice>,
    hx_space: OnceLock<RowSpace>,
    hz_space: OnceLock<RowSpace>,
}

impl Clone for CssCode {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            hx: self.hx.clone(),
            hz: self.hz.clone(),
            k: self.k,
            lattice: self.lattice.clone(),
            hx_space: OnceLock::new(),
            hz_space: OnceLock::new(),
        }
    }
}

fn computed_k(hx: &SparseBitMatrix, hz: &SparseBitMatrix) -> i64 {
    hx.num_cols() as i64 - rank(hx) as i64 - rank(hz) as i64
}

impl CssCode {
    /// Builds and validates a code, deriving `k` from the check ranks.
    pub fn new(
        name: impl Into<String>,
        hx: SparseBitMatrix,
        hz: SparseBitMatrix,
    ) -> Result<Self, ValidationError> {
        if hx.num_cols() != hz.num_cols() {
            return Err(ValidationError::ColumnMismatch {
                hx_cols: hx.num_cols(),
                hz_cols: hz.num_cols(),
            });
        }
        let k = computed_k(&hx, &hz);
        let code = Self::from_parts(name, hx, hz, k.max(0) as usize);
        code.validate()?;
        Ok(code)
    }

    /// Assembles a code with a claimed logical count without checking it.
    pub fn from_parts(
        name: impl Into<String>,
        hx: SparseBitMatrix,
        hz: SparseBitMatrix,
        k: usize,
    ) -> Self {
        Self {
            name: name.into(),
            hx,
            hz,
            k,
            lattice: None,
            hx_space: OnceLock::new(),
            hz_space: OnceLock::new(),
        }
    }

    pub(crate) fn with_lattice(mut self, lattice: SurfaceLattice) -> Self {
        self.lattice = Some(lattice);
        self
    }

    /// Checks `hx hz^T = 0` and that the stored `k` equals `n - rank(hx) - rank(hz)`.
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.hx.num_cols() != self.hz.num_cols() {
            return Err(ValidationError::ColumnMismatch {
                hx_cols: self.hx.num_cols(),
                hz_cols: self.hz.num_cols(),
            });
        }
        if let Some((x_row, z_row)) = self.hx.first_odd_overlap(&self.hz) {
            return Err(ValidationError::Anticommuting { x_row, z_row });
        }
        let computed = computed_k(&self.hx, &self.hz);
        if computed != self.k as i64 {
            return Err(ValidationError::LogicalCount {
                stored: self.k,
                computed,
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.hx.num_cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn hx(&self) -> &SparseBitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &SparseBitMatrix {
        &self.hz
    }

    pub fn lattice(&self) -> Option<&SurfaceLattice> {
        self.lattice.as_ref()
    }

    /// Check matrix whose syndrome detects errors of type `side`.
    pub fn checks(&self, side: ErrorType) -> &SparseBitMatrix {
        match side {
            ErrorType::X => &self.hz,
            ErrorType::Z => &self.hx,
        }
    }

    /// Stabilizer matrix of the same Pauli type as errors of type `side`.
    pub fn stabilizers(&self, side: ErrorType) -> &SparseBitMatrix {
        match side {
            ErrorType::X => &self.hx,
            ErrorType::Z => &self.hz,
        }
    }

    /// Cached echelon basis of [`Self::stabilizers`].
    pub fn stabilizer_space(&self, side: ErrorType) -> &RowSpace {
        match side {
            ErrorType::X => self.hx_space.get_or_init(|| RowSpace::new(&self.hx)),
            ErrorType::Z => self.hz_space.get_or_init(|| RowSpace::new(&self.hz)),
        }
    }

    /// Logical operators of both types: kernel vectors of the opposite
    /// check matrix that enlarge the stabilizer row space, kept in kernel
    /// basis order.
    pub fn logical_basis(&self) -> LogicalBasis {
        let pick = |side: ErrorType| {
            let mut space = self.stabilizer_space(side).clone();
            nullspace_basis(self.checks(side))
                .into_iter()
                .filter(|v| space.insert(v))
                .collect::<Vec<_>>()
        };
        LogicalBasis {
            x_logicals: pick(ErrorType::X),
            z_logicals: pick(ErrorType::Z),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalBasis {
    pub x_logicals: Vec<BitVector>,
    pub z_logicals: Vec<BitVector>,
}

impl LogicalBasis {
    pub fn for_side(&self, side: ErrorType) -> &[BitVector] {
        match side {
            ErrorType::X => &self.x_logicals,
            ErrorType::Z => &self.z_logicals,
        }
    }
}
