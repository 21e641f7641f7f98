//! Near-linear ML erasure decoding for planar surface codes.
//!
//! Exhaustive Rule-1 elimination on a surface code is edge contraction
//! on the dual lattice: every known edge between two stabilizer cells
//! merges them. A merged component whose boundary touches no known edge
//! is a fully erased stabilizer; pinning one of its boundary edges to
//! zero leaves an erased subgraph that peeling clears unless an erased
//! logical is present.
//!
//! For X errors the cells are faces; for Z errors they are vertices.

use crate::channel::ErasureInstance;
use crate::codes::{CssCode, ErrorType, SurfaceLattice};
use crate::decoders::{inactivation_decode, peel, DecodeResult};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("code {0} has no planar lattice metadata")]
    NoLattice(String),
}

/// Union-find over stabilizer cells, with the per-component marks
/// gathered by [`contract_known_edges`].
#[derive(Clone, Debug)]
pub struct FacePartition {
    parent: Vec<u32>,
    size: Vec<u32>,
    /// root -> some boundary edge of the component is known
    known_support: Vec<bool>,
    /// root -> lowest erased edge on the component boundary
    representative: Vec<Option<usize>>,
}

impl FacePartition {
    pub fn new(cells: usize) -> Self {
        Self {
            parent: (0..cells as u32).collect(),
            size: vec![1; cells],
            known_support: vec![false; cells],
            representative: vec![None; cells],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Merges the components of `a` and `b`; false if already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn num_cells(&self) -> usize {
        self.parent.len()
    }

    fn is_root(&self, x: usize) -> bool {
        self.parent[x] as usize == x
    }

    /// Roots of the fully erased components, ascending.
    pub fn fully_erased_roots(&self) -> Vec<usize> {
        (0..self.num_cells())
            .filter(|&r| self.is_root(r) && !self.known_support[r])
            .collect()
    }

    pub fn representative(&self, root: usize) -> Option<usize> {
        self.representative[root]
    }
}

fn cells_of(lattice: &SurfaceLattice, side: ErrorType) -> (usize, &[(usize, Option<usize>)]) {
    match side {
        ErrorType::X => (lattice.num_faces, &lattice.edge_faces),
        ErrorType::Z => (lattice.num_vertices, &lattice.edge_vertices),
    }
}

/// Contracts every known two-cell edge, then marks components that keep
/// a known boundary edge and picks a representative erased edge for the
/// rest.
pub fn contract_known_edges(
    code: &CssCode,
    erased: &[usize],
    side: ErrorType,
) -> Result<FacePartition, SurfaceError> {
    let lattice = code
        .lattice()
        .ok_or_else(|| SurfaceError::NoLattice(code.name().to_string()))?;
    let (num_cells, edge_cells) = cells_of(lattice, side);
    let mut is_erased = vec![false; edge_cells.len()];
    for &e in erased {
        is_erased[e] = true;
    }
    let mut part = FacePartition::new(num_cells);
    for (e, &(a, b)) in edge_cells.iter().enumerate() {
        if let (false, Some(b)) = (is_erased[e], b) {
            part.union(a, b);
        }
    }
    // ascending edge scan, so the first erased boundary edge seen is the lowest
    for (e, &(a, b)) in edge_cells.iter().enumerate() {
        let ra = part.find(a);
        match b {
            None if !is_erased[e] => part.known_support[ra] = true,
            None => {
                part.representative[ra].get_or_insert(e);
            }
            Some(b) => {
                let rb = part.find(b);
                if ra != rb {
                    part.representative[ra].get_or_insert(e);
                    part.representative[rb].get_or_insert(e);
                }
            }
        }
    }
    Ok(part)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceDecode {
    pub result: DecodeResult,
    pub fully_erased_components: usize,
    /// An erased logical was present, so the estimate is a tie-break.
    pub tie: bool,
}

/// Fixes one boundary edge of each fully erased component to zero, then
/// peels. If peeling stalls, an erased logical exists and the reduced
/// system is finished by inactivation.
pub fn surface_ml_decode(
    code: &CssCode,
    inst: &ErasureInstance,
    side: ErrorType,
) -> Result<SurfaceDecode, SurfaceError> {
    let part = contract_known_edges(code, &inst.erased, side)?;
    let roots = part.fully_erased_roots();
    let mut fixed = vec![false; code.n()];
    for &r in &roots {
        let e = part
            .representative(r)
            .expect("fully erased component has a boundary edge");
        fixed[e] = true;
    }
    let reduced: Vec<usize> = inst.erased.iter().copied().filter(|&q| !fixed[q]).collect();
    let h = code.checks(side);
    let s = inst.syndrome(side);
    let (mut result, residual) = peel(h, &reduced, s);
    let tie = !residual.is_empty();
    if tie {
        result = inactivation_decode(h, &reduced, s);
    }
    result.stats.num_fixed_bits = roots.len();
    Ok(SurfaceDecode {
        result,
        fully_erased_components: roots.len(),
        tie,
    })
}
