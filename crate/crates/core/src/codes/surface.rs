use super::{ConstructionError, CssCode};
use crate::gf2::SparseBitMatrix;

/// Geometry of a distance-`d` planar surface code.
///
/// Vertices sit on a `d x (d-1)` grid. Each of the `d` rows carries `d`
/// horizontal edges; the outermost two of every row dangle off the left and
/// right (rough) boundaries. Between consecutive rows run `d-1` vertical
/// edges. Faces sit between consecutive rows, `d` per band; the faces in the
/// first and last column are weight-3 boundary plaquettes.
///
/// Edge numbering: horizontal edge `(r, c)` is `r*d + c`, vertical edge
/// `(r, c)` is `d^2 + r*(d-1) + c`. Vertex `(r, c)` is `r*(d-1) + c`, face
/// `(r, c)` is `r*d + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLattice {
    pub distance: usize,
    pub num_vertices: usize,
    pub num_faces: usize,
    /// Endpoints of each edge; dangling edges have a single vertex.
    pub edge_vertices: Vec<(usize, Option<usize>)>,
    /// Faces incident to each edge; top and bottom boundary edges have one.
    pub edge_faces: Vec<(usize, Option<usize>)>,
    pub face_edges: Vec<Vec<usize>>,
    pub vertex_edges: Vec<Vec<usize>>,
}

impl SurfaceLattice {
    pub fn new(d: usize) -> Self {
        assert!(d >= 2, "surface lattice needs d >= 2");
        let h = |r: usize, c: usize| r * d + c;
        let v = |r: usize, c: usize| d * d + r * (d - 1) + c;
        let vertex = |r: usize, c: usize| r * (d - 1) + c;
        let face = |r: usize, c: usize| r * d + c;
        let n = d * d + (d - 1) * (d - 1);
        let num_vertices = d * (d - 1);
        let num_faces = d * (d - 1);

        let mut edge_vertices = vec![(usize::MAX, None); n];
        let mut edge_faces = vec![(usize::MAX, None); n];
        for r in 0..d {
            for c in 0..d {
                let left = (c >= 1).then(|| vertex(r, c - 1));
                let right = (c + 1 < d).then(|| vertex(r, c));
                edge_vertices[h(r, c)] = match (left, right) {
                    (Some(a), b) => (a, b),
                    (None, Some(b)) => (b, None),
                    (None, None) => unreachable!("d >= 2"),
                };
                let above = (r >= 1).then(|| face(r - 1, c));
                let below = (r + 1 < d).then(|| face(r, c));
                edge_faces[h(r, c)] = match (above, below) {
                    (Some(a), b) => (a, b),
                    (None, Some(b)) => (b, None),
                    (None, None) => unreachable!("d >= 2"),
                };
            }
        }
        for r in 0..d - 1 {
            for c in 0..d - 1 {
                edge_vertices[v(r, c)] = (vertex(r, c), Some(vertex(r + 1, c)));
                edge_faces[v(r, c)] = (face(r, c), Some(face(r, c + 1)));
            }
        }

        let mut face_edges = vec![Vec::new(); num_faces];
        let mut vertex_edges = vec![Vec::new(); num_vertices];
        for e in 0..n {
            let (a, b) = edge_faces[e];
            face_edges[a].push(e);
            if let Some(b) = b {
                face_edges[b].push(e);
            }
            let (a, b) = edge_vertices[e];
            vertex_edges[a].push(e);
            if let Some(b) = b {
                vertex_edges[b].push(e);
            }
        }

        Self {
            distance: d,
            num_vertices,
            num_faces,
            edge_vertices,
            edge_faces,
            face_edges,
            vertex_edges,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edge_faces.len()
    }

    /// X-type checks, one per face.
    pub fn face_checks(&self) -> SparseBitMatrix {
        SparseBitMatrix::from_rows(self.num_edges(), self.face_edges.clone())
            .expect("face supports are valid")
    }

    /// Z-type checks, one per vertex star.
    pub fn vertex_checks(&self) -> SparseBitMatrix {
        SparseBitMatrix::from_rows(self.num_edges(), self.vertex_edges.clone())
            .expect("vertex supports are valid")
    }
}

/// Planar surface code of distance `d`: `n = d^2 + (d-1)^2`, `k = 1`.
pub fn surface_code(d: usize) -> Result<CssCode, ConstructionError> {
    if d < 2 {
        return Err(ConstructionError::DistanceTooSmall(d));
    }
    let lattice = SurfaceLattice::new(d);
    let code = CssCode::new(
        format!("surface-{d}"),
        lattice.face_checks(),
        lattice.vertex_checks(),
    )
    .expect("planar surface code is a valid CSS code");
    Ok(code.with_lattice(lattice))
}
