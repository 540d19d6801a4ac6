//! Unstructured T-meshes: construction, classification, and admissibility.
//!
//! A T-mesh here is a manifold quad mesh whose faces are rectangles in their
//! own parametric frames but whose *sides* may be chains of several edges —
//! the extra chain vertices are T-junctions. Interior vertices with other than
//! four edges (and boundary vertices with more than three) are extraordinary
//! points (EPs). Faces may have any number of EP corners, up to all four.
//!
//! ```text
//!     ┌────┬────┬────┐        ● = extraordinary point (valence 5)
//!     │    │    │    │        ┬ = T-junction (mid-side of the face above)
//!     ├────┼────●────┤
//!     │    │   /│\   │
//!     ├────┬──┴──┴───┤
//!     │    │         │
//!     └────┴────┴────┘
//! ```
//!
//! Faces are supplied as plain cyclic vertex loops; which loop vertices are
//! corners is *inferred* from the topology alone (see [`build`]), so input
//! files never label corners. Every edge carries a nonnegative knot span, and
//! a validated mesh knows its rotation system: the cyclic order of edges and
//! faces around every vertex, which later drives extraordinary-point sector
//! frames and marching.
//!
//! Submodules:
//! - [`build`]: loops → validated [`TMesh`] (manifoldness, orientation,
//!   corner inference, vertex stars).
//! - [`classify`]: vertex kinds, T-junction records, face classes
//!   (irregular / transition / regular), rings, disks, boundary layers.
//! - [`ext`]: T-junction extensions by face marching with exact rational
//!   segment arithmetic, and the four admissibility rules.

pub mod build;
pub mod classify;
pub mod ext;

pub use build::build_tmesh;
pub use classify::{classify, Classification, FaceClass, TJunction, VertexKind};
pub use ext::{check_admissibility, compute_extensions, AdmissibilityReport, ExtSeg, Extensions, Violation};

use std::collections::BTreeMap;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// Raw mesh description, as parsed from a mesh file or built by a generator.
#[derive(Debug, Clone, Default)]
pub struct MeshInput {
    /// Vertex positions (z = 0 for planar meshes).
    pub vertices: Vec<[f64; 3]>,
    /// Faces as cyclic vertex-id loops of length ≥ 4; corners are inferred.
    pub faces: Vec<Vec<VertexId>>,
    /// Knot spans per undirected edge, keyed by `(min id, max id)`.
    /// Edges absent from the map default to span 1.
    pub spans: BTreeMap<(VertexId, VertexId), f64>,
}

impl MeshInput {
    /// Span lookup with the default of 1 for unlisted edges.
    pub fn span(&self, a: VertexId, b: VertexId) -> f64 {
        let key = (a.min(b), a.max(b));
        self.spans.get(&key).copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub pos: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Endpoints, ordered `v[0] < v[1]` (canonical undirected form).
    pub v: [VertexId; 2],
    /// Knot span (parametric length); zero is allowed.
    pub span: f64,
    /// Incident faces: one for boundary edges, two for interior edges.
    pub faces: Vec<FaceId>,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.v[0] == v {
            self.v[1]
        } else {
            self.v[0]
        }
    }

    pub fn has(&self, v: VertexId) -> bool {
        self.v[0] == v || self.v[1] == v
    }

    pub fn is_boundary(&self) -> bool {
        self.faces.len() == 1
    }
}

/// A face after corner inference: a topological rectangle whose sides are
/// edge chains.
#[derive(Debug, Clone)]
pub struct Face {
    /// The full cyclic vertex loop, oriented consistently with the rest of
    /// the mesh (face 0 keeps its input winding).
    pub loop_vertices: Vec<VertexId>,
    /// Indices into `loop_vertices` of the four corners, increasing from the
    /// loop's first corner.
    pub corner_pos: [usize; 4],
    /// Side `k` is the edge chain from corner `k` to corner `k+1 (mod 4)`.
    pub sides: [Vec<EdgeId>; 4],
}

impl Face {
    pub fn corners(&self) -> [VertexId; 4] {
        core::array::from_fn(|k| self.loop_vertices[self.corner_pos[k]])
    }

    /// Loop vertices strictly between corner `k` and corner `k+1` (the
    /// T-junctions sitting on side `k`).
    pub fn side_interior_vertices(&self, k: usize) -> Vec<VertexId> {
        let n = self.loop_vertices.len();
        let a = self.corner_pos[k];
        let b = self.corner_pos[(k + 1) % 4];
        let mut out = Vec::new();
        let mut i = (a + 1) % n;
        while i != b {
            out.push(self.loop_vertices[i]);
            i = (i + 1) % n;
        }
        out
    }
}

/// Cyclic (counter-clockwise) arrangement of edges and faces around a vertex.
///
/// `faces[i]` lies between `edges[i]` and `edges[i+1]`; for interior vertices
/// the edge list wraps around (`faces.len() == edges.len()`), for boundary
/// vertices it is an open arc starting and ending at the two boundary edges
/// (`faces.len() == edges.len() - 1`).
#[derive(Debug, Clone, Default)]
pub struct VertexStar {
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
    pub closed: bool,
}

impl VertexStar {
    /// Number of incident edges (the vertex valence).
    pub fn valence(&self) -> usize {
        self.edges.len()
    }

    /// Position of `e` in the cyclic edge order.
    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }
}

/// A validated T-mesh with adjacency and rotation system.
#[derive(Debug, Clone)]
pub struct TMesh {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Rotation system: cyclic edge/face order around each vertex.
    pub stars: Vec<VertexStar>,
    /// True when the mesh has no boundary edges (a closed surface).
    pub closed: bool,
    /// Per-vertex boundary flags.
    pub on_boundary: Vec<bool>,
    edge_index: BTreeMap<(VertexId, VertexId), EdgeId>,
}

impl TMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Edge id for the undirected pair `(a, b)`, if present.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// The face on the other side of edge `e` from face `f`.
    pub fn face_across(&self, e: EdgeId, f: FaceId) -> Option<FaceId> {
        self.edges[e].faces.iter().copied().find(|&g| g != f)
    }

    /// Parametric side lengths `(su, sv)` of face `f`: the span sums of sides
    /// 0 and 3 (validated elsewhere to match sides 2 and 1).
    pub fn face_extent(&self, f: FaceId) -> (f64, f64) {
        let face = &self.faces[f];
        let sum = |k: usize| face.sides[k].iter().map(|&e| self.edges[e].span).sum::<f64>();
        (sum(0), sum(3))
    }

    /// Sum of spans along side `k` of face `f`.
    pub fn side_span(&self, f: FaceId, k: usize) -> f64 {
        self.faces[f].sides[k].iter().map(|&e| self.edges[e].span).sum()
    }

    /// Valence (number of incident edges) of vertex `v`.
    pub fn valence(&self, v: VertexId) -> usize {
        self.stars[v].valence()
    }

    pub(crate) fn set_edge_index(&mut self, idx: BTreeMap<(VertexId, VertexId), EdgeId>) {
        self.edge_index = idx;
    }
}

/// Errors raised while validating mesh input.
#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("face {face} refers to unknown vertex {vertex}")]
    UnknownVertex { face: FaceId, vertex: VertexId },
    #[error("face {face} has {len} vertices; at least 4 are required")]
    FaceTooSmall { face: FaceId, len: usize },
    #[error("face {face} repeats vertex {vertex} in its loop")]
    RepeatedVertex { face: FaceId, vertex: VertexId },
    #[error("edge ({a}, {b}) borders {count} faces; a manifold edge borders at most 2")]
    NonManifoldEdge { a: VertexId, b: VertexId, count: usize },
    #[error("vertex {vertex} is not used by any face")]
    DanglingVertex { vertex: VertexId },
    #[error("vertex {vertex} has valence {valence}, below the minimum of {min} for its position")]
    ValenceTooLow { vertex: VertexId, valence: usize, min: usize },
    #[error("faces cannot be oriented consistently (edge between {a} and {b})")]
    NotOrientable { a: VertexId, b: VertexId },
    #[error("the edge/face fan around vertex {vertex} is not a single disk")]
    NonManifoldVertex { vertex: VertexId },
    #[error("ambiguous corner structure: face {face} needs {needed} mid-side vertices but they cannot be determined")]
    AmbiguousCorners { face: FaceId, needed: usize },
    #[error("negative knot span {span} on edge ({a}, {b})")]
    NegativeSpan { a: VertexId, b: VertexId, span: f64 },
    #[error("mesh has no faces")]
    Empty,
    #[error("{0}")]
    Knot(String),
    #[error("{0}")]
    Traversal(String),
}
