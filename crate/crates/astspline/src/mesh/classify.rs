//! Vertex and face classification: T-junctions, extraordinary points, rings,
//! disks, and boundary layers.
//!
//! Terminology used throughout the crate:
//!
//! - A **T-junction** is an interior valence-3 vertex that sits mid-side
//!   (flat) in exactly one face, its *crossbar* face; the edge pointing away
//!   from the crossbar is its *stem*.
//! - An **extraordinary point** (EP) is an interior vertex whose valence is
//!   not 4 and that is not a T-junction, or a boundary vertex with valence
//!   above 3. Edges at an EP are its *spokes*.
//! - Faces containing an EP are **irregular**; faces touching an irregular
//!   face (sharing at least a vertex) are **transition**; everything else is
//!   **regular**. Irregular faces with all four corners extraordinary are
//!   *totally* irregular — they are fully supported here.
//! - The **m-ring** of an EP counts face neighborhoods by vertex contact:
//!   ring 1 holds the faces containing the EP, ring `k` the faces touching
//!   ring `k−1`. The **m-disk** is the union of rings 1..m.
//! - **Layers** count distance from the mesh boundary: a face has layer 1 if
//!   it contains a boundary vertex, else one more than the smallest layer it
//!   touches; a vertex has layer 0 on the boundary, else the smallest layer
//!   of its faces. Closed surfaces have no boundary; layers are reported as
//!   `usize::MAX` there.

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    /// Interior, valence 4.
    RegularInterior,
    /// Boundary, valence 2 or 3.
    RegularBoundary,
    /// Interior valence-3 vertex lying mid-side of its crossbar face.
    TJunction,
    /// Extraordinary point (interior valence ≠ 4 and not a T-junction, or
    /// boundary valence > 3).
    Extraordinary,
}

/// A T-junction with its local frame of reference.
#[derive(Debug, Clone)]
pub struct TJunction {
    pub vertex: VertexId,
    /// The face this vertex is mid-side of.
    pub crossbar: FaceId,
    /// The edge pointing away from the crossbar face.
    pub stem: EdgeId,
    /// The two collinear side edges along the crossbar's side, in loop order.
    pub side_edges: [EdgeId; 2],
    /// The loop vertices on either side along the crossbar side.
    pub side_neighbors: [VertexId; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceClass {
    /// Contains at least one extraordinary corner (1-ring of an EP).
    Irregular,
    /// Touches an irregular face (2-ring of an EP).
    Transition,
    /// Everything else: standard T-spline extraction applies.
    Regular,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub kinds: Vec<VertexKind>,
    /// Extraordinary points in ascending vertex order.
    pub eps: Vec<VertexId>,
    pub tjunctions: Vec<TJunction>,
    /// T-junction record index per vertex id.
    pub tj_of_vertex: BTreeMap<VertexId, usize>,
    pub face_class: Vec<FaceClass>,
    pub irregular_faces: Vec<FaceId>,
    pub transition_faces: Vec<FaceId>,
    /// Face in the 3-disk of at least one EP.
    pub in_ep_disk3: Vec<bool>,
    /// Distance-from-boundary layers (`usize::MAX` on closed surfaces).
    pub face_layer: Vec<usize>,
    pub vertex_layer: Vec<usize>,
}

impl Classification {
    pub fn is_ep(&self, v: VertexId) -> bool {
        self.kinds[v] == VertexKind::Extraordinary
    }

    /// Number of irregular faces whose corners are all extraordinary.
    pub fn totally_irregular_count(&self, mesh: &TMesh) -> usize {
        self.irregular_faces
            .iter()
            .filter(|&&f| mesh.faces[f].corners().iter().all(|&c| self.is_ep(c)))
            .count()
    }
}

/// Classify every vertex and face of a validated mesh.
pub fn classify(mesh: &TMesh) -> Classification {
    let nv = mesh.num_vertices();
    let nf = mesh.num_faces();

    // ---- flat occurrences (vertex mid-side of a face) ---------------------
    let mut flat_in: BTreeMap<VertexId, FaceId> = BTreeMap::new();
    for (f, face) in mesh.faces.iter().enumerate() {
        for k in 0..4 {
            for v in face.side_interior_vertices(k) {
                let prev = flat_in.insert(v, f);
                debug_assert!(prev.is_none(), "vertex {v} flat in two faces");
            }
        }
    }

    // ---- vertex kinds -----------------------------------------------------
    let mut kinds = Vec::with_capacity(nv);
    for v in 0..nv {
        let mu = mesh.valence(v);
        let kind = if mesh.on_boundary[v] {
            if mu <= 3 {
                VertexKind::RegularBoundary
            } else {
                VertexKind::Extraordinary
            }
        } else if mu == 4 {
            VertexKind::RegularInterior
        } else if mu == 3 && flat_in.contains_key(&v) {
            VertexKind::TJunction
        } else {
            VertexKind::Extraordinary
        };
        kinds.push(kind);
    }
    let eps: Vec<VertexId> = (0..nv).filter(|&v| kinds[v] == VertexKind::Extraordinary).collect();

    // ---- T-junction records ----------------------------------------------
    let mut tjunctions = Vec::new();
    let mut tj_of_vertex = BTreeMap::new();
    for v in 0..nv {
        if kinds[v] != VertexKind::TJunction {
            continue;
        }
        let crossbar = flat_in[&v];
        let face = &mesh.faces[crossbar];
        let n = face.loop_vertices.len();
        let i = face.loop_vertices.iter().position(|&x| x == v).unwrap();
        let prev = face.loop_vertices[(i + n - 1) % n];
        let next = face.loop_vertices[(i + 1) % n];
        let e_prev = mesh.edge_between(prev, v).unwrap();
        let e_next = mesh.edge_between(v, next).unwrap();
        let stem = mesh.stars[v]
            .edges
            .iter()
            .copied()
            .find(|&e| e != e_prev && e != e_next)
            .expect("T-junction stem");
        tj_of_vertex.insert(v, tjunctions.len());
        tjunctions.push(TJunction {
            vertex: v,
            crossbar,
            stem,
            side_edges: [e_prev, e_next],
            side_neighbors: [prev, next],
        });
    }

    // ---- face classes via EP rings ---------------------------------------
    let ring1: Vec<FaceId> = (0..nf)
        .filter(|&f| mesh.faces[f].loop_vertices.iter().any(|&v| kinds[v] == VertexKind::Extraordinary))
        .collect();
    let ring_of = face_rings(mesh, &ring1);
    let mut face_class = Vec::with_capacity(nf);
    let mut irregular_faces = Vec::new();
    let mut transition_faces = Vec::new();
    for (f, &ring) in ring_of.iter().enumerate() {
        let class = match ring {
            1 => FaceClass::Irregular,
            2 => FaceClass::Transition,
            _ => FaceClass::Regular,
        };
        if class == FaceClass::Irregular {
            irregular_faces.push(f);
        }
        if class == FaceClass::Transition {
            transition_faces.push(f);
        }
        face_class.push(class);
    }
    let in_ep_disk3: Vec<bool> = (0..nf).map(|f| ring_of[f] <= 3).collect();

    // ---- boundary layers --------------------------------------------------
    let seeds: Vec<FaceId> = (0..nf)
        .filter(|&f| mesh.faces[f].loop_vertices.iter().any(|&v| mesh.on_boundary[v]))
        .collect();
    let face_layer = face_rings(mesh, &seeds);
    let vertex_layer: Vec<usize> = (0..nv)
        .map(|v| {
            if mesh.on_boundary[v] {
                0
            } else {
                mesh.stars[v].faces.iter().map(|&f| face_layer[f]).min().unwrap_or(usize::MAX)
            }
        })
        .collect();

    Classification {
        kinds,
        eps,
        tjunctions,
        tj_of_vertex,
        face_class,
        irregular_faces,
        transition_faces,
        in_ep_disk3,
        face_layer,
        vertex_layer,
    }
}

/// Breadth-first face "ring" numbers from seed faces, where adjacency is
/// sharing at least one vertex. Seeds get 1, untouched faces `usize::MAX`.
pub fn face_rings(mesh: &TMesh, seeds: &[FaceId]) -> Vec<usize> {
    let nf = mesh.num_faces();
    let mut ring = vec![usize::MAX; nf];
    let mut frontier: Vec<FaceId> = Vec::new();
    for &f in seeds {
        if ring[f] == usize::MAX {
            ring[f] = 1;
            frontier.push(f);
        }
    }
    let mut level = 1usize;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &f in &frontier {
            for &v in &mesh.faces[f].loop_vertices {
                for &g in &mesh.stars[v].faces {
                    if ring[g] == usize::MAX {
                        ring[g] = level + 1;
                        next.push(g);
                    }
                }
            }
        }
        level += 1;
        frontier = next;
    }
    ring
}

/// Faces within `m` rings of EP `v` (ring 1 = faces containing `v`).
pub fn ep_disk(mesh: &TMesh, v: VertexId, m: usize) -> Vec<FaceId> {
    let seeds: Vec<FaceId> = mesh.stars[v].faces.clone();
    let ring = face_rings(mesh, &seeds);
    (0..mesh.num_faces()).filter(|&f| ring[f] <= m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build::tests::{cube_input, grid_input, tjunction_input};
    use crate::mesh::build_tmesh;

    #[test]
    fn tjunction_is_recognized_with_stem_and_crossbar() {
        let m = build_tmesh(&tjunction_input()).unwrap();
        let c = classify(&m);
        assert_eq!(c.kinds[4], VertexKind::TJunction);
        assert!(c.eps.is_empty());
        assert_eq!(c.tjunctions.len(), 1);
        let tj = &c.tjunctions[0];
        assert_eq!(tj.vertex, 4);
        assert_eq!(tj.crossbar, 2);
        assert_eq!(tj.stem, m.edge_between(1, 4).unwrap());
        let mut nb = tj.side_neighbors;
        nb.sort();
        assert_eq!(nb, [3, 5]);
        // No EPs anywhere, so every face is regular-class.
        assert!(c.face_class.iter().all(|&fc| fc == FaceClass::Regular));
    }

    #[test]
    fn cube_vertices_are_extraordinary_and_faces_irregular() {
        let m = build_tmesh(&cube_input()).unwrap();
        let c = classify(&m);
        assert_eq!(c.eps.len(), 8);
        assert!(c.kinds.iter().all(|&k| k == VertexKind::Extraordinary));
        assert!(c.face_class.iter().all(|&fc| fc == FaceClass::Irregular));
        assert_eq!(c.totally_irregular_count(&m), 6);
        // Closed: no layers.
        assert!(c.face_layer.iter().all(|&l| l == usize::MAX));
        assert!(c.vertex_layer.iter().all(|&l| l == usize::MAX));
    }

    #[test]
    fn grid_layers_count_from_the_boundary() {
        let m = build_tmesh(&grid_input(6, 6)).unwrap();
        let c = classify(&m);
        assert!(c.eps.is_empty());
        // Face (i,j) has layer 1 + its ring distance from the outer frame.
        let at = |i: usize, j: usize| j * 6 + i;
        assert_eq!(c.face_layer[at(0, 0)], 1);
        assert_eq!(c.face_layer[at(1, 1)], 2);
        assert_eq!(c.face_layer[at(2, 2)], 3);
        assert_eq!(c.face_layer[at(3, 2)], 3);
        // Vertex rows: boundary 0, next row 1, then 2.
        let vat = |i: usize, j: usize| j * 7 + i;
        assert_eq!(c.vertex_layer[vat(3, 0)], 0);
        assert_eq!(c.vertex_layer[vat(3, 1)], 1);
        assert_eq!(c.vertex_layer[vat(3, 2)], 2);
        assert_eq!(c.vertex_layer[vat(3, 3)], 3);
    }

    #[test]
    fn ep_disks_grow_by_vertex_contact() {
        let m = build_tmesh(&cube_input()).unwrap();
        // On the cube every face touches every EP within two rings.
        let d1 = ep_disk(&m, 0, 1);
        assert_eq!(d1.len(), 3); // faces containing vertex 0
        let d2 = ep_disk(&m, 0, 2);
        assert_eq!(d2.len(), 6); // everything
    }
}
