//! T-mesh construction: loops in, validated mesh out.
//!
//! The builder takes plain cyclic vertex loops and performs, in order:
//!
//! 1. **Edge extraction** with manifoldness checks (an edge borders at most
//!    two faces; every vertex is used; valences meet the minimum).
//! 2. **Orientation**: faces are flipped by breadth-first search so that every
//!    interior edge is traversed in opposite directions by its two faces.
//!    Face 0 keeps its input winding, fixing the global chirality.
//! 3. **Corner inference**: no geometry is consulted. A loop vertex can sit
//!    flat (mid-side) only if it is interior with valence 3; each face of loop
//!    length `L` needs exactly `L−4` flat vertices; a vertex is flat in at
//!    most one face. Constraint propagation either resolves every position or
//!    the input is rejected as ambiguous.
//! 4. **Vertex stars**: the rotation system around every vertex, derived by
//!    chaining (incoming edge, outgoing edge) pairs through faces. A fan that
//!    does not close into a single disk (or arc, on the boundary) is rejected.
//!
//! Knot spans are copied from the input with one normalization: an edge that
//! is not itself a boundary edge but has an endpoint on the boundary (a
//! "boundary-emanating" edge) is forced to span zero — these edges form the
//! clamping padding of open knot layouts, and a nonzero file value there would
//! contradict the repeated-knot reading used everywhere downstream.

use super::*;

pub fn build_tmesh(input: &MeshInput) -> Result<TMesh, MeshError> {
    let nv = input.vertices.len();
    if input.faces.is_empty() {
        return Err(MeshError::Empty);
    }

    // ---- basic loop validation -------------------------------------------
    for (f, loop_vs) in input.faces.iter().enumerate() {
        if loop_vs.len() < 4 {
            return Err(MeshError::FaceTooSmall { face: f, len: loop_vs.len() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &v in loop_vs {
            if v >= nv {
                return Err(MeshError::UnknownVertex { face: f, vertex: v });
            }
            if !seen.insert(v) {
                return Err(MeshError::RepeatedVertex { face: f, vertex: v });
            }
        }
    }
    for (&(a, b), &s) in &input.spans {
        if s < 0.0 {
            return Err(MeshError::NegativeSpan { a, b, span: s });
        }
    }

    // ---- edges ------------------------------------------------------------
    let mut edge_index: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    for (f, loop_vs) in input.faces.iter().enumerate() {
        let n = loop_vs.len();
        for i in 0..n {
            let (a, b) = (loop_vs[i], loop_vs[(i + 1) % n]);
            let key = (a.min(b), a.max(b));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push(Edge { v: [key.0, key.1], span: input.span(a, b), faces: Vec::new() });
                edges.len() - 1
            });
            edges[e].faces.push(f);
            if edges[e].faces.len() > 2 {
                return Err(MeshError::NonManifoldEdge { a: key.0, b: key.1, count: edges[e].faces.len() });
            }
        }
    }

    // ---- orientation ------------------------------------------------------
    let mut loops: Vec<Vec<VertexId>> = input.faces.clone();
    orient(&mut loops, &edges, &edge_index)?;

    // ---- boundary & valence ----------------------------------------------
    let mut on_boundary = vec![false; nv];
    let closed = edges.iter().all(|e| e.faces.len() == 2);
    for e in &edges {
        if e.is_boundary() {
            on_boundary[e.v[0]] = true;
            on_boundary[e.v[1]] = true;
        }
    }
    let mut incident_edges: Vec<Vec<EdgeId>> = vec![Vec::new(); nv];
    for (id, e) in edges.iter().enumerate() {
        incident_edges[e.v[0]].push(id);
        incident_edges[e.v[1]].push(id);
    }
    let mut used = vec![false; nv];
    for loop_vs in &loops {
        for &v in loop_vs {
            used[v] = true;
        }
    }
    for v in 0..nv {
        if !used[v] {
            return Err(MeshError::DanglingVertex { vertex: v });
        }
        let min = if on_boundary[v] { 2 } else { 3 };
        if incident_edges[v].len() < min {
            return Err(MeshError::ValenceTooLow { vertex: v, valence: incident_edges[v].len(), min });
        }
    }

    // ---- boundary-emanating spans forced to zero --------------------------
    for e in edges.iter_mut() {
        if !e.is_boundary() && (on_boundary[e.v[0]] || on_boundary[e.v[1]]) {
            e.span = 0.0;
        }
    }

    // ---- corner inference -------------------------------------------------
    let corner_pos = infer_corners(&loops, &incident_edges, &on_boundary)?;

    // ---- faces with sides -------------------------------------------------
    let mut faces = Vec::with_capacity(loops.len());
    for (f, loop_vs) in loops.iter().enumerate() {
        let cp = corner_pos[f];
        let n = loop_vs.len();
        let sides: [Vec<EdgeId>; 4] = core::array::from_fn(|k| {
            let a = cp[k];
            let b = cp[(k + 1) % 4];
            let mut chain = Vec::new();
            let mut i = a;
            while i != b {
                let j = (i + 1) % n;
                let key = canon(loop_vs[i], loop_vs[j]);
                chain.push(edge_index[&key]);
                i = j;
            }
            chain
        });
        faces.push(Face { loop_vertices: loop_vs.clone(), corner_pos: cp, sides });
    }

    // ---- rotation system --------------------------------------------------
    let stars = build_stars(nv, &edges, &edge_index, &faces, &incident_edges, &on_boundary)?;

    let mut mesh = TMesh {
        vertices: input.vertices.iter().map(|&pos| Vertex { pos }).collect(),
        edges,
        faces,
        stars,
        closed,
        on_boundary,
        edge_index: BTreeMap::new(),
    };
    mesh.set_edge_index(edge_index);
    Ok(mesh)
}

fn canon(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

/// Flip face loops (breadth-first from face 0) so every interior edge is
/// traversed in opposite directions by its two faces.
fn orient(
    loops: &mut [Vec<VertexId>],
    edges: &[Edge],
    edge_index: &BTreeMap<(VertexId, VertexId), EdgeId>,
) -> Result<(), MeshError> {
    let nf = loops.len();
    // Direction in which face f traverses edge e: true = from min-id to max-id.
    let traverses = |loop_vs: &[VertexId], a: VertexId, b: VertexId| -> bool {
        let n = loop_vs.len();
        for i in 0..n {
            if loop_vs[i] == a && loop_vs[(i + 1) % n] == b {
                return a < b;
            }
            if loop_vs[i] == b && loop_vs[(i + 1) % n] == a {
                return b < a;
            }
        }
        unreachable!("edge not on face loop");
    };

    let mut visited = vec![false; nf];
    for start in 0..nf {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            let n = loops[f].len();
            for i in 0..n {
                let (a, b) = (loops[f][i], loops[f][(i + 1) % n]);
                let e = edge_index[&canon(a, b)];
                let Some(g) = edges[e].faces.iter().copied().find(|&g| g != f) else {
                    continue;
                };
                let dir_f = traverses(&loops[f], a, b);
                let dir_g = traverses(&loops[g], a, b);
                if !visited[g] {
                    if dir_f == dir_g {
                        loops[g].reverse();
                    }
                    visited[g] = true;
                    queue.push_back(g);
                } else if dir_f == dir_g {
                    return Err(MeshError::NotOrientable { a, b });
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Pos {
    Corner,
    Flat,
    Unknown,
}

/// Decide which loop vertices are corners, by constraint propagation.
fn infer_corners(
    loops: &[Vec<VertexId>],
    incident_edges: &[Vec<EdgeId>],
    on_boundary: &[bool],
) -> Result<Vec<[usize; 4]>, MeshError> {
    let candidate =
        |v: VertexId| -> bool { !on_boundary[v] && incident_edges[v].len() == 3 };

    let mut status: Vec<Vec<Pos>> = loops
        .iter()
        .map(|l| l.iter().map(|&v| if candidate(v) { Pos::Unknown } else { Pos::Corner }).collect())
        .collect();
    // Occurrences of each candidate vertex: (face, loop position).
    let mut occurrences: BTreeMap<VertexId, Vec<(FaceId, usize)>> = BTreeMap::new();
    for (f, l) in loops.iter().enumerate() {
        for (i, &v) in l.iter().enumerate() {
            if candidate(v) {
                occurrences.entry(v).or_default().push((f, i));
            }
        }
    }

    loop {
        let mut changed = false;
        for f in 0..loops.len() {
            let needed = loops[f].len() - 4;
            let flats = status[f].iter().filter(|&&s| s == Pos::Flat).count();
            let unknowns = status[f].iter().filter(|&&s| s == Pos::Unknown).count();
            if flats > needed || flats + unknowns < needed {
                return Err(MeshError::AmbiguousCorners { face: f, needed });
            }
            if unknowns == 0 {
                continue;
            }
            if flats == needed {
                for s in status[f].iter_mut() {
                    if *s == Pos::Unknown {
                        *s = Pos::Corner;
                        changed = true;
                    }
                }
            } else if flats + unknowns == needed {
                let positions: Vec<usize> =
                    (0..loops[f].len()).filter(|&i| status[f][i] == Pos::Unknown).collect();
                for i in positions {
                    status[f][i] = Pos::Flat;
                    changed = true;
                    // Flat here forces corners at every other occurrence.
                    let v = loops[f][i];
                    for &(g, j) in &occurrences[&v] {
                        if (g, j) != (f, i) {
                            if status[g][j] == Pos::Flat {
                                return Err(MeshError::AmbiguousCorners { face: g, needed: loops[g].len() - 4 });
                            }
                            if status[g][j] == Pos::Unknown {
                                status[g][j] = Pos::Corner;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut corner_pos = Vec::with_capacity(loops.len());
    for (f, l) in loops.iter().enumerate() {
        let needed = l.len() - 4;
        if status[f].contains(&Pos::Unknown) {
            return Err(MeshError::AmbiguousCorners { face: f, needed });
        }
        let corners: Vec<usize> = (0..l.len()).filter(|&i| status[f][i] == Pos::Corner).collect();
        if corners.len() != 4 {
            return Err(MeshError::AmbiguousCorners { face: f, needed });
        }
        corner_pos.push([corners[0], corners[1], corners[2], corners[3]]);
    }
    Ok(corner_pos)
}

/// Build the rotation system: walk (incoming, outgoing) edge pairs through
/// faces around each vertex.
fn build_stars(
    nv: usize,
    edges: &[Edge],
    edge_index: &BTreeMap<(VertexId, VertexId), EdgeId>,
    faces: &[Face],
    incident_edges: &[Vec<EdgeId>],
    on_boundary: &[bool],
) -> Result<Vec<VertexStar>, MeshError> {
    // For each vertex, map "outgoing" edge -> (face, "incoming" edge): within
    // a face loop … prev -> v -> next …, the outgoing edge (v, next) leads
    // counter-clockwise across the face to the incoming edge (prev, v).
    let mut out_map: Vec<BTreeMap<EdgeId, (FaceId, EdgeId)>> = vec![BTreeMap::new(); nv];
    for (fid, face) in faces.iter().enumerate() {
        let l = &face.loop_vertices;
        let n = l.len();
        for i in 0..n {
            let v = l[i];
            let prev = l[(i + n - 1) % n];
            let next = l[(i + 1) % n];
            let e_in = edge_index[&canon(prev, v)];
            let e_out = edge_index[&canon(v, next)];
            if out_map[v].insert(e_out, (fid, e_in)).is_some() {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }
    }

    let mut stars = Vec::with_capacity(nv);
    for v in 0..nv {
        let inc = &incident_edges[v];
        let start = if on_boundary[v] {
            // The boundary edge that is nobody's incoming edge starts the arc.
            let in_set: std::collections::BTreeSet<EdgeId> =
                out_map[v].values().map(|&(_, e)| e).collect();
            let mut starts = inc.iter().copied().filter(|e| !in_set.contains(e));
            let s = starts.next().ok_or(MeshError::NonManifoldVertex { vertex: v })?;
            if starts.next().is_some() {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
            s
        } else {
            *inc.iter().min().unwrap()
        };

        let mut star = VertexStar { edges: vec![start], faces: Vec::new(), closed: !on_boundary[v] };
        let mut e = start;
        // Walk the fan until the boundary arc ends or the fan closes.
        while let Some(&(f, e_next)) = out_map[v].get(&e) {
            star.faces.push(f);
            if e_next == start {
                break; // interior fan closed
            }
            star.edges.push(e_next);
            e = e_next;
            if star.edges.len() > inc.len() {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }
        if star.edges.len() != inc.len() {
            return Err(MeshError::NonManifoldVertex { vertex: v });
        }
        let expected_faces = if on_boundary[v] { inc.len() - 1 } else { inc.len() };
        if star.faces.len() != expected_faces {
            return Err(MeshError::NonManifoldVertex { vertex: v });
        }
        let _ = edges;
        stars.push(star);
    }
    Ok(stars)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::mesh::MeshInput;

    /// Axis-aligned grid of `(nx+1)×(ny+1)` vertices, unit spans, id = j*(nx+1)+i.
    pub(crate) fn grid_input(nx: usize, ny: usize) -> MeshInput {
        let mut vertices = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([i as f64, j as f64, 0.0]);
            }
        }
        let at = |i: usize, j: usize| j * (nx + 1) + i;
        let mut faces = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                faces.push(vec![at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        MeshInput { vertices, faces, spans: BTreeMap::new() }
    }

    /// Two unit faces in the bottom row, one 2×1 face on top; vertex 4 is the
    /// T-junction in the middle of the top face's bottom side.
    ///
    /// ```text
    ///   6───────────7
    ///   │           │
    ///   3───4───────5
    ///   │   │   │   │   (the middle stem hangs from vertex 4)
    ///   0───1───2 ──┘
    /// ```
    pub(crate) fn tjunction_input() -> MeshInput {
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [2.0, 1.0, 0.0],
            [0.0, 2.0, 0.0],
            [2.0, 2.0, 0.0],
        ];
        let faces = vec![
            vec![0, 1, 4, 3],
            vec![1, 2, 5, 4],
            vec![3, 4, 5, 7, 6],
        ];
        MeshInput { vertices, faces, spans: BTreeMap::new() }
    }

    /// Clamped `m×m`-cell patch in padded form: one ring of zero-width cells
    /// around the active region, so every boundary-perpendicular column of
    /// spans reads `[0, h, …, h, 0]`. This is the knot-valid way to present
    /// an open surface; `(m+3)²` vertices, id = j*(m+3)+i, h = 1.
    pub(crate) fn padded_grid_input(m: usize) -> MeshInput {
        let n = m + 3; // vertex columns
        let gap = |k: usize| if k == 0 || k == m + 1 { 0.0 } else { 1.0 };
        let coord = |i: usize| (0..i).map(gap).sum::<f64>();
        let mut vertices = Vec::new();
        for j in 0..n {
            for i in 0..n {
                vertices.push([coord(i), coord(j), 0.0]);
            }
        }
        let at = |i: usize, j: usize| j * n + i;
        let mut faces = Vec::new();
        let mut spans = BTreeMap::new();
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                faces.push(vec![at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        for j in 0..n {
            for i in 0..n {
                if i + 1 < n {
                    spans.insert((at(i, j), at(i + 1, j)), gap(i));
                }
                if j + 1 < n {
                    spans.insert((at(i, j), at(i, j + 1)), gap(j));
                }
            }
        }
        MeshInput { vertices, faces, spans }
    }

    /// The unit cube: a closed surface whose eight vertices are all valence-3
    /// extraordinary points.
    pub(crate) fn cube_input() -> MeshInput {
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let faces = vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![1, 2, 6, 5],
            vec![2, 3, 7, 6],
            vec![3, 0, 4, 7],
        ];
        MeshInput { vertices, faces, spans: BTreeMap::new() }
    }

    #[test]
    fn grid_builds_with_expected_counts() {
        let m = build_tmesh(&grid_input(2, 2)).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_edges(), 12);
        assert_eq!(m.num_faces(), 4);
        assert!(!m.closed);
        // The center vertex is interior with valence 4 and a closed fan.
        assert_eq!(m.valence(4), 4);
        assert!(m.stars[4].closed);
        assert_eq!(m.stars[4].faces.len(), 4);
        // Corner vertex: valence 2, open fan with one face.
        assert_eq!(m.valence(0), 2);
        assert!(!m.stars[0].closed);
        assert_eq!(m.stars[0].faces.len(), 1);
    }

    #[test]
    fn orientation_makes_interior_edges_opposing() {
        let m = build_tmesh(&grid_input(3, 2)).unwrap();
        for e in &m.edges {
            if e.faces.len() < 2 {
                continue;
            }
            let dir = |f: FaceId| {
                let l = &m.faces[f].loop_vertices;
                let n = l.len();
                (0..n)
                    .find_map(|i| {
                        if l[i] == e.v[0] && l[(i + 1) % n] == e.v[1] {
                            Some(true)
                        } else if l[i] == e.v[1] && l[(i + 1) % n] == e.v[0] {
                            Some(false)
                        } else {
                            None
                        }
                    })
                    .unwrap()
            };
            assert_ne!(dir(e.faces[0]), dir(e.faces[1]));
        }
    }

    #[test]
    fn tjunction_corner_inference() {
        let m = build_tmesh(&tjunction_input()).unwrap();
        let top = &m.faces[2];
        assert_eq!(top.loop_vertices.len(), 5);
        assert_eq!(top.corners().len(), 4);
        // Vertex 4 is flat in the top face: it is not one of its corners…
        assert!(!top.corners().contains(&4));
        // …but it is a corner of both bottom faces.
        assert!(m.faces[0].corners().contains(&4));
        assert!(m.faces[1].corners().contains(&4));
        // The side containing it is a two-edge chain.
        let chain_side = (0..4).find(|&k| top.sides[k].len() == 2).unwrap();
        assert_eq!(top.side_interior_vertices(chain_side), vec![4]);
    }

    #[test]
    fn cube_is_closed_and_all_fans_are_triples() {
        let m = build_tmesh(&cube_input()).unwrap();
        assert!(m.closed);
        for v in 0..8 {
            assert_eq!(m.valence(v), 3);
            assert!(m.stars[v].closed);
            assert_eq!(m.stars[v].faces.len(), 3);
        }
    }

    #[test]
    fn star_faces_sit_between_their_edges() {
        let m = build_tmesh(&grid_input(2, 2)).unwrap();
        for v in 0..m.num_vertices() {
            let star = &m.stars[v];
            for (i, &f) in star.faces.iter().enumerate() {
                let e_a = star.edges[i];
                let e_b = star.edges[(i + 1) % star.edges.len()];
                // Both flanking edges of the fan slot are on the face.
                let on_face = |e: EdgeId| m.faces[f].sides.iter().flatten().any(|&x| x == e);
                assert!(on_face(e_a), "edge {e_a} missing from face {f}");
                assert!(on_face(e_b), "edge {e_b} missing from face {f}");
            }
        }
    }

    #[test]
    fn boundary_emanating_edges_are_zeroed() {
        let mut input = grid_input(3, 3);
        // Give every edge span 2; interior-to-boundary edges must end up 0.
        for f in &input.faces {
            for i in 0..4 {
                let (a, b) = (f[i], f[(i + 1) % 4]);
                input.spans.insert((a.min(b), a.max(b)), 2.0);
            }
        }
        let m = build_tmesh(&input).unwrap();
        let center = 5; // vertex (1,1): interior
        for &e in m.stars[center].edges.iter() {
            let other = m.edges[e].other(center);
            if m.on_boundary[other] {
                assert_eq!(m.edges[e].span, 0.0);
            } else {
                assert_eq!(m.edges[e].span, 2.0);
            }
        }
    }

    #[test]
    fn rejects_nonmanifold_edge() {
        let mut input = grid_input(2, 1);
        // A third face reusing the interior edge (1,4).
        input.vertices.push([0.5, -1.0, 0.0]); // id 6
        input.vertices.push([1.5, -1.0, 0.0]); // id 7
        input.faces.push(vec![1, 6, 7, 4]);
        let err = build_tmesh(&input).unwrap_err();
        assert!(matches!(err, MeshError::NonManifoldEdge { .. }), "{err}");
    }

    #[test]
    fn rejects_small_faces_and_repeats() {
        let mut input = grid_input(1, 1);
        input.faces.push(vec![0, 1, 2]);
        assert!(matches!(build_tmesh(&input).unwrap_err(), MeshError::FaceTooSmall { .. }));
        let mut input2 = grid_input(1, 1);
        input2.faces[0] = vec![0, 1, 3, 1];
        assert!(matches!(build_tmesh(&input2).unwrap_err(), MeshError::RepeatedVertex { .. }));
    }

    #[test]
    fn rejects_dangling_vertex() {
        let mut input = grid_input(1, 1);
        input.vertices.push([5.0, 5.0, 0.0]);
        assert!(matches!(build_tmesh(&input).unwrap_err(), MeshError::DanglingVertex { vertex: 4 }));
    }

    #[test]
    fn rejects_ambiguous_corner_structure() {
        // A 5-loop face F with TWO interior valence-3 vertices on it, X and B,
        // each of whose other faces are plain quads. Exactly one of X, B must
        // be mid-side in F, but the topology cannot say which: X flat makes B
        // a valence-3 extraordinary corner, and vice versa. This is the
        // honest indistinguishable case, and it must be rejected.
        //
        //   D───────────C────CE
        //   │      F    │ Fr │
        //   A───X───────B────E
        //   │Qc │    Qb │────┘
        //   SW──┴───────S
        let vertices = vec![
            [0.0, 1.0, 0.0], // 0 A
            [1.0, 1.0, 0.0], // 1 X
            [2.0, 1.0, 0.0], // 2 B
            [2.0, 3.0, 0.0], // 3 C
            [0.0, 3.0, 0.0], // 4 D
            [3.0, 1.0, 0.0], // 5 E
            [2.0, 0.0, 0.0], // 6 S
            [0.0, 0.0, 0.0], // 7 SW
            [3.0, 3.0, 0.0], // 8 CE
        ];
        let faces = vec![
            vec![0, 1, 2, 3, 4], // F: 5-loop, needs one mid-side vertex
            vec![1, 2, 5, 6],    // Qb
            vec![7, 0, 1, 6],    // Qc
            vec![2, 5, 8, 3],    // Fr
        ];
        let input = MeshInput { vertices, faces, spans: BTreeMap::new() };
        let err = build_tmesh(&input).unwrap_err();
        assert!(matches!(err, MeshError::AmbiguousCorners { face: 0, needed: 1 }), "{err}");
    }
}
