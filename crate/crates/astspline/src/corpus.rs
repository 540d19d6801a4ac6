//! Built-in mesh gallery.
//!
//! Every structural property the crate verifies — linear independence,
//! partition of unity, continuity across seams, nesting of the design space
//! in the analysis space — is checked over a fixed set of meshes that covers
//! the interesting topology: a plain clamped grid, isolated extraordinary
//! points of valence 3, 5, and 6, an adjacent valence-3/valence-5 pair with
//! two T-junctions, a cluster whose faces have *all four* corners
//! extraordinary, and a closed cube. The same meshes back the command-line
//! `check` command and the convergence studies.
//!
//! All open meshes come in canonical padded form: one ring of zero-width
//! cells hugs the boundary so that boundary functions are clamped, exactly
//! like the repeated end knots of a clamped B-spline.
//!
//! The two hand-built cores:
//!
//! ```text
//!        C────E                         ┌──┬──┬───────┬──┬──┐
//!       ╱│    │╲   P_ef                 │  │  │       │  │  │
//!      ╱ │    │ ╲ ╱                     ├──┼──┼───────┼──┼──┤
//!     X  │    │  F────P_fg              │  │  │ ┌───┐ │  │  │
//!      ╲ │    │ ╱                       │  │  │ │   │ │  │  │
//!       ╲│    │╱ ╲   one lane ends:     │  │  │ └───┘ │  │  │
//!        A────B   P_gh                  ├──┼──┼───────┼──┼──┤
//!       ╱│    │╲       A: valence 3     │  │  │       │  │  │
//!      ╱ │    │ ╲      B: valence 5     └──┴──┴───────┴──┴──┘
//!     D──┴────┴──H
//!        dipole                          cluster (the central cell holds
//!                                        an inner square + 4 frame quads)
//! ```

use std::collections::BTreeMap;

use crate::mesh::{MeshInput, VertexId};

/// A mesh under construction: plain loops plus explicit spans. Only spans
/// different from `1.0` need entries — `MeshInput::span` defaults to one.
struct Patch {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<VertexId>>,
    spans: BTreeMap<(VertexId, VertexId), f64>,
}

fn canon(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

/// One non-corner quad of a grown ring, recorded so a later pass can cut it.
struct RingQuad {
    face: usize,
    /// Face loop `[b_next, b_cur, o_cur, o_next]`: the two inner (old
    /// boundary) vertices followed by the two newly extruded ones.
    corners: [VertexId; 4],
}

impl Patch {
    fn new() -> Self {
        Patch { vertices: Vec::new(), faces: Vec::new(), spans: BTreeMap::new() }
    }

    fn vertex(&mut self, pos: [f64; 3]) -> VertexId {
        self.vertices.push(pos);
        self.vertices.len() - 1
    }

    fn quad(&mut self, loop_vs: [VertexId; 4]) -> usize {
        self.faces.push(loop_vs.to_vec());
        self.faces.len() - 1
    }

    fn set_span(&mut self, a: VertexId, b: VertexId, s: f64) {
        self.spans.insert(canon(a, b), s);
    }

    fn span_of(&self, a: VertexId, b: VertexId) -> f64 {
        self.spans.get(&canon(a, b)).copied().unwrap_or(1.0)
    }

    fn pos(&self, v: VertexId) -> [f64; 3] {
        self.vertices[v]
    }

    /// Vertex valence in the current face set.
    fn valences(&self) -> Vec<usize> {
        let mut edges: std::collections::BTreeSet<(VertexId, VertexId)> = Default::default();
        for f in &self.faces {
            for i in 0..f.len() {
                edges.insert(canon(f[i], f[(i + 1) % f.len()]));
            }
        }
        let mut val = vec![0usize; self.vertices.len()];
        for &(a, b) in &edges {
            val[a] += 1;
            val[b] += 1;
        }
        val
    }

    /// The outer boundary cycle, oriented the way the (counter-clockwise)
    /// faces traverse it, starting from the smallest vertex id on it.
    fn boundary(&self) -> Vec<VertexId> {
        let mut directed: std::collections::BTreeSet<(VertexId, VertexId)> = Default::default();
        for f in &self.faces {
            for i in 0..f.len() {
                directed.insert((f[i], f[(i + 1) % f.len()]));
            }
        }
        let mut succ: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for &(a, b) in &directed {
            if !directed.contains(&(b, a)) {
                assert!(succ.insert(a, b).is_none(), "non-manifold boundary at vertex {a}");
            }
        }
        let start = *succ.keys().next().expect("patch has no boundary");
        let mut cycle = vec![start];
        let mut cur = succ[&start];
        while cur != start {
            cycle.push(cur);
            cur = succ[&cur];
        }
        cycle
    }

    /// Extrude one ring of quads outward from the boundary. Straight
    /// boundary vertices (valence 3) get one outer partner; convex corners
    /// (valence 2) get two partners plus a diagonal vertex, so the corner
    /// count of the boundary is preserved. `radial` is the parametric span
    /// of the extruded edges, `width` their geometric length; ring-parallel
    /// spans are copied from the old boundary so every new face is a
    /// parametric rectangle. Returns the non-corner quads in cycle order.
    fn grow_ring(&mut self, radial: f64, width: f64) -> Vec<RingQuad> {
        let cycle = self.boundary();
        let val = self.valences();
        let n = cycle.len();
        // Outward normal of each boundary edge: to the right of the walk
        // direction (the interior sits left of a counter-clockwise cycle).
        let normals: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = self.pos(cycle[i]);
                let b = self.pos(cycle[(i + 1) % n]);
                let d = [b[0] - a[0], b[1] - a[1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if len == 0.0 {
                    [0.0, 0.0]
                } else {
                    [d[1] / len, -d[0] / len]
                }
            })
            .collect();

        // Outer partners: per boundary vertex, one for the incoming edge and
        // one for the outgoing edge; identical unless the vertex is a corner.
        let mut out_in = vec![0 as VertexId; n];
        let mut out_go = vec![0 as VertexId; n];
        let mut diag: Vec<Option<VertexId>> = vec![None; n];
        for i in 0..n {
            let v = cycle[i];
            let p = self.pos(v);
            let n_in = normals[(i + n - 1) % n];
            let n_go = normals[i];
            if val[v] == 2 {
                let a = self.vertex([p[0] + width * n_in[0], p[1] + width * n_in[1], p[2]]);
                let b = self.vertex([p[0] + width * n_go[0], p[1] + width * n_go[1], p[2]]);
                let d = self.vertex([
                    p[0] + width * (n_in[0] + n_go[0]),
                    p[1] + width * (n_in[1] + n_go[1]),
                    p[2],
                ]);
                out_in[i] = a;
                out_go[i] = b;
                diag[i] = Some(d);
            } else {
                let mx = n_in[0] + n_go[0];
                let my = n_in[1] + n_go[1];
                let len = (mx * mx + my * my).sqrt().max(1e-30);
                let o = self
                    .vertex([p[0] + width * mx / len, p[1] + width * my / len, p[2]]);
                out_in[i] = o;
                out_go[i] = o;
            }
        }

        let mut quads = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            let (b_cur, b_next) = (cycle[i], cycle[j]);
            let (o_cur, o_next) = (out_go[i], out_in[j]);
            let face = self.quad([b_next, b_cur, o_cur, o_next]);
            self.set_span(b_cur, o_cur, radial);
            self.set_span(b_next, o_next, radial);
            self.set_span(o_cur, o_next, self.span_of(b_cur, b_next));
            quads.push(RingQuad { face, corners: [b_next, b_cur, o_cur, o_next] });
        }
        for i in 0..n {
            if let Some(d) = diag[i] {
                self.quad([cycle[i], out_in[i], d, out_go[i]]);
                self.set_span(out_in[i], d, radial);
                self.set_span(d, out_go[i], radial);
            }
        }
        quads
    }

    /// Splice `v` into the loop of the face that traverses `a → b`, turning
    /// that side into the chain `a, v, b`. No-op when no face does (the side
    /// lies on the outer boundary).
    fn insert_on_side(&mut self, a: VertexId, b: VertexId, v: VertexId) {
        for f in &mut self.faces {
            let n = f.len();
            if let Some(i) = (0..n).find(|&i| f[i] == a && f[(i + 1) % n] == b) {
                f.insert(i + 1, v);
                return;
            }
        }
    }

    /// Replace quad `[p, q, r, s]` by two halves cut from the middle of side
    /// `q–r` to the middle of side `s–p`. The cut endpoints are spliced into
    /// the neighbouring faces across those sides, where they sit flat — they
    /// become T-junctions.
    fn split_quad(&mut self, rq: &RingQuad) {
        let [p, q, r, s] = rq.corners;
        let pq = self.span_of(p, q);
        let qr = self.span_of(q, r);
        let sp = self.span_of(s, p);
        let mid = |a: [f64; 3], b: [f64; 3]| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0];
        let m = self.vertex(mid(self.pos(q), self.pos(r)));
        let nn = self.vertex(mid(self.pos(s), self.pos(p)));
        self.spans.remove(&canon(q, r));
        self.spans.remove(&canon(s, p));
        self.set_span(q, m, qr / 2.0);
        self.set_span(m, r, qr / 2.0);
        self.set_span(s, nn, sp / 2.0);
        self.set_span(nn, p, sp / 2.0);
        self.set_span(m, nn, pq);
        self.faces[rq.face] = vec![p, q, m, nn];
        self.faces.push(vec![nn, m, r, s]);
        self.insert_on_side(r, q, m);
        self.insert_on_side(p, s, nn);
    }

    fn into_input(self) -> MeshInput {
        MeshInput { vertices: self.vertices, faces: self.faces, spans: self.spans }
    }
}

/// Clamped tensor-product grid with `m` active cells per direction, unit
/// spans, and the canonical zero-width padding ring. Vertex `(i, j)` gets id
/// `j*(m+3) + i` and sits at the knot lattice position, so the patch covers
/// `[0, m]²`.
pub fn regular_grid(m: usize) -> MeshInput {
    let n = m + 3;
    let coord = |i: usize| -> f64 {
        if i == 0 {
            0.0
        } else {
            (i - 1).min(m) as f64
        }
    };
    let mut vertices = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertices.push([coord(i), coord(j), 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * n + i;
    let mut faces = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut spans = BTreeMap::new();
    for j in 0..n {
        for i in 0..n - 1 {
            let s = coord(i + 1) - coord(i);
            if s != 1.0 {
                spans.insert(canon(id(i, j), id(i + 1, j)), s);
                spans.insert(canon(id(j, i), id(j, i + 1)), s);
            }
        }
    }
    MeshInput { vertices, faces, spans }
}

/// Padded disk around a single interior extraordinary point of valence
/// `mu`: a one-ring fan, `rings − 1` grown rings of unit cells, and the
/// zero-width padding ring. The extraordinary point is vertex `0`.
pub fn ep_disk(mu: usize, rings: usize) -> MeshInput {
    assert!(mu >= 3 && mu != 4, "valence {mu} is not extraordinary");
    assert!(rings >= 2, "the extraordinary point must stay clear of the boundary");
    let mut p = Patch::new();
    let ep = p.vertex([0.0, 0.0, 0.0]);
    let tau = std::f64::consts::TAU;
    let spokes: Vec<VertexId> = (0..mu)
        .map(|j| {
            let a = tau * j as f64 / mu as f64;
            p.vertex([a.cos(), a.sin(), 0.0])
        })
        .collect();
    let diags: Vec<VertexId> = (0..mu)
        .map(|j| {
            let a = tau * (j as f64 + 0.5) / mu as f64;
            p.vertex([1.4 * a.cos(), 1.4 * a.sin(), 0.0])
        })
        .collect();
    for j in 0..mu {
        p.quad([ep, spokes[j], diags[j], spokes[(j + 1) % mu]]);
    }
    for _ in 0..rings - 1 {
        p.grow_ring(1.0, 0.9);
    }
    p.grow_ring(0.0, 0.0);
    p.into_input()
}

/// Padded disk around an adjacent valence-3 / valence-5 pair — the smallest
/// mesh where one lattice lane simply ends — with two T-junctions far out in
/// the regular region, the endpoints of a single half-span cut. Vertices `0`
/// and `1` are the two extraordinary points.
pub fn ep_pair() -> MeshInput {
    let mut p = Patch::new();
    let a = p.vertex([0.0, 0.0, 0.0]); // valence 3
    let b = p.vertex([1.0, 0.0, 0.0]); // valence 5
    let c = p.vertex([-0.7, 0.8, 0.0]);
    let d = p.vertex([-0.7, -0.8, 0.0]);
    let e = p.vertex([0.8, 1.0, 0.0]);
    let f = p.vertex([2.0, 0.6, 0.0]);
    let g = p.vertex([2.0, -0.6, 0.0]);
    let h = p.vertex([0.8, -1.0, 0.0]);
    let x = p.vertex([-1.6, 0.0, 0.0]);
    let p_ef = p.vertex([2.2, 1.4, 0.0]);
    let p_fg = p.vertex([2.8, 0.0, 0.0]);
    let p_gh = p.vertex([2.2, -1.4, 0.0]);
    p.quad([a, b, e, c]);
    p.quad([a, d, h, b]);
    p.quad([a, c, x, d]);
    p.quad([b, f, p_ef, e]);
    p.quad([b, g, p_fg, f]);
    p.quad([b, h, p_gh, g]);
    for _ in 0..2 {
        p.grow_ring(1.0, 0.9);
    }
    let ring4 = p.grow_ring(1.0, 0.9);
    p.grow_ring(1.0, 0.9);
    p.grow_ring(0.0, 0.0);
    // Split the ring-4 quad farthest out on the +x side: both cut endpoints
    // stay two full bays away from the extraordinary two-disks, and their
    // extensions run along the ring, never toward the pair. Splitting after
    // the outer rings exist changes nothing — the cut is tangential, so the
    // boundary each later ring grew from was never touched.
    let far = ring4
        .iter()
        .max_by(|u, v| {
            let key = |rq: &RingQuad| p.pos(rq.corners[0])[0] + p.pos(rq.corners[1])[0];
            key(u).partial_cmp(&key(v)).unwrap()
        })
        .expect("ring is never empty");
    p.split_quad(far);
    p.into_input()
}

/// Unit-square benchmark mesh: a 7×7 clamped grid whose central cell is
/// replaced by an inner square and four frame quads. The four outer corners
/// of the cluster have valence 5 and the four inner ones valence 3, so the
/// five cluster faces have extraordinary corners only — the inner square and
/// the frames are totally irregular — while the surrounding ring faces are
/// partially irregular. All spans are one; the physical cluster is smaller
/// than its parametric footprint.
pub fn cluster() -> MeshInput {
    let m = 7;
    let n = m + 3;
    let scale = 1.0 / m as f64;
    let coord = |i: usize| -> f64 {
        if i == 0 {
            0.0
        } else {
            (i - 1).min(m) as f64
        }
    };
    let mut vertices = Vec::with_capacity(n * n + 4);
    for j in 0..n {
        for i in 0..n {
            vertices.push([coord(i) * scale, coord(j) * scale, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * n + i;
    // Central active cell: active coordinates [3, 4]² = vertex columns 4..5.
    let (lo, hi) = (4usize, 5usize);
    let mut faces = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            if i == lo && j == lo {
                continue;
            }
            faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let inner = |dx: f64, dy: f64| [(3.0 + dx) * scale, (3.0 + dy) * scale, 0.0];
    let i0 = vertices.len();
    vertices.push(inner(0.3, 0.3));
    vertices.push(inner(0.7, 0.3));
    vertices.push(inner(0.7, 0.7));
    vertices.push(inner(0.3, 0.7));
    let (i1, i2, i3) = (i0 + 1, i0 + 2, i0 + 3);
    let (c00, c10, c11, c01) = (id(lo, lo), id(hi, lo), id(hi, hi), id(lo, hi));
    faces.push(vec![i0, i1, i2, i3]);
    faces.push(vec![c00, c10, i1, i0]);
    faces.push(vec![c10, c11, i2, i1]);
    faces.push(vec![c11, c01, i3, i2]);
    faces.push(vec![c01, c00, i0, i3]);
    let mut spans = BTreeMap::new();
    for j in 0..n {
        for i in 0..n - 1 {
            let s = coord(i + 1) - coord(i);
            if s != 1.0 {
                spans.insert(canon(id(i, j), id(i + 1, j)), s);
                spans.insert(canon(id(j, i), id(j, i + 1)), s);
            }
        }
    }
    MeshInput { vertices, faces, spans }
}

/// Closed unit cube: six faces, eight valence-3 extraordinary points, no
/// boundary. The smallest closed quad mesh.
pub fn cube() -> MeshInput {
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

/// The whole gallery, in the order the verification report prints it.
pub fn corpus() -> Vec<(&'static str, MeshInput)> {
    vec![
        ("grid", regular_grid(6)),
        ("disk3", ep_disk(3, 3)),
        ("disk5", ep_disk(5, 3)),
        ("disk6", ep_disk(6, 3)),
        ("pair", ep_pair()),
        ("cluster", cluster()),
        ("cube", cube()),
    ]
}

/// Look one gallery mesh up by its command-line name.
pub fn named(name: &str) -> Option<MeshInput> {
    corpus().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
}

/// A half-fan whose hub sits on the clamped edge: after padding, the hub is
/// an interior valence-5 point whose one-ring touches the boundary faces —
/// it lies in boundary layer 1, which the admissibility rules reject.
pub fn shallow_ep() -> MeshInput {
    let mut p = Patch::new();
    let hub = p.vertex([0.0, 0.0, 0.0]);
    let pi = std::f64::consts::PI;
    let spokes: Vec<VertexId> =
        (0..4).map(|j| p.vertex([(pi * j as f64 / 3.0).cos(), (pi * j as f64 / 3.0).sin(), 0.0])).collect();
    let diags: Vec<VertexId> = (0..3)
        .map(|j| {
            let a = pi * (j as f64 + 0.5) / 3.0;
            p.vertex([1.4 * a.cos(), 1.4 * a.sin(), 0.0])
        })
        .collect();
    for j in 0..3 {
        p.quad([hub, spokes[j], diags[j], spokes[j + 1]]);
    }
    p.grow_ring(0.0, 0.0);
    p.into_input()
}

/// A valence-5 disk with a cut right in the transition ring: the cut's
/// one-bay extensions subdivide faces of the extraordinary three-disk,
/// which the admissibility rules reject.
pub fn tj_near_ep() -> MeshInput {
    let mut p = Patch::new();
    let ep = p.vertex([0.0, 0.0, 0.0]);
    let tau = std::f64::consts::TAU;
    let spokes: Vec<VertexId> =
        (0..5).map(|j| p.vertex([(tau * j as f64 / 5.0).cos(), (tau * j as f64 / 5.0).sin(), 0.0])).collect();
    let diags: Vec<VertexId> = (0..5)
        .map(|j| {
            let a = tau * (j as f64 + 0.5) / 5.0;
            p.vertex([1.4 * a.cos(), 1.4 * a.sin(), 0.0])
        })
        .collect();
    for j in 0..5 {
        p.quad([ep, spokes[j], diags[j], spokes[(j + 1) % 5]]);
    }
    let ring2 = p.grow_ring(1.0, 0.9);
    p.grow_ring(1.0, 0.9);
    p.grow_ring(0.0, 0.0);
    let far = ring2
        .iter()
        .max_by(|u, v| {
            let key = |rq: &RingQuad| p.pos(rq.corners[0])[0] + p.pos(rq.corners[1])[0];
            key(u).partial_cmp(&key(v)).unwrap()
        })
        .expect("ring is never empty");
    p.split_quad(far);
    p.into_input()
}

/// A clamped grid with two perpendicular cuts whose extensions cross,
/// which the admissibility rules reject.
pub fn crossing_tjs() -> MeshInput {
    let m = 6;
    let n = m + 3;
    let base = regular_grid(m);
    let mut p = Patch { vertices: base.vertices, faces: base.faces, spans: base.spans };
    let id = |i: usize, j: usize| j * n + i;
    // Cell grid face index (i, j) among the (n−1)² cells.
    let cell = |i: usize, j: usize| j * (n - 1) + i;
    // Horizontal cut through the cell over active [2,3]×[1,2]: its
    // crossbar sits at height 1.5 and its extensions run in x, the right
    // one covering x ∈ [3, 5].
    let f = cell(3, 2);
    p.split_quad(&RingQuad {
        face: f,
        corners: [id(3, 2), id(4, 2), id(4, 3), id(3, 3)],
    });
    // Vertical cut through the cell over active [4,5]×[2,3]: its crossbar
    // sits at x = 4.5 and the downward extension covers y ∈ [0, 2], so the
    // two extensions cross at (4.5, 1.5).
    let f2 = cell(5, 3);
    p.split_quad(&RingQuad {
        face: f2,
        corners: [id(5, 4), id(5, 3), id(6, 3), id(6, 4)],
    });
    p.into_input()
}
