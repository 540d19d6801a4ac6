//! Local knot vectors and tensor support placement for vertex anchors in
//! regular regions.
//!
//! Every non-extraordinary vertex anchors one cubic blending function. Its
//! two 5-entry local knot vectors are read off the mesh by marching two
//! steps out in each of the four axis directions:
//!
//! ```text
//!            k4 ─────●───────         each completed edge, and each face
//!            k3 ─────●───────         crossed side to side, contributes
//!   anchor →  0 ─────A───────         one knot interval
//!            k1 ─────●───────
//!            k0 ─────●───────
//! ```
//!
//! Marching continues straight through valence-4 vertices, follows the stem
//! through a T-junction's crossbar, and runs along the boundary when it
//! arrives there tangentially. Reaching the boundary head-on pads the
//! remaining knots with zero intervals (the clamped end condition — on a
//! padded mesh the zero ring produces the same effect naturally). Reaching
//! an extraordinary point repeats the last interval, matching the uniform
//! spacing that knot validation enforces on its spokes.
//!
//! The support placement BFS then assigns every face the function might
//! touch a rectangle in the anchor's own coordinates, never crossing into
//! irregular faces (their coefficients come from the face-point route).

use crate::bspline::LocalKnots;
use crate::mesh::classify::Classification;
use crate::mesh::ext::{face_frame, rat, FaceFrame, Rat};
use crate::mesh::{EdgeId, FaceClass, FaceId, MeshError, TMesh, VertexId, VertexKind};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// How a directional march starts at the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// Follow this edge.
    Edge(EdgeId),
    /// Head straight into this face's interior (a T-junction anchor facing
    /// its crossbar).
    Face(FaceId),
    /// No continuation (an open boundary star): zero intervals.
    Missing,
}

/// The four directional starts of an anchor, ordered `[u+, v+, u−, v−]`
/// with `u+` immediately before `v+` in the vertex star's cyclic order.
pub fn anchor_axes(mesh: &TMesh, cls: &Classification, v: VertexId) -> Result<[Start; 4], MeshError> {
    let star = &mesh.stars[v];
    match cls.kinds[v] {
        VertexKind::Extraordinary => Err(MeshError::Traversal(format!(
            "vertex {v} is extraordinary and anchors no tensor function"
        ))),
        VertexKind::RegularInterior => {
            let e = &star.edges;
            debug_assert_eq!(e.len(), 4);
            Ok([Start::Edge(e[0]), Start::Edge(e[1]), Start::Edge(e[2]), Start::Edge(e[3])])
        }
        VertexKind::TJunction => {
            let tj = &cls.tjunctions[cls.tj_of_vertex[&v]];
            let j = star.edge_index(tj.stem).expect("stem in star");
            let n = star.edges.len();
            debug_assert_eq!(n, 3);
            Ok([
                Start::Edge(star.edges[(j + n - 1) % n]),
                Start::Edge(tj.stem),
                Start::Edge(star.edges[(j + 1) % n]),
                Start::Face(tj.crossbar),
            ])
        }
        VertexKind::RegularBoundary => {
            let e = &star.edges;
            let get = |i: usize| e.get(i).map_or(Start::Missing, |&x| Start::Edge(x));
            // Open arc: edges 0 and 2 are straight through one another
            // (one face wedge each side of edge 1), edge 3 never exists on a
            // regular boundary vertex (valence ≤ 3).
            Ok([get(0), get(1), get(2), get(3)])
        }
    }
}

/// Why a march ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarchEnd {
    /// Two intervals collected.
    Full,
    /// Boundary reached head-on: remaining intervals are zero.
    Boundary,
    /// Extraordinary point reached: remaining intervals repeat the last.
    Ep,
}

enum Walk {
    Along { e: EdgeId, from: VertexId },
    Through { face: FaceId, at: (Rat, Rat), dir: InDir },
}

/// Axis-aligned direction inside a face frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct InDir {
    /// Varying coordinate: 0 = u, 1 = v.
    axis: u8,
    positive: bool,
}

/// Inward direction when standing on side `k` of a face.
fn inward(k: usize) -> InDir {
    match k {
        0 => InDir { axis: 1, positive: true },
        1 => InDir { axis: 0, positive: false },
        2 => InDir { axis: 1, positive: false },
        _ => InDir { axis: 0, positive: true },
    }
}

/// Side of the face that contains vertex `x` strictly inside its chain.
fn side_containing(mesh: &TMesh, f: FaceId, x: VertexId) -> Option<usize> {
    (0..4).find(|&k| mesh.faces[f].side_interior_vertices(k).contains(&x))
}

/// March two knot intervals out of `origin` in one direction.
pub fn march_knots(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    origin: VertexId,
    start: Start,
) -> Result<([f64; 2], MarchEnd), MeshError> {
    let mut got: Vec<Rat> = Vec::with_capacity(2);
    let mut state = match start {
        Start::Missing => return Ok(([0.0, 0.0], MarchEnd::Boundary)),
        Start::Edge(e) => Walk::Along { e, from: origin },
        Start::Face(f) => {
            let k = side_containing(mesh, f, origin).ok_or_else(|| {
                MeshError::Traversal(format!("vertex {origin} not flat on face {f}"))
            })?;
            Walk::Through { face: f, at: frames[f].vpos[&origin].clone(), dir: inward(k) }
        }
    };
    let end = loop {
        match state {
            Walk::Along { e, from } => {
                got.push(rat(mesh.edges[e].span));
                if got.len() == 2 {
                    break MarchEnd::Full;
                }
                let w = mesh.edges[e].other(from);
                match continue_at(mesh, cls, frames, w, e)? {
                    Some(next) => state = next,
                    None => {
                        break if cls.kinds[w] == VertexKind::Extraordinary {
                            MarchEnd::Ep
                        } else {
                            MarchEnd::Boundary
                        }
                    }
                }
            }
            Walk::Through { face, at, dir } => {
                let frame = &frames[face];
                let (goal, side) = match (dir.axis, dir.positive) {
                    (0, true) => (frame.su.clone(), 1),
                    (0, false) => (rat(0.0), 3),
                    (1, true) => (frame.sv.clone(), 2),
                    _ => (rat(0.0), 0),
                };
                let moving = if dir.axis == 0 { at.0.clone() } else { at.1.clone() };
                let dist = if dir.positive { goal.clone() - moving } else { moving - goal.clone() };
                got.push(dist);
                if got.len() == 2 {
                    break MarchEnd::Full;
                }
                let exit = if dir.axis == 0 { (goal, at.1.clone()) } else { (at.0.clone(), goal) };
                match land(mesh, cls, frames, face, side, exit)? {
                    Some(next) => state = next,
                    None => break MarchEnd::Boundary,
                }
            }
        }
    };
    let mut spans = [0.0f64; 2];
    for (i, r) in got.iter().enumerate() {
        spans[i] = r.to_f64().unwrap();
    }
    match end {
        MarchEnd::Boundary => { /* remaining stay zero */ }
        MarchEnd::Ep => {
            if got.len() == 1 {
                spans[1] = spans[0];
            }
        }
        MarchEnd::Full => {}
    }
    Ok((spans, end))
}

/// Straight continuation through vertex `w`, arrived along edge `e`.
/// `None` means the march stops here (boundary head-on or extraordinary).
fn continue_at(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    w: VertexId,
    e: EdgeId,
) -> Result<Option<Walk>, MeshError> {
    let star = &mesh.stars[w];
    match cls.kinds[w] {
        VertexKind::Extraordinary => Ok(None),
        VertexKind::RegularInterior => {
            let i = star.edge_index(e).expect("arrival edge in star");
            let n = star.edges.len();
            if n != 4 {
                return Err(MeshError::Traversal(format!(
                    "regular interior vertex {w} with valence {n} has no straight continuation"
                )));
            }
            Ok(Some(Walk::Along { e: star.edges[(i + 2) % n], from: w }))
        }
        VertexKind::TJunction => {
            let tj = &cls.tjunctions[cls.tj_of_vertex[&w]];
            if e == tj.stem {
                let k = side_containing(mesh, tj.crossbar, w).ok_or_else(|| {
                    MeshError::Traversal(format!("T-junction {w} not flat on its crossbar"))
                })?;
                Ok(Some(Walk::Through {
                    face: tj.crossbar,
                    at: frames[tj.crossbar].vpos[&w].clone(),
                    dir: inward(k),
                }))
            } else if tj.side_edges.contains(&e) {
                let other = if tj.side_edges[0] == e { tj.side_edges[1] } else { tj.side_edges[0] };
                Ok(Some(Walk::Along { e: other, from: w }))
            } else {
                Err(MeshError::Traversal(format!(
                    "edge {e} is not incident to T-junction {w}"
                )))
            }
        }
        VertexKind::RegularBoundary => {
            let i = star.edge_index(e).expect("arrival edge in star");
            let n = star.edges.len();
            // Straight through = two positions over in the open arc.
            let j = if i + 2 < n { Some(i + 2) } else { i.checked_sub(2) };
            Ok(j.map(|j| Walk::Along { e: star.edges[j], from: w }))
        }
    }
}

/// Handle arrival at `exit` (exact frame coordinates) on side `side` of
/// `face` after an interior crossing.
fn land(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    face: FaceId,
    side: usize,
    exit: (Rat, Rat),
) -> Result<Option<Walk>, MeshError> {
    let frame = &frames[face];
    let f = &mesh.faces[face];
    let corners = f.corners();
    if exit == frame.vpos[&corners[side]] || exit == frame.vpos[&corners[(side + 1) % 4]] {
        return Err(MeshError::Traversal(format!(
            "knot march lands on a corner of face {face}; refine the mesh to separate the lines"
        )));
    }
    // A chain vertex exactly at the landing point: continue along its stem.
    for x in f.side_interior_vertices(side) {
        if frame.vpos[&x] == exit {
            return match cls.kinds[x] {
                VertexKind::TJunction => {
                    let tj = &cls.tjunctions[cls.tj_of_vertex[&x]];
                    Ok(Some(Walk::Along { e: tj.stem, from: x }))
                }
                VertexKind::Extraordinary => Ok(None),
                _ => Err(MeshError::Traversal(format!(
                    "knot march lands on vertex {x} with no straight continuation"
                ))),
            };
        }
    }
    // Strictly inside one of the side's edges: cross into the next face.
    let mut cur = corners[side];
    for &e in &f.sides[side] {
        let w = mesh.edges[e].other(cur);
        let (pc, pw) = (&frame.vpos[&cur], &frame.vpos[&w]);
        let (lo, hi) = if pc <= pw { (pc, pw) } else { (pw, pc) };
        let inside = if side.is_multiple_of(2) {
            exit.0 > lo.0 && exit.0 < hi.0
        } else {
            exit.1 > lo.1 && exit.1 < hi.1
        };
        if inside {
            let Some(g) = mesh.face_across(e, face) else {
                return Ok(None);
            };
            // Locate the same point in g's frame through the edge parameter.
            let [a, b] = mesh.edges[e].v;
            let (fa, fb) = (&frame.vpos[&a], &frame.vpos[&b]);
            let gframe = &frames[g];
            let (ga, gb) = (&gframe.vpos[&a], &gframe.vpos[&b]);
            let t = edge_param(fa, fb, &exit);
            let at = (
                ga.0.clone() + t.clone() * (gb.0.clone() - ga.0.clone()),
                ga.1.clone() + t * (gb.1.clone() - ga.1.clone()),
            );
            let gk = (0..4)
                .find(|&k| mesh.faces[g].sides[k].contains(&e))
                .ok_or_else(|| MeshError::Traversal(format!("edge {e} not on face {g}")))?;
            return Ok(Some(Walk::Through { face: g, at, dir: inward(gk) }));
        }
        cur = w;
    }
    Err(MeshError::Traversal(format!(
        "knot march exit not found on side {side} of face {face}"
    )))
}

/// Parameter of `p` along the segment `a → b` (whichever coordinate varies).
fn edge_param(a: &(Rat, Rat), b: &(Rat, Rat), p: &(Rat, Rat)) -> Rat {
    if a.0 != b.0 {
        (p.0.clone() - a.0.clone()) / (b.0.clone() - a.0.clone())
    } else {
        (p.1.clone() - a.1.clone()) / (b.1.clone() - a.1.clone())
    }
}

/// An anchor's two local knot vectors, centered at the anchor (knot 2 = 0).
#[derive(Debug, Clone)]
pub struct Anchor {
    pub vertex: VertexId,
    pub knots_u: LocalKnots,
    pub knots_v: LocalKnots,
}

/// Build the anchor data for a non-extraordinary vertex.
pub fn anchor_knots(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    v: VertexId,
) -> Result<Anchor, MeshError> {
    let axes = anchor_axes(mesh, cls, v)?;
    let (up, _) = march_knots(mesh, cls, frames, v, axes[0])?;
    let (vp, _) = march_knots(mesh, cls, frames, v, axes[1])?;
    let (um, _) = march_knots(mesh, cls, frames, v, axes[2])?;
    let (vm, _) = march_knots(mesh, cls, frames, v, axes[3])?;
    Ok(Anchor {
        vertex: v,
        knots_u: LocalKnots([-um[0] - um[1], -um[0], 0.0, up[0], up[0] + up[1]]),
        knots_v: LocalKnots([-vm[0] - vm[1], -vm[0], 0.0, vp[0], vp[0] + vp[1]]),
    })
}

/// Placement of one face in an anchor's coordinates: an axis-aligned rigid
/// map `anchor = org + r · frame` where `r` is a signed permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub org: (Rat, Rat),
    pub r: [[i8; 2]; 2],
}

impl Placement {
    pub fn apply(&self, p: &(Rat, Rat)) -> (Rat, Rat) {
        let term = |row: &[i8; 2]| {
            let mut acc = rat(0.0);
            if row[0] != 0 {
                acc += rat(row[0] as f64) * p.0.clone();
            }
            if row[1] != 0 {
                acc += rat(row[1] as f64) * p.1.clone();
            }
            acc
        };
        (self.org.0.clone() + term(&self.r[0]), self.org.1.clone() + term(&self.r[1]))
    }

    /// Anchor-coordinate bounding rectangle of a frame-space rectangle.
    pub fn rect(&self, u: (&Rat, &Rat), v: (&Rat, &Rat)) -> ((Rat, Rat), (Rat, Rat)) {
        let c1 = self.apply(&(u.0.clone(), v.0.clone()));
        let c2 = self.apply(&(u.1.clone(), v.1.clone()));
        let (au0, au1) = if c1.0 <= c2.0 { (c1.0, c2.0) } else { (c2.0, c1.0) };
        let (av0, av1) = if c1.1 <= c2.1 { (c1.1, c2.1) } else { (c2.1, c1.1) };
        ((au0, au1), (av0, av1))
    }

    /// Which element axis the anchor's `u` (row 0) or `v` (row 1) comes
    /// from, and whether it is reversed: `(frame axis, reversed)`.
    pub fn axis_source(&self, anchor_axis: usize) -> (usize, bool) {
        let row = &self.r[anchor_axis];
        if row[0] != 0 {
            (0, row[0] < 0)
        } else {
            (1, row[1] < 0)
        }
    }
}

/// Faces an anchor's function can touch, with their placements. Irregular
/// faces are never entered; traversal stops at the support window.
pub fn place_support(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    anchor: &Anchor,
) -> Result<BTreeMap<FaceId, Placement>, MeshError> {
    let v = anchor.vertex;
    let axes = anchor_axes(mesh, cls, v)?;
    let star = &mesh.stars[v];
    if star.faces.is_empty() {
        return Ok(BTreeMap::new());
    }

    // Seed: the wedge face between the u+ and v+ star edges, where both
    // axis directions are edge directions we can read off the frame.
    // faces[i] sits between edges[i] and edges[i+1], and the axes are
    // chosen with u+ immediately before v+ in star order.
    let seed = match axes[0] {
        Start::Edge(e) => {
            let i = star.edge_index(e).expect("u+ edge in star");
            star.faces[i.min(star.faces.len() - 1)]
        }
        _ => star.faces[0],
    };
    let seed_frame = &frames[seed];
    let p0 = seed_frame.vpos[&v].clone();
    // Direction the axis edge leaves the anchor in the seed face's frame,
    // read off the face topology (side k runs +u, +v, −u, −v for
    // k = 0..3) so zero-length padding edges resolve too.
    let dir_of = |start: Start| -> Result<[i8; 2], MeshError> {
        const SIDE_DIR: [[i8; 2]; 4] = [[1, 0], [0, 1], [-1, 0], [0, -1]];
        let Start::Edge(e) = start else {
            return Err(MeshError::Traversal(format!(
                "axis start of anchor {v} is not an edge"
            )));
        };
        debug_assert!(mesh.edges[e].has(v));
        for (k, &d) in SIDE_DIR.iter().enumerate() {
            let mut cur = mesh.faces[seed].corners()[k];
            for &se in &mesh.faces[seed].sides[k] {
                let next = mesh.edges[se].other(cur);
                if se == e {
                    return Ok(if cur == v { d } else { [-d[0], -d[1]] });
                }
                cur = next;
            }
        }
        Err(MeshError::Traversal(format!(
            "axis edge {e} of anchor {v} does not bound its seed face"
        )))
    };
    let du = dir_of(axes[0])?; // frame direction of anchor-u
    let dv = dir_of(axes[1])?;
    // anchor = r · (frame − p0): rows express anchor axes over frame axes.
    let r = [[du[0], du[1]], [dv[0], dv[1]]];
    let minus_rp0 = {
        let term = |row: &[i8; 2]| {
            -(rat(row[0] as f64) * p0.0.clone() + rat(row[1] as f64) * p0.1.clone())
        };
        (term(&r[0]), term(&r[1]))
    };
    let seed_placement = Placement { org: minus_rp0, r };

    // Support window: the function vanishes outside the open rectangle,
    // but zero-width faces on its rim still have to be traversed to reach
    // what lies beyond them, so expansion uses the closed window.
    let (u0, u4) = (rat(anchor.knots_u.0[0]), rat(anchor.knots_u.0[4]));
    let (v0, v4) = (rat(anchor.knots_v.0[0]), rat(anchor.knots_v.0[4]));
    let face_rect = |pl: &Placement, f: FaceId| {
        let fr = &frames[f];
        let zero = rat(0.0);
        pl.rect((&zero, &fr.su), (&zero, &fr.sv))
    };
    let overlaps_open = |pl: &Placement, f: FaceId| -> bool {
        let ((a0, a1), (b0, b1)) = face_rect(pl, f);
        a1 > u0 && a0 < u4 && b1 > v0 && b0 < v4
    };
    let overlaps_closed = |pl: &Placement, f: FaceId| -> bool {
        let ((a0, a1), (b0, b1)) = face_rect(pl, f);
        a1 >= u0 && a0 <= u4 && b1 >= v0 && b0 <= v4
    };

    let mut placed: BTreeMap<FaceId, Placement> = BTreeMap::new();
    let mut queue = vec![seed];
    placed.insert(seed, seed_placement);
    while let Some(f) = queue.pop() {
        if !overlaps_closed(&placed[&f], f) {
            continue;
        }
        let pl = placed[&f].clone();
        for k in 0..4 {
            for &e in &mesh.faces[f].sides[k] {
                let Some(g) = mesh.face_across(e, f) else { continue };
                if cls.face_class[g] == FaceClass::Irregular {
                    continue;
                }
                let [a, b] = mesh.edges[e].v;
                let (fa, fb) = (&frames[f].vpos[&a], &frames[f].vpos[&b]);
                let (ga, gb) = (&frames[g].vpos[&a], &frames[g].vpos[&b]);
                let gpl = propagate(&pl, fa, fb, ga, gb, edge_axis(fa, fb), edge_axis(ga, gb), inward_sign(mesh, g, e), inward_sign(mesh, f, e));
                match placed.get(&g) {
                    Some(prev) => {
                        if *prev != gpl {
                            if std::env::var("KNOT_TRACE").is_ok() {
                                eprintln!(
                                    "CONFLICT {f}->{g}: had org=({},{}) r={:?}, new org=({},{}) r={:?}",
                                    prev.org.0, prev.org.1, prev.r, gpl.org.0, gpl.org.1, gpl.r
                                );
                            }
                            return Err(MeshError::Traversal(format!(
                                "support of anchor {v} places face {g} inconsistently"
                            )));
                        }
                    }
                    None => {
                        if std::env::var("KNOT_TRACE").is_ok() {
                            let ((a0, a1), (b0, b1)) = face_rect(&gpl, g);
                            eprintln!(
                                "place {f}->{g}: rect u[{a0},{a1}] v[{b0},{b1}] r={:?}",
                                gpl.r
                            );
                        }
                        placed.insert(g, gpl);
                        queue.push(g);
                    }
                }
            }
        }
    }
    // Keep only faces where the function is nonzero on positive area.
    placed.retain(|&f, pl| overlaps_open(pl, f));
    Ok(placed)
}

/// Axis along which the edge runs in a frame: 0 = u varies, 1 = v varies.
/// Zero-length edges report the axis of the side they sit on via equality
/// of the constant coordinate; for them the tangential axis is irrelevant
/// because the propagated offset collapses to a point.
fn edge_axis(a: &(Rat, Rat), b: &(Rat, Rat)) -> usize {
    if a.1 == b.1 && a.0 != b.0 {
        0
    } else {
        1
    }
}

/// Sign of the inward normal of face `f` at edge `e` along the
/// perpendicular frame axis: +1 when the face lies above/right of the edge.
fn inward_sign(mesh: &TMesh, f: FaceId, e: EdgeId) -> i8 {
    let k = (0..4)
        .find(|&k| mesh.faces[f].sides[k].contains(&e))
        .expect("edge on one of the face's sides");
    match k {
        0 | 3 => 1,
        _ => -1,
    }
}

/// Placement of the neighbouring face `g` given face `f`'s placement and
/// the shared edge's endpoint coordinates in both frames.
#[allow(clippy::too_many_arguments)]
fn propagate(
    pl: &Placement,
    fa: &(Rat, Rat),
    fb: &(Rat, Rat),
    ga: &(Rat, Rat),
    gb: &(Rat, Rat),
    f_axis: usize,
    g_axis: usize,
    g_inward: i8,
    f_inward: i8,
) -> Placement {
    // Tangential: map g's edge axis onto f's edge axis, oriented so that a
    // and b correspond. Perpendicular: g's inward normal is f's outward.
    let mut m = [[0i8; 2]; 2]; // frame_f = m · frame_g (as directions)
    let tangent_sign = {
        let (fa_t, fb_t) = if f_axis == 0 { (&fa.0, &fb.0) } else { (&fa.1, &fb.1) };
        let (ga_t, gb_t) = if g_axis == 0 { (&ga.0, &gb.0) } else { (&ga.1, &gb.1) };
        let f_dir = fb_t > fa_t;
        let g_dir = gb_t > ga_t;
        if f_dir == g_dir {
            1i8
        } else {
            -1
        }
    };
    m[f_axis][g_axis] = tangent_sign;
    let (f_perp, g_perp) = (1 - f_axis, 1 - g_axis);
    // g's inward direction equals f's outward direction (−f_inward).
    m[f_perp][g_perp] = -f_inward * g_inward;
    // r_g = r_f · m ; org_g = org_f + r_f·fa − r_g·ga.
    let mut rg = [[0i8; 2]; 2];
    for (i, row) in rg.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = pl.r[i][0] * m[0][j] + pl.r[i][1] * m[1][j];
        }
    }
    let apply_lin = |r: &[[i8; 2]; 2], p: &(Rat, Rat)| {
        (
            rat(r[0][0] as f64) * p.0.clone() + rat(r[0][1] as f64) * p.1.clone(),
            rat(r[1][0] as f64) * p.0.clone() + rat(r[1][1] as f64) * p.1.clone(),
        )
    };
    let rfa = apply_lin(&pl.r, fa);
    let rga = apply_lin(&rg, ga);
    Placement {
        org: (
            pl.org.0.clone() + rfa.0 - rga.0,
            pl.org.1.clone() + rfa.1 - rga.1,
        ),
        r: rg,
    }
    // Note: for zero-length edges both endpoints coincide parametrically,
    // so the tangential sign degenerates, but then the perpendicular offset
    // alone fixes the placement and the tangential column is still a valid
    // unit direction.
}

/// Frames for every face (shared helper for the extraction passes).
pub fn all_frames(mesh: &TMesh) -> Result<Vec<FaceFrame>, MeshError> {
    (0..mesh.num_faces()).map(|f| face_frame(mesh, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build::tests::padded_grid_input;
    use crate::mesh::build_tmesh;
    use crate::mesh::classify::classify;
    use approx::assert_abs_diff_eq;

    fn setup(m: usize) -> (TMesh, Classification, Vec<FaceFrame>) {
        let mesh = build_tmesh(&padded_grid_input(m)).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        (mesh, cls, frames)
    }

    #[test]
    fn interior_anchor_gets_uniform_knots() {
        let (mesh, cls, frames) = setup(4);
        let n = 4 + 3;
        let center = 3 * n + 3; // column 3, row 3 — two active cells from each side
        let a = anchor_knots(&mesh, &cls, &frames, center).unwrap();
        for k in [a.knots_u.0, a.knots_v.0] {
            assert_abs_diff_eq!(k[0], -2.0, epsilon = 1e-14);
            assert_abs_diff_eq!(k[1], -1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(k[2], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(k[3], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(k[4], 2.0, epsilon = 1e-14);
        }
    }

    /// Knot intervals of a vector, possibly reversed so the first interval
    /// is the smaller end (the star's rotation origin fixes no preferred
    /// axis orientation, so tests compare up to reversal).
    fn intervals(k: [f64; 5]) -> [f64; 4] {
        let iv = [k[1] - k[0], k[2] - k[1], k[3] - k[2], k[4] - k[3]];
        let rev = [iv[3], iv[2], iv[1], iv[0]];
        if iv <= rev {
            iv
        } else {
            rev
        }
    }

    #[test]
    fn clamped_anchors_get_repeated_zero_knots() {
        let (mesh, cls, frames) = setup(3);
        let n = 3 + 3;
        // True outer corner: the end function (1−t)³ in both directions.
        let a = anchor_knots(&mesh, &cls, &frames, 0).unwrap();
        assert_eq!(intervals(a.knots_u.0), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(intervals(a.knots_v.0), [0.0, 0.0, 0.0, 1.0]);
        // One step in diagonally: the second clamped function both ways.
        let a = anchor_knots(&mesh, &cls, &frames, n + 1).unwrap();
        assert_eq!(intervals(a.knots_u.0), [0.0, 0.0, 1.0, 1.0]);
        assert_eq!(intervals(a.knots_v.0), [0.0, 0.0, 1.0, 1.0]);
        // Column 2, row 1: second function across, first interior along.
        // Which parametric direction lands in `knots_u` depends on the
        // star's rotation origin, so compare as an unordered pair.
        let a = anchor_knots(&mesh, &cls, &frames, n + 2).unwrap();
        let mut pair = [intervals(a.knots_u.0), intervals(a.knots_v.0)];
        pair.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(pair, [[0.0, 0.0, 1.0, 1.0], [0.0, 1.0, 1.0, 1.0]]);
    }

    #[test]
    fn support_covers_the_tensor_window() {
        let (mesh, cls, frames) = setup(4);
        let n = 4 + 3;
        let center = 3 * n + 3;
        let a = anchor_knots(&mesh, &cls, &frames, center).unwrap();
        let sup = place_support(&mesh, &cls, &frames, &a).unwrap();
        // A 4×4 block of unit cells around the anchor.
        assert_eq!(sup.len(), 16);
        for (&f, pl) in &sup {
            let zero = rat(0.0);
            let ((a0, a1), (b0, b1)) = pl.rect((&zero, &frames[f].su), (&zero, &frames[f].sv));
            assert!(a0 >= rat(-2.0) && a1 <= rat(2.0));
            assert!(b0 >= rat(-2.0) && b1 <= rat(2.0));
        }
    }

    #[test]
    fn boundary_anchor_support_stays_inside() {
        let (mesh, cls, frames) = setup(3);
        // Outer corner vertex: support = the single first active cell plus
        // surrounding zero-width padding; only faces with area overlap.
        let a = anchor_knots(&mesh, &cls, &frames, 0).unwrap();
        let sup = place_support(&mesh, &cls, &frames, &a).unwrap();
        let positive: Vec<_> = sup
            .keys()
            .filter(|&&f| {
                let fr = &frames[f];
                fr.su > rat(0.0) && fr.sv > rat(0.0)
            })
            .collect();
        assert_eq!(positive.len(), 1);
    }

    #[test]
    fn tjunction_anchor_marches_through_its_crossbar() {
        // Central 2×1 merge: the junction's crossbar-ward knot crosses the
        // merged face in one interval.
        let mut input = padded_grid_input(4);
        let n = 4 + 3;
        let at = |i: usize, j: usize| j * n + i;
        let cells = 4 + 2;
        let (ci, cj) = (2, 2);
        let mut faces = Vec::new();
        for j in 0..cells {
            for i in 0..cells {
                if j == cj && (i == ci || i == ci + 1) {
                    continue;
                }
                faces.push(input.faces[j * cells + i].clone());
            }
        }
        faces.push(vec![
            at(ci, cj),
            at(ci + 1, cj),
            at(ci + 2, cj),
            at(ci + 2, cj + 1),
            at(ci + 1, cj + 1),
            at(ci, cj + 1),
        ]);
        input.faces = faces;
        let mesh = build_tmesh(&input).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        let tj = &cls.tjunctions[0];
        let a = anchor_knots(&mesh, &cls, &frames, tj.vertex).unwrap();
        // Sides run along u (uniform grid), stem is v+, crossbar v−:
        // all four directions see unit intervals on this mesh.
        for k in [a.knots_u.0, a.knots_v.0] {
            assert_abs_diff_eq!(k[1] - k[0], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(k[3] - k[2], 1.0, epsilon = 1e-14);
        }
        // Crossbar-ward the march crosses the merged face and continues
        // along the opposite junction's stem: one full unit both steps.
        assert_abs_diff_eq!(a.knots_v.0[0], -2.0, epsilon = 1e-14);
        // Stem-ward it reaches the clamped boundary after one interval.
        assert_abs_diff_eq!(a.knots_v.0[4], 1.0, epsilon = 1e-14);
        // Support: one active row stem-ward (the boundary clamp cuts it
        // there), the merged row, and two rows beyond the crossbar — but
        // the outermost of those is cut by the window, leaving 4 + 3 + 4
        // positive-area faces. Zero-width padding faces inside the window
        // may tag along; they carry no elements, so count only area.
        let sup = place_support(&mesh, &cls, &frames, &a).unwrap();
        let positive = sup
            .keys()
            .filter(|&&f| frames[f].su > rat(0.0) && frames[f].sv > rat(0.0))
            .count();
        assert_eq!(positive, 11);
    }
}
