//! T-junction extensions and the four admissibility rules.
//!
//! Every T-junction casts two extensions along its stem line:
//!
//! - the **face extension** continues the stem *into* the crossbar face and
//!   onward until it has crossed two orthogonal knot lines ("events");
//! - the **edge extension** runs one event in the opposite direction, which
//!   is always exactly the stem edge itself.
//!
//! ```text
//!              │     │
//!         ─────┼─────┼─────   ← second event (bay 1 ends here)
//!              │  ·  │
//!         ─────┼──·──┼─────   ← first event: far side of the crossbar
//!              │  ·  │          (bay 0 = the "one-bay part")
//!         ─────┴──┬──┴─────   ← T-junction, mid-side of the face above
//!              │  │  │
//! ```
//!
//! Marching is face-local: a straight line is carried across each face in the
//! face's own frame, and continued through vertices by purely topological
//! rules (the opposite edge at a valence-4 vertex, the crossbar interior at a
//! T-junction's own stem, the collinear partner edge along a side). All
//! positions are exact `BigRational`s converted from the f64 spans, so
//! "lands exactly on a vertex" and "two extensions touch" are decidable
//! without tolerances. An extension may travel along existing edges; such
//! pieces are attributed to both adjacent faces and never subdivide anything.
//!
//! The admissibility rules reported by [`check_admissibility`]:
//!
//! 1. no one-bay face extension subdivides a face in the 3-disk of an
//!    extraordinary point;
//! 2. no two perpendicular extensions (face or edge parts, endpoints
//!    included) intersect;
//! 3. no extraordinary point lies in the 0- or 1-layer of the boundary;
//! 4. no boundary-parallel T-junction lies in the 0- or 1-layer.
//!
//! Violations are collected into a report, never raised as errors: an
//! inadmissible mesh is a property failure, not a malformed input.

use super::*;
use classify::{ep_disk, Classification, VertexKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

pub type Rat = BigRational;

/// Exact rational from an f64 (always possible for finite floats).
pub fn rat(x: f64) -> Rat {
    BigRational::from_float(x).unwrap_or_else(|| panic!("non-finite span {x}"))
}

fn rzero() -> Rat {
    BigRational::from_integer(BigInt::from(0))
}

/// Segment direction in a face frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Varies in `u` (fixed `v`).
    U,
    /// Varies in `v` (fixed `u`).
    V,
}

/// One axis-aligned piece of an extension, in the frame of `face`.
#[derive(Debug, Clone)]
pub struct ExtSeg {
    pub face: FaceId,
    pub axis: Axis,
    /// The constant coordinate (a `v` value for [`Axis::U`] segments).
    pub fixed: Rat,
    /// Varying range, `lo ≤ hi`; `lo == hi` marks a point attribution.
    pub lo: Rat,
    pub hi: Rat,
    /// True when the piece crosses the open face interior (and therefore
    /// subdivides it); false when it lies along an existing edge.
    pub interior: bool,
    /// Bay counter along the face extension (0 = one-bay part). Edge
    /// extension pieces carry bay 0 as well.
    pub bay: usize,
    /// True for face-extension pieces, false for edge-extension pieces.
    pub from_face_ext: bool,
}

/// All extension pieces of one T-junction.
#[derive(Debug, Clone)]
pub struct TJExtension {
    /// Index into `Classification::tjunctions`.
    pub tj: usize,
    pub segments: Vec<ExtSeg>,
    /// Faces whose interior the one-bay part crosses.
    pub one_bay_faces: Vec<FaceId>,
    /// Orthogonal lines crossed by the face extension (2 unless truncated).
    pub face_events: usize,
    pub truncated_at_boundary: bool,
    /// Set when the face extension would have to continue through an
    /// extraordinary point (always inadmissible; marching stops there).
    pub hit_ep: Option<VertexId>,
}

#[derive(Debug, Clone, Default)]
pub struct Extensions {
    pub per_tj: Vec<TJExtension>,
}

impl Extensions {
    /// Segments grouped per face, tagged with their T-junction index.
    pub fn by_face(&self) -> BTreeMap<FaceId, Vec<(usize, &ExtSeg)>> {
        let mut map: BTreeMap<FaceId, Vec<(usize, &ExtSeg)>> = BTreeMap::new();
        for ext in &self.per_tj {
            for seg in &ext.segments {
                map.entry(seg.face).or_default().push((ext.tj, seg));
            }
        }
        map
    }
}

/// Rational parametric frame of a face: the rectangle `[0,su]×[0,sv]` with
/// corner 0 at the origin, and the frame position of every loop vertex.
#[derive(Debug, Clone)]
pub struct FaceFrame {
    pub su: Rat,
    pub sv: Rat,
    pub vpos: BTreeMap<VertexId, (Rat, Rat)>,
}

/// Build the frame of face `f`. Requires valid knots (equal opposite side
/// sums); returns an error naming the face otherwise.
pub fn face_frame(mesh: &TMesh, f: FaceId) -> Result<FaceFrame, MeshError> {
    let face = &mesh.faces[f];
    let sum = |k: usize| -> Rat {
        face.sides[k].iter().map(|&e| rat(mesh.edges[e].span)).fold(rzero(), |a, b| a + b)
    };
    let (su, sv) = (sum(0), sum(1));
    if sum(2) != su || sum(3) != sv {
        return Err(MeshError::Knot(format!(
            "face {f} has unequal opposite side spans ({} vs {}, {} vs {})",
            sum(0), sum(2), sum(1), sum(3)
        )));
    }
    let corners = face.corners();
    let corner_pos: [(Rat, Rat); 4] = [
        (rzero(), rzero()),
        (su.clone(), rzero()),
        (su.clone(), sv.clone()),
        (rzero(), sv.clone()),
    ];
    let mut vpos = BTreeMap::new();
    for k in 0..4 {
        vpos.insert(corners[k], corner_pos[k].clone());
    }
    // Walk each side accumulating spans for chain-interior vertices.
    for k in 0..4 {
        let (start, end) = (corner_pos[k].clone(), corner_pos[(k + 1) % 4].clone());
        let total = match k {
            0 | 2 => su.clone(),
            _ => sv.clone(),
        };
        let mut acc = rzero();
        let mut cur = corners[k];
        for &e in &face.sides[k] {
            let w = mesh.edges[e].other(cur);
            acc += rat(mesh.edges[e].span);
            if w != corners[(k + 1) % 4] {
                let t = if total == rzero() { rzero() } else { acc.clone() / total.clone() };
                let pos = (
                    start.0.clone() + (end.0.clone() - start.0.clone()) * t.clone(),
                    start.1.clone() + (end.1.clone() - start.1.clone()) * t,
                );
                vpos.insert(w, pos);
            }
            cur = w;
        }
    }
    Ok(FaceFrame { su, sv, vpos })
}

/// Marching direction inside a face frame.
#[derive(Debug, Clone, Copy)]
struct Dir {
    axis: Axis,
    positive: bool,
}

/// Side index crossed when leaving along `dir`, and the inward direction when
/// entering through side `k`.
fn exit_side(dir: Dir) -> usize {
    match (dir.axis, dir.positive) {
        (Axis::V, true) => 2,
        (Axis::V, false) => 0,
        (Axis::U, true) => 1,
        (Axis::U, false) => 3,
    }
}

fn inward_dir(side: usize) -> Dir {
    match side {
        0 => Dir { axis: Axis::V, positive: true },
        1 => Dir { axis: Axis::U, positive: false },
        2 => Dir { axis: Axis::V, positive: false },
        3 => Dir { axis: Axis::U, positive: true },
        _ => unreachable!(),
    }
}

enum State {
    /// About to cross the interior of `face` from `at` along `dir`.
    InFace { face: FaceId, at: (Rat, Rat), dir: Dir },
    /// About to travel along edge `e` from vertex `from`.
    AlongEdge { e: EdgeId, from: VertexId },
    Stop { boundary: bool, ep: Option<VertexId> },
}

/// Compute both extensions of every T-junction.
pub fn compute_extensions(mesh: &TMesh, cls: &Classification) -> Result<Extensions, MeshError> {
    let mut frames: BTreeMap<FaceId, FaceFrame> = BTreeMap::new();
    for f in 0..mesh.num_faces() {
        frames.insert(f, face_frame(mesh, f)?);
    }
    let mut out = Extensions::default();
    for (idx, tj) in cls.tjunctions.iter().enumerate() {
        let mut ext = TJExtension {
            tj: idx,
            segments: Vec::new(),
            one_bay_faces: Vec::new(),
            face_events: 0,
            truncated_at_boundary: false,
            hit_ep: None,
        };

        // ---- face extension: 2 events into the crossbar ------------------
        {
            let frame = &frames[&tj.crossbar];
            let at = frame.vpos[&tj.vertex].clone();
            let side = (0..4)
                .find(|&k| mesh.faces[tj.crossbar].side_interior_vertices(k).contains(&tj.vertex))
                .expect("T-junction on a side");
            let dir = inward_dir(side);
            march(mesh, cls, &frames, State::InFace { face: tj.crossbar, at, dir }, 2, true, &mut ext);
        }

        // ---- edge extension: 1 event along the stem -----------------------
        march(
            mesh,
            cls,
            &frames,
            State::AlongEdge { e: tj.stem, from: tj.vertex },
            1,
            false,
            &mut ext,
        );

        out.per_tj.push(ext);
    }
    Ok(out)
}

/// Drive the marching state machine for up to `limit` events, appending
/// segments to `ext`.
fn march(
    mesh: &TMesh,
    cls: &Classification,
    frames: &BTreeMap<FaceId, FaceFrame>,
    mut state: State,
    limit: usize,
    face_ext: bool,
    ext: &mut TJExtension,
) {
    let mut events = 0usize;
    loop {
        match state {
            State::Stop { boundary, ep } => {
                if face_ext {
                    ext.face_events = events;
                    ext.truncated_at_boundary |= boundary;
                    if ext.hit_ep.is_none() {
                        ext.hit_ep = ep;
                    }
                }
                return;
            }
            State::InFace { face, at, dir } => {
                let frame = &frames[&face];
                let (exit, seg) = cross_face(frame, face, &at, dir, events, face_ext);
                if seg.interior && seg.bay == 0 && face_ext && !ext.one_bay_faces.contains(&face) {
                    ext.one_bay_faces.push(face);
                }
                ext.segments.push(seg);
                events += 1; // reached the far side: one orthogonal line met
                let side = exit_side(dir);
                state = land_on_side(mesh, cls, frames, face, side, &exit, events >= limit);
            }
            State::AlongEdge { e, from } => {
                let to = mesh.edges[e].other(from);
                push_edge_segments(mesh, frames, e, events, face_ext, ext);
                events += 1; // arrived at the far vertex
                if events >= limit {
                    if face_ext {
                        ext.face_events = events;
                    }
                    return;
                }
                state = continue_through_vertex(mesh, cls, frames, to, Arrival::Edge(e));
            }
        }
        if events >= limit {
            if let State::Stop { .. } = state {
                continue; // let Stop record its flags
            }
            if face_ext {
                ext.face_events = events;
            }
            return;
        }
    }
}

/// Cross the interior of `face` from `at` along `dir`; returns the exit point
/// and the recorded segment.
fn cross_face(
    frame: &FaceFrame,
    face: FaceId,
    at: &(Rat, Rat),
    dir: Dir,
    bay: usize,
    face_ext: bool,
) -> ((Rat, Rat), ExtSeg) {
    let (exit, fixed, lo, hi, axis) = match dir.axis {
        Axis::V => {
            let target = if dir.positive { frame.sv.clone() } else { rzero() };
            let (a, b) = minmax(at.1.clone(), target.clone());
            ((at.0.clone(), target), at.0.clone(), a, b, Axis::V)
        }
        Axis::U => {
            let target = if dir.positive { frame.su.clone() } else { rzero() };
            let (a, b) = minmax(at.0.clone(), target.clone());
            ((target, at.1.clone()), at.1.clone(), a, b, Axis::U)
        }
    };
    let seg = ExtSeg { face, axis, fixed, lo, hi, interior: true, bay, from_face_ext: face_ext };
    (exit, seg)
}

fn minmax(a: Rat, b: Rat) -> (Rat, Rat) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Decide what the exit point on `side` of `face` hits: a chain vertex (then
/// continue by topology) or the interior of a chain edge (then cross into the
/// neighbor face, or stop at the boundary).
fn land_on_side(
    mesh: &TMesh,
    cls: &Classification,
    frames: &BTreeMap<FaceId, FaceFrame>,
    face: FaceId,
    side: usize,
    exit: &(Rat, Rat),
    done: bool,
) -> State {
    let frame = &frames[&face];
    let f = &mesh.faces[face];
    let corners = f.corners();
    // Corner landing: only possible in degenerate (zero-width) situations.
    for k in [side, (side + 1) % 4] {
        if frame.vpos[&corners[k]] == *exit {
            return State::Stop { boundary: false, ep: None };
        }
    }
    for w in f.side_interior_vertices(side) {
        if frame.vpos[&w] == *exit {
            if done {
                return State::Stop { boundary: false, ep: None };
            }
            // A chain-interior vertex of this side is a T-junction whose
            // crossbar is `face`; the continuation is its stem.
            return match cls.kinds[w] {
                VertexKind::TJunction => {
                    let tj = &cls.tjunctions[cls.tj_of_vertex[&w]];
                    State::AlongEdge { e: tj.stem, from: w }
                }
                VertexKind::Extraordinary => State::Stop { boundary: false, ep: Some(w) },
                _ => State::Stop { boundary: false, ep: None },
            };
        }
    }
    // Edge landing: find the chain edge strictly containing the exit point.
    let mut cur = corners[side];
    for &e in &f.sides[side] {
        let w = mesh.edges[e].other(cur);
        let (p, q) = (&frame.vpos[&cur], &frame.vpos[&w]);
        if strictly_between(exit, p, q) {
            if done {
                return State::Stop { boundary: false, ep: None };
            }
            let Some(g) = mesh.face_across(e, face) else {
                return State::Stop { boundary: true, ep: None };
            };
            return enter_face(mesh, frames, face, g, e, exit);
        }
        cur = w;
    }
    // Nothing matched: a degenerate (zero-length) side. Halt conservatively.
    State::Stop { boundary: false, ep: None }
}

fn strictly_between(x: &(Rat, Rat), p: &(Rat, Rat), q: &(Rat, Rat)) -> bool {
    let between = |a: &Rat, lo: &Rat, hi: &Rat| {
        let (l, h) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        l < a && a < h
    };
    if p.0 == q.0 {
        x.0 == p.0 && between(&x.1, &p.1, &q.1)
    } else {
        x.1 == p.1 && between(&x.0, &p.0, &q.0)
    }
}

/// Translate a point on shared edge `e` from `f`'s frame into `g`'s frame and
/// continue inward.
fn enter_face(
    mesh: &TMesh,
    frames: &BTreeMap<FaceId, FaceFrame>,
    f: FaceId,
    g: FaceId,
    e: EdgeId,
    p: &(Rat, Rat),
) -> State {
    let (a, b) = (mesh.edges[e].v[0], mesh.edges[e].v[1]);
    let (fa, fb) = (&frames[&f].vpos[&a], &frames[&f].vpos[&b]);
    // Parameter of p along the edge in f's frame.
    let s = if fa.0 != fb.0 {
        (p.0.clone() - fa.0.clone()) / (fb.0.clone() - fa.0.clone())
    } else if fa.1 != fb.1 {
        (p.1.clone() - fa.1.clone()) / (fb.1.clone() - fa.1.clone())
    } else {
        return State::Stop { boundary: false, ep: None }; // zero-length edge
    };
    let (ga, gb) = (&frames[&g].vpos[&a], &frames[&g].vpos[&b]);
    let q = (
        ga.0.clone() + (gb.0.clone() - ga.0.clone()) * s.clone(),
        ga.1.clone() + (gb.1.clone() - ga.1.clone()) * s,
    );
    // Which side of g carries e?
    let side = (0..4)
        .find(|&k| mesh.faces[g].sides[k].contains(&e))
        .expect("shared edge on neighbor side");
    State::InFace { face: g, at: q, dir: inward_dir(side) }
}

/// Record the travel along edge `e` in the frames of both adjacent faces.
fn push_edge_segments(
    mesh: &TMesh,
    frames: &BTreeMap<FaceId, FaceFrame>,
    e: EdgeId,
    bay: usize,
    face_ext: bool,
    ext: &mut TJExtension,
) {
    for &f in &mesh.edges[e].faces {
        let frame = &frames[&f];
        let (a, b) = (mesh.edges[e].v[0], mesh.edges[e].v[1]);
        let (pa, pb) = (&frame.vpos[&a], &frame.vpos[&b]);
        let (axis, fixed, lo, hi) = if pa.0 == pb.0 {
            let (l, h) = minmax(pa.1.clone(), pb.1.clone());
            (Axis::V, pa.0.clone(), l, h)
        } else {
            let (l, h) = minmax(pa.0.clone(), pb.0.clone());
            (Axis::U, pa.1.clone(), l, h)
        };
        ext.segments.push(ExtSeg {
            face: f,
            axis,
            fixed,
            lo,
            hi,
            interior: false,
            bay,
            from_face_ext: face_ext,
        });
    }
}

/// What arriving at a vertex looks like.
enum Arrival {
    Edge(EdgeId),
}

/// Continue "straight through" vertex `v`, arrived along an edge: purely
/// topological (opposite edge at valence 4, crossbar interior at a
/// T-junction's stem, partner side edge along a crossbar side, partner
/// boundary edge at a flat boundary vertex).
fn continue_through_vertex(
    mesh: &TMesh,
    cls: &Classification,
    frames: &BTreeMap<FaceId, FaceFrame>,
    v: VertexId,
    arrival: Arrival,
) -> State {
    let Arrival::Edge(e) = arrival;
    let star = &mesh.stars[v];
    match cls.kinds[v] {
        VertexKind::RegularInterior => {
            // Valence 4: straight through is two fan steps away.
            let i = star.edge_index(e).unwrap();
            let opposite = star.edges[(i + 2) % 4];
            State::AlongEdge { e: opposite, from: v }
        }
        VertexKind::TJunction => {
            let tj = &cls.tjunctions[cls.tj_of_vertex[&v]];
            if e == tj.stem {
                // Straight on means into the crossbar interior.
                let frame = &frames[&tj.crossbar];
                let side = (0..4)
                    .find(|&k| mesh.faces[tj.crossbar].side_interior_vertices(k).contains(&v))
                    .unwrap();
                State::InFace {
                    face: tj.crossbar,
                    at: frame.vpos[&v].clone(),
                    dir: inward_dir(side),
                }
            } else if tj.side_edges.contains(&e) {
                let partner =
                    if tj.side_edges[0] == e { tj.side_edges[1] } else { tj.side_edges[0] };
                State::AlongEdge { e: partner, from: v }
            } else {
                State::Stop { boundary: false, ep: None }
            }
        }
        VertexKind::Extraordinary => State::Stop { boundary: false, ep: Some(v) },
        VertexKind::RegularBoundary => {
            if mesh.edges[e].is_boundary() && star.valence() == 3 {
                // Mid-side boundary vertex: continue along the other boundary edge.
                let partner = star
                    .edges
                    .iter()
                    .copied()
                    .find(|&x| x != e && mesh.edges[x].is_boundary());
                match partner {
                    Some(p) => State::AlongEdge { e: p, from: v },
                    None => State::Stop { boundary: true, ep: None },
                }
            } else {
                State::Stop { boundary: true, ep: None }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

/// One admissibility failure. The mesh stays usable for inspection; spline
/// space construction on an inadmissible mesh is not covered by any
/// smoothness or independence guarantee.
#[derive(Debug, Clone)]
pub enum Violation {
    /// Rule 1: a one-bay face extension subdivides a face in an EP's 3-disk.
    OneBayCutsEpDisk { tj_vertex: VertexId, face: FaceId, ep: VertexId },
    /// Rule 2: two perpendicular extensions intersect (closed segments).
    PerpendicularExtensionIntersection {
        tj_a: VertexId,
        tj_b: VertexId,
        face: FaceId,
        at: (f64, f64),
    },
    /// Rule 3: an EP lies in the 0- or 1-layer of the boundary.
    ShallowExtraordinary { vertex: VertexId, layer: usize },
    /// Rule 4: a boundary-parallel T-junction lies in the 0- or 1-layer.
    BoundaryParallelTJunction { vertex: VertexId, layer: usize },
    /// A face extension ran into an extraordinary point (subsumed by rule 1
    /// in every reachable configuration, reported for precision).
    ExtensionReachesExtraordinary { tj_vertex: VertexId, ep: VertexId },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::OneBayCutsEpDisk { tj_vertex, face, ep } => write!(
                w,
                "one-bay extension of T-junction {tj_vertex} subdivides face {face} in the 3-disk of extraordinary point {ep}"
            ),
            Violation::PerpendicularExtensionIntersection { tj_a, tj_b, face, at } => write!(
                w,
                "extensions of T-junctions {tj_a} and {tj_b} intersect perpendicularly in face {face} at ({}, {})",
                at.0, at.1
            ),
            Violation::ShallowExtraordinary { vertex, layer } => {
                write!(w, "extraordinary point {vertex} lies in boundary layer {layer}")
            }
            Violation::BoundaryParallelTJunction { vertex, layer } => {
                write!(w, "boundary-parallel T-junction {vertex} lies in boundary layer {layer}")
            }
            Violation::ExtensionReachesExtraordinary { tj_vertex, ep } => write!(
                w,
                "face extension of T-junction {tj_vertex} reaches extraordinary point {ep}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluate all four admissibility rules.
pub fn check_admissibility(
    mesh: &TMesh,
    cls: &Classification,
    exts: &Extensions,
) -> AdmissibilityReport {
    let mut report = AdmissibilityReport::default();

    // Rule 1 + EP contact: one-bay interior pieces vs 3-disks.
    for ext in &exts.per_tj {
        let tjv = cls.tjunctions[ext.tj].vertex;
        if let Some(ep) = ext.hit_ep {
            report.violations.push(Violation::ExtensionReachesExtraordinary { tj_vertex: tjv, ep });
        }
        for &face in &ext.one_bay_faces {
            for &ep in &cls.eps {
                if ep_disk(mesh, ep, 3).contains(&face) {
                    report.violations.push(Violation::OneBayCutsEpDisk { tj_vertex: tjv, face, ep });
                }
            }
        }
    }

    // Rule 2: perpendicular intersections, exact, per shared face.
    let by_face = {
        let mut map: BTreeMap<FaceId, Vec<(usize, &ExtSeg)>> = BTreeMap::new();
        for ext in &exts.per_tj {
            for seg in &ext.segments {
                map.entry(seg.face).or_default().push((ext.tj, seg));
            }
        }
        map
    };
    let mut seen: std::collections::BTreeSet<(usize, usize, FaceId)> = Default::default();
    for (&face, segs) in &by_face {
        for (i, &(tj_a, sa)) in segs.iter().enumerate() {
            for &(tj_b, sb) in &segs[i + 1..] {
                if tj_a == tj_b || sa.axis == sb.axis {
                    continue;
                }
                let crosses = sb.fixed >= sa.lo
                    && sb.fixed <= sa.hi
                    && sa.fixed >= sb.lo
                    && sa.fixed <= sb.hi;
                if crosses {
                    let key = (tj_a.min(tj_b), tj_a.max(tj_b), face);
                    if seen.insert(key) {
                        let (ua, va) = match sa.axis {
                            Axis::U => (sb.fixed.clone(), sa.fixed.clone()),
                            Axis::V => (sa.fixed.clone(), sb.fixed.clone()),
                        };
                        report.violations.push(Violation::PerpendicularExtensionIntersection {
                            tj_a: cls.tjunctions[tj_a].vertex,
                            tj_b: cls.tjunctions[tj_b].vertex,
                            face,
                            at: (ua.to_f64().unwrap_or(f64::NAN), va.to_f64().unwrap_or(f64::NAN)),
                        });
                    }
                }
            }
        }
    }

    // Rule 3: EPs too close to the boundary.
    for &ep in &cls.eps {
        let layer = cls.vertex_layer[ep];
        if layer <= 1 {
            report.violations.push(Violation::ShallowExtraordinary { vertex: ep, layer });
        }
    }

    // Rule 4: boundary-parallel T-junctions too close to the boundary. A
    // T-junction is boundary-parallel when its crossbar side runs along the
    // layer contour: both side neighbors share its layer index.
    for tj in &cls.tjunctions {
        let l = cls.vertex_layer[tj.vertex];
        if l <= 1
            && cls.vertex_layer[tj.side_neighbors[0]] == l
            && cls.vertex_layer[tj.side_neighbors[1]] == l
        {
            report.violations.push(Violation::BoundaryParallelTJunction { vertex: tj.vertex, layer: l });
        }
    }

    report
}
