//! Parametric layer over a validated T-mesh: global knot consistency, the
//! Bézier element partition, and dyadic refinement.
//!
//! A face with side span sums `su × sv` is a parametric rectangle. Elements
//! are obtained by slicing faces along the interior pieces of T-junction
//! face extensions, splitting every irregular face 2×2 at its parametric
//! mid-lines, and dropping anything with zero measure (the zero-width
//! padding ring of a clamped patch produces no elements):
//!
//! ```text
//!    face of the T-mesh              its elements
//!   ┌───────┬───────────┐         ┌───────┬─────┬─────┐
//!   │       │           │         │       │     ·     │   ← extension cut
//!   │       ├───────────┤   ──▶   │       ├─────┼─────┤
//!   │       │ irregular │         │       │  ╳  │  ╳  │   ← 2×2 mid split
//!   └───────┴───────────┘         └───────┴─────┴─────┘
//! ```
//!
//! Neighboring elements meet along [`Interface`]s, each carrying the
//! smoothness order the spline space promises across it (per space): order 2
//! on ordinary knot lines and extension cuts, order 1 where the construction
//! reduces smoothness (extraordinary-point spokes, the mid-splits inside
//! irregular faces, and — for the analysis space — every edge touching the
//! one-ring of an extraordinary point). Verification samples these promises;
//! nothing here is trusted without a test.

use crate::mesh::classify::Classification;
use crate::mesh::ext::{face_frame, rat, Axis, Extensions, FaceFrame, Rat};
use crate::mesh::{
    EdgeId, FaceClass, FaceId, MeshError, MeshInput, TMesh, VertexId, VertexKind,
};
use num_traits::ToPrimitive;
use std::collections::{BTreeMap, BTreeSet};

/// Check global knot consistency beyond the per-face rules:
///
/// - every face has equal opposite side span sums (frames exist);
/// - all spokes of an extraordinary point carry one common positive span;
/// - a closed surface has no zero spans at all.
pub fn validate_knots(mesh: &TMesh, cls: &Classification) -> Result<(), MeshError> {
    for f in 0..mesh.num_faces() {
        face_frame(mesh, f)?;
    }
    for &ep in &cls.eps {
        let spans: Vec<f64> =
            mesh.stars[ep].edges.iter().map(|&e| mesh.edges[e].span).collect();
        let first = spans[0];
        if first <= 0.0 || spans.iter().any(|&s| s != first) {
            return Err(MeshError::Knot(format!(
                "extraordinary point {ep} needs one common positive span on all spokes, got {spans:?}"
            )));
        }
    }
    if mesh.closed {
        if let Some(e) = (0..mesh.num_edges()).find(|&e| mesh.edges[e].span <= 0.0) {
            return Err(MeshError::Knot(format!(
                "closed surface has a non-positive span on edge {e}"
            )));
        }
    }
    Ok(())
}

/// One Bézier element: an axis-aligned sub-rectangle of its face's frame.
#[derive(Debug, Clone)]
pub struct Element {
    pub face: FaceId,
    pub u: (Rat, Rat),
    pub v: (Rat, Rat),
}

impl Element {
    pub fn u_f64(&self) -> (f64, f64) {
        (self.u.0.to_f64().unwrap(), self.u.1.to_f64().unwrap())
    }

    pub fn v_f64(&self) -> (f64, f64) {
        (self.v.0.to_f64().unwrap(), self.v.1.to_f64().unwrap())
    }

    /// Parametric extent `(width, height)` in knot units.
    pub fn extent(&self) -> (f64, f64) {
        let (u0, u1) = self.u_f64();
        let (v0, v1) = self.v_f64();
        (u1 - u0, v1 - v0)
    }

    /// Map parent coordinates `(xi, eta) ∈ [0,1]²` to face-frame coordinates.
    pub fn to_frame(&self, xi: f64, eta: f64) -> (f64, f64) {
        let (u0, u1) = self.u_f64();
        let (v0, v1) = self.v_f64();
        (u0 + xi * (u1 - u0), v0 + eta * (v1 - v0))
    }
}

/// One side of an [`Interface`]: which element, which of its sides, and how
/// the shared parameter `t ∈ [0,1]` maps into the element's parent square.
#[derive(Debug, Clone)]
pub struct SideRef {
    pub elem: usize,
    /// The parent coordinate that is constant along the interface.
    pub fixed_axis: Axis,
    /// Its value: 0.0 or 1.0.
    pub fixed_at: f64,
    /// The varying parent coordinate is `off + slope * t`.
    pub off: f64,
    pub slope: f64,
}

impl SideRef {
    /// Parent coordinates of the interface point at parameter `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let varying = self.off + self.slope * t;
        match self.fixed_axis {
            Axis::U => (self.fixed_at, varying),
            Axis::V => (varying, self.fixed_at),
        }
    }
}

/// A shared piece of boundary between two elements, with the smoothness
/// order each space promises across it.
#[derive(Debug, Clone)]
pub struct Interface {
    pub a: SideRef,
    pub b: SideRef,
    pub order_design: u8,
    pub order_analysis: u8,
}

/// The Bézier element partition of a T-mesh.
#[derive(Debug, Clone)]
pub struct ElementalTMesh {
    pub elements: Vec<Element>,
    /// Element ids per face (empty entry for zero-measure faces).
    pub by_face: Vec<Vec<usize>>,
    pub interfaces: Vec<Interface>,
}

/// Build the element partition. `exts` supplies the extension cuts; the 2×2
/// splits of irregular faces are added here.
pub fn build_elements(
    mesh: &TMesh,
    cls: &Classification,
    exts: &Extensions,
) -> Result<ElementalTMesh, MeshError> {
    let nf = mesh.num_faces();
    let mut frames = Vec::with_capacity(nf);
    for f in 0..nf {
        frames.push(face_frame(mesh, f)?);
    }

    // ---- cut lines per face ----------------------------------------------
    let mut ucuts: Vec<BTreeSet<Rat>> = vec![BTreeSet::new(); nf];
    let mut vcuts: Vec<BTreeSet<Rat>> = vec![BTreeSet::new(); nf];
    for ext in &exts.per_tj {
        for seg in ext.segments.iter().filter(|s| s.interior && s.from_face_ext) {
            match seg.axis {
                Axis::V => ucuts[seg.face].insert(seg.fixed.clone()),
                Axis::U => vcuts[seg.face].insert(seg.fixed.clone()),
            };
        }
    }
    let two = rat(2.0);
    for &f in &cls.irregular_faces {
        debug_assert!(
            ucuts[f].is_empty() && vcuts[f].is_empty(),
            "admissible extensions never reach irregular faces"
        );
        ucuts[f].insert(frames[f].su.clone() / two.clone());
        vcuts[f].insert(frames[f].sv.clone() / two.clone());
    }

    // ---- elements ---------------------------------------------------------
    let zero = rat(0.0);
    let mut elements = Vec::new();
    let mut by_face: Vec<Vec<usize>> = vec![Vec::new(); nf];
    // Per face: element ids arranged as a grid, column-major in u.
    let mut grids: Vec<(Vec<Rat>, Vec<Rat>)> = Vec::with_capacity(nf);
    for f in 0..nf {
        let frame = &frames[f];
        if frame.su == zero || frame.sv == zero {
            grids.push((Vec::new(), Vec::new()));
            continue;
        }
        let mut us: Vec<Rat> = vec![zero.clone()];
        us.extend(ucuts[f].iter().filter(|c| **c > zero && **c < frame.su).cloned());
        us.push(frame.su.clone());
        let mut vs: Vec<Rat> = vec![zero.clone()];
        vs.extend(vcuts[f].iter().filter(|c| **c > zero && **c < frame.sv).cloned());
        vs.push(frame.sv.clone());
        for jv in 0..vs.len() - 1 {
            for iu in 0..us.len() - 1 {
                let id = elements.len();
                elements.push(Element {
                    face: f,
                    u: (us[iu].clone(), us[iu + 1].clone()),
                    v: (vs[jv].clone(), vs[jv + 1].clone()),
                });
                by_face[f].push(id);
            }
        }
        grids.push((us, vs));
    }

    // ---- smoothness orders per mesh edge ---------------------------------
    // Vertices on irregular faces (the one-ring closure of each EP).
    let mut onering: BTreeSet<VertexId> = BTreeSet::new();
    for &f in &cls.irregular_faces {
        onering.extend(mesh.faces[f].loop_vertices.iter().copied());
    }
    let edge_orders = |e: EdgeId| -> (u8, u8) {
        let [a, b] = mesh.edges[e].v;
        let touches_ep = cls.kinds[a] == VertexKind::Extraordinary
            || cls.kinds[b] == VertexKind::Extraordinary;
        if touches_ep {
            return (1, 1); // spoke
        }
        let on_irregular = mesh.edges[e].faces.iter().any(|&f| cls.face_class[f] == FaceClass::Irregular);
        let at_onering = onering.contains(&a) || onering.contains(&b);
        let analysis = if on_irregular || at_onering { 1 } else { 2 };
        (2, analysis)
    };

    // ---- interfaces inside faces -----------------------------------------
    let mut interfaces = Vec::new();
    for f in 0..nf {
        let (us, vs) = &grids[f];
        if us.is_empty() {
            continue;
        }
        let (nu, nv) = (us.len() - 1, vs.len() - 1);
        let cell = |iu: usize, jv: usize| by_face[f][jv * nu + iu];
        // Interior cut lines: mid-splits of an irregular face promise order
        // 1; extension cuts promise order 2 in both spaces.
        let orders = if cls.face_class[f] == FaceClass::Irregular { (1, 1) } else { (2, 2) };
        for jv in 0..nv {
            for iu in 0..nu {
                if iu + 1 < nu {
                    interfaces.push(Interface {
                        a: SideRef {
                            elem: cell(iu, jv),
                            fixed_axis: Axis::U,
                            fixed_at: 1.0,
                            off: 0.0,
                            slope: 1.0,
                        },
                        b: SideRef {
                            elem: cell(iu + 1, jv),
                            fixed_axis: Axis::U,
                            fixed_at: 0.0,
                            off: 0.0,
                            slope: 1.0,
                        },
                        order_design: orders.0,
                        order_analysis: orders.1,
                    });
                }
                if jv + 1 < nv {
                    interfaces.push(Interface {
                        a: SideRef {
                            elem: cell(iu, jv),
                            fixed_axis: Axis::V,
                            fixed_at: 1.0,
                            off: 0.0,
                            slope: 1.0,
                        },
                        b: SideRef {
                            elem: cell(iu, jv + 1),
                            fixed_axis: Axis::V,
                            fixed_at: 0.0,
                            off: 0.0,
                            slope: 1.0,
                        },
                        order_design: orders.0,
                        order_analysis: orders.1,
                    });
                }
            }
        }
    }

    // ---- interfaces across mesh edges ------------------------------------
    for e in 0..mesh.num_edges() {
        let edge = &mesh.edges[e];
        if edge.span <= 0.0 || edge.faces.len() != 2 {
            continue;
        }
        let (f, g) = (edge.faces[0], edge.faces[1]);
        let pieces_f = element_sides_on_edge(mesh, &frames[f], &elements, &by_face[f], e);
        let pieces_g = element_sides_on_edge(mesh, &frames[g], &elements, &by_face[g], e);
        let (od, oa) = edge_orders(e);
        for (ea, sa) in &pieces_f {
            for (eb, sb) in &pieces_g {
                let lo = if sa.s0 > sb.s0 { sa.s0.clone() } else { sb.s0.clone() };
                let hi = if sa.s1 < sb.s1 { sa.s1.clone() } else { sb.s1.clone() };
                if lo >= hi {
                    continue;
                }
                interfaces.push(Interface {
                    a: sa.side_ref(*ea, &lo, &hi),
                    b: sb.side_ref(*eb, &lo, &hi),
                    order_design: od,
                    order_analysis: oa,
                });
            }
        }
    }

    Ok(ElementalTMesh { elements, by_face, interfaces })
}

/// An element side lying on a mesh edge, described in the edge's own
/// parameter `s ∈ [0,1]` (measured from the edge's canonical first vertex).
struct EdgePiece {
    /// Covered s-range, `s0 < s1`.
    s0: Rat,
    s1: Rat,
    /// Element-local description: fixed parent axis and value.
    fixed_axis: Axis,
    fixed_at: f64,
    /// Parent varying coordinate as an affine map of s: `c0 + c1 * s`.
    c0: Rat,
    c1: Rat,
}

impl EdgePiece {
    /// SideRef for the sub-range `[lo, hi]` of s, parameterized by t ∈ [0,1].
    fn side_ref(&self, elem: usize, lo: &Rat, hi: &Rat) -> SideRef {
        let off = self.c0.clone() + self.c1.clone() * lo.clone();
        let slope = self.c1.clone() * (hi.clone() - lo.clone());
        SideRef {
            elem,
            fixed_axis: self.fixed_axis,
            fixed_at: self.fixed_at,
            off: off.to_f64().unwrap(),
            slope: slope.to_f64().unwrap(),
        }
    }
}

/// All element sides of one face that lie on edge `e`, as [`EdgePiece`]s.
fn element_sides_on_edge(
    mesh: &TMesh,
    frame: &FaceFrame,
    elements: &[Element],
    ids: &[usize],
    e: EdgeId,
) -> Vec<(usize, EdgePiece)> {
    let [a, b] = mesh.edges[e].v;
    let (pa, pb) = (&frame.vpos[&a], &frame.vpos[&b]);
    // The edge is axis-aligned in the frame; find its constant coordinate.
    let horizontal = pa.1 == pb.1;
    let mut out = Vec::new();
    for &id in ids {
        let el = &elements[id];
        // Four candidate sides; an element side lies on the edge when the
        // fixed coordinates agree and the varying ranges overlap.
        if horizontal {
            let (e_lo, e_hi) = ordered(&pa.0, &pb.0);
            for (vside, fixed_at) in [(&el.v.0, 0.0), (&el.v.1, 1.0)] {
                if *vside != pa.1 {
                    continue;
                }
                let lo = if el.u.0 > *e_lo { el.u.0.clone() } else { e_lo.clone() };
                let hi = if el.u.1 < *e_hi { el.u.1.clone() } else { e_hi.clone() };
                if lo >= hi {
                    continue;
                }
                // u(s) = pa.0 + s·(pb.0 − pa.0);  xi = (u − u0)/(u1 − u0).
                let du = pb.0.clone() - pa.0.clone();
                let w = el.u.1.clone() - el.u.0.clone();
                let c0 = (pa.0.clone() - el.u.0.clone()) / w.clone();
                let c1 = du.clone() / w;
                let (s0, s1) = srange(&lo, &hi, &pa.0, &du);
                out.push((
                    id,
                    EdgePiece { s0, s1, fixed_axis: Axis::V, fixed_at, c0, c1 },
                ));
            }
        } else {
            let (e_lo, e_hi) = ordered(&pa.1, &pb.1);
            for (uside, fixed_at) in [(&el.u.0, 0.0), (&el.u.1, 1.0)] {
                if *uside != pa.0 {
                    continue;
                }
                let lo = if el.v.0 > *e_lo { el.v.0.clone() } else { e_lo.clone() };
                let hi = if el.v.1 < *e_hi { el.v.1.clone() } else { e_hi.clone() };
                if lo >= hi {
                    continue;
                }
                let dv = pb.1.clone() - pa.1.clone();
                let h = el.v.1.clone() - el.v.0.clone();
                let c0 = (pa.1.clone() - el.v.0.clone()) / h.clone();
                let c1 = dv.clone() / h;
                let (s0, s1) = srange(&lo, &hi, &pa.1, &dv);
                out.push((
                    id,
                    EdgePiece { s0, s1, fixed_axis: Axis::U, fixed_at, c0, c1 },
                ));
            }
        }
    }
    out
}

fn ordered<'r>(a: &'r Rat, b: &'r Rat) -> (&'r Rat, &'r Rat) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// s-range covering the frame interval `[lo, hi]` on the line `x(s) = x0 + s·dx`.
fn srange(lo: &Rat, hi: &Rat, x0: &Rat, dx: &Rat) -> (Rat, Rat) {
    let sa = (lo.clone() - x0.clone()) / dx.clone();
    let sb = (hi.clone() - x0.clone()) / dx.clone();
    if sa <= sb {
        (sa, sb)
    } else {
        (sb, sa)
    }
}

// ---------------------------------------------------------------------------
// Dyadic refinement
// ---------------------------------------------------------------------------

/// Split every face at its parametric mid-lines (and every side chain at its
/// parametric middle), halving all spans. Faces that are zero-width in a
/// direction are not split in that direction, so the padding ring of a
/// clamped patch refines into a padding ring.
///
/// T-junctions at the parametric middle of their crossbar side become
/// corners of the sub-faces (they *heal*), while each sub-face inherits the
/// neighbours' new mid-side vertices as fresh T-junctions. Refining a
/// T-junction-free mesh is the ordinary dyadic split: every face becomes
/// four (or two / one in the padding), and no T-junction appears.
///
/// Control positions of new vertices are placed by linear interpolation;
/// callers that track an exact design (the convergence benchmarks do)
/// re-derive positions analytically afterwards.
pub fn uniform_refine(mesh: &TMesh) -> Result<MeshInput, MeshError> {
    uniform_refine_traced(mesh).map(|(input, _)| input)
}

/// Where a vertex of the refined mesh comes from, in terms of the coarse
/// mesh. The trace lets callers re-derive refined control positions from an
/// exact coarse design instead of accepting the linear-interpolation
/// placeholders.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexProvenance {
    /// Carried over unchanged; the id is the coarse vertex id.
    Old(VertexId),
    /// Inserted on a coarse edge at the given parametric offset (in span
    /// units) from the edge's canonical first vertex.
    EdgeSplit(EdgeId, Rat),
    /// The parametric centre of a coarse face split in both directions.
    FaceCenter(FaceId),
}

/// [`uniform_refine`], plus one [`VertexProvenance`] entry per refined-mesh
/// vertex, in vertex-id order.
pub fn uniform_refine_traced(
    mesh: &TMesh,
) -> Result<(MeshInput, Vec<VertexProvenance>), MeshError> {
    let nf = mesh.num_faces();
    let mut frames = Vec::with_capacity(nf);
    for f in 0..nf {
        frames.push(face_frame(mesh, f)?);
    }
    let zero = rat(0.0);
    let two = rat(2.0);

    // ---- pass 1: collect edge split positions ----------------------------
    // Positions are measured parametrically from the edge's canonical first
    // vertex, in span units.
    let mut splits: BTreeMap<EdgeId, BTreeSet<Rat>> = BTreeMap::new();
    for (f, frame) in frames.iter().enumerate() {
        for (k, half) in [
            (0usize, frame.su.clone() / two.clone()),
            (1, frame.sv.clone() / two.clone()),
            (2, frame.su.clone() / two.clone()),
            (3, frame.sv.clone() / two.clone()),
        ] {
            if half == zero {
                continue;
            }
            // Walk the side chain to the parametric midpoint.
            let face = &mesh.faces[f];
            let corners = face.corners();
            let mut cur = corners[k];
            let mut acc = zero.clone();
            for &e in &face.sides[k] {
                let w = mesh.edges[e].other(cur);
                let span = rat(mesh.edges[e].span);
                let next = acc.clone() + span.clone();
                if half > acc && half < next {
                    // Strictly inside this edge: split position from the
                    // canonical first vertex of the edge.
                    let along = half.clone() - acc.clone();
                    let from_v0 =
                        if mesh.edges[e].v[0] == cur { along } else { span.clone() - along };
                    splits.entry(e).or_default().insert(from_v0);
                    break;
                }
                if half == next {
                    break; // lands exactly on vertex w
                }
                acc = next;
                cur = w;
            }
        }
    }

    // ---- new vertex numbering --------------------------------------------
    let mut vertices: Vec<[f64; 3]> = mesh.vertices.iter().map(|v| v.pos).collect();
    let mut provenance: Vec<VertexProvenance> =
        (0..vertices.len()).map(VertexProvenance::Old).collect();
    let mut split_ids: BTreeMap<(EdgeId, Rat), VertexId> = BTreeMap::new();
    for (&e, pos_set) in &splits {
        let [a, b] = mesh.edges[e].v;
        let span = rat(mesh.edges[e].span);
        for p in pos_set {
            let t = (p.clone() / span.clone()).to_f64().unwrap();
            let (pa, pb) = (mesh.vertices[a].pos, mesh.vertices[b].pos);
            let pos = [
                pa[0] + t * (pb[0] - pa[0]),
                pa[1] + t * (pb[1] - pa[1]),
                pa[2] + t * (pb[2] - pa[2]),
            ];
            split_ids.insert((e, p.clone()), vertices.len());
            vertices.push(pos);
            provenance.push(VertexProvenance::EdgeSplit(e, p.clone()));
        }
    }

    let mut spans_out: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    let mut record = |a: VertexId, b: VertexId, s: f64| {
        spans_out.insert((a.min(b), a.max(b)), s);
    };

    // Refined chain of face f's side k: (vertex, side-local coordinate),
    // from corner k to corner k+1, with all split vertices inserted.
    let refined_chain = |f: FaceId, k: usize| -> Vec<(VertexId, Rat)> {
        let face = &mesh.faces[f];
        let corners = face.corners();
        let mut cur = corners[k];
        let mut acc = zero.clone();
        let mut chain = vec![(cur, acc.clone())];
        for &e in &face.sides[k] {
            let w = mesh.edges[e].other(cur);
            let span = rat(mesh.edges[e].span);
            let forward = mesh.edges[e].v[0] == cur;
            if let Some(pos_set) = splits.get(&e) {
                let mut inner: Vec<&Rat> = pos_set.iter().collect();
                if !forward {
                    inner.reverse();
                }
                for p in inner {
                    let along = if forward { p.clone() } else { span.clone() - p.clone() };
                    chain.push((split_ids[&(e, p.clone())], acc.clone() + along));
                }
            }
            acc += span;
            cur = w;
            chain.push((cur, acc.clone()));
        }
        chain
    };

    // Record spans of all refined chain pieces once per edge direction; the
    // map keyed by vertex pair dedupes shared sides naturally.
    let mut faces_out: Vec<Vec<VertexId>> = Vec::new();
    for (f, frame) in frames.iter().enumerate() {
        let (hu, hv) = (frame.su.clone() / two.clone(), frame.sv.clone() / two.clone());
        let chains: Vec<Vec<(VertexId, Rat)>> = (0..4).map(|k| refined_chain(f, k)).collect();
        // A bisected edge's pieces are the halved spans; an edge left whole
        // keeps its span. Either way the piece's parametric length is its
        // refined span — the global scale is preserved.
        for chain in &chains {
            for win in chain.windows(2) {
                let ds = (win[1].1.clone() - win[0].1.clone()).to_f64().unwrap();
                record(win[0].0, win[1].0, ds);
            }
        }

        // Portion of a refined chain with local coordinate in (lo, hi),
        // exclusive of endpoints.
        let portion = |k: usize, lo: &Rat, hi: &Rat| -> Vec<VertexId> {
            chains[k]
                .iter()
                .filter(|(_, c)| c > lo && c < hi)
                .map(|&(v, _)| v)
                .collect()
        };
        let vertex_at = |k: usize, c: &Rat| -> VertexId {
            chains[k]
                .iter()
                .find(|(_, cc)| cc == c)
                .unwrap_or_else(|| panic!("no chain vertex at mid of face {f} side {k}"))
                .0
        };
        let corners = mesh.faces[f].corners();
        let (lu, lv) = (frame.su.clone(), frame.sv.clone());

        match (hu > zero, hv > zero) {
            (false, false) => {
                faces_out.push(mesh.faces[f].loop_vertices.clone());
            }
            (true, false) => {
                // Split in u only: the cut runs from mid of side 0 to mid of
                // side 2 (both u-directed sides).
                let m0 = vertex_at(0, &hu);
                let m2 = vertex_at(2, &hu);
                record(m0, m2, hv.to_f64().unwrap());
                let mut left = vec![corners[0]];
                left.extend(portion(0, &zero, &hu));
                left.push(m0);
                left.push(m2);
                left.extend(portion(2, &hu, &lu));
                left.push(corners[3]);
                left.extend(portion(3, &zero, &lv));
                faces_out.push(left);
                let mut right = vec![m0];
                right.extend(portion(0, &hu, &lu));
                right.push(corners[1]);
                right.extend(portion(1, &zero, &lv));
                right.push(corners[2]);
                right.extend(portion(2, &zero, &hu));
                right.push(m2);
                faces_out.push(right);
            }
            (false, true) => {
                let m1 = vertex_at(1, &hv);
                let m3 = vertex_at(3, &hv);
                record(m1, m3, hu.to_f64().unwrap());
                let mut bottom = vec![corners[0]];
                bottom.extend(portion(0, &zero, &lu));
                bottom.push(corners[1]);
                bottom.extend(portion(1, &zero, &hv));
                bottom.push(m1);
                bottom.push(m3);
                bottom.extend(portion(3, &hv, &lv));
                faces_out.push(bottom);
                let mut top = vec![m3, m1];
                top.extend(portion(1, &hv, &lv));
                top.push(corners[2]);
                top.extend(portion(2, &zero, &lu));
                top.push(corners[3]);
                top.extend(portion(3, &zero, &hv));
                faces_out.push(top);
            }
            (true, true) => {
                let m0 = vertex_at(0, &hu);
                let m1 = vertex_at(1, &hv);
                let m2 = vertex_at(2, &hu);
                let m3 = vertex_at(3, &hv);
                let center = vertices.len();
                let avg = |ids: [VertexId; 4], w: usize| -> f64 {
                    ids.iter().map(|&i| vertices[i][w]).sum::<f64>() / 4.0
                };
                vertices.push([
                    avg([m0, m1, m2, m3], 0),
                    avg([m0, m1, m2, m3], 1),
                    avg([m0, m1, m2, m3], 2),
                ]);
                provenance.push(VertexProvenance::FaceCenter(f));
                let (hu_f, hv_f) = (hu.to_f64().unwrap(), hv.to_f64().unwrap());
                record(m0, center, hv_f);
                record(m1, center, hu_f);
                record(m2, center, hv_f);
                record(m3, center, hu_f);

                let mut q00 = vec![corners[0]];
                q00.extend(portion(0, &zero, &hu));
                q00.push(m0);
                q00.push(center);
                q00.push(m3);
                q00.extend(portion(3, &hv, &lv));
                faces_out.push(q00);

                let mut q10 = vec![m0];
                q10.extend(portion(0, &hu, &lu));
                q10.push(corners[1]);
                q10.extend(portion(1, &zero, &hv));
                q10.push(m1);
                q10.push(center);
                faces_out.push(q10);

                let mut q11 = vec![center, m1];
                q11.extend(portion(1, &hv, &lv));
                q11.push(corners[2]);
                q11.extend(portion(2, &zero, &hu));
                q11.push(m2);
                faces_out.push(q11);

                let mut q01 = vec![m3, center, m2];
                q01.extend(portion(2, &hu, &lu));
                q01.push(corners[3]);
                q01.extend(portion(3, &zero, &hv));
                faces_out.push(q01);
            }
        }
    }

    Ok((MeshInput { vertices, faces: faces_out, spans: spans_out }, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build::tests::{cube_input, grid_input, padded_grid_input};
    use crate::mesh::build_tmesh;
    use crate::mesh::classify::classify;
    use crate::mesh::ext::compute_extensions;

    fn pipeline(input: &MeshInput) -> (TMesh, Classification, Extensions, ElementalTMesh) {
        let mesh = build_tmesh(input).unwrap();
        let cls = classify(&mesh);
        validate_knots(&mesh, &cls).unwrap();
        let exts = compute_extensions(&mesh, &cls).unwrap();
        let elems = build_elements(&mesh, &cls, &exts).unwrap();
        (mesh, cls, exts, elems)
    }

    /// Padded grid with the central pair of cells merged (two T-junctions).
    fn merged(m: usize, ci: usize, cj: usize) -> MeshInput {
        let mut input = padded_grid_input(m);
        let n = m + 3;
        let at = |i: usize, j: usize| j * n + i;
        let cells = m + 2;
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
        input
    }

    #[test]
    fn knot_validation_accepts_padded_and_closed_meshes() {
        for input in [padded_grid_input(3), merged(4, 2, 2), cube_input()] {
            let mesh = build_tmesh(&input).unwrap();
            let cls = classify(&mesh);
            validate_knots(&mesh, &cls).unwrap();
        }
    }

    #[test]
    fn knot_validation_rejects_uneven_spokes_and_zero_closed_spans() {
        let mut input = cube_input();
        input.spans.insert((0, 1), 2.0);
        let mesh = build_tmesh(&input).unwrap();
        let cls = classify(&mesh);
        assert!(matches!(validate_knots(&mesh, &cls), Err(MeshError::Knot(_))));

        let mut input = cube_input();
        for f in input.faces.clone() {
            for i in 0..4 {
                let (a, b) = (f[i], f[(i + 1) % 4]);
                input.spans.insert((a.min(b), a.max(b)), 0.0);
            }
        }
        let mesh = build_tmesh(&input).unwrap();
        let cls = classify(&mesh);
        assert!(matches!(validate_knots(&mesh, &cls), Err(MeshError::Knot(_))));
    }

    #[test]
    fn padding_produces_no_elements() {
        let (_, _, _, elems) = pipeline(&padded_grid_input(3));
        assert_eq!(elems.elements.len(), 9);
        // Every element is a unit square.
        for el in &elems.elements {
            assert_eq!(el.extent(), (1.0, 1.0));
        }
        // 12 interior active-to-active edges, no intra-face cuts.
        assert_eq!(elems.interfaces.len(), 12);
        for it in &elems.interfaces {
            assert_eq!((it.order_design, it.order_analysis), (2, 2));
        }
    }

    #[test]
    fn extension_cuts_split_the_crossbar_once() {
        let (_, cls, _, elems) = pipeline(&merged(4, 2, 2));
        // 16 active unit cells worth of area: 14 plain + merged split in two.
        assert_eq!(elems.elements.len(), 16);
        let crossbar = cls.tjunctions[0].crossbar;
        assert_eq!(elems.by_face[crossbar].len(), 2);
        for &id in &elems.by_face[crossbar] {
            assert_eq!(elems.elements[id].extent(), (1.0, 1.0));
        }
        // The cut interface inside the crossbar promises order 2.
        let intra: Vec<_> = elems
            .interfaces
            .iter()
            .filter(|it| {
                elems.elements[it.a.elem].face == crossbar
                    && elems.elements[it.b.elem].face == crossbar
            })
            .collect();
        assert_eq!(intra.len(), 1);
        assert_eq!(intra[0].order_design, 2);
    }

    #[test]
    fn cube_splits_into_24_elements_with_order_one_interfaces() {
        let (_, _, _, elems) = pipeline(&cube_input());
        assert_eq!(elems.elements.len(), 24);
        // 4 mid-split interfaces per face + 2 per cube edge.
        assert_eq!(elems.interfaces.len(), 24 + 24);
        for it in &elems.interfaces {
            assert_eq!((it.order_design, it.order_analysis), (1, 1));
        }
    }

    #[test]
    fn cross_face_interfaces_map_shared_points_consistently() {
        // On the merged mesh, each interface's two sides must land on the
        // same face-frame point when one of them is mapped through the edge.
        let (_mesh, _, _, elems) = pipeline(&merged(4, 2, 2));
        let mut cross = 0;
        for it in &elems.interfaces {
            let (ea, eb) = (&elems.elements[it.a.elem], &elems.elements[it.b.elem]);
            if ea.face == eb.face {
                continue;
            }
            cross += 1;
            for t in [0.0, 0.25, 0.75, 1.0] {
                let (xa, ya) = it.a.at(t);
                let (xb, yb) = it.b.at(t);
                let fa = ea.to_frame(xa, ya);
                let fb = eb.to_frame(xb, yb);
                // Same physical point: compare through world positions of the
                // (identity-like) padded lattice: frames are axis-aligned
                // translates here, so cross-check via the element extents.
                assert!((0.0..=2.0 + 1e-12).contains(&fa.0));
                assert!((0.0..=2.0 + 1e-12).contains(&fb.0));
                assert!(xa == 0.0 || xa == 1.0 || ya == 0.0 || ya == 1.0);
                assert!(xb == 0.0 || xb == 1.0 || yb == 0.0 || yb == 1.0);
            }
        }
        assert!(cross >= 20, "expected many cross-face interfaces, got {cross}");
    }

    #[test]
    fn refining_a_padded_grid_doubles_it() {
        let mesh = build_tmesh(&padded_grid_input(2)).unwrap();
        let refined_input = uniform_refine(&mesh).unwrap();
        let refined = build_tmesh(&refined_input).unwrap();
        let reference = build_tmesh(&padded_grid_input(4)).unwrap();
        assert_eq!(refined.num_vertices(), reference.num_vertices());
        assert_eq!(refined.num_faces(), reference.num_faces());
        assert_eq!(refined.num_edges(), reference.num_edges());
        let cls = classify(&refined);
        assert!(cls.tjunctions.is_empty());
        assert!(cls.eps.is_empty());
        // Spans are halved: the element partition has 16 quarter cells.
        validate_knots(&refined, &cls).unwrap();
        let exts = compute_extensions(&refined, &cls).unwrap();
        let elems = build_elements(&refined, &cls, &exts).unwrap();
        assert_eq!(elems.elements.len(), 16);
        assert_eq!(elems.elements[0].extent(), (0.5, 0.5));
    }

    #[test]
    fn refining_heals_and_spawns_tjunctions() {
        let mesh = build_tmesh(&merged(4, 2, 2)).unwrap();
        let cls = classify(&mesh);
        assert_eq!(cls.tjunctions.len(), 2);
        let refined = build_tmesh(&uniform_refine(&mesh).unwrap()).unwrap();
        let rcls = classify(&refined);
        // The two mid-side junctions heal into corners; the four half-edges
        // of the neighbouring faces spawn four new junctions.
        assert_eq!(rcls.tjunctions.len(), 4);
        validate_knots(&refined, &rcls).unwrap();
        let exts = compute_extensions(&refined, &rcls).unwrap();
        let report = crate::mesh::check_admissibility(&refined, &rcls, &exts);
        assert!(report.admissible(), "violations: {:?}", report.violations);
    }

    #[test]
    fn refining_the_cube_keeps_it_closed_and_admissible() {
        let mesh = build_tmesh(&cube_input()).unwrap();
        let refined = build_tmesh(&uniform_refine(&mesh).unwrap()).unwrap();
        assert!(refined.closed);
        assert_eq!(refined.num_faces(), 24);
        assert_eq!(refined.num_vertices(), 8 + 12 + 6);
        let rcls = classify(&refined);
        assert_eq!(rcls.eps.len(), 8);
        assert!(rcls.tjunctions.is_empty());
        validate_knots(&refined, &rcls).unwrap();
        let exts = compute_extensions(&refined, &rcls).unwrap();
        let elems = build_elements(&refined, &rcls, &exts).unwrap();
        // 24 faces, the 1-ring of each EP split 2×2: all faces touch an EP.
        assert_eq!(elems.elements.len(), 96);
    }

    #[test]
    fn plain_grids_fail_validation() {
        let mesh = build_tmesh(&grid_input(3, 3)).unwrap();
        let cls = classify(&mesh);
        assert!(matches!(validate_knots(&mesh, &cls), Err(MeshError::Knot(_))));
    }

    #[test]
    fn refinement_trace_reconstructs_every_vertex() {
        use num_traits::ToPrimitive;
        let mesh = build_tmesh(&padded_grid_input(4)).unwrap();
        let (refined, trace) = uniform_refine_traced(&mesh).unwrap();
        assert_eq!(trace.len(), refined.vertices.len());
        let both_split = (0..mesh.num_faces())
            .filter(|&f| {
                let frame = face_frame(&mesh, f).unwrap();
                frame.su > rat(0.0) && frame.sv > rat(0.0)
            })
            .count();
        let centers =
            trace.iter().filter(|p| matches!(p, VertexProvenance::FaceCenter(_))).count();
        assert_eq!(centers, both_split);
        for (v, p) in trace.iter().enumerate() {
            let expect = match p {
                VertexProvenance::Old(w) => mesh.vertices[*w].pos,
                VertexProvenance::EdgeSplit(e, offset) => {
                    let [a, b] = mesh.edges[*e].v;
                    let t = (offset / rat(mesh.edges[*e].span)).to_f64().unwrap();
                    let (pa, pb) = (mesh.vertices[a].pos, mesh.vertices[b].pos);
                    [
                        pa[0] + t * (pb[0] - pa[0]),
                        pa[1] + t * (pb[1] - pa[1]),
                        pa[2] + t * (pb[2] - pa[2]),
                    ]
                }
                VertexProvenance::FaceCenter(f) => {
                    // Straight-sided grid cells: the centre is the centroid.
                    let cs = mesh.faces[*f].corners();
                    let mut c = [0.0; 3];
                    for &w in &cs {
                        for (ci, pi) in c.iter_mut().zip(mesh.vertices[w].pos) {
                            *ci += pi / 4.0;
                        }
                    }
                    c
                }
            };
            for w in 0..3 {
                assert!(
                    (refined.vertices[v][w] - expect[w]).abs() < 1e-14,
                    "vertex {v} axis {w}: {:?}",
                    p
                );
            }
        }
    }
}
