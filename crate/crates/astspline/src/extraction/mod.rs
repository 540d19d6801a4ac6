//! Bézier extraction: per-element coefficient rows for every degree of
//! freedom of the spline space.
//!
//! Three routes produce the rows, by face class:
//!
//! * **Regular faces** — each non-extraordinary vertex anchors a tensor
//!   B-spline whose local knot vectors are marched off the mesh
//!   ([`knots`]); its restriction to an element is a 16-coefficient
//!   Bernstein row.
//! * **Transition faces** — the 16 Bézier control slots of the face are
//!   blended from neighbouring control points with partition-of-unity
//!   weights ([`slots`]).
//! * **Irregular faces** — the slot grid is first subdivided into a 2×2
//!   fan and the coefficients nearest each extraordinary point are
//!   redistributed by a smoothing stencil that restores tangent-plane
//!   continuity there ([`dpatch`]).

pub mod dpatch;
pub mod knots;
pub mod slots;

use crate::bernstein;
use crate::mesh::classify::{Classification, FaceClass, VertexKind};
use crate::mesh::{FaceId, MeshError, TMesh, VertexId};
use crate::param::ElementalTMesh;
use knots::{all_frames, anchor_knots, place_support};
use num_traits::ToPrimitive;
use slots::{build_slot_table, InnerStyle};
use std::collections::BTreeMap;

/// A degree of freedom of the spline space.
///
/// Every non-extraordinary and extraordinary vertex carries a control
/// point. In the analysis space the four interior slots of each irregular
/// face are additionally promoted to independent face points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dof {
    Vertex(VertexId),
    /// `FacePoint(f, k)` is the interior slot nearest corner `k` of `f`.
    FacePoint(FaceId, u8),
}

/// A sparse linear combination of degrees of freedom.
pub type Row = BTreeMap<Dof, f64>;

/// Scale a row in place.
pub fn row_scale(row: &mut Row, s: f64) {
    for v in row.values_mut() {
        *v *= s;
    }
}

/// `into += s · from`.
pub fn row_axpy(into: &mut Row, s: f64, from: &Row) {
    if s == 0.0 {
        return;
    }
    for (&d, &v) in from {
        *into.entry(d).or_insert(0.0) += s * v;
    }
}

/// Sum of the coefficients (1 for rows that reproduce constants).
pub fn row_sum(row: &Row) -> f64 {
    row.values().sum()
}

/// Bézier extraction of a spline space over an element partition: for
/// each element, the degrees of freedom supported there and their 16
/// Bernstein coefficients (slot order of [`bernstein`]).
#[derive(Debug, Clone)]
pub struct Extraction {
    pub rows: Vec<Vec<(Dof, [f64; 16])>>,
}

impl Extraction {
    /// Every degree of freedom referenced by some element, in order.
    pub fn dofs(&self) -> Vec<Dof> {
        let mut set = std::collections::BTreeSet::new();
        for er in &self.rows {
            set.extend(er.iter().map(|&(d, _)| d));
        }
        set.into_iter().collect()
    }
}

/// Compute the extraction of the design space ([`InnerStyle::Blend`]) or
/// the analysis pre-space ([`InnerStyle::FaceDof`]) over the element
/// partition of an admissible mesh.
pub fn extract(
    mesh: &TMesh,
    cls: &Classification,
    elems: &ElementalTMesh,
    style: InnerStyle,
    beta: f64,
) -> Result<Extraction, MeshError> {
    let frames = all_frames(mesh)?;
    let mut rows: Vec<BTreeMap<Dof, [f64; 16]>> = vec![BTreeMap::new(); elems.elements.len()];

    // ---- regular faces: anchored tensor functions ----------------------
    // Each non-extraordinary vertex anchors a B-spline; its restriction
    // to every element of a regular face in its support is one row.
    // Vertices whose whole fan is irregular generate nothing in the
    // face-point style: their influence is taken over by the face points.
    let fan_all_irregular = |v: VertexId| {
        let st = &mesh.stars[v];
        !st.faces.is_empty()
            && st.faces.iter().all(|&f| cls.face_class[f] == FaceClass::Irregular)
    };
    for v in 0..mesh.num_vertices() {
        if cls.kinds[v] == VertexKind::Extraordinary {
            continue;
        }
        if style == InnerStyle::FaceDof && fan_all_irregular(v) {
            continue;
        }
        let anchor = anchor_knots(mesh, cls, &frames, v)?;
        let support = place_support(mesh, cls, &frames, &anchor)?;
        let (ku0, ku4) = (anchor.knots_u.0[0], anchor.knots_u.0[4]);
        let (kv0, kv4) = (anchor.knots_v.0[0], anchor.knots_v.0[4]);
        for (&f, pl) in &support {
            if cls.face_class[f] != FaceClass::Regular {
                continue;
            }
            for &ei in &elems.by_face[f] {
                let el = &elems.elements[ei];
                let ((a0, a1), (b0, b1)) = pl.rect((&el.u.0, &el.u.1), (&el.v.0, &el.v.1));
                let (a0, a1) = (a0.to_f64().unwrap(), a1.to_f64().unwrap());
                let (b0, b1) = (b0.to_f64().unwrap(), b1.to_f64().unwrap());
                // The function vanishes on elements outside its open
                // support window; element interiors never straddle it.
                let (ca, cb) = (0.5 * (a0 + a1), 0.5 * (b0 + b1));
                if ca <= ku0 || ca >= ku4 || cb <= kv0 || cb >= kv4 {
                    continue;
                }
                let mut qu = anchor.knots_u.bernstein_on(a0, a1);
                let mut qv = anchor.knots_v.bernstein_on(b0, b1);
                let (fa_u, rev_u) = pl.axis_source(0);
                let (_, rev_v) = pl.axis_source(1);
                if rev_u {
                    qu.reverse();
                }
                if rev_v {
                    qv.reverse();
                }
                let c16 = if fa_u == 0 {
                    bernstein::tensor16(&qu, &qv)
                } else {
                    bernstein::tensor16(&qv, &qu)
                };
                rows[ei].insert(Dof::Vertex(v), c16);
            }
        }
    }

    // ---- transition faces: blended control slots -----------------------
    let table = build_slot_table(mesh, cls, &frames, style)?;
    for f in 0..mesh.num_faces() {
        if cls.face_class[f] != FaceClass::Transition || elems.by_face[f].is_empty() {
            continue;
        }
        if elems.by_face[f].len() != 1 {
            return Err(MeshError::Traversal(format!(
                "transition face {f} is cut by a junction extension"
            )));
        }
        let ei = elems.by_face[f][0];
        let r16 = table.face_rows(mesh, f)?;
        for (s, row) in r16.iter().enumerate() {
            for (&d, &w) in row {
                if w != 0.0 {
                    rows[ei].entry(d).or_insert([0.0; 16])[s] = w;
                }
            }
        }
    }

    // ---- irregular faces: subdivided and smoothed lattices -------------
    let mut lats = dpatch::split_lattices(mesh, cls, &table)?;
    dpatch::smooth_extraordinary(mesh, cls, &mut lats, beta)?;
    dpatch::rederive_blends(mesh, cls, &mut lats)?;
    for (&f, lat) in &lats {
        debug_assert_eq!(elems.by_face[f].len(), 4, "irregular faces split into a 2x2 fan");
        for q in 0..2 {
            for p in 0..2 {
                let ei = elems.by_face[f][2 * q + p];
                let sub = lat.sub_element(p, q);
                for (s, row) in sub.iter().enumerate() {
                    for (&d, &w) in row {
                        if w != 0.0 {
                            rows[ei].entry(d).or_insert([0.0; 16])[s] = w;
                        }
                    }
                }
            }
        }
    }

    Ok(Extraction { rows: rows.into_iter().map(|m| m.into_iter().collect()).collect() })
}
