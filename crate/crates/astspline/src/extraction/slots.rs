//! Blended Bézier control slots for faces in the one- and two-ring of
//! extraordinary points.
//!
//! On these faces the 16 Bézier control slots of each face are not read
//! off tensor-product knot vectors; instead every slot is a convex blend
//! of nearby mesh control points:
//!
//! ```text
//!   V───E───E───V        V = corner slot: blend of the four surrounding
//!   │             │          interior slots, weighted by opposite spans
//!   E   I   I   E      E = edge slot: blend of the two interior slots
//!   │             │          facing each other across the edge
//!   E   I   I   E      I = interior slot: bilinear blend of the face's
//!   │             │          four corner control points
//!   V───E───E───V
//! ```
//!
//! The interior-slot weights use the face's own extent and the extents of
//! the faces behind and beyond each corner, which is exactly the
//! B-spline-to-Bézier conversion wherever the mesh is locally a tensor
//! grid — so the blended region joins the marched region seamlessly. Faces
//! of zero extent (the clamping ring of an open mesh) participate like any
//! other face, which reproduces the clamped boundary rules without special
//! cases: a corner padding face's interior slot collapses onto the true
//! corner control point, and an elemental-boundary edge slot collapses
//! onto the padding-side slot.
//!
//! In the analysis space the interior slots of irregular faces are not
//! blends but independent face points ([`InnerStyle::FaceDof`]); all
//! other slots keep their blend form and therefore keep referencing those
//! face points, which extends each face point's influence into the
//! surrounding ring.

use crate::bernstein;
use crate::extraction::{row_axpy, Dof, Row};
use crate::mesh::classify::Classification;
use crate::mesh::ext::FaceFrame;
use crate::mesh::{EdgeId, FaceClass, FaceId, MeshError, TMesh, VertexId, VertexKind};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// A named Bézier control slot of the blended region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    /// The corner slot at a mesh vertex.
    Vertex(VertexId),
    /// The edge slot nearest end `0`/`1` of the edge (ends follow the
    /// edge's canonical vertex order).
    Edge(EdgeId, u8),
    /// The interior slot of a face nearest corner `k`.
    Inner(FaceId, u8),
}

/// How interior slots of irregular faces resolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerStyle {
    /// Blend of the four corner control points (design space).
    Blend,
    /// Independent face-point degrees of freedom (analysis space).
    FaceDof,
}

/// All slot rows needed by the blended faces of a mesh.
#[derive(Debug, Clone)]
pub struct SlotTable {
    pub rows: BTreeMap<Slot, Row>,
}

impl SlotTable {
    /// The 16 rows of one face, in Bernstein slot order (u fastest).
    pub fn face_rows(&self, mesh: &TMesh, f: FaceId) -> Result<[Row; 16], MeshError> {
        let slots = face_slots(mesh, f)?;
        Ok(slots.map(|s| self.rows.get(&s).cloned().unwrap_or_default()))
    }
}

/// The single edge making up side `k` of a blended face. Sides of faces in
/// the blended rings are never chains: a chain vertex would make the face
/// a T-junction crossbar, which admissibility keeps out of these rings.
fn side_edge(mesh: &TMesh, f: FaceId, k: usize) -> Result<EdgeId, MeshError> {
    let side = &mesh.faces[f].sides[k];
    if side.len() != 1 {
        return Err(MeshError::Traversal(format!(
            "face {f} has a subdivided side inside a blended ring"
        )));
    }
    Ok(side[0])
}

/// Map the 16 Bernstein slot positions of face `f` to slot keys.
pub fn face_slots(mesh: &TMesh, f: FaceId) -> Result<[Slot; 16], MeshError> {
    let c = mesh.faces[f].corners();
    let e: [EdgeId; 4] = [
        side_edge(mesh, f, 0)?,
        side_edge(mesh, f, 1)?,
        side_edge(mesh, f, 2)?,
        side_edge(mesh, f, 3)?,
    ];
    let near = |eid: EdgeId, v: VertexId| -> Slot {
        Slot::Edge(eid, if mesh.edges[eid].v[0] == v { 0 } else { 1 })
    };
    let mut out = [Slot::Vertex(0); 16];
    let s = bernstein::slot;
    out[s(0, 0)] = Slot::Vertex(c[0]);
    out[s(3, 0)] = Slot::Vertex(c[1]);
    out[s(3, 3)] = Slot::Vertex(c[2]);
    out[s(0, 3)] = Slot::Vertex(c[3]);
    out[s(1, 0)] = near(e[0], c[0]);
    out[s(2, 0)] = near(e[0], c[1]);
    out[s(3, 1)] = near(e[1], c[1]);
    out[s(3, 2)] = near(e[1], c[2]);
    out[s(2, 3)] = near(e[2], c[2]);
    out[s(1, 3)] = near(e[2], c[3]);
    out[s(0, 1)] = near(e[3], c[0]);
    out[s(0, 2)] = near(e[3], c[3]);
    out[s(1, 1)] = Slot::Inner(f, 0);
    out[s(2, 1)] = Slot::Inner(f, 1);
    out[s(2, 2)] = Slot::Inner(f, 2);
    out[s(1, 2)] = Slot::Inner(f, 3);
    Ok(out)
}

/// Extent of face `f` perpendicular to edge `e` (which lies on one of its
/// sides).
fn perp_extent(mesh: &TMesh, frames: &[FaceFrame], f: FaceId, e: EdgeId) -> Result<f64, MeshError> {
    let k = (0..4)
        .find(|&k| mesh.faces[f].sides[k].contains(&e))
        .ok_or_else(|| MeshError::Traversal(format!("edge {e} not on face {f}")))?;
    let fr = &frames[f];
    let r = if k % 2 == 0 { &fr.sv } else { &fr.su };
    Ok(r.to_f64().unwrap())
}

/// Extent, along the direction crossing side `k` of face `f`, of the face
/// on the other side. The relevant chain edge is the one nearest the
/// corner the querying slot sits at: `at_end` 0 = the side's first corner.
/// A missing neighbour (true mesh boundary) has extent zero.
fn extent_across(
    mesh: &TMesh,
    frames: &[FaceFrame],
    f: FaceId,
    k: usize,
    at_end: u8,
) -> Result<f64, MeshError> {
    let side = &mesh.faces[f].sides[k];
    let e = if at_end == 0 { side[0] } else { *side.last().unwrap() };
    match mesh.face_across(e, f) {
        None => Ok(0.0),
        Some(g) => perp_extent(mesh, frames, g, e),
    }
}

/// Interior slot row: bilinear blend of the face's four corner control
/// points. In the direction along each axis the near corner carries weight
/// `(own + beyond) / (behind + own + beyond)` and the far corner the rest,
/// where `behind`/`beyond` are the neighbouring faces' extents.
fn inner_row(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    style: InnerStyle,
    f: FaceId,
    k: usize,
) -> Result<Row, MeshError> {
    if style == InnerStyle::FaceDof && cls.face_class[f] == FaceClass::Irregular {
        let mut row = Row::new();
        row.insert(Dof::FacePoint(f, k as u8), 1.0);
        return Ok(row);
    }
    let c = mesh.faces[f].corners();
    let fr = &frames[f];
    let (su, sv) = (fr.su.to_f64().unwrap(), fr.sv.to_f64().unwrap());
    // The slot's u axis runs along side k (corner k → k+1), its v axis
    // along side k+3 reversed (corner k → k−1).
    let (own_u, own_v) = if k.is_multiple_of(2) { (su, sv) } else { (sv, su) };
    // Behind the near corner along u: across the perpendicular side
    // through corner k, whose chain end at corner k is end 1 (side k+3
    // runs corner k+3 → corner k).
    let behind_u = extent_across(mesh, frames, f, (k + 3) % 4, 1)?;
    let beyond_u = extent_across(mesh, frames, f, (k + 1) % 4, 0)?;
    let behind_v = extent_across(mesh, frames, f, k, 0)?;
    let beyond_v = extent_across(mesh, frames, f, (k + 2) % 4, 1)?;
    let sum_u = behind_u + own_u + beyond_u;
    let sum_v = behind_v + own_v + beyond_v;
    if sum_u <= 0.0 || sum_v <= 0.0 {
        return Err(MeshError::Traversal(format!(
            "interior slot of face {f} has an empty knot neighbourhood"
        )));
    }
    let (w_near_u, w_near_v) = ((own_u + beyond_u) / sum_u, (own_v + beyond_v) / sum_v);
    let (w_far_u, w_far_v) = (behind_u / sum_u, behind_v / sum_v);
    let mut row = Row::new();
    let mut add = |v: VertexId, w: f64| {
        if w != 0.0 {
            *row.entry(Dof::Vertex(v)).or_insert(0.0) += w;
        }
    };
    add(c[k], w_near_u * w_near_v);
    add(c[(k + 1) % 4], w_far_u * w_near_v);
    add(c[(k + 3) % 4], w_near_u * w_far_v);
    add(c[(k + 2) % 4], w_far_u * w_far_v);
    Ok(row)
}

/// Edge slot row: the two interior slots facing each other across the
/// edge, each weighted by the *other* face's perpendicular extent (the
/// C¹ join condition at the edge).
fn edge_slot_row(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    style: InnerStyle,
    e: EdgeId,
    end: u8,
) -> Result<Row, MeshError> {
    let ed = &mesh.edges[e];
    if ed.faces.len() != 2 {
        return Err(MeshError::Traversal(format!(
            "edge {e} with {} face(s) carries an edge slot",
            ed.faces.len()
        )));
    }
    let x = ed.v[end as usize];
    let mut parts = Vec::with_capacity(2);
    for &f in &ed.faces {
        let k = mesh.faces[f]
            .corners()
            .iter()
            .position(|&c| c == x)
            .ok_or_else(|| {
                MeshError::Traversal(format!(
                    "vertex {x} is not a corner of face {f} beside its edge slot"
                ))
            })?;
        let a = perp_extent(mesh, frames, f, e)?;
        parts.push((f, k, a));
    }
    let total = parts[0].2 + parts[1].2;
    if total <= 0.0 {
        return Err(MeshError::Traversal(format!(
            "edge {e} has zero extent on both sides"
        )));
    }
    let mut row = Row::new();
    for (i, &(f, k, _)) in parts.iter().enumerate() {
        let other_extent = parts[1 - i].2;
        let inner = inner_row(mesh, cls, frames, style, f, k)?;
        row_axpy(&mut row, other_extent / total, &inner);
    }
    Ok(row)
}

/// Vertex slot row. At a valence-4 interior vertex the four surrounding
/// interior slots blend with opposite-span weights (the C¹ condition in
/// both directions); at an extraordinary point they average.
fn vertex_slot_row(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    style: InnerStyle,
    x: VertexId,
) -> Result<Row, MeshError> {
    let star = &mesh.stars[x];
    let corner_in = |f: FaceId| -> Result<usize, MeshError> {
        mesh.faces[f]
            .corners()
            .iter()
            .position(|&c| c == x)
            .ok_or_else(|| {
                MeshError::Traversal(format!("vertex {x} is not a corner of its star face {f}"))
            })
    };
    match cls.kinds[x] {
        VertexKind::Extraordinary => {
            let mu = star.faces.len() as f64;
            let mut row = Row::new();
            for &f in &star.faces {
                let inner = inner_row(mesh, cls, frames, style, f, corner_in(f)?)?;
                row_axpy(&mut row, 1.0 / mu, &inner);
            }
            Ok(row)
        }
        VertexKind::RegularInterior => {
            let n = star.edges.len();
            if n != 4 {
                return Err(MeshError::Traversal(format!(
                    "interior vertex {x} with valence {n} carries a corner slot"
                )));
            }
            let a: Vec<f64> = star.edges.iter().map(|&e| mesh.edges[e].span).collect();
            let mut row = Row::new();
            for j in 0..4 {
                let du = a[j] + a[(j + 2) % 4];
                let dv = a[(j + 1) % 4] + a[(j + 3) % 4];
                if du <= 0.0 || dv <= 0.0 {
                    return Err(MeshError::Traversal(format!(
                        "corner slot at vertex {x} has a zero opposite-span pair"
                    )));
                }
                let w = a[(j + 2) % 4] * a[(j + 3) % 4] / (du * dv);
                if w != 0.0 {
                    let inner =
                        inner_row(mesh, cls, frames, style, star.faces[j], corner_in(star.faces[j])?)?;
                    row_axpy(&mut row, w, &inner);
                }
            }
            Ok(row)
        }
        kind => Err(MeshError::Traversal(format!(
            "vertex {x} of kind {kind:?} carries a corner slot but has no blend rule"
        ))),
    }
}

/// Compute rows for every slot referenced by the blended (irregular and
/// transition) faces of the mesh.
pub fn build_slot_table(
    mesh: &TMesh,
    cls: &Classification,
    frames: &[FaceFrame],
    style: InnerStyle,
) -> Result<SlotTable, MeshError> {
    let mut rows: BTreeMap<Slot, Row> = BTreeMap::new();
    let blended = cls
        .irregular_faces
        .iter()
        .chain(cls.transition_faces.iter())
        .copied();
    for f in blended {
        for slot in face_slots(mesh, f)? {
            if rows.contains_key(&slot) {
                continue;
            }
            let row = match slot {
                Slot::Inner(g, k) => inner_row(mesh, cls, frames, style, g, k as usize)?,
                Slot::Edge(e, end) => edge_slot_row(mesh, cls, frames, style, e, end)?,
                Slot::Vertex(x) => vertex_slot_row(mesh, cls, frames, style, x)?,
            };
            rows.insert(slot, row);
        }
    }
    Ok(SlotTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::knots::all_frames;
    use crate::extraction::row_sum;
    use crate::mesh::build::tests::{cube_input, padded_grid_input};
    use crate::mesh::build_tmesh;
    use crate::mesh::classify::classify;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interior_blends_match_the_tensor_conversion() {
        // On a uniform patch the interior slot weights are the classic
        // (4, 2, 2, 1)/9 and the corner slot collapses to the four-way
        // symmetric blend; compare a full face grid against the clamped
        // tensor oracle.
        let mesh = build_tmesh(&padded_grid_input(4)).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        // Central active face: corners at lattice (3,3)–(4,4).
        let n = 4 + 3;
        let f = (0..mesh.num_faces())
            .find(|&f| {
                let c = mesh.faces[f].corners();
                c[0] == 3 * n + 3 || c.contains(&(3 * n + 3)) && c.contains(&(4 * n + 4))
            })
            .unwrap();
        let slots = face_slots(&mesh, f).unwrap();
        let oracle = crate::oracle::TensorOracle::uniform(4, 1.0);
        let ex = oracle.extraction();
        // Element [2,3]×[2,3] of the active grid.
        let (_, ops) = ex
            .iter()
            .find(|((lo, _), _)| *lo == (2.0, 2.0))
            .unwrap();
        for (pos, slot) in slots.iter().enumerate() {
            let row = match *slot {
                Slot::Inner(g, k) => inner_row(&mesh, &cls, &frames, InnerStyle::Blend, g, k as usize),
                Slot::Edge(e, end) => edge_slot_row(&mesh, &cls, &frames, InnerStyle::Blend, e, end),
                Slot::Vertex(x) => vertex_slot_row(&mesh, &cls, &frames, InnerStyle::Blend, x),
            }
            .unwrap();
            // Oracle coefficient of function (i,j) at this Bernstein slot,
            // possibly with the face's (i,j) orientation differing from
            // the oracle's: face corners are built from the same lattice,
            // so orientation agrees by construction here.
            for (func, c16) in ops {
                let dof = Dof::Vertex(*func);
                let got = row.get(&dof).copied().unwrap_or(0.0);
                assert_abs_diff_eq!(got, c16[pos], epsilon = 1e-13);
            }
            // And nothing outside the oracle's function list.
            let total: f64 = row.values().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn cube_slot_rows_partition_unity() {
        let mesh = build_tmesh(&cube_input()).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        for style in [InnerStyle::Blend, InnerStyle::FaceDof] {
            let table = build_slot_table(&mesh, &cls, &frames, style).unwrap();
            assert!(!table.rows.is_empty());
            for row in table.rows.values() {
                assert_abs_diff_eq!(row_sum(row), 1.0, epsilon = 1e-12);
                for &w in row.values() {
                    assert!(w >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn cube_corner_slot_averages_the_three_sectors() {
        let mesh = build_tmesh(&cube_input()).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        let table = build_slot_table(&mesh, &cls, &frames, InnerStyle::Blend).unwrap();
        // Every cube vertex is a valence-3 extraordinary point with three
        // unit faces around it: the corner slot weights are 4/9 on the
        // vertex itself, 4/27 on each of its three neighbours and 1/27 on
        // each diagonal.
        let row = &table.rows[&Slot::Vertex(0)];
        assert_abs_diff_eq!(row[&Dof::Vertex(0)], 4.0 / 9.0, epsilon = 1e-13);
        let star = &mesh.stars[0];
        for &e in &star.edges {
            let w = row[&Dof::Vertex(mesh.edges[e].other(0))];
            assert_abs_diff_eq!(w, 4.0 / 27.0, epsilon = 1e-13);
        }
        let diag_total: f64 = row
            .iter()
            .filter(|(d, _)| {
                let Dof::Vertex(v) = d else { return false };
                *v != 0 && !star.edges.iter().any(|&e| mesh.edges[e].has(*v))
            })
            .map(|(_, w)| w)
            .sum();
        assert_abs_diff_eq!(diag_total, 3.0 / 27.0, epsilon = 1e-13);
    }

    #[test]
    fn face_dof_style_promotes_irregular_interiors() {
        let mesh = build_tmesh(&cube_input()).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        let table = build_slot_table(&mesh, &cls, &frames, InnerStyle::FaceDof).unwrap();
        let row = &table.rows[&Slot::Inner(0, 2)];
        assert_eq!(row.len(), 1);
        assert_abs_diff_eq!(row[&Dof::FacePoint(0, 2)], 1.0, epsilon = 1e-15);
        // Edge slots still reference the face points, carrying their
        // influence across the seam.
        let some_edge_row = table
            .rows
            .iter()
            .find_map(|(s, r)| matches!(s, Slot::Edge(..)).then_some(r))
            .unwrap();
        assert!(some_edge_row.keys().all(|d| matches!(d, Dof::FacePoint(..))));
    }
}
