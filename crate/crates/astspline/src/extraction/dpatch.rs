//! Interior smoothing of irregular faces: midpoint subdivision into a 2×2
//! fan, a circulant redistribution of the coefficients nearest each
//! extraordinary point, and re-derivation of the blend slots the change
//! touches.
//!
//! Each irregular face's 16 control slots are first subdivided into a 7×7
//! lattice of Bézier coefficients (four sub-elements sharing rows/columns
//! 0, 3 and 6):
//!
//! ```text
//!   y=6 ●──●──●──●──●──●──●     sub-element (p,q) covers lattice
//!       │        │        │     x ∈ [3p, 3p+3], y ∈ [3q, 3q+3]
//!   y=3 ●──●──●──●──●──●──●
//!       │ A10 ·  │        │     around an extraordinary corner the
//!   y=1 ●  A6 A7 │        │     three marked coefficients of every
//!   y=0 ●──●──●──●──●──●──●     sector are redistributed together
//!      x=0   ...      x=6
//! ```
//!
//! The redistribution matrix acts on the stacked `(A6, A7, A10)` of all μ
//! sectors at once. Its nine μ×μ blocks are circulant; the generating
//! weights are nonnegative, each row sums to one, and the angle ψ embeds
//! the shear that makes the scheme reproduce a rotation-symmetric limit
//! tangent plane. Afterwards every lattice slot that sits between changed
//! coefficients is recomputed as their average, which restores the C¹
//! joins between sub-elements and across spokes while leaving rows and
//! columns 4–6 untouched — the outer seams keep their original smoothness.

use crate::bernstein;
use crate::extraction::slots::SlotTable;
use crate::extraction::{row_axpy, Row};
use crate::mesh::classify::Classification;
use crate::mesh::{FaceId, MeshError, TMesh, VertexId};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Default shear parameter of the redistribution stencil.
pub const DEFAULT_BETA: f64 = 0.4;

/// The 7×7 coefficient lattice of one subdivided irregular face.
#[derive(Debug, Clone)]
pub struct Lattice {
    /// `rows[x][y]`, `x` along the face's u axis, `y` along v.
    pub rows: Vec<Vec<Row>>,
    /// Coefficients rewritten by the smoothing pass.
    pub changed: [[bool; 7]; 7],
}

impl Lattice {
    /// The 16 rows of sub-element `(p, q)` (u half, v half), in Bernstein
    /// slot order.
    pub fn sub_element(&self, p: usize, q: usize) -> [Row; 16] {
        std::array::from_fn(|s| {
            let (i, j) = (s % 4, s / 4);
            self.rows[3 * p + i][3 * q + j].clone()
        })
    }
}

/// Subdivide the 16 slot rows of each irregular face at its parametric
/// midpoint, producing the coefficient lattices the smoothing acts on.
pub fn split_lattices(
    mesh: &TMesh,
    cls: &Classification,
    table: &SlotTable,
) -> Result<BTreeMap<FaceId, Lattice>, MeshError> {
    let mut out = BTreeMap::new();
    for &f in &cls.irregular_faces {
        let rows16 = table.face_rows(mesh, f)?;
        let mut lat =
            Lattice { rows: vec![vec![Row::new(); 7]; 7], changed: [[false; 7]; 7] };
        // Work per degree of freedom: gather its 16 coefficients, split,
        // scatter into the lattice. Shared lattice lines receive the same
        // value from both sides because subdivision is exact.
        let mut dofs = std::collections::BTreeSet::new();
        for r in &rows16 {
            dofs.extend(r.keys().copied());
        }
        for d in dofs {
            let mut c16 = [0.0f64; 16];
            for (s, r) in rows16.iter().enumerate() {
                c16[s] = r.get(&d).copied().unwrap_or(0.0);
            }
            let halves = bernstein::split_2x2(&c16);
            for (p, col) in halves.iter().enumerate() {
                for (q, half) in col.iter().enumerate() {
                    for (s, &v) in half.iter().enumerate() {
                        let (i, j) = (s % 4, s / 4);
                        if v != 0.0 {
                            let slot = lat.rows[3 * p + i].get_mut(3 * q + j).unwrap();
                            let prev = slot.insert(d, v);
                            if let Some(prev) = prev {
                                debug_assert!(
                                    (prev - v).abs() <= 1e-12,
                                    "subdivision mismatch on a shared lattice line"
                                );
                            }
                        }
                    }
                }
            }
        }
        out.insert(f, lat);
    }
    Ok(out)
}

/// Generating circulant weights of the redistribution stencil for valence
/// `mu` and shear `beta`: `(p5, p6, p8)` with `p2 = p3` constant. Row
/// block 1 mixes the ring with constant weights; blocks 2 and 3 use the
/// lifted angles.
fn stencil_weights(mu: usize, beta: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let phi = 2.0 * PI / mu as f64;
    let psi = -phi / 2.0 + (beta * phi.sin()).atan();
    let m2 = 2.0 * mu as f64;
    let p5: Vec<f64> = (0..mu).map(|m| (1.0 + (m as f64 * phi).cos()) / m2).collect();
    let p6: Vec<f64> =
        (0..mu).map(|m| (1.0 + (2.0 * psi + m as f64 * phi).cos()) / m2).collect();
    let p8: Vec<f64> =
        (0..mu).map(|m| (1.0 + (2.0 * psi - m as f64 * phi).cos()) / m2).collect();
    (p5, p6, p8)
}

/// The lifted angle ψ used by the stencil (exposed for verification).
pub fn stencil_angle(mu: usize, beta: f64) -> f64 {
    let phi = 2.0 * PI / mu as f64;
    -phi / 2.0 + (beta * phi.sin()).atan()
}

/// Dense 3μ×3μ redistribution matrix acting on the stacked sector
/// coefficients `[A6…; A7…; A10…]`.
pub fn smoothing_matrix(mu: usize, beta: f64) -> Vec<Vec<f64>> {
    let (p5, p6, p8) = stencil_weights(mu, beta);
    let n = 3 * mu;
    let mut m = vec![vec![0.0; n]; n];
    let idx = |block: usize, j: usize| block * mu + j;
    let constant = 1.0 / (2.0 * mu as f64);
    for j in 0..mu {
        for k in 0..mu {
            let d = (j + mu - k) % mu;
            // A6' = constant mix of A7 and A10 (the flat-spot row).
            m[idx(0, j)][idx(1, k)] = constant;
            m[idx(0, j)][idx(2, k)] = constant;
            // A7' and A10' rotate the ring through the lifted angles.
            m[idx(1, j)][idx(1, k)] = p5[d];
            m[idx(1, j)][idx(2, k)] = p6[d];
            m[idx(2, j)][idx(1, k)] = p8[d];
            m[idx(2, j)][idx(2, k)] = p5[d];
        }
    }
    m
}

/// Lattice direction along side `k` of a face (corner `k` → corner `k+1`).
const SIDE_DIR: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
/// Lattice coordinates of corner `k`.
const CORNER_POS: [(i32, i32); 4] = [(0, 0), (6, 0), (6, 6), (0, 6)];

/// The `(A6, A7, A10)` lattice positions of the sector of extraordinary
/// point `v` inside face `f`, oriented so A7 lies along `e_u` (the star
/// edge opening the sector) and A10 along `e_v` (the one closing it).
fn sector_positions(
    mesh: &TMesh,
    f: FaceId,
    v: VertexId,
    e_u: crate::mesh::EdgeId,
    e_v: crate::mesh::EdgeId,
) -> Result<[(usize, usize); 3], MeshError> {
    let face = &mesh.faces[f];
    let k = face
        .corners()
        .iter()
        .position(|&c| c == v)
        .ok_or_else(|| MeshError::Traversal(format!("vertex {v} is not a corner of face {f}")))?;
    let own_side = |e| -> Option<(i32, i32)> {
        if face.sides[k] == [e] {
            Some(SIDE_DIR[k])
        } else if face.sides[(k + 3) % 4] == [e] {
            let d = SIDE_DIR[(k + 3) % 4];
            Some((-d.0, -d.1))
        } else {
            None
        }
    };
    let du = own_side(e_u).ok_or_else(|| {
        MeshError::Traversal(format!("sector edge of {v} does not bound face {f} at its corner"))
    })?;
    let dv = own_side(e_v).ok_or_else(|| {
        MeshError::Traversal(format!("sector edge of {v} does not bound face {f} at its corner"))
    })?;
    let c = CORNER_POS[k];
    let pos = |au: i32, av: i32| -> (usize, usize) {
        let x = c.0 + au * du.0 + av * dv.0;
        let y = c.1 + au * du.1 + av * dv.1;
        (x as usize, y as usize)
    };
    Ok([pos(1, 1), pos(2, 1), pos(1, 2)])
}

/// Apply the redistribution stencil around every extraordinary point.
pub fn smooth_extraordinary(
    mesh: &TMesh,
    cls: &Classification,
    lattices: &mut BTreeMap<FaceId, Lattice>,
    beta: f64,
) -> Result<(), MeshError> {
    for &v in &cls.eps {
        let star = &mesh.stars[v];
        if !star.closed {
            return Err(MeshError::Traversal(format!(
                "extraordinary point {v} lies on the boundary"
            )));
        }
        let mu = star.faces.len();
        // Gather the stacked coefficients in star order.
        let mut stacked: Vec<Row> = Vec::with_capacity(3 * mu);
        let mut places: Vec<(FaceId, [(usize, usize); 3])> = Vec::with_capacity(mu);
        for j in 0..mu {
            let f = star.faces[j];
            let e_u = star.edges[j];
            let e_v = star.edges[(j + 1) % star.edges.len()];
            let posn = sector_positions(mesh, f, v, e_u, e_v)?;
            places.push((f, posn));
        }
        for slot in 0..3 {
            for &(f, posn) in &places {
                let lat = lattices.get(&f).ok_or_else(|| {
                    MeshError::Traversal(format!("sector face {f} of {v} has no lattice"))
                })?;
                let (x, y) = posn[slot];
                stacked.push(lat.rows[x][y].clone());
            }
        }
        let m = smoothing_matrix(mu, beta);
        for (r, mrow) in m.iter().enumerate() {
            let mut new = Row::new();
            for (c, &w) in mrow.iter().enumerate() {
                row_axpy(&mut new, w, &stacked[c]);
            }
            let (slot, j) = (r / mu, r % mu);
            let (f, posn) = places[j];
            let (x, y) = posn[slot];
            let lat = lattices.get_mut(&f).unwrap();
            lat.rows[x][y] = new;
            lat.changed[x][y] = true;
        }
    }
    Ok(())
}

/// Flanking interior positions, possibly in neighbouring lattices.
type FlankSet = Vec<(FaceId, usize, usize)>;

/// Lattice point at position `t` along side `s` (from the side's starting
/// corner), `depth` steps into the face.
fn side_lattice(s: usize, t: usize, depth: usize) -> (usize, usize) {
    match s {
        0 => (t, depth),
        1 => (6 - depth, t),
        2 => (6 - t, 6 - depth),
        _ => (depth, 6 - t),
    }
}

/// All flanking interior positions of lattice point `(x, y)` of face `f`,
/// as `(face, x, y)` triples — following shared edges into neighbouring
/// lattices where needed. Interior points have no flanks (`None`).
fn flanks(
    mesh: &TMesh,
    cls: &Classification,
    f: FaceId,
    x: usize,
    y: usize,
) -> Result<Option<FlankSet>, MeshError> {
    let on = |c: usize| c == 0 || c == 3 || c == 6;
    let inner = |c: usize| c == 1 || c == 2 || c == 4 || c == 5;
    if inner(x) && inner(y) {
        return Ok(None);
    }
    // Cross-face lookup: the flank one step beyond side `s` at position
    // `t` along it, inside the neighbouring face's lattice.
    let across = |s: usize, t: usize| -> Result<FlankSet, MeshError> {
        let side = &mesh.faces[f].sides[s];
        debug_assert_eq!(side.len(), 1);
        let e = side[0];
        let g = mesh.face_across(e, f).ok_or_else(|| {
            MeshError::Traversal(format!("irregular face {f} touches the mesh boundary"))
        })?;
        if !cls.irregular_faces.contains(&g) {
            // The neighbour is not subdivided; slots facing it are only
            // recomputed when their in-face flank changed, which cannot
            // happen across a non-spoke side.
            return Err(MeshError::Traversal(format!(
                "blend slot of face {f} needs a lattice for unsplit face {g}"
            )));
        }
        let gs = (0..4)
            .find(|&k| mesh.faces[g].sides[k].contains(&e))
            .expect("shared edge on neighbour");
        // Orient: f's side s starts at corner s; find that vertex on g's
        // side gs to decide whether the parameters run the same way.
        let start_f = mesh.faces[f].corners()[s];
        let start_g = mesh.faces[g].corners()[gs];
        let t_g = if start_f == start_g { t } else { 6 - t };
        let (gx, gy) = side_lattice(gs, t_g, 1);
        Ok(vec![(g, gx, gy)])
    };
    let mut out = Vec::new();
    match (on(x), on(y)) {
        (true, true) => {
            // Vertex-type: the four diagonal neighbours, crossing sides
            // where the point lies on the face boundary. Face corners at
            // extraordinary points are handled by the caller (their flank
            // set is the whole sector ring), and other face corners are
            // never recomputed, so diagonal-face access never arises.
            for (dx, dy) in [(-1i32, -1i32), (1, -1), (-1, 1), (1, 1)] {
                let (fx, fy) = (x as i32 + dx, y as i32 + dy);
                match ((0..7).contains(&fx), (0..7).contains(&fy)) {
                    (true, true) => out.push((f, fx as usize, fy as usize)),
                    (false, true) => {
                        let s = if fx < 0 { 3 } else { 1 };
                        // Position along that side of the in-face y.
                        let t = match s {
                            3 => 6 - fy as usize,
                            _ => fy as usize,
                        };
                        out.extend(across(s, t)?);
                    }
                    (true, false) => {
                        let s = if fy < 0 { 0 } else { 2 };
                        let t = match s {
                            0 => fx as usize,
                            _ => 6 - fx as usize,
                        };
                        out.extend(across(s, t)?);
                    }
                    (false, false) => {
                        return Err(MeshError::Traversal(
                            "diagonal flank across a face corner".into(),
                        ))
                    }
                }
            }
        }
        (true, false) => {
            // Edge-type on a vertical lattice line: flanks left/right.
            match x {
                3 => {
                    out.push((f, 2, y));
                    out.push((f, 4, y));
                }
                0 => {
                    out.push((f, 1, y));
                    out.extend(across(3, 6 - y)?);
                }
                _ => {
                    out.push((f, 5, y));
                    out.extend(across(1, y)?);
                }
            }
        }
        (false, true) => {
            match y {
                3 => {
                    out.push((f, x, 2));
                    out.push((f, x, 4));
                }
                0 => {
                    out.push((f, x, 1));
                    out.extend(across(0, x)?);
                }
                _ => {
                    out.push((f, x, 5));
                    out.extend(across(2, 6 - x)?);
                }
            }
        }
        (false, false) => unreachable!(),
    }
    Ok(Some(out))
}

/// Recompute every blend slot adjacent to a changed coefficient as the
/// average of its flanking interiors; extraordinary corners average their
/// whole sector ring. Writes are symmetric across shared lattice lines.
pub fn rederive_blends(
    mesh: &TMesh,
    cls: &Classification,
    lattices: &mut BTreeMap<FaceId, Lattice>,
) -> Result<(), MeshError> {
    // Extraordinary corner positions, handled globally per point.
    let mut ep_corners: BTreeMap<(FaceId, usize, usize), Row> = BTreeMap::new();
    for &v in &cls.eps {
        let star = &mesh.stars[v];
        let mu = star.faces.len() as f64;
        let mut avg = Row::new();
        let mut spots = Vec::new();
        for j in 0..star.faces.len() {
            let f = star.faces[j];
            let e_u = star.edges[j];
            let e_v = star.edges[(j + 1) % star.edges.len()];
            let posn = sector_positions(mesh, f, v, e_u, e_v)?;
            let lat = &lattices[&f];
            row_axpy(&mut avg, 1.0 / mu, &lat.rows[posn[0].0][posn[0].1]);
            let k = mesh.faces[f].corners().iter().position(|&c| c == v).unwrap();
            let c = CORNER_POS[k];
            spots.push((f, c.0 as usize, c.1 as usize));
        }
        for s in spots {
            ep_corners.insert(s, avg.clone());
        }
    }

    // Snapshot of the changed flags and the changed rows, so averages mix
    // post-smoothing interiors but the pass order stays irrelevant.
    let snapshot: BTreeMap<FaceId, Lattice> = lattices.clone();
    let faces: Vec<FaceId> = lattices.keys().copied().collect();
    for f in faces {
        for x in 0..7 {
            for y in 0..7 {
                if let Some(row) = ep_corners.get(&(f, x, y)) {
                    let lat = lattices.get_mut(&f).unwrap();
                    lat.rows[x][y] = row.clone();
                    lat.changed[x][y] = true;
                    continue;
                }
                let Some(fl) = flanks_if_needed(mesh, cls, &snapshot, f, x, y)? else {
                    continue;
                };
                let mut avg = Row::new();
                let w = 1.0 / fl.len() as f64;
                for (g, gx, gy) in fl {
                    row_axpy(&mut avg, w, &snapshot[&g].rows[gx][gy]);
                }
                let lat = lattices.get_mut(&f).unwrap();
                lat.rows[x][y] = avg;
                lat.changed[x][y] = true;
            }
        }
    }
    Ok(())
}

/// Flanks of `(x, y)` when any in-face flanking interior changed, `None`
/// otherwise (including plain interior positions).
fn flanks_if_needed(
    mesh: &TMesh,
    cls: &Classification,
    lattices: &BTreeMap<FaceId, Lattice>,
    f: FaceId,
    x: usize,
    y: usize,
) -> Result<Option<FlankSet>, MeshError> {
    let inner = |c: usize| (1..=2).contains(&c) || (4..=5).contains(&c);
    let near: Vec<(usize, usize)> = {
        // In-face flanking interiors, before crossing any edges.
        let mut v = Vec::new();
        for dx in [-1i32, 0, 1] {
            for dy in [-1i32, 0, 1] {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x as i32 + dx, y as i32 + dy);
                if (0..7).contains(&nx) && (0..7).contains(&ny) {
                    let (nx, ny) = (nx as usize, ny as usize);
                    if inner(nx) && inner(ny) {
                        // Only true flanks: orthogonal for edge-type,
                        // diagonal for vertex-type.
                        let edge_type = (inner(x) && !inner(y)) || (!inner(x) && inner(y));
                        let diag = dx != 0 && dy != 0;
                        if edge_type != diag {
                            v.push((nx, ny));
                        }
                    }
                }
            }
        }
        v
    };
    if near.is_empty() || !near.iter().any(|&(nx, ny)| lattices[&f].changed[nx][ny]) {
        return Ok(None);
    }
    flanks(mesh, cls, f, x, y)
}

/// Child-from-parent map of the four face points of an irregular face
/// under one dyadic refinement, for the sub-face containing the
/// extraordinary corner. `a` is the uniform spoke span at the point and
/// `b`, `c` the strip extents beyond the far corners in u and v.
pub fn refinement_inner_map(a: f64, b: f64, c: f64) -> [[f64; 4]; 4] {
    let u = [[(a + b) / (2.0 * a + b), a / (2.0 * a + b)], [b / (2.0 * a + b), 2.0 * a / (2.0 * a + b)]];
    let v = [[2.0 * a / (2.0 * a + c), c / (2.0 * a + c)], [a / (2.0 * a + c), (a + c) / (2.0 * a + c)]];
    let mut m = [[0.0; 4]; 4];
    for j in 0..2 {
        for i in 0..2 {
            for jj in 0..2 {
                for ii in 0..2 {
                    m[2 * j + i][2 * jj + ii] = u[i][ii] * v[j][jj];
                }
            }
        }
    }
    m
}

/// Determinant of the refinement map in closed form; the map is
/// invertible for every positive spoke span, which is what makes the
/// face points of the refined space reach the coarse ones.
pub fn refinement_inner_det(a: f64, b: f64, c: f64) -> f64 {
    a.powi(4) / ((2.0 * a + b).powi(2) * (2.0 * a + c).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::knots::all_frames;
    use crate::extraction::row_sum;
    use crate::extraction::slots::{build_slot_table, InnerStyle};
    use crate::mesh::build::tests::cube_input;
    use crate::mesh::build_tmesh;
    use crate::mesh::classify::classify;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stencil_rows_are_convex_and_circulant() {
        for mu in 3..=10 {
            let m = smoothing_matrix(mu, DEFAULT_BETA);
            for row in &m {
                let s: f64 = row.iter().sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
                for &w in row {
                    assert!(w >= -1e-12);
                }
            }
            // Circulant blocks: advancing sector indices together leaves
            // the weight unchanged.
            for bi in 0..3 {
                for bj in 0..3 {
                    for j in 0..mu {
                        for k in 0..mu {
                            let a = m[bi * mu + j][bj * mu + k];
                            let b = m[bi * mu + (j + 1) % mu][bj * mu + (k + 1) % mu];
                            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lifted_angle_matches_the_valence_four_value() {
        assert_abs_diff_eq!(stencil_angle(4, 0.4), -0.404892, epsilon = 1e-6);
    }

    #[test]
    fn subdivision_keeps_midline_blend_relations() {
        // Subdividing any single polynomial leaves interior lattice lines
        // as averages of their flanking interiors — the relation the
        // re-derivation step restores after smoothing.
        let mesh = build_tmesh(&cube_input()).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        let table = build_slot_table(&mesh, &cls, &frames, InnerStyle::Blend).unwrap();
        let lats = split_lattices(&mesh, &cls, &table).unwrap();
        for lat in lats.values() {
            for y in [1, 2, 4, 5] {
                let mid = &lat.rows[3][y];
                let mut avg = Row::new();
                row_axpy(&mut avg, 0.5, &lat.rows[2][y]);
                row_axpy(&mut avg, 0.5, &lat.rows[4][y]);
                for (d, v) in &avg {
                    assert_abs_diff_eq!(mid.get(d).copied().unwrap_or(0.0), *v, epsilon = 1e-12);
                }
            }
            let mut avg = Row::new();
            for (x, y) in [(2, 2), (4, 2), (2, 4), (4, 4)] {
                row_axpy(&mut avg, 0.25, &lat.rows[x][y]);
            }
            for (d, v) in &avg {
                assert_abs_diff_eq!(lat.rows[3][3].get(d).copied().unwrap_or(0.0), *v, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn smoothing_preserves_partition_of_unity_on_the_cube() {
        let mesh = build_tmesh(&cube_input()).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        let table = build_slot_table(&mesh, &cls, &frames, InnerStyle::Blend).unwrap();
        let mut lats = split_lattices(&mesh, &cls, &table).unwrap();
        smooth_extraordinary(&mesh, &cls, &mut lats, DEFAULT_BETA).unwrap();
        rederive_blends(&mesh, &cls, &mut lats).unwrap();
        for lat in lats.values() {
            for col in &lat.rows {
                for row in col {
                    assert_abs_diff_eq!(row_sum(row), 1.0, epsilon = 1e-12);
                    for &w in row.values() {
                        assert!(w >= -1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn flat_spot_forms_at_each_cube_corner() {
        let mesh = build_tmesh(&cube_input()).unwrap();
        let cls = classify(&mesh);
        let frames = all_frames(&mesh).unwrap();
        let table = build_slot_table(&mesh, &cls, &frames, InnerStyle::Blend).unwrap();
        let mut lats = split_lattices(&mesh, &cls, &table).unwrap();
        smooth_extraordinary(&mesh, &cls, &mut lats, DEFAULT_BETA).unwrap();
        rederive_blends(&mesh, &cls, &mut lats).unwrap();
        // After smoothing, all sector coefficients nearest a corner are
        // equal (the stencil's first row block is constant) and the corner
        // slot equals them.
        let v: VertexId = 0;
        let star = &mesh.stars[v];
        let mut first: Option<Row> = None;
        for j in 0..star.faces.len() {
            let f = star.faces[j];
            let e_u = star.edges[j];
            let e_v = star.edges[(j + 1) % star.edges.len()];
            let posn = sector_positions(&mesh, f, v, e_u, e_v).unwrap();
            let a6 = &lats[&f].rows[posn[0].0][posn[0].1];
            match &first {
                None => first = Some(a6.clone()),
                Some(r) => {
                    for (d, w) in r {
                        assert_abs_diff_eq!(a6.get(d).copied().unwrap_or(0.0), *w, epsilon = 1e-12);
                    }
                }
            }
        }
        let k = mesh.faces[star.faces[0]].corners().iter().position(|&c| c == v).unwrap();
        let c = CORNER_POS[k];
        let corner = &lats[&star.faces[0]].rows[c.0 as usize][c.1 as usize];
        for (d, w) in first.as_ref().unwrap() {
            assert_abs_diff_eq!(corner.get(d).copied().unwrap_or(0.0), *w, epsilon = 1e-12);
        }
    }

    #[test]
    fn refinement_map_determinant_matches_closed_form() {
        for (a, b, c) in [(1.0, 1.0, 1.0), (0.5, 1.0, 2.0), (2.0, 0.0, 3.0), (1.5, 0.25, 0.75)] {
            let m = refinement_inner_map(a, b, c);
            for row in &m {
                let s: f64 = row.iter().sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
            // Cofactor expansion determinant.
            let det = det4(&m);
            assert_abs_diff_eq!(det, refinement_inner_det(a, b, c), epsilon = 1e-12);
            assert!(det > 0.0);
        }
    }

    fn det4(m: &[[f64; 4]; 4]) -> f64 {
        let mut d = 0.0;
        for c in 0..4 {
            let mut sub = [[0.0; 3]; 3];
            for (i, row) in m[1..].iter().enumerate() {
                let mut jj = 0;
                for (j, &v) in row.iter().enumerate() {
                    if j != c {
                        sub[i][jj] = v;
                        jj += 1;
                    }
                }
            }
            let s3 = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
                - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
                + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
            d += if c % 2 == 0 { 1.0 } else { -1.0 } * m[0][c] * s3;
        }
        d
    }
}
