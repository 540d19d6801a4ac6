//! Assembled spline spaces: global degree-of-freedom indexing over an
//! extraction, point evaluation with derivatives, and the control-point
//! transfer that embeds the design space into the analysis space.
//!
//! The **design space** has one function per vertex (extraordinary
//! points included — their influence enters through the blended slots).
//! The **analysis space** replaces the four interior slots of every
//! irregular face by independent face points and drops the functions
//! that lose their meaning there: extraordinary points and vertices
//! whose whole fan is irregular. Its dimension is therefore
//!
//! ```text
//!   dim = #vertices − #extraordinary − #fan-irregular + 4·#irregular-faces
//! ```
//!
//! Any design surface can be written in the analysis space by evaluating
//! the blended interior slots once and handing the results to the face
//! points ([`transfer_control_points`]); the two surfaces then agree
//! exactly, which is what makes the pair nested.

use crate::bernstein;
use crate::extraction::knots::all_frames;
use crate::extraction::slots::{build_slot_table, InnerStyle, Slot};
use crate::extraction::{extract, Dof, Extraction};
use crate::mesh::classify::{Classification, FaceClass, VertexKind};
use crate::mesh::{MeshError, TMesh};
use crate::param::ElementalTMesh;
use std::collections::BTreeMap;

/// A spline space over an element partition, with dense global indices.
#[derive(Debug, Clone)]
pub struct Space {
    /// Global order of the degrees of freedom.
    pub dofs: Vec<Dof>,
    /// Inverse of [`Space::dofs`].
    pub index: BTreeMap<Dof, usize>,
    /// Per element: the functions supported there and their Bernstein
    /// coefficients, indexed into [`Space::dofs`].
    pub rows: Vec<Vec<(usize, [f64; 16])>>,
}

impl Space {
    pub fn from_extraction(ex: &Extraction) -> Self {
        let dofs = ex.dofs();
        let index: BTreeMap<Dof, usize> =
            dofs.iter().copied().enumerate().map(|(i, d)| (d, i)).collect();
        let rows = ex
            .rows
            .iter()
            .map(|er| er.iter().map(|&(d, c)| (index[&d], c)).collect())
            .collect();
        Space { dofs, index, rows }
    }

    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    /// Value of `Σ z_d φ_d` at reference point `(xi, eta) ∈ [0,1]²` of
    /// element `ei`.
    pub fn eval(&self, ei: usize, z: &[f64], xi: f64, eta: f64) -> f64 {
        let bu = bernstein::basis(xi);
        let bv = bernstein::basis(eta);
        self.rows[ei]
            .iter()
            .map(|&(d, ref c)| z[d] * bernstein::dot16(c, &bu, &bv))
            .sum()
    }

    /// Per-function values at a reference point of element `ei`.
    pub fn basis_values(&self, ei: usize, xi: f64, eta: f64) -> Vec<(usize, f64)> {
        let bu = bernstein::basis(xi);
        let bv = bernstein::basis(eta);
        self.rows[ei]
            .iter()
            .map(|&(d, ref c)| (d, bernstein::dot16(c, &bu, &bv)))
            .collect()
    }

    /// Per-function value, gradient and second derivatives with respect
    /// to the reference coordinates of element `ei`:
    /// `(dof, value, [∂ξ, ∂η], [∂ξξ, ∂ξη, ∂ηη])`.
    pub fn basis_d2(&self, ei: usize, xi: f64, eta: f64) -> Vec<(usize, f64, [f64; 2], [f64; 3])> {
        let bu = bernstein::basis(xi);
        let bv = bernstein::basis(eta);
        let du = bernstein::basis_d1(xi);
        let dv = bernstein::basis_d1(eta);
        let d2u = bernstein::basis_d2(xi);
        let d2v = bernstein::basis_d2(eta);
        self.rows[ei]
            .iter()
            .map(|&(d, ref c)| {
                (
                    d,
                    bernstein::dot16(c, &bu, &bv),
                    [bernstein::dot16(c, &du, &bv), bernstein::dot16(c, &bu, &dv)],
                    [
                        bernstein::dot16(c, &d2u, &bv),
                        bernstein::dot16(c, &du, &dv),
                        bernstein::dot16(c, &bu, &d2v),
                    ],
                )
            })
            .collect()
    }
}

/// The design space: one blended function per vertex.
pub fn design_space(
    mesh: &TMesh,
    cls: &Classification,
    elems: &ElementalTMesh,
    beta: f64,
) -> Result<Space, MeshError> {
    Ok(Space::from_extraction(&extract(mesh, cls, elems, InnerStyle::Blend, beta)?))
}

/// The analysis space: vertex functions away from extraordinary points
/// plus four face points per irregular face.
pub fn analysis_space(
    mesh: &TMesh,
    cls: &Classification,
    elems: &ElementalTMesh,
    beta: f64,
) -> Result<Space, MeshError> {
    Ok(Space::from_extraction(&extract(mesh, cls, elems, InnerStyle::FaceDof, beta)?))
}

/// The dimension the analysis space must have, counted off the mesh.
pub fn analysis_dim_formula(mesh: &TMesh, cls: &Classification) -> usize {
    let n = mesh.num_vertices();
    let n_ep = cls.eps.len();
    let n_fan = (0..mesh.num_vertices())
        .filter(|&v| {
            cls.kinds[v] != VertexKind::Extraordinary && {
                let st = &mesh.stars[v];
                !st.faces.is_empty()
                    && st.faces.iter().all(|&f| cls.face_class[f] == FaceClass::Irregular)
            }
        })
        .count();
    n - n_ep - n_fan + 4 * cls.irregular_faces.len()
}

/// Sparse map from design control values to analysis control values.
#[derive(Debug, Clone)]
pub struct Transfer {
    /// Per analysis degree of freedom: design weights.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl Transfer {
    pub fn apply(&self, design_values: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(d, w)| w * design_values[d]).sum())
            .collect()
    }
}

/// Express a design control net in the analysis space: vertex values
/// carry over, and each face point receives the blended interior slot it
/// replaced, evaluated on the design net. The resulting surfaces agree
/// pointwise.
pub fn transfer_control_points(
    mesh: &TMesh,
    cls: &Classification,
    design: &Space,
    analysis: &Space,
) -> Result<Transfer, MeshError> {
    let frames = all_frames(mesh)?;
    let blend = build_slot_table(mesh, cls, &frames, InnerStyle::Blend)?;
    let mut rows = Vec::with_capacity(analysis.dofs.len());
    for &d in &analysis.dofs {
        match d {
            Dof::Vertex(v) => {
                let di = *design.index.get(&Dof::Vertex(v)).ok_or_else(|| {
                    MeshError::Traversal(format!("vertex {v} missing from the design space"))
                })?;
                rows.push(vec![(di, 1.0)]);
            }
            Dof::FacePoint(f, k) => {
                let row = blend.rows.get(&Slot::Inner(f, k)).ok_or_else(|| {
                    MeshError::Traversal(format!("no blended interior slot {k} for face {f}"))
                })?;
                let mut out = Vec::with_capacity(row.len());
                for (&dd, &w) in row {
                    let di = *design.index.get(&dd).ok_or_else(|| {
                        MeshError::Traversal(
                            "blended slot references a dof outside the design space".into(),
                        )
                    })?;
                    out.push((di, w));
                }
                rows.push(out);
            }
        }
    }
    Ok(Transfer { rows })
}
