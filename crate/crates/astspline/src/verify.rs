//! Executable checks of the structural claims behind the spline spaces.
//!
//! Every theorem the construction relies on has a numeric counterpart
//! here: linear independence of the extracted basis (singular-value
//! spread), partition of unity, the promised smoothness across every
//! element interface, pointwise agreement of a design surface with its
//! transferred analysis representation, agreement with an independently
//! assembled tensor-product space on regular grids, and the algebraic
//! identities of the redistribution stencil. The functions return plain
//! measurement structs; the [`tol`] module holds the thresholds the
//! command-line report and the test suite hold them against.
//!
//! All sampling is driven by a caller-provided seeded generator, so every
//! report is reproducible bit for bit.

use crate::bernstein;
use crate::extraction::dpatch::{smoothing_matrix, stencil_angle};
use crate::extraction::Dof;
use crate::mesh::classify::{Classification, VertexKind};
use crate::mesh::ext::Axis;
use crate::mesh::TMesh;
use crate::oracle::TensorOracle;
use crate::param::{ElementalTMesh, Interface, SideRef};
use crate::spaces::{Space, Transfer};
use rand::Rng;

/// Thresholds the checks are held against, in one place so the report and
/// the test suite cannot drift apart.
pub mod tol {
    /// Smallest accepted `σ_min/σ_max` of a stacked extraction matrix.
    pub const INDEPENDENCE_RATIO: f64 = 1e-8;
    /// Largest accepted `|Σ_d N_d − 1|` at a sample point.
    pub const UNITY_SUM: f64 = 1e-12;
    /// Most negative accepted basis-function value at a sample point.
    pub const UNITY_NEGATIVITY: f64 = -1e-12;
    /// Largest accepted value jump across an interface.
    pub const VALUE_JUMP: f64 = 1e-10;
    /// Largest accepted first-derivative jump across an interface.
    pub const GRADIENT_JUMP: f64 = 1e-10;
    /// Largest accepted second-derivative jump across an order-2 interface.
    pub const SECOND_JUMP: f64 = 1e-8;
    /// Knot-unit radius around an extraordinary corner excluded from the
    /// interface sampling (derivatives are genuinely singular there).
    pub const EP_EXCLUSION: f64 = 1e-3;
    /// Largest accepted deviation between a design surface and its
    /// transferred analysis representation.
    pub const TRANSFER_DEVIATION: f64 = 1e-10;
    /// Largest accepted difference against the tensor-product oracle.
    pub const ORACLE_MATCH: f64 = 1e-12;
    /// Largest accepted defect of a stencil row sum from one.
    pub const STENCIL_ROW_SUM: f64 = 1e-12;
    /// Most negative accepted stencil entry.
    pub const STENCIL_NEGATIVITY: f64 = -1e-12;
    /// The lifted stencil angle at valence four and shear 0.4…
    pub const STENCIL_ANGLE4: f64 = -0.404892;
    /// …and how close the computed angle must come to it.
    pub const STENCIL_ANGLE4_TOL: f64 = 1e-6;
}

// ---------------------------------------------------------------------------
// Linear independence
// ---------------------------------------------------------------------------

/// Extreme singular values of the stacked extraction matrix (16 Bernstein
/// rows per element, one column per degree of freedom).
#[derive(Debug, Clone, Copy)]
pub struct SingularSpread {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rows: usize,
    pub cols: usize,
}

impl SingularSpread {
    /// `σ_min/σ_max`; strictly positive iff the functions are linearly
    /// independent over the element partition.
    pub fn ratio(&self) -> f64 {
        if self.sigma_max == 0.0 {
            0.0
        } else {
            self.sigma_min / self.sigma_max
        }
    }
}

/// Stack every element's 16 Bernstein coefficient rows and measure the
/// singular-value spread of the resulting `(16·elements) × dim` matrix.
pub fn extraction_singular_spread(space: &Space) -> SingularSpread {
    let rows = 16 * space.rows.len();
    let cols = space.dim();
    let mut m = faer::Mat::<f64>::zeros(rows, cols);
    for (ei, er) in space.rows.iter().enumerate() {
        for &(d, ref coefs) in er {
            for (s, &c) in coefs.iter().enumerate() {
                m[(16 * ei + s, d)] = c;
            }
        }
    }
    let sv = m.singular_values().expect("singular values of a finite matrix");
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    SingularSpread { sigma_min, sigma_max, rows, cols }
}

// ---------------------------------------------------------------------------
// Partition of unity
// ---------------------------------------------------------------------------

/// Worst partition-of-unity defect and most negative basis value seen.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnityReport {
    pub samples: usize,
    pub max_sum_defect: f64,
    pub min_entry: f64,
}

/// Sample every element at `per_element` uniform random reference points
/// and record `max |Σ_d N_d − 1|` and `min_d N_d`.
pub fn partition_of_unity(space: &Space, per_element: usize, rng: &mut impl Rng) -> UnityReport {
    let mut report = UnityReport { min_entry: f64::INFINITY, ..Default::default() };
    for ei in 0..space.rows.len() {
        for _ in 0..per_element {
            let (xi, eta) = (rng.gen::<f64>(), rng.gen::<f64>());
            let mut sum = 0.0;
            for &(_, v) in &space.basis_values(ei, xi, eta) {
                sum += v;
                report.min_entry = report.min_entry.min(v);
            }
            report.max_sum_defect = report.max_sum_defect.max((sum - 1.0).abs());
            report.samples += 1;
        }
    }
    if report.samples == 0 {
        report.min_entry = 0.0;
    }
    report
}

// ---------------------------------------------------------------------------
// Continuity across interfaces
// ---------------------------------------------------------------------------

/// Which space's smoothness promise an interface check reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Design,
    Analysis,
}

/// Worst jumps seen across element interfaces, grouped by what the space
/// promises there: value and first derivatives must match wherever the
/// promised order is at least one, second derivatives where it is two.
#[derive(Debug, Clone, Copy, Default)]
pub struct ContinuityReport {
    pub samples: usize,
    pub max_value_jump: f64,
    pub max_gradient_jump: f64,
    pub max_second_jump: f64,
}

/// Value, first and second derivatives of every supported function at an
/// interface point, in interface units: `t` is the shared interface
/// parameter and `n` the knot-unit coordinate across it, oriented from
/// side `a` toward side `b` on both sides.
fn side_samples(
    space: &Space,
    elems: &ElementalTMesh,
    side: &SideRef,
    toward_other_is_outward: bool,
    t: f64,
) -> Vec<(usize, [f64; 6])> {
    let el = &elems.elements[side.elem];
    let (wu, wv) = el.extent();
    let (xi, eta) = side.at(t);
    let sign = if (side.fixed_at == 1.0) == toward_other_is_outward { 1.0 } else { -1.0 };
    space
        .basis_d2(side.elem, xi, eta)
        .into_iter()
        .map(|(d, val, g, h)| {
            // Split the reference derivatives into the varying (tangent)
            // and fixed (cross) directions of this side.
            let (f_t, f_n, f_tt, f_tn, f_nn, w_n) = match side.fixed_axis {
                Axis::U => (g[1], g[0], h[2], h[1], h[0], wu),
                Axis::V => (g[0], g[1], h[0], h[1], h[2], wv),
            };
            (
                d,
                [
                    val,
                    side.slope * f_t,
                    sign * f_n / w_n,
                    side.slope * side.slope * f_tt,
                    side.slope * sign * f_tn / w_n,
                    f_nn / (w_n * w_n),
                ],
            )
        })
        .collect()
}

/// Knot-unit length of the varying direction of a side's element.
fn side_knot_length(elems: &ElementalTMesh, side: &SideRef) -> f64 {
    let (wu, wv) = elems.elements[side.elem].extent();
    let w_var = match side.fixed_axis {
        Axis::U => wv,
        Axis::V => wu,
    };
    side.slope.abs() * w_var
}

/// `t`-radius to trim from an interface end that lands on an extraordinary
/// corner of its face; `0` elsewhere.
fn ep_trim(
    mesh: &TMesh,
    cls: &Classification,
    elems: &ElementalTMesh,
    interface: &Interface,
    t_end: f64,
    radius: f64,
) -> f64 {
    let side = &interface.a;
    let el = &elems.elements[side.elem];
    let (xi, eta) = side.at(t_end);
    let (u, v) = el.to_frame(xi, eta);
    let frame_corner = |x: f64, hi: f64| -> Option<bool> {
        if x.abs() < 1e-12 {
            Some(false)
        } else if (x - hi).abs() < 1e-12 {
            Some(true)
        } else {
            None
        }
    };
    let face = &mesh.faces[el.face];
    let su = frame_extent(mesh, el.face, Axis::U);
    let sv = frame_extent(mesh, el.face, Axis::V);
    let (cu, cv) = match (frame_corner(u, su), frame_corner(v, sv)) {
        (Some(cu), Some(cv)) => (cu, cv),
        _ => return 0.0,
    };
    let k = match (cu, cv) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    };
    let corner = face.corners()[k];
    if cls.kinds[corner] == VertexKind::Extraordinary {
        radius / side_knot_length(elems, side).max(1e-300)
    } else {
        0.0
    }
}

/// Total knot-unit extent of a face's side chains along one axis.
fn frame_extent(mesh: &TMesh, f: crate::mesh::FaceId, axis: Axis) -> f64 {
    let side = match axis {
        Axis::U => 0,
        Axis::V => 1,
    };
    mesh.faces[f].sides[side].iter().map(|&e| mesh.edges[e].span).sum()
}

/// Sample every interface and measure the worst value, first- and
/// second-derivative jumps against the promised smoothness of `kind`.
/// Interface ends that land on an extraordinary corner are trimmed by
/// `ep_exclusion` knot units before sampling.
pub fn continuity(
    mesh: &TMesh,
    cls: &Classification,
    elems: &ElementalTMesh,
    space: &Space,
    kind: SpaceKind,
    ep_exclusion: f64,
) -> ContinuityReport {
    let mut report = ContinuityReport::default();
    for interface in &elems.interfaces {
        let order = match kind {
            SpaceKind::Design => interface.order_design,
            SpaceKind::Analysis => interface.order_analysis,
        };
        let lo = ep_trim(mesh, cls, elems, interface, 0.0, ep_exclusion);
        let hi = 1.0 - ep_trim(mesh, cls, elems, interface, 1.0, ep_exclusion);
        if lo >= hi {
            continue;
        }
        let nt = 9;
        for i in 0..nt {
            let t = lo + (hi - lo) * i as f64 / (nt - 1) as f64;
            let sa = side_samples(space, elems, &interface.a, true, t);
            let sb = side_samples(space, elems, &interface.b, false, t);
            let mut joined: std::collections::BTreeMap<usize, ([f64; 6], [f64; 6])> =
                Default::default();
            for (d, q) in sa {
                joined.entry(d).or_default().0 = q;
            }
            for (d, q) in sb {
                joined.entry(d).or_default().1 = q;
            }
            for (qa, qb) in joined.values() {
                report.max_value_jump = report.max_value_jump.max((qa[0] - qb[0]).abs());
                for w in 1..3 {
                    report.max_gradient_jump =
                        report.max_gradient_jump.max((qa[w] - qb[w]).abs());
                }
                if order >= 2 {
                    for w in 3..6 {
                        report.max_second_jump =
                            report.max_second_jump.max((qa[w] - qb[w]).abs());
                    }
                }
            }
            report.samples += 1;
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Design-to-analysis transfer
// ---------------------------------------------------------------------------

/// Worst pointwise deviation between `Σ z_d φ_d` in the design space and
/// `Σ (Tz)_a ψ_a` in the analysis space, over `per_element` random
/// reference points of every element.
pub fn transfer_deviation(
    design: &Space,
    analysis: &Space,
    transfer: &Transfer,
    values: &[f64],
    per_element: usize,
    rng: &mut impl Rng,
) -> f64 {
    let transferred = transfer.apply(values);
    let mut worst = 0.0f64;
    for ei in 0..design.rows.len() {
        for _ in 0..per_element {
            let (xi, eta) = (rng.gen::<f64>(), rng.gen::<f64>());
            let d = design.eval(ei, values, xi, eta);
            let a = analysis.eval(ei, &transferred, xi, eta);
            worst = worst.max((d - a).abs());
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Tensor-product oracle
// ---------------------------------------------------------------------------

/// Worst disagreements between the extracted space on a clamped regular
/// grid and the independently assembled tensor-product space.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleReport {
    pub max_coef_diff: f64,
    pub max_value_diff: f64,
    pub max_grad_diff: f64,
}

/// Compare the design-space extraction on [`crate::corpus::regular_grid`]
/// (`m` unit cells) against [`TensorOracle::uniform`]: per-element
/// coefficient tables must agree entry by entry (oracle function ids are
/// the padded lattice vertex ids), and values and gradients of every
/// function must agree at `samples` random domain points.
pub fn grid_matches_tensor_oracle(
    m: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<OracleReport, crate::mesh::MeshError> {
    let input = crate::corpus::regular_grid(m);
    let mesh = crate::mesh::build_tmesh(&input)?;
    let cls = crate::mesh::classify::classify(&mesh);
    crate::param::validate_knots(&mesh, &cls)?;
    let exts = crate::mesh::ext::compute_extensions(&mesh, &cls)?;
    let elems = crate::param::build_elements(&mesh, &cls, &exts)?;
    let space = crate::spaces::design_space(&mesh, &cls, &elems, crate::extraction::dpatch::DEFAULT_BETA)?;
    let oracle = TensorOracle::uniform(m, 1.0);

    let mut report = OracleReport::default();

    // ---- extraction tables -------------------------------------------------
    // Oracle elements are row-major over the active cells; the mesh faces
    // are row-major over all cells including the zero-width padding, with
    // exactly one element per active face.
    let n = m + 3;
    let oracle_rows = oracle.extraction();
    for (k, (_, funcs)) in oracle_rows.iter().enumerate() {
        let (a, b) = (k % m, k / m);
        let face = (b + 1) * (n - 1) + (a + 1);
        let eids = &elems.by_face[face];
        assert_eq!(eids.len(), 1, "regular grid faces carry one element");
        let row = &space.rows[eids[0]];
        let mut table: std::collections::BTreeMap<usize, [f64; 16]> = Default::default();
        for &(d, c) in row {
            let Dof::Vertex(v) = space.dofs[d] else {
                panic!("regular grids have vertex dofs only")
            };
            table.insert(v, c);
        }
        assert_eq!(
            table.len(),
            funcs.len(),
            "element {k}: function counts differ from the oracle"
        );
        for &(fid, ref coefs) in funcs {
            let ours = table
                .get(&fid)
                .unwrap_or_else(|| panic!("element {k}: function {fid} missing"));
            for (x, y) in ours.iter().zip(coefs) {
                report.max_coef_diff = report.max_coef_diff.max((x - y).abs());
            }
        }
    }

    // ---- pointwise values and gradients ------------------------------------
    // Dense per-function comparison at random domain points; the element
    // containing the point fixes the reference coordinates.
    let nfun = oracle.num_functions();
    for _ in 0..samples {
        let u = rng.gen::<f64>() * m as f64;
        let v = rng.gen::<f64>() * m as f64;
        let (a, b) = ((u.floor() as usize).min(m - 1), (v.floor() as usize).min(m - 1));
        let face = (b + 1) * (n - 1) + (a + 1);
        let ei = elems.by_face[face][0];
        let (xi, eta) = (u - a as f64, v - b as f64);
        let mut values = vec![0.0; nfun];
        let mut grads = vec![(0.0, 0.0); nfun];
        let bu = bernstein::basis(xi);
        let bv = bernstein::basis(eta);
        let du = bernstein::basis_d1(xi);
        let dv = bernstein::basis_d1(eta);
        for &(d, ref c) in &space.rows[ei] {
            let Dof::Vertex(vid) = space.dofs[d] else { unreachable!() };
            values[vid] = bernstein::dot16(c, &bu, &bv);
            // Unit cells: reference derivatives are knot derivatives.
            grads[vid] = (bernstein::dot16(c, &du, &bv), bernstein::dot16(c, &bu, &dv));
        }
        for (vid, (x, y)) in values.iter().zip(oracle.eval_all(u, v)).enumerate() {
            let _ = vid;
            report.max_value_diff = report.max_value_diff.max((x - y).abs());
        }
        for ((gx, gy), (ox, oy)) in grads.iter().zip(oracle.eval_grad_all(u, v)) {
            report.max_grad_diff = report.max_grad_diff.max((gx - ox).abs().max((gy - oy).abs()));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Redistribution stencil identities
// ---------------------------------------------------------------------------

/// Algebraic health of the redistribution stencil across a valence range.
#[derive(Debug, Clone, Copy)]
pub struct StencilReport {
    pub max_row_sum_defect: f64,
    pub min_entry: f64,
    /// Whether every matrix commutes bit-for-bit with the sector shift.
    pub circulant_exact: bool,
    /// The lifted angle at valence four (a fixed spot check).
    pub angle4: f64,
}

/// Check row sums, entry signs and exact sector-shift symmetry of the
/// redistribution matrix for every valence in `valences`.
pub fn smoothing_stencil_report(
    valences: std::ops::RangeInclusive<usize>,
    beta: f64,
) -> StencilReport {
    let mut report = StencilReport {
        max_row_sum_defect: 0.0,
        min_entry: f64::INFINITY,
        circulant_exact: true,
        angle4: stencil_angle(4, beta),
    };
    for mu in valences {
        let m = smoothing_matrix(mu, beta);
        let nn = 3 * mu;
        for row in &m {
            let sum: f64 = row.iter().sum();
            report.max_row_sum_defect = report.max_row_sum_defect.max((sum - 1.0).abs());
            for &x in row {
                report.min_entry = report.min_entry.min(x);
            }
        }
        // Sector shift: advancing both sector indices by one must permute
        // the matrix onto itself exactly.
        let shift = |i: usize| -> usize {
            let (group, sector) = (i / mu, i % mu);
            group * mu + (sector + 1) % mu
        };
        for i in 0..nn {
            for j in 0..nn {
                if m[shift(i)][shift(j)].to_bits() != m[i][j].to_bits() {
                    report.circulant_exact = false;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::dpatch::DEFAULT_BETA;
    use crate::mesh::build_tmesh;
    use crate::mesh::classify::classify;
    use crate::mesh::ext::compute_extensions;
    use crate::param::{build_elements, validate_knots};
    use crate::spaces::{analysis_space, design_space, transfer_control_points};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spaces_for(
        input: &crate::mesh::MeshInput,
    ) -> (TMesh, Classification, ElementalTMesh, Space, Space) {
        let mesh = build_tmesh(input).unwrap();
        let cls = classify(&mesh);
        validate_knots(&mesh, &cls).unwrap();
        let exts = compute_extensions(&mesh, &cls).unwrap();
        let elems = build_elements(&mesh, &cls, &exts).unwrap();
        let design = design_space(&mesh, &cls, &elems, DEFAULT_BETA).unwrap();
        let analysis = analysis_space(&mesh, &cls, &elems, DEFAULT_BETA).unwrap();
        (mesh, cls, elems, design, analysis)
    }

    #[test]
    fn grid_spaces_are_independent_and_sum_to_one() {
        let (_, _, _, design, analysis) = spaces_for(&crate::corpus::regular_grid(4));
        for space in [&design, &analysis] {
            let spread = extraction_singular_spread(space);
            assert!(spread.ratio() > tol::INDEPENDENCE_RATIO, "{spread:?}");
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let unity = partition_of_unity(space, 40, &mut rng);
            assert!(unity.max_sum_defect <= tol::UNITY_SUM, "{unity:?}");
            assert!(unity.min_entry >= tol::UNITY_NEGATIVITY, "{unity:?}");
        }
    }

    #[test]
    fn disk_spaces_hold_their_smoothness_promises() {
        let (mesh, cls, elems, design, analysis) = spaces_for(&crate::corpus::ep_disk(5, 3));
        let d = continuity(&mesh, &cls, &elems, &design, SpaceKind::Design, tol::EP_EXCLUSION);
        assert!(d.max_value_jump <= tol::VALUE_JUMP, "{d:?}");
        assert!(d.max_gradient_jump <= tol::GRADIENT_JUMP, "{d:?}");
        assert!(d.max_second_jump <= tol::SECOND_JUMP, "{d:?}");
        let a = continuity(&mesh, &cls, &elems, &analysis, SpaceKind::Analysis, tol::EP_EXCLUSION);
        assert!(a.max_value_jump <= tol::VALUE_JUMP, "{a:?}");
        assert!(a.max_gradient_jump <= tol::GRADIENT_JUMP, "{a:?}");
        assert!(a.max_second_jump <= tol::SECOND_JUMP, "{a:?}");
    }

    #[test]
    fn transferred_disk_surfaces_agree_pointwise() {
        let (mesh, cls, _elems, design, analysis) = spaces_for(&crate::corpus::ep_disk(3, 3));
        let transfer = transfer_control_points(&mesh, &cls, &design, &analysis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..design.dim()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let dev = transfer_deviation(&design, &analysis, &transfer, &values, 20, &mut rng);
        assert!(dev <= tol::TRANSFER_DEVIATION, "deviation {dev:.3e}");
    }

    #[test]
    fn regular_grid_matches_the_tensor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = grid_matches_tensor_oracle(5, 60, &mut rng).unwrap();
        assert!(report.max_coef_diff <= tol::ORACLE_MATCH, "{report:?}");
        assert!(report.max_value_diff <= tol::ORACLE_MATCH, "{report:?}");
        assert!(report.max_grad_diff <= tol::ORACLE_MATCH, "{report:?}");
    }

    #[test]
    fn stencils_are_stochastic_and_circulant() {
        let report = smoothing_stencil_report(3..=10, DEFAULT_BETA);
        assert!(report.max_row_sum_defect <= tol::STENCIL_ROW_SUM, "{report:?}");
        assert!(report.min_entry >= tol::STENCIL_NEGATIVITY, "{report:?}");
        assert!(report.circulant_exact);
        assert!((report.angle4 - tol::STENCIL_ANGLE4).abs() <= tol::STENCIL_ANGLE4_TOL);
    }
}
