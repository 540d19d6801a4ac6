//! Analysis-suitable T-spline (AST-spline) surfaces with multiple extraordinary
//! points per face.
//!
//! This crate builds smooth bi-cubic spline spaces over unstructured quad-dominant
//! T-meshes — meshes that may contain T-junctions and extraordinary points (EPs),
//! including faces whose four corners are all EPs — and turns them into per-element
//! Bézier extraction operators that downstream tools (or the built-in Galerkin
//! solver) can consume.
//!
//! The pipeline:
//!
//! ```text
//!   mesh file ──▶ TMesh ──▶ classification ──▶ admissibility ──▶ elements
//!                                                                  │
//!        design space  S¹_D  (one function per vertex)  ◀──────────┤
//!        analysis space S¹_A (vertex + face-based DOFs) ◀──────────┘
//!                    │
//!                    ├─▶ verification (independence, partition of unity,
//!                    │                 continuity map, nesting)
//!                    ├─▶ Galerkin solver (Poisson / biharmonic benchmarks)
//!                    └─▶ export (extraction files, tessellation, extrusion)
//! ```
//!
//! Both spaces are C¹ at extraordinary points (a D-patch style construction:
//! every face touching an EP is split 2×2 and a circulant smoothing matrix is
//! applied per EP sector) and C² away from them. The analysis space additionally
//! carries four face-based functions per irregular face and uses truncation to
//! keep a non-negative partition of unity.
//!
//! Entry points:
//! - [`mesh::build_tmesh`] / [`io::read_mesh`] — construct and validate a T-mesh.
//! - [`mesh::check_admissibility`] — the four admissibility rules.
//! - [`spaces::build_design_space`] / [`spaces::build_analysis_space`].
//! - [`verify`] — executable structural checks with machine-readable reports.
//! - [`solve::run_convergence`] — manufactured-solution convergence studies.
//! - [`cli`] — the `astspline` command-line tool over all of the above.

pub mod bernstein;
pub mod bspline;
pub mod corpus;
pub mod extraction;
pub mod mesh;
pub mod param;
pub mod quad;
pub mod spaces;
pub mod verify;

pub mod oracle;

/// CLI entry point; returns the process exit code.
///
/// Temporary placeholder while the command-line surface is under construction.
pub fn run() -> i32 {
    eprintln!("astspline: command-line interface not wired up yet");
    2
}
