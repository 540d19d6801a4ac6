//! Independent tensor-product B-spline reference implementation.
//!
//! A deliberately separate code path for bi-cubic splines on a regular clamped
//! grid: basis values come from per-function de Boor recursion, extraction
//! operators from univariate knot insertion, and stiffness entries from direct
//! quadrature of de Boor-evaluated gradients. None of it touches the T-mesh
//! pipeline, so agreement between the two on a regular grid validates the
//! pipeline end to end (and disagreement localizes bugs).
//!
//! Function indices are lattice-ordered with the `u` index fastest:
//! `a = j·nu + i` for column `i`, row `j` — the same ordering the regular-grid
//! mesh generator uses for vertex ids, so operators are comparable entry by
//! entry without a permutation.

use crate::bspline::GlobalKnots;
use crate::quad::SquareRule;

/// One extracted tensor element: its `((u0, v0), (u1, v1))` rectangle and the
/// active functions with their 16 Bernstein coefficients.
pub type ExtractedElement2d = (((f64, f64), (f64, f64)), Vec<(usize, [f64; 16])>);

/// Bi-cubic clamped tensor-product space on `[0, m·h]²` with `m` elements per
/// direction.
#[derive(Debug, Clone)]
pub struct TensorOracle {
    pub ku: GlobalKnots,
    pub kv: GlobalKnots,
}

impl TensorOracle {
    /// Uniform `m×m` grid with element width `h`.
    pub fn uniform(m: usize, h: f64) -> Self {
        TensorOracle {
            ku: GlobalKnots::uniform_clamped(m, h),
            kv: GlobalKnots::uniform_clamped(m, h),
        }
    }

    /// Functions per direction `(nu, nv)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.ku.num_functions(), self.kv.num_functions())
    }

    /// Total number of functions.
    pub fn num_functions(&self) -> usize {
        let (nu, nv) = self.dims();
        nu * nv
    }

    /// Greville lattice point of function `(i, j)` — the control positions
    /// that make the spline surface reproduce the identity map.
    pub fn greville(&self, i: usize, j: usize) -> (f64, f64) {
        (self.ku.function(i).greville(), self.kv.function(j).greville())
    }

    /// Values of all functions at `(u, v)`, dense, lattice-ordered.
    pub fn eval_all(&self, u: f64, v: f64) -> Vec<f64> {
        let bu = self.ku.eval_all(u);
        let bv = self.kv.eval_all(v);
        let mut out = Vec::with_capacity(bu.len() * bv.len());
        for &bj in &bv {
            for &bi in &bu {
                out.push(bi * bj);
            }
        }
        out
    }

    /// Parametric gradients `(∂u, ∂v)` of all functions at `(u, v)`.
    pub fn eval_grad_all(&self, u: f64, v: f64) -> Vec<(f64, f64)> {
        let (nu, nv) = self.dims();
        let bu: Vec<f64> = self.ku.eval_all(u);
        let bv: Vec<f64> = self.kv.eval_all(v);
        let du: Vec<f64> = (0..nu).map(|i| self.ku.function(i).eval_d1(u)).collect();
        let dv: Vec<f64> = (0..nv).map(|j| self.kv.function(j).eval_d1(v)).collect();
        let mut out = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                out.push((du[i] * bv[j], bu[i] * dv[j]));
            }
        }
        out
    }

    /// Element rectangles `((u0,v0),(u1,v1))` in row-major order (`u` fastest).
    pub fn elements(&self) -> Vec<((f64, f64), (f64, f64))> {
        let bu = self.ku.breakpoints();
        let bv = self.kv.breakpoints();
        let mut out = Vec::new();
        for jv in bv.windows(2) {
            for ju in bu.windows(2) {
                out.push(((ju[0], jv[0]), (ju[1], jv[1])));
            }
        }
        out
    }

    /// Per-element extraction: for each element, the list of
    /// `(function id, 16 Bernstein coefficients)` with the slot ordering of
    /// [`crate::bernstein`] (u fastest).
    pub fn extraction(&self) -> Vec<ExtractedElement2d> {
        let (nu, _) = self.dims();
        let ex_u = self.ku.extraction_by_insertion();
        let ex_v = self.kv.extraction_by_insertion();
        let mut out = Vec::new();
        for ((v0, v1), rows_v) in &ex_v {
            for ((u0, u1), rows_u) in &ex_u {
                let mut ops = Vec::new();
                for (j, rv) in rows_v.iter().enumerate() {
                    if rv.iter().all(|&c| c == 0.0) {
                        continue;
                    }
                    for (i, ru) in rows_u.iter().enumerate() {
                        if ru.iter().all(|&c| c == 0.0) {
                            continue;
                        }
                        let mut c16 = [0.0; 16];
                        for q in 0..4 {
                            for p in 0..4 {
                                c16[4 * q + p] = ru[p] * rv[q];
                            }
                        }
                        ops.push((j * nu + i, c16));
                    }
                }
                out.push((((*u0, *v0), (*u1, *v1)), ops));
            }
        }
        out
    }

    /// Dense Poisson stiffness `K_ab = ∫ ∇N_a·∇N_b` over the identity-mapped
    /// domain, assembled from de Boor gradients at `n×n` Gauss points per
    /// element.
    pub fn poisson_stiffness(&self, n: usize) -> Vec<Vec<f64>> {
        let nf = self.num_functions();
        let mut k = vec![vec![0.0; nf]; nf];
        let rule = SquareRule::gauss(n);
        for ((u0, v0), (u1, v1)) in self.elements() {
            let (wu, wv) = (u1 - u0, v1 - v0);
            for &(xi, eta, w) in &rule.points {
                let (u, v) = (u0 + wu * xi, v0 + wv * eta);
                let grads = self.eval_grad_all(u, v);
                let scale = w * wu * wv;
                // Only a 4×4 window of functions is nonzero; skip zero rows.
                let active: Vec<(usize, (f64, f64))> = grads
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| g.0 != 0.0 || g.1 != 0.0)
                    .map(|(a, g)| (a, *g))
                    .collect();
                for &(a, ga) in &active {
                    for &(b, gb) in &active {
                        k[a][b] += scale * (ga.0 * gb.0 + ga.1 * gb.1);
                    }
                }
            }
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein;
    use approx::assert_abs_diff_eq;

    #[test]
    fn partition_of_unity_on_the_square() {
        let o = TensorOracle::uniform(4, 0.5);
        for i in 0..=8 {
            for j in 0..=8 {
                let (u, v) = (2.0 * i as f64 / 8.0, 2.0 * j as f64 / 8.0);
                let s: f64 = o.eval_all(u, v).iter().sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn greville_controls_reproduce_the_identity_map() {
        let o = TensorOracle::uniform(3, 1.0);
        let (nu, nv) = o.dims();
        for t in 0..=9 {
            let (u, v) = (3.0 * t as f64 / 9.0, 3.0 - 3.0 * t as f64 / 9.0);
            let basis = o.eval_all(u, v);
            let (mut x, mut y) = (0.0, 0.0);
            for j in 0..nv {
                for i in 0..nu {
                    let (gx, gy) = o.greville(i, j);
                    x += basis[j * nu + i] * gx;
                    y += basis[j * nu + i] * gy;
                }
            }
            assert_abs_diff_eq!(x, u, epsilon = 1e-12);
            assert_abs_diff_eq!(y, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn extraction_agrees_with_de_boor_pointwise() {
        let o = TensorOracle::uniform(3, 1.0);
        for (((u0, v0), (u1, v1)), ops) in o.extraction() {
            for (si, sj) in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
                let (u, v) = (u0 + (u1 - u0) * si, v0 + (v1 - v0) * sj);
                let direct = o.eval_all(u, v);
                let mut via = vec![0.0; direct.len()];
                for (a, c16) in &ops {
                    via[*a] = bernstein::eval16(c16, si, sj);
                }
                for a in 0..direct.len() {
                    assert_abs_diff_eq!(via[a], direct[a], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn each_element_has_sixteen_active_functions() {
        let o = TensorOracle::uniform(4, 1.0);
        for ((_, _), ops) in o.extraction() {
            assert_eq!(ops.len(), 16);
        }
    }

    #[test]
    fn stiffness_is_symmetric_with_constant_nullspace() {
        let o = TensorOracle::uniform(2, 1.0);
        let k = o.poisson_stiffness(4);
        let n = k.len();
        for (a, ka) in k.iter().enumerate() {
            // Row sums vanish: constants are in the kernel of the Neumann matrix.
            let row: f64 = ka.iter().sum();
            assert_abs_diff_eq!(row, 0.0, epsilon = 1e-10);
            for (b, kab) in ka.iter().enumerate().take(n) {
                assert_abs_diff_eq!(*kab, k[b][a], epsilon = 1e-12);
            }
        }
    }
}
