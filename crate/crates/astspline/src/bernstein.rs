//! Cubic Bernstein polynomials on the unit interval and their bi-cubic tensor
//! form on the unit square.
//!
//! Every element in this crate carries its polynomial as 16 Bézier coefficients
//! over the parent square `[0,1]²`. Coefficient slots are numbered with the
//! `u` index running fastest:
//!
//! ```text
//!        v
//!        ▲
//!   12 13 14 15
//!    8  9 10 11
//!    4  5  6  7
//!    0  1  2  3  ──▶ u
//! ```
//!
//! so slot `s = 4·v + u` for `u, v ∈ {0,1,2,3}`. The four *inner* slots are
//! `5, 6, 9, 10`; the rest lie on element edges and corners.
//!
//! The module also provides the exact subdivision (de Casteljau) matrices that
//! split a cubic at the parameter midpoint. For a coefficient row `c` (a row
//! vector), the left and right halves are `c·S1` and `c·S2`; both matrices have
//! exact dyadic entries, so splitting is bit-reproducible.

/// Cubic Bernstein basis values `[B₀(t), B₁(t), B₂(t), B₃(t)]` at `t`.
#[inline]
pub fn basis(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t]
}

/// First derivatives of the cubic Bernstein basis at `t`.
#[inline]
pub fn basis_d1(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [
        -3.0 * s * s,
        3.0 * s * s - 6.0 * s * t,
        6.0 * s * t - 3.0 * t * t,
        3.0 * t * t,
    ]
}

/// Second derivatives of the cubic Bernstein basis at `t`.
#[inline]
pub fn basis_d2(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [
        6.0 * s,
        -12.0 * s + 6.0 * t,
        6.0 * s - 12.0 * t,
        6.0 * t,
    ]
}

/// Third derivatives of the cubic Bernstein basis (constant in `t`).
#[inline]
pub fn basis_d3() -> [f64; 4] {
    [-6.0, 18.0, -18.0, 6.0]
}

/// Flattened tensor slot index for Bernstein indices `(u, v)`.
#[inline]
pub fn slot(u: usize, v: usize) -> usize {
    debug_assert!(u < 4 && v < 4);
    4 * v + u
}

/// Outer product of two univariate coefficient quadruples into a 16-slot row.
#[inline]
pub fn tensor16(bu: &[f64; 4], bv: &[f64; 4]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for v in 0..4 {
        for u in 0..4 {
            out[slot(u, v)] = bu[u] * bv[v];
        }
    }
    out
}

/// Evaluate a 16-slot coefficient row at `(xi, eta)` in the parent square.
#[inline]
pub fn eval16(c: &[f64; 16], xi: f64, eta: f64) -> f64 {
    dot16(c, &basis(xi), &basis(eta))
}

/// Contract a coefficient row against arbitrary univariate basis rows.
///
/// Passing derivative rows (e.g. [`basis_d1`]) yields parametric derivatives of
/// the element polynomial with respect to parent coordinates.
#[inline]
pub fn dot16(c: &[f64; 16], bu: &[f64; 4], bv: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for (v, &bw) in bv.iter().enumerate() {
        if bw == 0.0 {
            continue;
        }
        let row = 4 * v;
        acc += bw * (c[row] * bu[0] + c[row + 1] * bu[1] + c[row + 2] * bu[2] + c[row + 3] * bu[3]);
    }
    acc
}

/// Midpoint subdivision matrix for the left half: row-vector convention
/// `c_left = c · S1`, exact dyadic entries.
pub const S1: [[f64; 4]; 4] = [
    [1.0, 0.5, 0.25, 0.125],
    [0.0, 0.5, 0.5, 0.375],
    [0.0, 0.0, 0.25, 0.375],
    [0.0, 0.0, 0.0, 0.125],
];

/// Midpoint subdivision matrix for the right half: `c_right = c · S2`.
pub const S2: [[f64; 4]; 4] = [
    [0.125, 0.0, 0.0, 0.0],
    [0.375, 0.25, 0.0, 0.0],
    [0.375, 0.5, 0.5, 0.0],
    [0.125, 0.25, 0.5, 1.0],
];

/// Split a univariate cubic coefficient row at the midpoint.
///
/// Returns `(left, right)` coefficient rows on the two half intervals.
#[inline]
pub fn split_1d(c: &[f64; 4]) -> ([f64; 4], [f64; 4]) {
    let mut l = [0.0; 4];
    let mut r = [0.0; 4];
    for k in 0..4 {
        for i in 0..4 {
            l[k] += c[i] * S1[i][k];
            r[k] += c[i] * S2[i][k];
        }
    }
    (l, r)
}

/// Split a 16-slot coefficient row into the four midpoint quadrants.
///
/// `out[p][q]` is the quadrant with `u`-half `p` and `v`-half `q`
/// (`0` = lower half `[0,½]`, `1` = upper half `[½,1]`), each expressed over
/// its own parent square. Equivalent to applying [`split_1d`] in `u` and then
/// in `v`.
pub fn split_2x2(c: &[f64; 16]) -> [[[f64; 16]; 2]; 2] {
    // Split every v-row of 4 coefficients in u, then every u-column in v.
    let su: [&[[f64; 4]; 4]; 2] = [&S1, &S2];
    let mut out = [[[0.0; 16]; 2]; 2];
    for (p, sp) in su.iter().enumerate() {
        for (q, sq) in su.iter().enumerate() {
            for vn in 0..4 {
                for un in 0..4 {
                    let mut acc = 0.0;
                    for v in 0..4 {
                        for u in 0..4 {
                            acc += c[slot(u, v)] * sp[u][un] * sq[v][vn];
                        }
                    }
                    out[p][q][slot(un, vn)] = acc;
                }
            }
        }
    }
    out
}
