//! Gauss–Legendre quadrature on the unit interval and unit square.
//!
//! All element integrals in this crate are pulled back to the parent square
//! `[0,1]²`, so the rules here are stated on `[0,1]` directly: an `n`-point
//! rule integrates polynomials of degree `2n−1` exactly, and its weights sum
//! to one (the measure of the interval).
//!
//! Nodes and weights are tabulated for `n = 1..=8`, which comfortably covers
//! bi-cubic stiffness integrands (products of two cubics and metric factors).

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1,1]`,
/// tabulated to full double precision.
fn table(n: usize) -> Vec<(f64, f64)> {
    match n {
        1 => vec![(0.0, 2.0)],
        2 => {
            let x = 0.577_350_269_189_625_7;
            vec![(-x, 1.0), (x, 1.0)]
        }
        3 => {
            let x = 0.774_596_669_241_483_4;
            vec![(-x, 5.0 / 9.0), (0.0, 8.0 / 9.0), (x, 5.0 / 9.0)]
        }
        4 => {
            let (x1, w1) = (0.339_981_043_584_856_26, 0.652_145_154_862_546_1);
            let (x2, w2) = (0.861_136_311_594_052_6, 0.347_854_845_137_453_86);
            vec![(-x2, w2), (-x1, w1), (x1, w1), (x2, w2)]
        }
        5 => {
            let (x1, w1) = (0.538_469_310_105_683_1, 0.478_628_670_499_366_47);
            let (x2, w2) = (0.906_179_845_938_664, 0.236_926_885_056_189_08);
            let w0 = 0.568_888_888_888_888_9;
            vec![(-x2, w2), (-x1, w1), (0.0, w0), (x1, w1), (x2, w2)]
        }
        6 => {
            let (x1, w1) = (0.238_619_186_083_196_9, 0.467_913_934_572_691_05);
            let (x2, w2) = (0.661_209_386_466_264_5, 0.360_761_573_048_138_6);
            let (x3, w3) = (0.932_469_514_203_152, 0.171_324_492_379_170_35);
            vec![(-x3, w3), (-x2, w2), (-x1, w1), (x1, w1), (x2, w2), (x3, w3)]
        }
        7 => {
            let (x1, w1) = (0.405_845_151_377_397_2, 0.381_830_050_505_118_9);
            let (x2, w2) = (0.741_531_185_599_394_4, 0.279_705_391_489_276_67);
            let (x3, w3) = (0.949_107_912_342_758_5, 0.129_484_966_168_869_7);
            let w0 = 0.417_959_183_673_469_4;
            vec![(-x3, w3), (-x2, w2), (-x1, w1), (0.0, w0), (x1, w1), (x2, w2), (x3, w3)]
        }
        8 => {
            let (x1, w1) = (0.183_434_642_495_649_8, 0.362_683_783_378_362);
            let (x2, w2) = (0.525_532_409_916_329, 0.313_706_645_877_887_29);
            let (x3, w3) = (0.796_666_477_413_626_7, 0.222_381_034_453_374_47);
            let (x4, w4) = (0.960_289_856_497_536_2, 0.101_228_536_290_376_26);
            vec![
                (-x4, w4),
                (-x3, w3),
                (-x2, w2),
                (-x1, w1),
                (x1, w1),
                (x2, w2),
                (x3, w3),
                (x4, w4),
            ]
        }
        _ => panic!("Gauss-Legendre rule tabulated only for 1..=8 points, got {n}"),
    }
}

/// `n`-point Gauss–Legendre nodes and weights on `[0,1]`.
///
/// Weights sum to one; the rule is exact for polynomials of degree `2n−1`.
pub fn gauss_01(n: usize) -> Vec<(f64, f64)> {
    table(n)
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

/// Tensor-product quadrature rule on the parent square `[0,1]²`.
#[derive(Debug, Clone)]
pub struct SquareRule {
    /// `(xi, eta, weight)` triples; weights sum to one.
    pub points: Vec<(f64, f64, f64)>,
}

impl SquareRule {
    /// `n×n` Gauss–Legendre rule on the unit square.
    pub fn gauss(n: usize) -> Self {
        let line = gauss_01(n);
        let mut points = Vec::with_capacity(n * n);
        for &(eta, wv) in &line {
            for &(xi, wu) in &line {
                points.push((xi, eta, wu * wv));
            }
        }
        SquareRule { points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn integrate(n: usize, f: impl Fn(f64) -> f64) -> f64 {
        gauss_01(n).into_iter().map(|(x, w)| w * f(x)).sum()
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=8 {
            assert_abs_diff_eq!(integrate(n, |_| 1.0), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn monomials_integrate_exactly_up_to_degree_2n_minus_1() {
        for n in 1..=8 {
            for k in 0..(2 * n) {
                let exact = 1.0 / (k as f64 + 1.0);
                assert_abs_diff_eq!(integrate(n, |x| x.powi(k as i32)), exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn one_point_rule_misses_quadratics() {
        // Negative control: the midpoint rule integrates x² as 1/4, not 1/3.
        let approx_val = integrate(1, |x| x * x);
        assert_abs_diff_eq!(approx_val, 0.25, epsilon = 1e-15);
        assert!((approx_val - 1.0 / 3.0).abs() > 0.08);
    }

    #[test]
    fn square_rule_integrates_bicubics() {
        // ∫∫ ξ³η³ over [0,1]² = 1/16; a 2×2 Gauss rule is already exact.
        for n in 2..=6 {
            let rule = SquareRule::gauss(n);
            let val: f64 = rule.points.iter().map(|&(x, y, w)| w * x.powi(3) * y.powi(3)).sum();
            assert_abs_diff_eq!(val, 1.0 / 16.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn square_rule_weight_sum_and_count() {
        let rule = SquareRule::gauss(4);
        assert_eq!(rule.points.len(), 16);
        let total: f64 = rule.points.iter().map(|p| p.2).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    }
}
