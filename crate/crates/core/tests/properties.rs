mod common;

use cfma_core::matrix::cholesky_lower;
use cfma_core::rate::{compute_m, equalizer_oracle};
use cfma_core::{achievable_pair, ChannelPair, CodingChoice, CovariancePair, Matrix};
use common::{log_det_sum, rel_close};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-2.0f64..2.0, rows * cols)
        .prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

fn instance() -> impl Strategy<Value = (ChannelPair, CovariancePair)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(t, r)| {
        (matrix(r, t), matrix(r, t), matrix(t, t), matrix(t, t), 0.1f64..50.0).prop_map(
            move |(h1, h2, a1, a2, p)| {
                let ch = ChannelPair::new(h1, h2).unwrap();
                let scale = |k: Matrix| {
                    let tr = k.trace().max(1e-12);
                    k.scale(0.9 * p / tr).symmetrize()
                };
                let cov = CovariancePair::new(scale(a1.gram()), scale(a2.gram()), p).unwrap();
                (ch, cov)
            },
        )
    })
}

fn coefficients() -> impl Strategy<Value = ([i64; 2], [i64; 2])> {
    ((-3i64..=3, -3i64..=3), (-3i64..=3, -3i64..=3))
        .prop_filter("a nonzero and independent of b", |((a1, a2), (b1, b2))| {
            (*a1, *a2) != (0, 0) && a1 * b2 - a2 * b1 != 0
        })
        .prop_map(|((a1, a2), (b1, b2))| ([a1, a2], [b1, b2]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cholesky_reconstructs(a in (1usize..=4).prop_flat_map(|n| matrix(n, n))) {
        let k = a.gram();
        let b = cholesky_lower(&k).unwrap();
        let back = b.mul(&b.transpose());
        prop_assert!(back.sub(&k).max_abs() <= 1e-9 * (1.0 + k.max_abs()));
        for i in 0..b.rows() {
            for j in i + 1..b.cols() {
                prop_assert_eq!(b[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn det_is_multiplicative(
        (a, b) in (1usize..=4).prop_flat_map(|n| (matrix(n, n), matrix(n, n)))
    ) {
        let lhs = a.mul(&b).det();
        let rhs = a.det() * b.det();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + a.max_abs().powi(8) * b.max_abs().powi(8)));
    }

    #[test]
    fn m_dominates_scaled_identity((ch, cov) in instance(), (a, b) in coefficients(), b1 in 0.1f64..3.0, b2 in 0.1f64..3.0) {
        let choice = CodingChoice::new(a, b, [b1, b2]).unwrap();
        let m = compute_m(&ch, &cov, &choice).unwrap();
        let at = choice.a_tilde();
        let floor = at[0] * at[0] + at[1] * at[1];
        let shifted = m.add_identity(-floor * (1.0 - 1e-12));
        prop_assert!(cholesky_lower(&shifted).is_ok());
    }

    #[test]
    fn swapping_users_swaps_rates((ch, cov) in instance(), (a, b) in coefficients(), b1 in 0.1f64..3.0, b2 in 0.1f64..3.0) {
        let choice = CodingChoice::new(a, b, [b1, b2]).unwrap();
        let p = achievable_pair(&ch, &cov, &choice).unwrap();
        let q = achievable_pair(&ch.swapped(), &cov.swapped(), &choice.swapped()).unwrap();
        prop_assert!(rel_close(p.r1, q.r2, 1e-9) && rel_close(p.r2, q.r1, 1e-9));
        prop_assert_eq!(p.valid, q.valid);
    }

    #[test]
    fn common_beta_scaling_is_invisible((ch, cov) in instance(), (a, b) in coefficients(), b1 in 0.1f64..3.0, b2 in 0.1f64..3.0, c in 0.1f64..10.0) {
        let p = achievable_pair(&ch, &cov, &CodingChoice::new(a, b, [b1, b2]).unwrap()).unwrap();
        let q = achievable_pair(&ch, &cov, &CodingChoice::new(a, b, [c * b1, c * b2]).unwrap()).unwrap();
        for (x, y) in [(p.r1_first, q.r1_first), (p.r2_first, q.r2_first), (p.r1_second, q.r1_second), (p.r2_second, q.r2_second)] {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn unit_determinant_pair_sums_to_capacity_terms((ch, cov) in instance(), gamma in 0.01f64..100.0) {
        // r_1(b|a) + r_2(a) = C_sum for a = (1,1), b = (1,0), whatever gamma is
        let p = achievable_pair(&ch, &cov, &CodingChoice::sum_capacity(gamma).unwrap()).unwrap();
        let c_sum = log_det_sum(&ch, cov.k1(), cov.k2());
        prop_assert!((p.r1_second + p.r2_first - c_sum).abs() <= 1e-9 * (1.0 + c_sum));
    }

    #[test]
    fn equalizer_oracle_agrees((ch, cov) in instance(), (a, b) in coefficients(), b1 in 0.2f64..3.0, b2 in 0.2f64..3.0) {
        let choice = CodingChoice::new(a, b, [b1, b2]).unwrap();
        let rep = equalizer_oracle(&ch, &cov, &choice).unwrap();
        prop_assert!(rel_close(rep.sigma1_det, rep.sigma1_det_predicted, 1e-7));
        prop_assert!(rel_close(rep.sigma2_det, rep.sigma2_det_predicted, 1e-7));
    }
}
