mod common;

use common::{dist, lc_integers, ulc_sequence};
use num_rational::BigRational;
use proptest::prelude::*;
use rlc_core::dist::{convolve, is_log_concave, tv_distance, DiscreteDist};
use rlc_core::exact::ExactDist;
use rlc_core::logconcave::{certify_log_concave, is_ulc, Window};
use rlc_core::numeric::{ratio, CERT_SLACK};

fn positive_part_sum(a: &DiscreteDist, b: &DiscreteDist) -> f64 {
    let lo = a.offset().min(b.offset());
    let hi = a.end().max(b.end());
    (lo..=hi).map(|k| (a.mass(k) - b.mass(k)).max(0.0)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tv_is_a_metric(a in dist(12), b in dist(12), c in dist(12)) {
        let ab = tv_distance(&a, &b).upper;
        prop_assert!((ab - tv_distance(&b, &a).upper).abs() < 1e-12);
        prop_assert!(tv_distance(&a, &a).upper < 1e-12);
        prop_assert!(ab <= tv_distance(&a, &c).upper + tv_distance(&c, &b).upper + 1e-12);
        if ab < 1e-12 {
            prop_assert!(positive_part_sum(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn positive_and_negative_parts_balance(a in dist(15), b in dist(15)) {
        prop_assert!((positive_part_sum(&a, &b) - positive_part_sum(&b, &a)).abs() < 1e-12);
    }

    #[test]
    fn log_concavity_closed_under_convolution(x in lc_integers(10), y in lc_integers(10)) {
        let (x, y) = (ExactDist::new(0, x).unwrap(), ExactDist::new(0, y).unwrap());
        let z = x.convolve(&y);
        prop_assert!(certify_log_concave(&Window::new(0, z.masses()), 0.0).unwrap().holds);
        prop_assert!(is_log_concave(&convolve(&x.to_f64(), &y.to_f64())).unwrap().holds);
    }

    #[test]
    fn ulc_closed_under_convolution(x in ulc_sequence(9), y in ulc_sequence(9)) {
        let (m, mp) = (x.len() - 1, y.len() - 1);
        prop_assert!(is_ulc(&x, m).unwrap().holds);
        prop_assert!(is_ulc(&y, mp).unwrap().holds);
        let z = ExactDist::new(0, x).unwrap().convolve(&ExactDist::new(0, y).unwrap());
        prop_assert!(is_ulc(z.masses(), m + mp).unwrap().holds);
    }

    #[test]
    fn ulc_iff_binomial_relative(a in prop::collection::vec(1u64..30, 1..10)) {
        let n = a.len() - 1;
        let seq: Vec<BigRational> = a.iter().map(|&x| ratio(x, 1)).collect();
        let ulc = is_ulc(&seq, n).unwrap().holds;
        let nu = ExactDist::new(0, seq).unwrap();
        for p in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
            let mu = ExactDist::binomial(n as u64, &p).unwrap();
            prop_assert_eq!(nu.is_log_concave_relative(&mu).unwrap().holds, ulc);
        }
    }
}

#[test]
fn float_certificate_uses_relative_slack() {
    // geometric masses sit exactly on the boundary
    let g: Vec<f64> = (0..40).map(|k| 0.7f64.powi(k)).collect();
    assert!(certify_log_concave(&Window::new(0, &g), CERT_SLACK).unwrap().holds);
}
