use proptest::prelude::*;
use rlc_core::compound::*;
use rlc_core::dist::{is_log_concave, DiscreteDist};
use rlc_core::relbound::CertifyOptions;

const B: f64 = 1e-14;

/// Normalized masses with non-increasing successive ratios.
fn lc_masses(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..3.0, 0..max_len).prop_map(|mut r| {
        r.sort_by(|a, b| b.total_cmp(a));
        let mut w = vec![1.0];
        for x in r {
            w.push(w.last().unwrap() * x);
        }
        let t: f64 = w.iter().sum();
        w.iter().map(|x| x / t).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn panjer_matches_convolutions(lambda in 0.05f64..6.0, f in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let total: f64 = f.iter().sum();
        prop_assume!(total > 0.1);
        let spec = CompoundPoissonSpec::from_masses(lambda, &f).unwrap();
        let panjer = compound_poisson_pmf(&spec, B).unwrap();
        let direct = compound_poisson_by_convolution(&spec, 40, B).unwrap();
        for (k, d) in direct.iter().enumerate() {
            prop_assert!((panjer.mass(k as i64) - d).abs() < 1e-12, "k = {}", k);
        }
    }

    #[test]
    fn yu_criterion_implies_log_concave(lambda in 0.05f64..8.0, f in lc_masses(6)) {
        let spec = CompoundPoissonSpec::from_masses(lambda, &f).unwrap();
        if yu_check(&spec).unwrap().holds {
            let pmf = compound_poisson_pmf(&spec, B).unwrap();
            prop_assert!(is_log_concave(&pmf).unwrap().holds);
        }
    }

    #[test]
    fn compound_poisson_bound_dominates(lambda in 0.05f64..8.0, f in lc_masses(5)) {
        let spec = CompoundPoissonSpec::from_masses(lambda, &f).unwrap();
        if let Ok(report) = geometric_bound_compound_poisson(&spec, B, &CertifyOptions::default()) {
            prop_assert_eq!(report.dominated, Some(true));
        }
    }

    #[test]
    fn zero_free_count_gives_log_concave_law(count in lc_masses(6), p in 0.02f64..0.98) {
        let count = DiscreteDist::new(1, count).unwrap();
        let spec = CompoundGeometricSpec::new(count, p).unwrap();
        let pmf = compound_geometric_pmf(&spec, B).unwrap();
        prop_assert!(is_log_concave(&pmf).unwrap().holds);
    }

    #[test]
    fn compound_geometric_bound_dominates(count in lc_masses(6), offset in 0i64..2, p in 0.02f64..0.98) {
        let spec = CompoundGeometricSpec::new(DiscreteDist::new(offset, count).unwrap(), p).unwrap();
        if let Ok(report) = geometric_bound_compound_geometric(&spec, B, &CertifyOptions::default()) {
            if report.is_applicable() {
                prop_assert_eq!(report.dominated, Some(true));
            }
        }
    }
}

#[test]
fn yu_converse_spot_check() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (mut failing, mut violating) = (0, 0);
    for _ in 0..400 {
        let lambda = rng.random_range(0.05..4.0);
        let r1: f64 = rng.random_range(0.05..3.0);
        let r2: f64 = rng.random_range(0.05..r1);
        let w = [1.0, r1, r1 * r2];
        let t: f64 = w.iter().sum();
        let spec = CompoundPoissonSpec::from_masses(lambda, &w.map(|x| x / t)).unwrap();
        let f = spec.severity();
        let margin = lambda * f.mass(1).powi(2) - 2.0 * f.mass(2);
        if margin < -1e-6 {
            failing += 1;
            let pmf = compound_poisson_pmf(&spec, B).unwrap();
            if !is_log_concave(&pmf).unwrap().holds {
                violating += 1;
            }
        }
    }
    println!("criterion fails in {failing} specs; {violating} show a concavity violation");
}
