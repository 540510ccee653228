use num_traits::{One, Zero};
use proptest::prelude::*;
use rlc_core::matroids::*;
use rlc_core::numeric::big_ratio;
use rlc_core::relbound::CertifyOptions;

fn partition_spec(max_n: usize) -> impl Strategy<Value = PartitionMatroidSpec> {
    prop::collection::vec((1usize..6, 0usize..6), 1..5)
        .prop_filter("ground set too large", move |blocks| {
            blocks.iter().map(|b| b.0).sum::<usize>() <= max_n
        })
        .prop_map(|blocks| {
            let sizes = blocks.iter().map(|b| b.0).collect();
            let caps = blocks.iter().map(|b| b.1.min(b.0)).collect();
            PartitionMatroidSpec::new(sizes, caps).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_profile_matches_enumeration(spec in partition_spec(16)) {
        let sys = spec.enumerate().unwrap();
        sys.verify().unwrap();
        let from_sets = profile_from_set_system(&sys).unwrap();
        let closed = profile_partition(&spec);
        prop_assert_eq!(from_sets.counts(), closed.counts());
        prop_assert!(mason_check(&closed).holds);
    }

    #[test]
    fn uniform_profiles_are_log_concave(n in 1usize..=20, r in 0usize..=20) {
        let prof = profile_uniform(n, r.min(n)).unwrap();
        prop_assert!(mason_check(&prof).holds);
    }

    #[test]
    fn binomial_parameter_matches_ratio(spec in partition_spec(16), m_seed in 0usize..16) {
        let prof = profile_partition(&spec);
        if prof.rank() == 0 {
            return Ok(());
        }
        let m = m_seed % prof.rank();
        let p = matroid_binomial_p(&prof, m).unwrap();
        let n = prof.n() as u64;
        let gamma = rlc_core::exact::ExactDist::binomial(n, &p).unwrap();
        let want = big_ratio(&prof.count(m + 1), &prof.count(m));
        prop_assert_eq!(gamma.mass(m as i64 + 1) / gamma.mass(m as i64), want);
    }

    #[test]
    fn binomial_bounds_dominate_exactly(spec in partition_spec(16), m_seed in 0usize..16, zero in any::<bool>()) {
        let prof = profile_partition(&spec);
        if prof.rank() == 0 {
            return Ok(());
        }
        let m = if zero { m_seed % prof.rank() } else { 1 + m_seed % prof.rank() };
        if m >= prof.rank() {
            return Ok(());
        }
        let (first, second) = matroid_binomial_bounds_exact(&prof, m, zero).unwrap();
        let p = matroid_binomial_p(&prof, m).unwrap();
        let gamma = rlc_core::exact::ExactDist::binomial(prof.n() as u64, &p).unwrap();
        let tv = gamma.tv(&nu_exact(&prof, zero).unwrap());
        prop_assert!(tv <= second && tv <= first.clone().max(num_rational::BigRational::zero()));
        prop_assert!(second < num_rational::BigRational::one());
        let report = matroid_binomial_bound(&prof, m, zero, &CertifyOptions::default()).unwrap();
        prop_assert_eq!(report.dominated, Some(true));
    }
}
