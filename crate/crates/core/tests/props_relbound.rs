use proptest::prelude::*;
use rlc_core::dist::{tv_distance, DiscreteDist};
use rlc_core::relbound::{certify, theorem1_bounds, theorem1_simplified, DOMINANCE_TOLERANCE};
use rlc_core::sweep::{instance_rng, random_dominance_case, SweepCase};

fn pair(seed: u64) -> (DiscreteDist, DiscreteDist, Option<i64>) {
    match random_dominance_case(&mut instance_rng(seed, 0)) {
        SweepCase::Dominance { mu, nu, ell } => (mu, nu, ell),
        _ => unreachable!(),
    }
}

/// `nu = e^{-V} mu` with convex `V` whose slope is exactly zero between `ell` and `ell + 1`.
fn matched_pair(mu_w: Vec<f64>, mags: Vec<f64>, at: usize) -> (DiscreteDist, DiscreteDist, i64) {
    let len = mu_w.len();
    let ell = at % (len - 1);
    let mut down: Vec<f64> = mags[..ell].iter().map(|m| -m).collect();
    down.sort_by(f64::total_cmp);
    let mut up: Vec<f64> = mags[ell..len - 2].to_vec();
    up.sort_by(f64::total_cmp);
    let mut slopes = down;
    slopes.push(0.0);
    slopes.extend(up);
    let mut v = 0.0;
    let nu_w: Vec<f64> = mu_w
        .iter()
        .enumerate()
        .map(|(k, m)| {
            if k > 0 {
                v += slopes[k - 1];
            }
            (-v).exp() * m
        })
        .collect();
    (
        DiscreteDist::new(0, mu_w).unwrap(),
        DiscreteDist::new(0, nu_w).unwrap(),
        ell as i64,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bounds_dominate_tv(seed in any::<u64>()) {
        let (mu, nu, ell) = pair(seed);
        let tv = tv_distance(&mu, &nu).upper;
        match ell {
            Some(l) => {
                let (b_nu, b_mu) = theorem1_bounds(&mu, &nu, l).unwrap();
                prop_assert!(b_nu.min(b_mu) >= tv - DOMINANCE_TOLERANCE, "{b_nu} {b_mu} {tv}");
            }
            None => prop_assert_eq!(certify(&mu, &nu, None).dominated, Some(true)),
        }
    }

    #[test]
    fn matched_anchor_orientation(
        mu_w in prop::collection::vec(0.1f64..4.0, 3..20),
        mags in prop::collection::vec(0.0f64..2.0, 20),
        at in 0usize..100,
    ) {
        let (mu, nu, ell) = matched_pair(mu_w, mags, at);
        let (p, q) = (mu.mass(ell), nu.mass(ell));
        prop_assert!(q >= p * (1.0 - 1e-12));
        let s = theorem1_simplified(&mu, &nu, ell).unwrap();
        prop_assert!((s - (1.0 - p / q).max(0.0)).abs() < 1e-12);
        let tv = tv_distance(&mu, &nu).upper;
        prop_assert!(s >= tv - DOMINANCE_TOLERANCE);
        let (b_nu, b_mu) = theorem1_bounds(&mu, &nu, ell).unwrap();
        prop_assert!(b_nu.min(b_mu) >= tv - DOMINANCE_TOLERANCE);
    }

    #[test]
    fn shift_invariance(seed in any::<u64>(), shift in -50i64..50) {
        let (mu, nu, ell) = pair(seed);
        if let Some(l) = ell {
            let a = theorem1_bounds(&mu, &nu, l).unwrap();
            let b = theorem1_bounds(&mu.shifted(shift), &nu.shifted(shift), l + shift).unwrap();
            prop_assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        }
    }
}
