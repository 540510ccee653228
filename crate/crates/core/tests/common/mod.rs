#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rlc_core::dist::DiscreteDist;
use rlc_core::numeric::choose;

pub fn weights(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..5.0, 1..=max_len)
}

pub fn dist(max_len: usize) -> impl Strategy<Value = DiscreteDist> {
    (weights(max_len), -4i64..4).prop_map(|(w, off)| DiscreteDist::new(off, w).unwrap())
}

/// `b_k = prod_{j<k} r_j` with non-increasing integer ratios: log-concave by construction.
pub fn lc_integers(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(1u64..12, 0..max_len).prop_map(|mut r| {
        r.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = vec![BigRational::one()];
        for x in r {
            let next = out.last().unwrap() * BigRational::from_integer(BigInt::from(x));
            out.push(next);
        }
        out
    })
}

/// `C(m, k) b_k` with `b` log-concave, hence ultra log-concave of order `m = len - 1`.
pub fn ulc_sequence(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    lc_integers(max_len).prop_map(|b| {
        let m = (b.len() - 1) as u64;
        b.into_iter()
            .enumerate()
            .map(|(k, x)| x * BigRational::from_integer(BigInt::from(choose(m, k as u64))))
            .collect()
    })
}

pub fn rationals_to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(rlc_core::numeric::rational_to_f64).collect()
}
