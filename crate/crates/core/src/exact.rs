//! Exact rational distributions for oracles and certificates on small windows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dist::{DiscreteDist, TvInterval};
use crate::error::{invalid, Result};
use crate::logconcave::{self, LogConcavityCertificate, Window};
use crate::numeric::{choose, rational_to_f64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDist {
    offset: i64,
    masses: Vec<BigRational>,
}

impl ExactDist {
    /// Normalized copy of non-negative rational weights.
    pub fn new(offset: i64, masses: Vec<BigRational>) -> Result<Self> {
        if masses.is_empty() {
            return Err(invalid("empty mass sequence"));
        }
        if masses.iter().any(|m| m.is_negative()) {
            return Err(invalid("negative mass"));
        }
        let total = masses.iter().fold(BigRational::zero(), |acc, m| acc + m);
        if total.is_zero() {
            return Err(invalid("all masses are zero"));
        }
        let masses = masses.into_iter().map(|m| m / &total).collect();
        Ok(Self { offset, masses })
    }

    pub fn point_mass(at: i64) -> Self {
        Self {
            offset: at,
            masses: vec![BigRational::one()],
        }
    }

    pub fn bernoulli(p: &BigRational) -> Result<Self> {
        Self::binomial(1, p)
    }

    pub fn binomial(n: u64, p: &BigRational) -> Result<Self> {
        if p.is_negative() || p > &BigRational::one() {
            return Err(invalid("binomial p outside [0, 1]"));
        }
        let q = BigRational::one() - p;
        let masses = (0..=n)
            .map(|k| {
                BigRational::from_integer(BigInt::from(choose(n, k)))
                    * num_traits::pow(p.clone(), k as usize)
                    * num_traits::pow(q.clone(), (n - k) as usize)
            })
            .collect();
        Ok(Self { offset: 0, masses })
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    pub fn end(&self) -> i64 {
        self.offset + self.masses.len() as i64 - 1
    }

    pub fn mass(&self, k: i64) -> BigRational {
        self.window().get(k)
    }

    pub fn window(&self) -> Window<'_, BigRational> {
        Window::new(self.offset, &self.masses)
    }

    pub fn convolve(&self, other: &ExactDist) -> ExactDist {
        let len = self.masses.len() + other.masses.len() - 1;
        let mut out = vec![BigRational::zero(); len];
        for (i, a) in self.masses.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.masses.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ExactDist {
            offset: self.offset + other.offset,
            masses: out,
        }
    }

    /// Exact `sum_k (nu_k - mu_k)_+` with `self` as `mu`.
    pub fn tv(&self, nu: &ExactDist) -> BigRational {
        let lo = self.offset.min(nu.offset);
        let hi = self.end().max(nu.end());
        (lo..=hi).fold(BigRational::zero(), |acc, k| {
            let d = nu.mass(k) - self.mass(k);
            if d.is_positive() {
                acc + d
            } else {
                acc
            }
        })
    }

    pub fn tv_interval(&self, nu: &ExactDist) -> TvInterval {
        TvInterval::exact(rational_to_f64(&self.tv(nu)))
    }

    pub fn to_f64(&self) -> DiscreteDist {
        let masses: Vec<f64> = self.masses.iter().map(rational_to_f64).collect();
        DiscreteDist::new(self.offset, masses).expect("exact distribution has positive mass")
    }

    /// Is `self` log-concave relative to `mu`, in exact arithmetic?
    pub fn is_log_concave_relative(&self, mu: &ExactDist) -> Result<LogConcavityCertificate> {
        logconcave::certify_relative(&self.window(), &mu.window(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    #[test]
    fn convolution_of_bernoullis_is_binomial() {
        let p = ratio(1, 3);
        let b = ExactDist::bernoulli(&p).unwrap();
        assert_eq!(b.convolve(&b).convolve(&b), ExactDist::binomial(3, &p).unwrap());
    }

    #[test]
    fn exact_tv() {
        let a = ExactDist::bernoulli(&ratio(1, 2)).unwrap();
        let b = ExactDist::bernoulli(&ratio(1, 4)).unwrap();
        assert_eq!(a.tv(&b), ratio(1, 4));
        assert_eq!(b.tv(&a), ratio(1, 4));
        assert!(a.tv(&a).is_zero());
    }

    #[test]
    fn normalization_and_errors() {
        let d = ExactDist::new(0, vec![ratio(2, 1), ratio(6, 1)]).unwrap();
        assert_eq!(d.masses(), &[ratio(1, 4), ratio(3, 4)]);
        assert!(ExactDist::new(0, vec![BigRational::zero()]).is_err());
        assert!(ExactDist::new(0, vec![-ratio(1, 2)]).is_err());
    }
}
