//! Certification of log-concavity hypotheses.
//!
//! All checks run on consecutive triples of the support interval and are
//! written in curvature form: `nu` is log-concave relative to `mu` iff
//! `q[k-1] q[k+1] / q[k]^2 <= p[k-1] p[k+1] / p[k]^2` at every interior `k`.
//! Outside the support the log-density is `-inf`, so boundary triples hold
//! vacuously and are not tested.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{Weight, CERT_SLACK};

/// Outcome of a log-concavity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogConcavityCertificate {
    pub holds: bool,
    pub first_violation: Option<i64>,
    pub support_is_interval: bool,
}

impl LogConcavityCertificate {
    pub fn ok() -> Self {
        Self {
            holds: true,
            first_violation: None,
            support_is_interval: true,
        }
    }

    fn gap(at: i64) -> Self {
        Self {
            holds: false,
            first_violation: Some(at),
            support_is_interval: false,
        }
    }

    fn violation(at: i64) -> Self {
        Self {
            holds: false,
            first_violation: Some(at),
            support_is_interval: true,
        }
    }
}

/// A mass sequence placed on the integers starting at `offset`.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a, T> {
    pub offset: i64,
    pub masses: &'a [T],
}

impl<'a, T: Weight> Window<'a, T> {
    pub fn new(offset: i64, masses: &'a [T]) -> Self {
        Self { offset, masses }
    }

    pub fn get(&self, k: i64) -> T {
        let idx = k - self.offset;
        if idx < 0 || idx as usize >= self.masses.len() {
            T::zero()
        } else {
            self.masses[idx as usize].clone()
        }
    }

    /// First and last index carrying positive mass.
    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        let first = self.masses.iter().position(|m| m.is_positive_weight())?;
        let last = self.masses.iter().rposition(|m| m.is_positive_weight())?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    /// First index inside the support hull with zero mass, if any.
    pub fn first_gap(&self) -> Option<i64> {
        let (lo, hi) = self.support_bounds()?;
        (lo..=hi).find(|&k| !self.get(k).is_positive_weight())
    }

    fn check_non_negative(&self) -> Result<()> {
        match self.masses.iter().position(|m| m.is_negative_weight()) {
            Some(i) => Err(invalid(format!("negative mass at k = {}", self.offset + i as i64))),
            None => Ok(()),
        }
    }
}

/// Core engine: `nu`'s support must be an interval and its curvature must be
/// dominated by `reference_curvature(k)` at every interior point.
fn certify_against<T, F>(nu: &Window<'_, T>, slack: f64, reference_curvature: F) -> Result<LogConcavityCertificate>
where
    T: Weight,
    F: Fn(i64) -> T,
{
    nu.check_non_negative()?;
    let Some((lo, hi)) = nu.support_bounds() else {
        return Err(invalid("sequence has no positive mass"));
    };
    if let Some(k) = nu.first_gap() {
        return Ok(LogConcavityCertificate::gap(k));
    }
    for k in (lo + 1)..hi {
        let c = T::curvature(&nu.get(k - 1), &nu.get(k), &nu.get(k + 1));
        if !T::le_slack(&c, &reference_curvature(k), slack) {
            return Ok(LogConcavityCertificate::violation(k));
        }
    }
    Ok(LogConcavityCertificate::ok())
}

/// Is `nu` log-concave relative to `mu`?
///
/// Fails with [`Error::AbsoluteContinuity`] if `nu` charges a point `mu` does not.
pub fn certify_relative<T: Weight>(
    nu: &Window<'_, T>,
    mu: &Window<'_, T>,
    slack: f64,
) -> Result<LogConcavityCertificate> {
    nu.check_non_negative()?;
    mu.check_non_negative()?;
    for (i, q) in nu.masses.iter().enumerate() {
        let k = nu.offset + i as i64;
        if q.is_positive_weight() && !mu.get(k).is_positive_weight() {
            return Err(Error::AbsoluteContinuity { k });
        }
    }
    certify_against(nu, slack, |k| T::curvature(&mu.get(k - 1), &mu.get(k), &mu.get(k + 1)))
}

/// Log-concavity relative to counting measure: `q[k]^2 >= q[k-1] q[k+1]`.
pub fn certify_log_concave<T: Weight>(nu: &Window<'_, T>, slack: f64) -> Result<LogConcavityCertificate> {
    certify_against(nu, slack, |_| T::one())
}

/// Ultra log-concavity of order `m`: `a[k] / C(m, k)` is log-concave.
///
/// Equivalent to `k (m-k) a[k]^2 >= (k+1)(m-k+1) a[k-1] a[k+1]`.
pub fn is_ulc_with<T: Weight>(a: &[T], m: usize, slack: f64) -> Result<LogConcavityCertificate> {
    if a.len() > m + 1 {
        return Err(invalid(format!("sequence of length {} cannot be ULC({m})", a.len())));
    }
    let w = Window::new(0, a);
    certify_against(&w, slack, |k| {
        let k = k as u64;
        let m = m as u64;
        T::from_u64(k * (m - k)) / T::from_u64((k + 1) * (m - k + 1))
    })
}

pub fn is_ulc<T: Weight>(a: &[T], m: usize) -> Result<LogConcavityCertificate> {
    is_ulc_with(a, m, CERT_SLACK)
}

/// ULC(infinity): log-concavity relative to Poisson, `k a[k]^2 >= (k+1) a[k-1] a[k+1]`.
pub fn is_ulc_infinity_with<T: Weight>(a: &[T], slack: f64) -> Result<LogConcavityCertificate> {
    let w = Window::new(0, a);
    certify_against(&w, slack, |k| T::from_u64(k as u64) / T::from_u64(k as u64 + 1))
}

pub fn is_ulc_infinity<T: Weight>(a: &[T]) -> Result<LogConcavityCertificate> {
    is_ulc_infinity_with(a, CERT_SLACK)
}
