//! Compound Poisson and compound geometric laws and their geometric
//! approximations.
//!
//! The summand of a compound geometric law has `P[xi = j] = (1 - p) p^j`,
//! `j >= 0`. This is the convention under which `P[X = 0] = sum F_k (1-p)^k`
//! and `P[X = 1] = sum k F_k p (1-p)^k`. It is not the success-probability
//! convention of [`family_geometric`].

use serde::{Deserialize, Serialize};

use crate::dist::{convolve, family_geometric, family_poisson, geometric_with_ratio, tv_distance, DiscreteDist};
use crate::error::{invalid, Error, Result};
use crate::logconcave::{certify_log_concave, LogConcavityCertificate};
use crate::numeric::{compensated_sum, CERT_SLACK};
use crate::relbound::{certify_with, BoundReport, CertifyOptions, NamedBound};

const MAX_ATOMS: usize = 1_000_000;

/// `X = xi_1 + ... + xi_N` with `N ~ Poisson(lambda)` and `xi_i ~ F` on the naturals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundPoissonSpec {
    lambda: f64,
    severity: DiscreteDist,
}

impl CompoundPoissonSpec {
    pub fn new(lambda: f64, severity: DiscreteDist) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid(format!("lambda = {lambda} must be positive")));
        }
        if severity.offset() < 0 {
            return Err(invalid("severity must be supported on the naturals"));
        }
        if lambda * (1.0 - severity.mass(0)) > 700.0 {
            return Err(invalid("lambda (1 - F_0) too large: P[X = 0] underflows"));
        }
        Ok(Self { lambda, severity })
    }

    pub fn from_masses(lambda: f64, severity: &[f64]) -> Result<Self> {
        Self::new(lambda, DiscreteDist::new(0, severity.to_vec())?)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn severity(&self) -> &DiscreteDist {
        &self.severity
    }

    fn f(&self, j: usize) -> f64 {
        self.severity.mass(j as i64)
    }
}

/// `X = xi_1 + ... + xi_N` with `N ~ F` and geometric summands `(1 - p) p^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundGeometricSpec {
    count: DiscreteDist,
    p: f64,
}

impl CompoundGeometricSpec {
    /// Fails with a hypothesis error when the count law is not log-concave.
    pub fn new(count: DiscreteDist, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("p = {p} outside (0, 1)")));
        }
        if count.offset() < 0 {
            return Err(invalid("count law must be supported on the naturals"));
        }
        let cert = certify_log_concave(&count.window(), CERT_SLACK)?;
        if !cert.holds {
            return Err(Error::Hypothesis(format!(
                "count law is not log-concave (first violation at k = {:?})",
                cert.first_violation
            )));
        }
        Ok(Self { count, p })
    }

    pub fn count(&self) -> &DiscreteDist {
        &self.count
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Panjer recursion: `P_0 = e^{-lambda (1 - F_0)}`,
/// `P_k = (lambda / k) sum_{j=1}^k j F_j P_{k-j}`.
pub fn compound_poisson_pmf(spec: &CompoundPoissonSpec, tail_budget: f64) -> Result<DiscreteDist> {
    let lambda = spec.lambda;
    let f_end = spec.severity.end().max(0) as usize;
    // severity mass lost to truncation reaches X with probability at most lambda * deficit
    let target = tail_budget + lambda * spec.severity.tail_deficit();
    let mut p = vec![(-lambda * (1.0 - spec.f(0))).exp()];
    let mut cum = p[0];
    while 1.0 - cum > target {
        let k = p.len();
        if k >= MAX_ATOMS {
            return Err(Error::Numerical(format!(
                "compound Poisson tail still {} after {k} atoms",
                1.0 - cum
            )));
        }
        let s = compensated_sum((1..=k.min(f_end)).map(|j| j as f64 * spec.f(j) * p[k - j]));
        let next = lambda / k as f64 * s;
        p.push(next);
        cum += next;
        if spec.f(0) == 1.0 {
            break;
        }
    }
    let cum = compensated_sum(p.iter().copied());
    DiscreteDist::from_parts(0, p, (1.0 - cum).max(0.0))
}

/// Mixture of convolution powers `sum_n e^{-lambda} lambda^n / n! F^{*n}`,
/// truncated to `len` atoms and to `n` with Poisson tail below `tail_budget`.
pub fn compound_poisson_by_convolution(spec: &CompoundPoissonSpec, len: usize, tail_budget: f64) -> Result<Vec<f64>> {
    let counts = family_poisson(spec.lambda, tail_budget)?;
    let f = DiscreteDist::from_parts(0, spec.severity.masses().to_vec(), spec.severity.tail_deficit())?;
    let mut out = vec![0.0; len];
    let mut power = DiscreteDist::point_mass(0);
    for (n, w) in counts.iter() {
        if n > 0 {
            power = convolve(&power, &f);
            let kept = power.masses()[..power.len().min(len)].to_vec();
            power = DiscreteDist::from_parts(power.offset(), kept, 0.0).unwrap_or(power);
        }
        for (k, m) in power.iter() {
            if let Some(slot) = out.get_mut(k as usize) {
                *slot += w * m;
            }
        }
    }
    Ok(out)
}

/// Log-concavity of the compound Poisson law given a log-concave severity:
/// holds iff `lambda F_1^2 >= 2 F_2`.
pub fn yu_check(spec: &CompoundPoissonSpec) -> Result<LogConcavityCertificate> {
    let cert = certify_log_concave(&spec.severity.window(), CERT_SLACK)?;
    if !cert.holds {
        return Err(Error::Hypothesis(format!(
            "severity is not log-concave (first violation at k = {:?})",
            cert.first_violation
        )));
    }
    let (f1, f2) = (spec.f(1), spec.f(2));
    let holds = spec.lambda * f1 * f1 >= 2.0 * f2;
    Ok(LogConcavityCertificate {
        holds,
        first_violation: if holds { None } else { Some(1) },
        support_is_interval: spec.f(1) > 0.0 || spec.f(0) == 1.0,
    })
}

/// Geometric approximation with ratio `lambda F_1`, i.e. success probability
/// `1 - lambda F_1`, anchored at 0.
pub fn geometric_bound_compound_poisson(
    spec: &CompoundPoissonSpec,
    tail_budget: f64,
    opts: &CertifyOptions,
) -> Result<BoundReport> {
    let yu = yu_check(spec)?;
    if !yu.holds {
        return Err(Error::Hypothesis(format!(
            "lambda F_1^2 = {} < 2 F_2 = {}",
            spec.lambda * spec.f(1).powi(2),
            2.0 * spec.f(2)
        )));
    }
    let ratio = spec.lambda * spec.f(1);
    if ratio >= 1.0 {
        return Err(Error::NotApplicable(format!("lambda F_1 = {ratio} is not below 1")));
    }
    let nu = compound_poisson_pmf(spec, tail_budget)?;
    let mu = family_geometric(1.0 - ratio, tail_budget)?;
    let mut report = certify_with(&mu, &nu, Some(0), opts);
    let exponent = spec.lambda * (1.0 - spec.f(0));
    report.push_bound(NamedBound::reported("stated", exponent.exp_m1()));
    report.push_bound(NamedBound::reported(
        "proof_display",
        exponent.exp() * (1.0 - ratio) - 1.0,
    ));
    report.refresh_verdict(opts.dominance_tolerance);
    report.details.insert("theta".into(), 1.0 - ratio);
    report.details.insert("nu0".into(), nu.mass(0));
    report.details.insert("mu0".into(), mu.mass(0));
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    Ok(report)
}

/// `sum_k F_k NB(k, p)` where `NB(k, p)[j] = C(j+k-1, j) (1-p)^k p^j`
/// is the `k`-fold convolution of the summand.
pub fn compound_geometric_pmf(spec: &CompoundGeometricSpec, tail_budget: f64) -> Result<DiscreteDist> {
    let p = spec.p;
    let (lo, hi) = (spec.count.offset() as usize, spec.count.end() as usize);
    let weights: Vec<f64> = (0..=hi).map(|k| spec.count.mass(k as i64)).collect();
    // term[k] = NB(k, p)[j], advanced in j by the ratio p (j + k) / (j + 1)
    let mut term: Vec<f64> = (0..=hi).map(|k| (1.0 - p).powi(k as i32)).collect();
    let target = 1.0 - spec.count.tail_deficit() - tail_budget;
    let mut out = Vec::new();
    let mut cum = 0.0;
    loop {
        let j = out.len();
        let mass = compensated_sum((lo..=hi).map(|k| weights[k] * term[k]));
        out.push(mass);
        cum += mass;
        if cum >= target || (j > 0 && hi == 0) {
            break;
        }
        if j + 1 >= MAX_ATOMS {
            return Err(Error::Numerical(format!(
                "compound geometric tail still {} after {MAX_ATOMS} atoms",
                1.0 - cum
            )));
        }
        term[0] = 0.0;
        for (k, t) in term.iter_mut().enumerate().skip(1) {
            *t *= p * (j + k) as f64 / (j + 1) as f64;
        }
    }
    let cum = compensated_sum(out.iter().copied());
    DiscreteDist::from_parts(0, out, (1.0 - cum).max(0.0))
}

/// `(1/F_1)(1 + (1 - F_1) / (p (1 - p)))^2 - 1`.
pub fn compound_geometric_closed_form(f1: f64, p: f64) -> f64 {
    (1.0 + (1.0 - f1) / (p * (1.0 - p))).powi(2) / f1 - 1.0
}

/// Geometric approximation with `mu[k] = rho^k (1 - rho)`, `rho = P[X=1] / P[X=0]`.
pub fn geometric_bound_compound_geometric(
    spec: &CompoundGeometricSpec,
    tail_budget: f64,
    opts: &CertifyOptions,
) -> Result<BoundReport> {
    let nu = compound_geometric_pmf(spec, tail_budget)?;
    let rho = nu.mass(1) / nu.mass(0);
    if rho >= 1.0 {
        return Err(Error::NotApplicable(format!("P[X=1] / P[X=0] = {rho} is not below 1")));
    }
    let mu = geometric_with_ratio(rho, tail_budget)?;
    let mut report = certify_with(&mu, &nu, Some(0), opts);
    if report.oracle_tv.is_none() {
        report.oracle_tv = Some(tv_distance(&mu, &nu));
    }
    let f1 = spec.count.mass(1);
    if f1 > 0.0 {
        report.push_bound(NamedBound::reported(
            "closed_form",
            compound_geometric_closed_form(f1, spec.p),
        ));
    }
    report.refresh_verdict(opts.dominance_tolerance);
    report.details.insert("rho".into(), rho);
    report.details.insert("p0".into(), nu.mass(0));
    report.details.insert("p1".into(), nu.mass(1));
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    Ok(report)
}
