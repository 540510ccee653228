//! Sums of independent variables: Poisson-binomial laws against binomial,
//! Poisson and geometric targets.
//!
//! For Bernoulli success probabilities `p_i` with `a_i = 1 - p_i`, write
//! `x_i = p_i / a_i`. The binomial and Poisson targets are chosen so that
//! `P[T = 1] / P[T = 0] = sum x_i = P[S = 1] / P[S = 0]`, which makes the
//! anchor `l = 0` ratio-matched.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::{convolve, family_binomial, family_poisson, geometric_with_ratio, DiscreteDist};
use crate::error::{invalid, Error, Result};
use crate::exact::ExactDist;
use crate::numeric::{compensated_sum, dot2, f64_to_rational, rational_to_f64, CompensatedSum};
use crate::relbound::{certify_with, BoundReport, CertifyOptions, NamedBound};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliVector {
    p: Vec<f64>,
}

impl BernoulliVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(invalid("empty Bernoulli vector"));
        }
        if let Some(bad) = p.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(invalid(format!("success probability {bad} outside [0, 1)")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn alpha(&self) -> impl Iterator<Item = f64> + '_ {
        self.p.iter().map(|p| 1.0 - p)
    }

    /// `x_i = p_i / a_i`.
    pub fn odds(&self) -> impl Iterator<Item = f64> + '_ {
        self.p.iter().map(|p| p / (1.0 - p))
    }

    /// Exact dyadic images of the probabilities.
    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.p
            .iter()
            .map(|&p| f64_to_rational(p).expect("finite by construction"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSummary {
    /// Arithmetic mean of `1 / a_i`.
    pub m_n: f64,
    /// Geometric mean of `1 / a_i`.
    pub g_n: f64,
    /// Arithmetic mean of `x_i`; equals `m_n - 1`.
    pub r_n: f64,
    pub lambda_n: f64,
}

pub fn mean_summary(bv: &BernoulliVector) -> MeanSummary {
    let n = bv.n() as f64;
    let r_n = compensated_sum(bv.odds()) / n;
    let mean_log = -compensated_sum(bv.p.iter().map(|p| (-p).ln_1p())) / n;
    MeanSummary {
        m_n: 1.0 + r_n,
        g_n: mean_log.exp(),
        r_n,
        lambda_n: n * r_n,
    }
}

/// PMF of `sum_i Bernoulli(p_i)` by successive two-term convolution.
pub fn poisson_binomial_pmf(bv: &BernoulliVector) -> DiscreteDist {
    let mut pmf = vec![1.0];
    for &p in &bv.p {
        let a = 1.0 - p;
        let mut next = vec![0.0; pmf.len() + 1];
        next[0] = a * pmf[0];
        for k in 1..pmf.len() {
            next[k] = dot2(a, pmf[k], p, pmf[k - 1]);
        }
        next[pmf.len()] = p * pmf[pmf.len() - 1];
        pmf = next;
    }
    DiscreteDist::from_parts(0, pmf, 0.0).expect("convolution of probability vectors")
}

/// `Binomial(n, 1 - 1/m_n)`, evaluated as `r_n / (1 + r_n)`.
pub fn binomial_target(bv: &BernoulliVector) -> DiscreteDist {
    let s = mean_summary(bv);
    family_binomial(bv.n() as u64, s.r_n / (1.0 + s.r_n)).expect("parameter lies in [0, 1)")
}

/// `log((m_n / g_n)^n) = n log(1 + r_n) + sum log(1 - p_i)`, which is >= 0.
fn log_mean_ratio(bv: &BernoulliVector) -> f64 {
    let s = mean_summary(bv);
    let n = bv.n() as f64;
    let mut acc = CompensatedSum::new();
    acc.add(n * s.r_n.ln_1p());
    for p in &bv.p {
        acc.add((-p).ln_1p());
    }
    acc.value().max(0.0)
}

/// `min((m_n/g_n)^n - 1, 1 - (g_n/m_n)^n)`.
pub fn binomial_bound_primary(bv: &BernoulliVector) -> f64 {
    -(-log_mean_ratio(bv)).exp_m1()
}

/// `min(R - 1, 1 - 1/R)` with `R = m_n^n prod a_i`, in exact arithmetic.
pub fn binomial_bound_primary_exact(p: &[BigRational]) -> Result<BigRational> {
    let r = exact_mean_ratio(p)?;
    let a = &r - BigRational::one();
    let b = BigRational::one() - r.recip();
    Ok(if a < b { a } else { b })
}

fn exact_mean_ratio(p: &[BigRational]) -> Result<BigRational> {
    check_rationals(p)?;
    let n = p.len();
    let one = BigRational::one();
    let m =
        p.iter().fold(BigRational::zero(), |acc, pi| acc + (&one - pi).recip()) / BigRational::from_integer(n.into());
    let prod = p.iter().fold(one.clone(), |acc, pi| acc * (&one - pi));
    Ok(num_traits::pow(m, n) * prod)
}

fn check_rationals(p: &[BigRational]) -> Result<()> {
    if p.is_empty() {
        return Err(invalid("empty Bernoulli vector"));
    }
    if p.iter().any(|x| x.is_negative() || *x >= BigRational::one()) {
        return Err(invalid("success probability outside [0, 1)"));
    }
    Ok(())
}

pub fn poisson_binomial_exact(p: &[BigRational]) -> Result<ExactDist> {
    check_rationals(p)?;
    Ok(p.iter().fold(ExactDist::point_mass(0), |acc, pi| {
        acc.convolve(&ExactDist::bernoulli(pi).expect("checked range"))
    }))
}

/// Exact `Binomial(n, 1 - 1/m_n)`.
pub fn binomial_target_exact(p: &[BigRational]) -> Result<ExactDist> {
    check_rationals(p)?;
    let one = BigRational::one();
    let m = p.iter().fold(BigRational::zero(), |acc, pi| acc + (&one - pi).recip())
        / BigRational::from_integer(p.len().into());
    ExactDist::binomial(p.len() as u64, &(&one - m.recip()))
}

/// The closed-form relaxation, as displayed:
/// `exp{sum (x_i - r_n)^2 + (1/(3n^2)) sum x_i^3} - 1`.
///
/// With `tight`, uses `exp{(1/2) sum (x_i - r_n)^2 + (1/(3n^2)) (sum x_i)^3} - 1`.
pub fn binomial_bound_secondary(bv: &BernoulliVector, tight: bool) -> f64 {
    let s = mean_summary(bv);
    let n = bv.n() as f64;
    let dev = compensated_sum(bv.odds().map(|x| (x - s.r_n).powi(2)));
    let exponent = if tight {
        0.5 * dev + (n * s.r_n).powi(3) / (3.0 * n * n)
    } else {
        dev + compensated_sum(bv.odds().map(|x| x.powi(3))) / (3.0 * n * n)
    };
    exponent.exp_m1()
}

/// `Poisson(lambda_n)`, `lambda_n = n (m_n - 1)`.
pub fn poisson_target(bv: &BernoulliVector, tail_budget: f64) -> Result<DiscreteDist> {
    family_poisson(mean_summary(bv).lambda_n, tail_budget)
}

/// `exp{sum x_i^2} - 1`.
pub fn poisson_bound(bv: &BernoulliVector) -> f64 {
    compensated_sum(bv.odds().map(|x| x * x)).exp_m1()
}

fn summary_details(report: &mut BoundReport, s: &MeanSummary) {
    report.details.insert("m_n".into(), s.m_n);
    report.details.insert("g_n".into(), s.g_n);
    report.details.insert("r_n".into(), s.r_n);
    report.details.insert("lambda_n".into(), s.lambda_n);
}

fn anchor_zero(nu: &DiscreteDist) -> Option<i64> {
    (nu.mass(0) > 0.0 && nu.mass(1) > 0.0).then_some(0)
}

/// Poisson-binomial against its ratio-matched binomial.
pub fn pb_binomial_report(bv: &BernoulliVector, opts: &CertifyOptions) -> BoundReport {
    let nu = poisson_binomial_pmf(bv);
    let mu = binomial_target(bv);
    let mut report = certify_with(&mu, &nu, anchor_zero(&nu), opts);
    let s = mean_summary(bv);
    summary_details(&mut report, &s);
    report.details.insert("binomial_p".into(), s.r_n / (1.0 + s.r_n));
    if report.is_applicable() {
        report.push_bound(NamedBound::claimed("binomial_primary", binomial_bound_primary(bv)));
        report.push_bound(NamedBound::claimed(
            "binomial_secondary",
            binomial_bound_secondary(bv, false),
        ));
        report.push_bound(NamedBound::claimed(
            "binomial_secondary_tight",
            binomial_bound_secondary(bv, true),
        ));
        report.refresh_verdict(opts.dominance_tolerance);
    }
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    report
}

/// Poisson-binomial against `Poisson(lambda_n)`.
pub fn pb_poisson_report(bv: &BernoulliVector, tail_budget: f64, opts: &CertifyOptions) -> Result<BoundReport> {
    let nu = poisson_binomial_pmf(bv);
    let mu = poisson_target(bv, tail_budget)?;
    let mut report = certify_with(&mu, &nu, anchor_zero(&nu), opts);
    summary_details(&mut report, &mean_summary(bv));
    if report.is_applicable() {
        report.push_bound(NamedBound::claimed("poisson", poisson_bound(bv)));
        report.refresh_verdict(opts.dominance_tolerance);
    }
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    Ok(report)
}

/// Sum of independent log-concave variables on `{0, 1, ...}` against a
/// geometric law with ratio `rho = n (m_n - 1)`, `m_n` the mean of
/// `1 / xi_i[0]`. The bound `rho / (1 - rho)` needs `rho < 1`.
pub fn geometric_sum_bound(xis: &[DiscreteDist], tail_budget: f64, opts: &CertifyOptions) -> Result<BoundReport> {
    if xis.is_empty() {
        return Err(invalid("no summands"));
    }
    let mut alphas = Vec::with_capacity(xis.len());
    for (i, xi) in xis.iter().enumerate() {
        if xi.offset() < 0 {
            return Err(invalid(format!("summand {i} must live on {{0, 1, ...}}")));
        }
        let cert = crate::dist::is_log_concave(xi)?;
        if !cert.holds {
            return Err(Error::Hypothesis(format!("summand {i} is not log-concave")));
        }
        let a = xi.mass(0);
        if a <= 0.0 {
            return Err(Error::Hypothesis(format!("summand {i} has no mass at 0")));
        }
        alphas.push(a);
    }
    let n = xis.len() as f64;
    let m_n = compensated_sum(alphas.iter().map(|a| 1.0 / a)) / n;
    let rho = compensated_sum(alphas.iter().map(|a| (1.0 - a) / a));
    let printed = m_n > 1.0 + 1.0 / n;
    if rho >= 1.0 {
        return Err(Error::NotApplicable(format!(
            "n (m_n - 1) = {rho} >= 1, so 1 - n (m_n - 1) is not a geometric parameter"
        )));
    }

    let nu = xis[1..].iter().fold(xis[0].clone(), |acc, x| convolve(&acc, x));
    let mu = geometric_with_ratio(rho, tail_budget)?;
    let mut report = certify_with(&mu, &nu, anchor_zero(&nu), opts);
    report.details.insert("m_n".into(), m_n);
    report.details.insert("rho".into(), rho);
    report.details.insert("theta".into(), 1.0 - rho);
    report
        .details
        .insert("printed_condition_holds".into(), f64::from(u8::from(printed)));
    report.details.insert("enforced_condition_holds".into(), 1.0);
    if report.is_applicable() {
        report.push_bound(NamedBound::claimed("geometric", rho / (1.0 - rho)));
        report.refresh_verdict(opts.dominance_tolerance);
    }
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    Ok(report)
}

/// `(x - x^2/2, x - x^2/2 + x^3/3)`. The upper value bounds `ln(1 + x)` for
/// all `x > -1`; the lower value only for `x >= 0`.
pub fn log_taylor_bounds(x: f64) -> (f64, f64) {
    let q = x - x * x / 2.0;
    (q, q + x * x * x / 3.0)
}

/// Exact TV between the Poisson-binomial law and its binomial target.
pub fn binomial_oracle_exact(p: &[BigRational]) -> Result<BigRational> {
    let nu = poisson_binomial_exact(p)?;
    let mu = binomial_target_exact(p)?;
    Ok(mu.tv(&nu))
}

pub fn binomial_oracle_exact_f64(p: &[BigRational]) -> Result<f64> {
    Ok(rational_to_f64(&binomial_oracle_exact(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv_distance;
    use crate::numeric::ratio;

    fn bv(p: &[f64]) -> BernoulliVector {
        BernoulliVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(poisson_binomial_pmf(&bv(&[0.5])).masses(), &[0.5, 0.5]);
        let pmf = poisson_binomial_pmf(&bv(&[0.1, 0.2]));
        for (a, b) in pmf.masses().iter().zip([0.72, 0.26, 0.02]) {
            assert!((a - b).abs() < 1e-15);
        }
        let iid = poisson_binomial_pmf(&bv(&[0.3; 7]));
        let bin = family_binomial(7, 0.3).unwrap();
        for (a, b) in iid.masses().iter().zip(bin.masses()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn targets() {
        assert_eq!(binomial_target(&bv(&[0.0, 0.0, 0.0])).support(), Some((0, 0)));
        let t = binomial_target(&bv(&[0.1, 0.2]));
        assert!((t.mass(1) / t.mass(0) / 2.0 - (13.0 / 85.0) / (72.0 / 85.0)).abs() < 1e-15);
        let s = mean_summary(&bv(&[0.1, 0.2]));
        assert!((s.m_n - 85.0 / 72.0).abs() < 1e-15);
        assert!(s.m_n >= s.g_n && s.g_n >= 1.0);
    }

    #[test]
    fn primary_bound_closed_form() {
        // R = (85/72)^2 * 0.72 = 5202/5184
        let b = binomial_bound_primary(&bv(&[0.1, 0.2]));
        assert!((b - 18.0 / 5202.0).abs() < 1e-15, "{b}");
        let exact = binomial_bound_primary_exact(&[ratio(1, 10), ratio(1, 5)]).unwrap();
        assert_eq!(exact, ratio(18, 5202));
        let tv = binomial_oracle_exact(&[ratio(1, 10), ratio(1, 5)]).unwrap();
        assert!(tv < exact);
        assert!((rational_to_f64(&tv) - 0.003391).abs() < 1e-6);
    }

    #[test]
    fn equal_probabilities_are_exactly_zero() {
        let p = bv(&[0.3, 0.3, 0.3]).to_rationals();
        assert!(binomial_bound_primary_exact(&p).unwrap().is_zero());
        assert!(binomial_oracle_exact(&p).unwrap().is_zero());
        assert!(binomial_bound_primary(&bv(&[0.3, 0.3, 0.3])) < 1e-15);
    }

    #[test]
    fn secondary_bound_keeps_cubic_term() {
        let x: f64 = 0.3 / 0.7;
        let b = binomial_bound_secondary(&bv(&[0.3, 0.3]), false);
        assert!((b - (2.0 * x.powi(3) / 12.0).exp_m1()).abs() < 1e-15);
        let b = binomial_bound_secondary(&bv(&[0.0, 0.3]), false);
        let r = x / 2.0;
        let expect = (2.0 * (x - r).powi(2) + x.powi(3) / 12.0).exp_m1();
        assert!((b - expect).abs() < 1e-15);
    }

    #[test]
    fn rare_events() {
        let v = bv(&[0.1; 10]);
        assert!((mean_summary(&v).lambda_n - 10.0 / 9.0).abs() < 1e-14);
        let b = poisson_bound(&v);
        assert!((b - (10.0f64 / 81.0).exp_m1()).abs() < 1e-15);
        let r = pb_poisson_report(&v, 1e-12, &CertifyOptions::default()).unwrap();
        assert_eq!(r.dominated, Some(true));
        assert!(r.oracle_tv.unwrap().upper < b);
    }

    #[test]
    fn zero_vector_degenerates() {
        let v = bv(&[0.0, 0.0]);
        assert_eq!(poisson_bound(&v), 0.0);
        let r = pb_poisson_report(&v, 1e-12, &CertifyOptions::default()).unwrap();
        assert_eq!(r.best_bound(), Some(0.0));
        assert_eq!(r.dominated, Some(true));
    }

    #[test]
    fn geometric_sum_example() {
        let b = DiscreteDist::new(0, vec![0.95, 0.05]).unwrap();
        let r = geometric_sum_bound(&[b.clone(), b], 1e-12, &CertifyOptions::default()).unwrap();
        assert!((r.details["rho"] - 2.0 / 19.0).abs() < 1e-15);
        let g = r.corollary_bounds.iter().find(|b| b.name == "geometric").unwrap();
        assert!((g.raw - 2.0 / 17.0).abs() < 1e-15);
        let tv = r.oracle_tv.unwrap();
        assert!((tv.lower - 0.00858).abs() < 1e-5, "{tv:?}");
        assert_eq!(r.dominated, Some(true));
    }

    #[test]
    fn geometric_sum_preconditions() {
        let opts = CertifyOptions::default();
        let heavy = DiscreteDist::new(0, vec![0.4, 0.6]).unwrap();
        let err = geometric_sum_bound(&[heavy.clone(), heavy], 1e-12, &opts).unwrap_err();
        assert!(err.is_not_applicable());
        let r = geometric_sum_bound(&[DiscreteDist::point_mass(0)], 1e-12, &opts).unwrap();
        assert_eq!(r.best_bound(), Some(0.0));
    }

    #[test]
    fn log_taylor() {
        for i in 0..1000 {
            let x = i as f64 / 100.0;
            let (lo, hi) = log_taylor_bounds(x);
            assert!(lo <= x.ln_1p() && x.ln_1p() <= hi + 1e-15);
        }
        // the lower value is not a bound for negative x
        let (lo, _) = log_taylor_bounds(-0.5);
        assert!(lo > (-0.5f64).ln_1p());
    }

    #[test]
    fn pb_report_matches_direct_oracle() {
        let v = bv(&[0.05, 0.10, 0.15]);
        let r = pb_binomial_report(&v, &CertifyOptions::default());
        let tv = tv_distance(&binomial_target(&v), &poisson_binomial_pmf(&v));
        assert_eq!(r.oracle_tv, Some(tv));
        assert_eq!(r.anchor.unwrap().ell, 0);
        assert!(r.anchor.unwrap().ratio_matched);
        assert_eq!(r.dominated, Some(true));
        assert!((r.simplified.unwrap() - binomial_bound_primary(&v)).abs() < 1e-14);
    }
}
