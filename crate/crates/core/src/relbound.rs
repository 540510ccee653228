//! Total-variation bounds for a measure `nu` that is log-concave relative to `mu`.
//!
//! Write `p_k = mu[k]`, `q_k = nu[k]` and pick an anchor `l` with
//! `q_l q_{l+1} > 0`. Because `log(q/p)` is concave, it lies below the chord
//! through `l` and `l+1`:
//!
//! ```text
//! q_y / p_y <= (q_l / p_l) * r^{-(y - l)},   r = p_{l+1} q_l / (p_l q_{l+1})
//! ```
//!
//! Integrating that envelope against `nu` and against `mu` gives the two
//! bounds returned by [`theorem1_bounds`]. At a ratio-matched anchor (`r = 1`)
//! they collapse to `1 - p_l / q_l`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::{tv_distance, DiscreteDist, TvInterval};
use crate::error::{Error, Result};
use crate::logconcave::LogConcavityCertificate;
use crate::numeric::{CompensatedSum, CERT_SLACK};

/// Default relative tolerance for calling an anchor ratio-matched.
pub const RATIO_TOLERANCE: f64 = 1e-12;

/// Default absolute tolerance for the dominance verdict.
pub const DOMINANCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub ell: i64,
    pub ratio_matched: bool,
    /// `|p_{l+1} q_l - q_{l+1} p_l|`.
    pub ratio_gap: f64,
}

/// A bound from a closed-form corollary. Only `claimed` bounds take part in
/// the dominance verdict; the rest are reported for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBound {
    pub name: String,
    pub raw: f64,
    pub clamped: f64,
    pub claimed: bool,
}

impl NamedBound {
    pub fn claimed(name: impl Into<String>, raw: f64) -> Self {
        Self::new(name, raw, true)
    }

    pub fn reported(name: impl Into<String>, raw: f64) -> Self {
        Self::new(name, raw, false)
    }

    fn new(name: impl Into<String>, raw: f64, claimed: bool) -> Self {
        Self {
            name: name.into(),
            raw,
            clamped: clamp_unit(raw),
            claimed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_nu_side: Option<f64>,
    pub bound_mu_side: Option<f64>,
    pub simplified: Option<f64>,
    pub anchor: Option<Anchor>,
    pub hypothesis: LogConcavityCertificate,
    pub oracle_tv: Option<TvInterval>,
    pub dominated: Option<bool>,
    #[serde(default)]
    pub corollary_bounds: Vec<NamedBound>,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    /// Why no bound was produced, when the hypotheses fail.
    #[serde(default)]
    pub reason: Option<String>,
    /// Distributions worth keeping next to the numbers (targets, sum PMFs).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub distributions: BTreeMap<String, DiscreteDist>,
}

impl BoundReport {
    pub fn empty(hypothesis: LogConcavityCertificate) -> Self {
        Self {
            bound_nu_side: None,
            bound_mu_side: None,
            simplified: None,
            anchor: None,
            hypothesis,
            oracle_tv: None,
            dominated: None,
            corollary_bounds: Vec::new(),
            details: BTreeMap::new(),
            reason: None,
            distributions: BTreeMap::new(),
        }
    }

    pub fn not_applicable(hypothesis: LogConcavityCertificate, reason: impl Into<String>) -> Self {
        Self {
            reason: Some(reason.into()),
            ..Self::empty(hypothesis)
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.reason.is_none()
    }

    /// Smallest bound the report stands behind: Theorem-1 values and claimed
    /// corollary bounds.
    pub fn best_bound(&self) -> Option<f64> {
        [self.bound_nu_side, self.bound_mu_side, self.simplified]
            .into_iter()
            .flatten()
            .chain(self.corollary_bounds.iter().filter(|b| b.claimed).map(|b| b.clamped))
            .reduce(f64::min)
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn push_bound(&mut self, bound: NamedBound) {
        self.corollary_bounds.push(bound);
    }

    /// Attach an oracle TV and recompute the verdict.
    pub fn set_oracle(&mut self, tv: TvInterval, tolerance: f64) {
        self.oracle_tv = Some(tv);
        self.refresh_verdict(tolerance);
    }

    pub fn refresh_verdict(&mut self, tolerance: f64) {
        self.dominated = match (self.oracle_tv, self.best_bound()) {
            (Some(tv), Some(b)) => Some(tv.upper <= b + tolerance),
            _ => None,
        };
    }

    /// `bound - tv.upper` for the tightest claimed bound.
    pub fn slack(&self) -> Option<f64> {
        Some(self.best_bound()? - self.oracle_tv?.upper)
    }
}

pub fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        x
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Tolerances used by [`certify_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub certificate_slack: f64,
    pub ratio_tolerance: f64,
    pub dominance_tolerance: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            certificate_slack: CERT_SLACK,
            ratio_tolerance: RATIO_TOLERANCE,
            dominance_tolerance: DOMINANCE_TOLERANCE,
        }
    }
}

/// Exponent applied to `r` in the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    /// `r^{-(y-l)}`: the chord through `l`, `l+1`. Valid for every anchor.
    Signed,
    /// `r^{-|y-l|}`: agrees with `Signed` for `y >= l`. Only an envelope when
    /// `r <= 1`; kept to compare against the absolute-value display.
    Absolute,
}

fn hypothesis_error(cert: &LogConcavityCertificate) -> Error {
    match (cert.support_is_interval, cert.first_violation) {
        (false, Some(k)) => Error::Hypothesis(format!("support of nu has a gap at k = {k}")),
        (_, Some(k)) => Error::Hypothesis(format!("nu is not log-concave relative to mu at k = {k}")),
        _ => Error::Hypothesis("nu is not log-concave relative to mu".into()),
    }
}

fn check_hypothesis(mu: &DiscreteDist, nu: &DiscreteDist, slack: f64) -> Result<LogConcavityCertificate> {
    let cert = crate::dist::is_log_concave_relative_with(nu, mu, slack)?;
    if !cert.holds {
        return Err(hypothesis_error(&cert));
    }
    if let Some(k) = mu.window().first_gap() {
        return Err(Error::Hypothesis(format!("support of mu has a gap at k = {k}")));
    }
    Ok(cert)
}

fn check_anchor(nu: &DiscreteDist, ell: i64) -> Result<()> {
    if nu.mass(ell) > 0.0 && nu.mass(ell + 1) > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAnchor {
            ell,
            reason: "need q_l > 0 and q_{l+1} > 0".into(),
        })
    }
}

/// `(B_nu, B_mu)` at anchor `ell`, each clamped to `[0, 1]`.
pub fn theorem1_bounds(mu: &DiscreteDist, nu: &DiscreteDist, ell: i64) -> Result<(f64, f64)> {
    theorem1_bounds_with(mu, nu, ell, CERT_SLACK, Exponent::Signed)
}

pub fn theorem1_bounds_with(
    mu: &DiscreteDist,
    nu: &DiscreteDist,
    ell: i64,
    slack: f64,
    exponent: Exponent,
) -> Result<(f64, f64)> {
    check_hypothesis(mu, nu, slack)?;
    check_anchor(nu, ell)?;
    let (b_nu, b_mu) = raw_bounds(mu, nu, ell, exponent);
    Ok((clamp_unit(b_nu), clamp_unit(b_mu)))
}

/// Unclamped envelope integrals; assumes a valid anchor.
pub(crate) fn raw_bounds(mu: &DiscreteDist, nu: &DiscreteDist, ell: i64, exponent: Exponent) -> (f64, f64) {
    let (p0, p1) = (mu.mass(ell), mu.mass(ell + 1));
    let (q0, q1) = (nu.mass(ell), nu.mass(ell + 1));
    // log r and log(p_l / q_l)
    let (num, den) = (p1 * q0, p0 * q1);
    let ln_r = if num.is_normal() && den.is_normal() {
        (num / den).ln()
    } else {
        p1.ln() + q0.ln() - p0.ln() - q1.ln()
    };
    let ln_pq = (p0 / q0).ln();
    let dist = |y: i64| match exponent {
        Exponent::Signed => (y - ell) as f64,
        Exponent::Absolute => (y - ell).abs() as f64,
    };

    // (1 - (p_l/q_l) r^{d})_+ against nu
    let mut b_nu = CompensatedSum::new();
    for (y, q) in nu.iter() {
        if q == 0.0 {
            continue;
        }
        let e = ln_pq + dist(y) * ln_r;
        if e < 0.0 {
            b_nu.add(-q * e.exp_m1());
        }
    }

    // ((q_l/p_l) r^{-d} - 1)_+ against mu
    let mut b_mu = CompensatedSum::new();
    for (y, p) in mu.iter() {
        if p == 0.0 {
            continue;
        }
        let x = -(ln_pq + dist(y) * ln_r);
        if x > 0.0 {
            let term = if x < 700.0 {
                p * x.exp_m1()
            } else {
                (x + p.ln()).exp() - p
            };
            b_mu.add(term);
        }
    }
    (b_nu.value(), b_mu.value())
}

/// `min(q_l/p_l - 1, 1 - p_l/q_l)` at a ratio-matched anchor.
///
/// At such an anchor `q_l >= p_l` always holds, so the minimum is
/// `1 - p_l/q_l`. A violation beyond the tolerance means the anchor or the
/// hypothesis is wrong and is reported as an error.
pub fn theorem1_simplified(mu: &DiscreteDist, nu: &DiscreteDist, ell: i64) -> Result<f64> {
    theorem1_simplified_with(mu, nu, ell, &CertifyOptions::default())
}

pub fn theorem1_simplified_with(mu: &DiscreteDist, nu: &DiscreteDist, ell: i64, opts: &CertifyOptions) -> Result<f64> {
    check_hypothesis(mu, nu, opts.certificate_slack)?;
    check_anchor(nu, ell)?;
    let anchor = anchor_at(mu, nu, ell, opts.ratio_tolerance);
    if !anchor.ratio_matched {
        return Err(Error::InvalidAnchor {
            ell,
            reason: format!("ratios differ by {:e}", anchor.ratio_gap),
        });
    }
    simplified_value(mu.mass(ell), nu.mass(ell), opts.ratio_tolerance).map_err(|e| match e {
        Error::Hypothesis(msg) => Error::InvalidAnchor { ell, reason: msg },
        other => other,
    })
}

/// `min(q/p - 1, 1 - p/q)` with the `q >= p` check.
pub fn simplified_value(p: f64, q: f64, tolerance: f64) -> Result<f64> {
    if q < p * (1.0 - tolerance.max(1e-12)) {
        return Err(Error::Hypothesis(format!(
            "matched anchor has q_l = {q:e} < p_l = {p:e}"
        )));
    }
    let v = (q / p - 1.0).min(1.0 - p / q);
    Ok(v.max(0.0))
}

fn anchor_at(mu: &DiscreteDist, nu: &DiscreteDist, ell: i64, tolerance: f64) -> Anchor {
    let a = mu.mass(ell + 1) * nu.mass(ell);
    let b = nu.mass(ell + 1) * mu.mass(ell);
    let gap = (a - b).abs();
    Anchor {
        ell,
        ratio_matched: gap <= tolerance * a.max(b),
        ratio_gap: gap,
    }
}

fn normalized_gap(anchor: &Anchor, mu: &DiscreteDist, nu: &DiscreteDist) -> f64 {
    let a = mu.mass(anchor.ell + 1) * nu.mass(anchor.ell);
    let b = nu.mass(anchor.ell + 1) * mu.mass(anchor.ell);
    anchor.ratio_gap / a.max(b)
}

fn valid_anchors(nu: &DiscreteDist) -> Vec<i64> {
    match nu.support() {
        Some((lo, hi)) => (lo..hi).filter(|&l| nu.mass(l) > 0.0 && nu.mass(l + 1) > 0.0).collect(),
        None => Vec::new(),
    }
}

/// Search for an anchor where the consecutive ratios of `mu` and `nu` agree.
///
/// Candidates are anchors within tolerance and anchors where the sign of
/// `p_{l+1} q_l - q_{l+1} p_l` flips. The candidate with the smallest
/// normalized gap wins; ties go to the smaller `l`.
pub fn find_ratio_anchor(mu: &DiscreteDist, nu: &DiscreteDist) -> Option<Anchor> {
    find_ratio_anchor_with(mu, nu, RATIO_TOLERANCE)
}

pub fn find_ratio_anchor_with(mu: &DiscreteDist, nu: &DiscreteDist, tolerance: f64) -> Option<Anchor> {
    let ells = valid_anchors(nu);
    let sign = |l: i64| {
        let d = mu.mass(l + 1) * nu.mass(l) - nu.mass(l + 1) * mu.mass(l);
        d.partial_cmp(&0.0)
    };
    let mut best: Option<(f64, Anchor)> = None;
    for (i, &l) in ells.iter().enumerate() {
        let anchor = anchor_at(mu, nu, l, tolerance);
        let flips = |j: Option<&i64>| {
            j.is_some_and(|&m| {
                let (a, b) = (sign(l), sign(m));
                a.is_some() && b.is_some() && a != b && a != Some(std::cmp::Ordering::Equal)
            })
        };
        let is_candidate = anchor.ratio_matched || flips(ells.get(i + 1)) || (i > 0 && flips(ells.get(i - 1)));
        if !is_candidate {
            continue;
        }
        let g = normalized_gap(&anchor, mu, nu);
        if best.as_ref().is_none_or(|(bg, _)| g < *bg) {
            best = Some((g, anchor));
        }
    }
    best.map(|(_, a)| a)
}

/// Full report with default tolerances.
pub fn certify(mu: &DiscreteDist, nu: &DiscreteDist, ell: Option<i64>) -> BoundReport {
    certify_with(mu, nu, ell, &CertifyOptions::default())
}

/// Hypothesis check, anchor choice, both bounds, the simplified form when
/// matched, oracle TV and verdict. Hypothesis failures come back as a report
/// with `reason` set.
pub fn certify_with(mu: &DiscreteDist, nu: &DiscreteDist, ell: Option<i64>, opts: &CertifyOptions) -> BoundReport {
    let cert = match crate::dist::is_log_concave_relative_with(nu, mu, opts.certificate_slack) {
        Ok(c) => c,
        Err(e) => {
            let cert = LogConcavityCertificate {
                holds: false,
                first_violation: match e {
                    Error::AbsoluteContinuity { k } => Some(k),
                    _ => None,
                },
                support_is_interval: nu.support_is_interval(),
            };
            return BoundReport::not_applicable(cert, e.to_string());
        }
    };
    if let Err(e) = check_hypothesis(mu, nu, opts.certificate_slack) {
        return BoundReport::not_applicable(cert, e.to_string());
    }
    let mut report = BoundReport::empty(cert);

    let ells = valid_anchors(nu);
    if ells.is_empty() {
        // nu is a single atom at k: d_TV = 1 - p_k exactly.
        let (k, _) = nu.support().expect("validated distribution has mass");
        let v = clamp_unit(1.0 - mu.mass(k));
        report.bound_nu_side = Some(v);
        report.bound_mu_side = Some(v);
        report.set_oracle(tv_distance(mu, nu), opts.dominance_tolerance);
        return report;
    }

    let anchor = match ell {
        Some(l) => {
            if let Err(e) = check_anchor(nu, l) {
                return BoundReport {
                    reason: Some(e.to_string()),
                    ..report
                };
            }
            anchor_at(mu, nu, l, opts.ratio_tolerance)
        }
        None => find_ratio_anchor_with(mu, nu, opts.ratio_tolerance).unwrap_or_else(|| {
            // No matched pair: take the closest ratio over all anchors.
            ells.iter()
                .map(|&l| anchor_at(mu, nu, l, opts.ratio_tolerance))
                .min_by(|a, b| {
                    normalized_gap(a, mu, nu)
                        .total_cmp(&normalized_gap(b, mu, nu))
                        .then(a.ell.cmp(&b.ell))
                })
                .expect("non-empty anchor set")
        }),
    };

    let (b_nu, b_mu) = raw_bounds(mu, nu, anchor.ell, Exponent::Signed);
    report.bound_nu_side = Some(clamp_unit(b_nu));
    report.bound_mu_side = Some(clamp_unit(b_mu));
    report.details.insert("bound_nu_side_raw".into(), b_nu);
    report.details.insert("bound_mu_side_raw".into(), b_mu);
    if anchor.ratio_matched {
        match simplified_value(mu.mass(anchor.ell), nu.mass(anchor.ell), opts.ratio_tolerance) {
            Ok(v) => report.simplified = Some(v),
            Err(e) => report.reason = Some(e.to_string()),
        }
    }
    report.anchor = Some(anchor);
    report.set_oracle(tv_distance(mu, nu), opts.dominance_tolerance);
    report
}
