//! Finitely supported distributions on integer windows.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::logconcave::{self, LogConcavityCertificate, Window};
use crate::numeric::{choose_f64, compensated_sum, ln_choose, CompensatedSum, CERT_SLACK};

/// Default truncation budget for infinite-support families.
pub const DEFAULT_TAIL_BUDGET: f64 = 1e-12;

/// Masses on `offset, offset+1, ...`, plus the mass lost to truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    offset: i64,
    masses: Vec<f64>,
    #[serde(default)]
    tail_deficit: f64,
}

/// Enclosure of a total-variation distance: truncation can only add mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvInterval {
    pub lower: f64,
    pub upper: f64,
}

impl TvInterval {
    pub fn exact(t: f64) -> Self {
        Self { lower: t, upper: t }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

impl DiscreteDist {
    /// Normalized distribution from non-negative weights.
    pub fn new(offset: i64, masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(invalid("empty mass sequence"));
        }
        if let Some(i) = masses.iter().position(|m| !m.is_finite() || *m < 0.0) {
            return Err(invalid(format!(
                "mass at k = {} is negative or not finite",
                offset + i as i64
            )));
        }
        let total = compensated_sum(masses.iter().copied());
        if total <= 0.0 {
            return Err(invalid("all masses are zero"));
        }
        let masses = masses.into_iter().map(|m| m / total).collect();
        Ok(Self {
            offset,
            masses,
            tail_deficit: 0.0,
        })
    }

    /// Build from already-normalized masses and a known truncation deficit.
    /// Only validates; does not renormalize.
    pub fn from_parts(offset: i64, masses: Vec<f64>, tail_deficit: f64) -> Result<Self> {
        if masses.is_empty() {
            return Err(invalid("empty mass sequence"));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(invalid("masses must be finite and non-negative"));
        }
        if !(tail_deficit >= 0.0 && tail_deficit.is_finite()) {
            return Err(invalid("tail deficit must be finite and non-negative"));
        }
        let total = compensated_sum(masses.iter().copied()) + tail_deficit;
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("masses plus deficit sum to {total}, not 1")));
        }
        Ok(Self {
            offset,
            masses,
            tail_deficit,
        })
    }

    pub fn point_mass(at: i64) -> Self {
        Self {
            offset: at,
            masses: vec![1.0],
            tail_deficit: 0.0,
        }
    }

    /// Uniform weights on `lo..=hi`; stands in for counting measure.
    pub fn uniform(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(invalid("empty window"));
        }
        Self::new(lo, vec![1.0; (hi - lo + 1) as usize])
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Last index of the stored window.
    pub fn end(&self) -> i64 {
        self.offset + self.masses.len() as i64 - 1
    }

    pub fn mass(&self, k: i64) -> f64 {
        let idx = k - self.offset;
        if idx < 0 || idx as usize >= self.masses.len() {
            0.0
        } else {
            self.masses[idx as usize]
        }
    }

    pub fn window(&self) -> Window<'_, f64> {
        Window::new(self.offset, &self.masses)
    }

    /// Smallest and largest index with positive mass.
    pub fn support(&self) -> Option<(i64, i64)> {
        self.window().support_bounds()
    }

    pub fn support_is_interval(&self) -> bool {
        self.window().first_gap().is_none()
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.masses.iter().copied())
    }

    /// Same masses moved by `shift`.
    pub fn shifted(&self, shift: i64) -> Self {
        Self {
            offset: self.offset + shift,
            ..self.clone()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .map(move |(i, &m)| (self.offset + i as i64, m))
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.iter().map(|(k, m)| k as f64 * m))
    }
}

pub fn make_dist(offset: i64, masses: Vec<f64>) -> Result<DiscreteDist> {
    DiscreteDist::new(offset, masses)
}

pub fn family_bernoulli(p: f64) -> Result<DiscreteDist> {
    family_binomial(1, p)
}

/// Binomial(n, p). Small `n` uses exact coefficients; large `n` anchors at the
/// mode in log space and recurses outward so nothing underflows prematurely.
pub fn family_binomial(n: u64, p: f64) -> Result<DiscreteDist> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("binomial p = {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return DiscreteDist::from_parts(0, pad_point(0, n), 0.0);
    }
    if p == 1.0 {
        return DiscreteDist::from_parts(0, pad_point(n as usize, n), 0.0);
    }
    let q = 1.0 - p;
    let len = n as usize + 1;
    let masses = if n <= 60 {
        (0..=n)
            .map(|k| choose_f64(n, k) * p.powi(k as i32) * q.powi((n - k) as i32))
            .collect::<Vec<_>>()
    } else {
        let mode = (((n + 1) as f64) * p).floor().min(n as f64) as u64;
        let ln_mode = ln_choose(n, mode) + mode as f64 * p.ln() + (n - mode) as f64 * (-p).ln_1p();
        let mut masses = vec![0.0; len];
        masses[mode as usize] = ln_mode.exp();
        let odds = p / q;
        for k in (mode + 1)..=n {
            masses[k as usize] = masses[k as usize - 1] * ((n - k + 1) as f64 / k as f64) * odds;
        }
        for k in (0..mode).rev() {
            masses[k as usize] = masses[k as usize + 1] * ((k + 1) as f64 / (n - k) as f64) / odds;
        }
        masses
    };
    let total = compensated_sum(masses.iter().copied());
    let masses = if n <= 60 {
        masses
    } else {
        masses.into_iter().map(|m| m / total).collect()
    };
    Ok(DiscreteDist {
        offset: 0,
        masses,
        tail_deficit: 0.0,
    })
}

fn pad_point(at: usize, n: u64) -> Vec<f64> {
    let mut v = vec![0.0; n as usize + 1];
    v[at] = 1.0;
    v
}

/// Poisson(lambda) truncated at the smallest `K` whose analytic tail bound
/// `P(K+1) / (1 - lambda/(K+2))` is within `tail_budget`.
pub fn family_poisson(lambda: f64, tail_budget: f64) -> Result<DiscreteDist> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("poisson lambda = {lambda} must be finite and >= 0")));
    }
    check_budget(tail_budget)?;
    if lambda == 0.0 {
        return Ok(DiscreteDist::point_mass(0));
    }
    let mode = lambda.floor() as usize;
    let ln_mode = -lambda + mode as f64 * lambda.ln() - crate::numeric::ln_factorial(mode as u64);
    let mut masses = vec![0.0; mode + 1];
    masses[mode] = ln_mode.exp();
    for k in (0..mode).rev() {
        masses[k] = masses[k + 1] * (k + 1) as f64 / lambda;
    }
    let mut k = mode;
    loop {
        let next = masses[k] * lambda / (k + 1) as f64;
        if tail_bound(next, lambda, k) <= tail_budget {
            break;
        }
        masses.push(next);
        k += 1;
        if k > 100_000_000 {
            return Err(crate::Error::Numerical("poisson truncation did not terminate".into()));
        }
    }
    // Sum the discarded tail far enough out that the remainder is negligible,
    // then normalize kept + discarded to one. This absorbs the rounding of the
    // log-space mode anchor.
    let mut residual = CompensatedSum::new();
    let mut term = masses[k];
    let mut j = k;
    let remainder = loop {
        term *= lambda / (j + 1) as f64;
        let bound = tail_bound(term, lambda, j);
        if bound <= tail_budget * 1e-6 || term == 0.0 {
            break bound;
        }
        residual.add(term);
        j += 1;
    };
    let kept = compensated_sum(masses.iter().copied());
    let scale = 1.0 / (kept + residual.value());
    let masses = masses.into_iter().map(|m| m * scale).collect();
    let deficit = (residual.value() * scale + remainder).min(tail_budget);
    Ok(DiscreteDist {
        offset: 0,
        masses,
        tail_deficit: deficit,
    })
}

/// Upper bound on `sum_{j > k} P(j)` given `next = P(k+1)`; infinite while the
/// ratio `lambda / (j+1)` can still exceed one.
fn tail_bound(next: f64, lambda: f64, k: usize) -> f64 {
    let ratio = lambda / (k + 2) as f64;
    if ratio < 1.0 {
        next / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Geometric with success probability `theta`: `g[k] = (1-theta)^k theta`, k >= 0.
pub fn family_geometric(theta: f64, tail_budget: f64) -> Result<DiscreteDist> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(invalid(format!("geometric theta = {theta} outside (0, 1]")));
    }
    check_budget(tail_budget)?;
    if theta == 1.0 {
        return Ok(DiscreteDist::point_mass(0));
    }
    let ratio = 1.0 - theta;
    let mut masses = Vec::new();
    let mut current = theta;
    // tail after index K is exactly (1-theta)^(K+1)
    let mut tail = ratio;
    loop {
        masses.push(current);
        if tail <= tail_budget {
            break;
        }
        current *= ratio;
        tail *= ratio;
    }
    Ok(DiscreteDist {
        offset: 0,
        masses,
        tail_deficit: tail,
    })
}

/// Geometric with consecutive ratio `rho`: `mu[k] = rho^k (1 - rho)`.
pub fn geometric_with_ratio(rho: f64, tail_budget: f64) -> Result<DiscreteDist> {
    if !(0.0..1.0).contains(&rho) {
        return Err(invalid(format!("geometric ratio {rho} outside [0, 1)")));
    }
    family_geometric(1.0 - rho, tail_budget)
}

fn check_budget(tail_budget: f64) -> Result<()> {
    if !(tail_budget > 0.0 && tail_budget < 1.0) {
        return Err(invalid(format!("tail budget {tail_budget} outside (0, 1)")));
    }
    Ok(())
}

/// Total variation `sum_k (nu_k - mu_k)_+` over the union window, widened by
/// both truncation deficits.
pub fn tv_distance(mu: &DiscreteDist, nu: &DiscreteDist) -> TvInterval {
    let lo = mu.offset.min(nu.offset);
    let hi = mu.end().max(nu.end());
    let t: CompensatedSum = (lo..=hi).map(|k| (nu.mass(k) - mu.mass(k)).max(0.0)).collect();
    let t = t.value();
    TvInterval {
        lower: t,
        upper: t + mu.tail_deficit + nu.tail_deficit,
    }
}

/// Exact discrete convolution with compensated accumulation.
pub fn convolve(x: &DiscreteDist, y: &DiscreteDist) -> DiscreteDist {
    let len = x.masses.len() + y.masses.len() - 1;
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let jlo = k.saturating_sub(y.masses.len() - 1);
        let jhi = k.min(x.masses.len() - 1);
        let mut acc = CompensatedSum::new();
        for j in jlo..=jhi {
            acc.add(x.masses[j] * y.masses[k - j]);
        }
        out.push(acc.value());
    }
    DiscreteDist {
        offset: x.offset + y.offset,
        masses: out,
        tail_deficit: x.tail_deficit + y.tail_deficit,
    }
}

/// Is `nu` log-concave relative to `mu`?
pub fn is_log_concave_relative(nu: &DiscreteDist, mu: &DiscreteDist) -> Result<LogConcavityCertificate> {
    logconcave::certify_relative(&nu.window(), &mu.window(), CERT_SLACK)
}

pub fn is_log_concave_relative_with(
    nu: &DiscreteDist,
    mu: &DiscreteDist,
    slack: f64,
) -> Result<LogConcavityCertificate> {
    logconcave::certify_relative(&nu.window(), &mu.window(), slack)
}

/// Log-concavity relative to counting measure on the integers.
pub fn is_log_concave(nu: &DiscreteDist) -> Result<LogConcavityCertificate> {
    logconcave::certify_log_concave(&nu.window(), CERT_SLACK)
}
