//! Independence profiles of matroids and approximation of the induced law
//! `nu_M[k] ∝ I(k)` by binomial and Poisson targets.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::{family_poisson, tv_distance, DiscreteDist, TvInterval};
use crate::error::{invalid, Error, Result};
use crate::exact::ExactDist;
use crate::logconcave::LogConcavityCertificate;
use crate::numeric::{big_ratio, biguint_to_f64, choose, ln_factorial, rational_to_f64};
use crate::relbound::{certify_with, BoundReport, CertifyOptions, NamedBound};

/// Largest ground set accepted by [`SetSystem`].
pub const MAX_GROUND_SET: usize = 20;

/// `I(0..=n)`: independent sets counted by size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndepProfile {
    n: usize,
    #[serde(serialize_with = "ser_counts", deserialize_with = "de_counts")]
    counts: Vec<BigUint>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Count {
    Small(u64),
    Big(String),
}

fn ser_counts<S: Serializer>(counts: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Count> = counts
        .iter()
        .map(|c| match c.to_u64() {
            Some(x) => Count::Small(x),
            None => Count::Big(c.to_string()),
        })
        .collect();
    v.serialize(s)
}

fn de_counts<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigUint>, D::Error> {
    let v = Vec::<Count>::deserialize(d)?;
    v.into_iter()
        .map(|c| match c {
            Count::Small(x) => Ok(BigUint::from(x)),
            Count::Big(s) => s.parse().map_err(serde::de::Error::custom),
        })
        .collect()
}

impl IndepProfile {
    pub fn new(n: usize, counts: Vec<BigUint>) -> Result<Self> {
        if counts.len() != n + 1 {
            return Err(invalid(format!(
                "profile needs {} entries, got {}",
                n + 1,
                counts.len()
            )));
        }
        if !counts[0].is_one() {
            return Err(invalid("I(0) must be 1"));
        }
        let rank = counts.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        if let Some(k) = counts[..=rank].iter().position(|c| c.is_zero()) {
            return Err(invalid(format!("I({k}) = 0 below the rank {rank}")));
        }
        Ok(Self { n, counts })
    }

    pub fn from_u64(n: usize, counts: &[u64]) -> Result<Self> {
        Self::new(n, counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn rank(&self) -> usize {
        self.counts.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn count(&self, k: usize) -> BigUint {
        self.counts.get(k).cloned().unwrap_or_default()
    }

    /// `sum_{j >= 1} I(j)`, or from `j = 0` when `include_zero`.
    pub fn total(&self, include_zero: bool) -> BigUint {
        let skip = usize::from(!include_zero);
        self.counts.iter().skip(skip).sum()
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(biguint_to_f64).collect()
    }
}

pub fn profile_uniform(n: usize, r: usize) -> Result<IndepProfile> {
    if r > n {
        return Err(invalid(format!("rank {r} exceeds ground set size {n}")));
    }
    let counts = (0..=n)
        .map(|k| {
            if k <= r {
                choose(n as u64, k as u64)
            } else {
                BigUint::zero()
            }
        })
        .collect();
    IndepProfile::new(n, counts)
}

/// Categories of sizes `c_i` with capacities `d_i <= c_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMatroidSpec {
    sizes: Vec<usize>,
    capacities: Vec<usize>,
}

impl PartitionMatroidSpec {
    pub fn new(sizes: Vec<usize>, capacities: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != capacities.len() {
            return Err(invalid("need one capacity per non-empty list of categories"));
        }
        for (c, d) in sizes.iter().zip(&capacities) {
            if *c == 0 {
                return Err(invalid("category sizes must be positive"));
            }
            if d > c {
                return Err(invalid(format!("capacity {d} exceeds category size {c}")));
            }
        }
        Ok(Self { sizes, capacities })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// All subsets of the ground set that respect the capacities, with
    /// categories laid out as consecutive bit ranges.
    pub fn enumerate(&self) -> Result<SetSystem> {
        let n = self.n();
        if n > MAX_GROUND_SET {
            return Err(invalid(format!("ground set of size {n} is too large to enumerate")));
        }
        let mut masks = Vec::with_capacity(self.sizes.len());
        let mut start = 0;
        for &c in &self.sizes {
            masks.push(((1u32 << c) - 1) << start);
            start += c;
        }
        let sets = (0u32..(1u32 << n))
            .filter(|s| {
                masks
                    .iter()
                    .zip(&self.capacities)
                    .all(|(m, &d)| (s & m).count_ones() as usize <= d)
            })
            .collect();
        SetSystem::new(n, sets)
    }
}

/// Parses `c1:d1,c2:d2,...`.
impl FromStr for PartitionMatroidSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sizes = Vec::new();
        let mut caps = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (c, d) = part
                .split_once(':')
                .ok_or_else(|| invalid(format!("expected size:capacity, got {part:?}")))?;
            sizes.push(
                c.trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad category size {c:?}")))?,
            );
            caps.push(d.trim().parse().map_err(|_| invalid(format!("bad capacity {d:?}")))?);
        }
        Self::new(sizes, caps)
    }
}

impl fmt::Display for PartitionMatroidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sizes
            .iter()
            .zip(&self.capacities)
            .map(|(c, d)| format!("{c}:{d}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Coefficients of `prod_i sum_{j <= d_i} C(c_i, j) x^j`.
pub fn profile_partition(spec: &PartitionMatroidSpec) -> IndepProfile {
    let mut poly = vec![BigUint::one()];
    for (&c, &d) in spec.sizes.iter().zip(&spec.capacities) {
        let factor: Vec<BigUint> = (0..=d).map(|j| choose(c as u64, j as u64)).collect();
        let mut next = vec![BigUint::zero(); poly.len() + factor.len() - 1];
        for (i, a) in poly.iter().enumerate() {
            for (j, b) in factor.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        poly = next;
    }
    let n = spec.n();
    poly.resize(n + 1, BigUint::zero());
    IndepProfile::new(n, poly).expect("partition profiles are valid")
}

/// An explicit family of subsets of `{0, ..., n-1}`, stored as bitmasks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    n: usize,
    sets: Vec<u32>,
}

impl SetSystem {
    pub fn new(n: usize, mut sets: Vec<u32>) -> Result<Self> {
        if n > MAX_GROUND_SET {
            return Err(invalid(format!("ground set of size {n} exceeds {MAX_GROUND_SET}")));
        }
        if sets.is_empty() {
            return Err(invalid("family of independent sets is empty"));
        }
        if let Some(s) = sets.iter().find(|&&s| n < 32 && s >> n != 0) {
            return Err(invalid(format!("set {s:#b} uses elements outside the ground set")));
        }
        sets.sort_unstable();
        sets.dedup();
        Ok(Self { n, sets })
    }

    /// From explicit element lists. `n` defaults to one past the largest element.
    pub fn from_lists(n: Option<usize>, lists: &[Vec<usize>]) -> Result<Self> {
        let max = lists.iter().flatten().copied().max();
        let n = match (n, max) {
            (Some(n), Some(m)) if m >= n => return Err(invalid(format!("element {m} outside ground set of size {n}"))),
            (Some(n), _) => n,
            (None, Some(m)) => m + 1,
            (None, None) => 0,
        };
        if n > MAX_GROUND_SET {
            return Err(invalid(format!("ground set of size {n} exceeds {MAX_GROUND_SET}")));
        }
        let sets = lists
            .iter()
            .map(|l| l.iter().fold(0u32, |acc, &e| acc | (1 << e)))
            .collect();
        Self::new(n, sets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }

    fn membership(&self) -> Vec<bool> {
        let mut member = vec![false; 1usize << self.n];
        for &s in &self.sets {
            member[s as usize] = true;
        }
        member
    }

    /// Hereditary and exchange axioms.
    ///
    /// Exchange is decided through the rank function
    /// `r(A) = max{|S| : S ⊆ A independent}`: a hereditary family is a matroid
    /// exactly when `r` is submodular, and a local failure
    /// `r(A+x) = r(A+y) = r(A) < r(A+x+y)` exhibits a maximal independent
    /// subset of `A` that cannot be augmented from one of `A+x+y`.
    pub fn verify(&self) -> Result<()> {
        let member = self.membership();
        for &s in &self.sets {
            let mut bits = s;
            while bits != 0 {
                let x = bits & bits.wrapping_neg();
                if !member[(s ^ x) as usize] {
                    return Err(Error::AxiomViolation {
                        axiom: "hereditary",
                        first: s,
                        second: s ^ x,
                    });
                }
                bits ^= x;
            }
        }

        let size = 1usize << self.n;
        // best[A]: one independent subset of A of maximum size
        let mut best = vec![0u32; size];
        for a in 1..size {
            if member[a] {
                best[a] = a as u32;
                continue;
            }
            let mut bits = a as u32;
            let mut pick = 0u32;
            while bits != 0 {
                let x = bits & bits.wrapping_neg();
                let cand = best[a ^ x as usize];
                if cand.count_ones() > pick.count_ones() {
                    pick = cand;
                }
                bits ^= x;
            }
            best[a] = pick;
        }
        let rank = |a: usize| best[a].count_ones();
        for a in 0..size {
            let ra = rank(a);
            for x in 0..self.n {
                let bx = 1usize << x;
                if a & bx != 0 || rank(a | bx) != ra {
                    continue;
                }
                for y in (x + 1)..self.n {
                    let by = 1usize << y;
                    if a & by != 0 || rank(a | by) != ra {
                        continue;
                    }
                    if rank(a | bx | by) > ra {
                        return Err(Error::AxiomViolation {
                            axiom: "exchange",
                            first: best[a],
                            second: best[a | bx | by],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn counts(&self) -> Vec<BigUint> {
        let mut counts = vec![0u64; self.n + 1];
        for &s in &self.sets {
            counts[s.count_ones() as usize] += 1;
        }
        counts.into_iter().map(BigUint::from).collect()
    }
}

/// Verify the axioms, then count by cardinality.
pub fn profile_from_set_system(sys: &SetSystem) -> Result<IndepProfile> {
    sys.verify()?;
    IndepProfile::new(sys.n, sys.counts())
}

/// `k (n-k) I(k)^2 >= (k+1)(n-k+1) I(k-1) I(k+1)` for `1 <= k <= n-1`, exactly.
pub fn mason_check(prof: &IndepProfile) -> LogConcavityCertificate {
    let n = prof.n;
    let rank = prof.rank();
    if let Some(k) = (0..=rank).find(|&k| prof.counts[k].is_zero()) {
        return LogConcavityCertificate {
            holds: false,
            first_violation: Some(k as i64),
            support_is_interval: false,
        };
    }
    for k in 1..n {
        let lhs = BigUint::from(k * (n - k)) * &prof.counts[k] * &prof.counts[k];
        let rhs = BigUint::from((k + 1) * (n - k + 1)) * &prof.counts[k - 1] * &prof.counts[k + 1];
        if lhs < rhs {
            return LogConcavityCertificate {
                holds: false,
                first_violation: Some(k as i64),
                support_is_interval: true,
            };
        }
    }
    LogConcavityCertificate::ok()
}

fn check_total(prof: &IndepProfile, include_zero: bool) -> Result<BigUint> {
    let total = prof.total(include_zero);
    if total.is_zero() {
        return Err(invalid("profile has no independent set of positive size"));
    }
    Ok(total)
}

/// `nu_M` on `{0..n}`; without `include_zero` the empty set is left out.
pub fn nu_distribution(prof: &IndepProfile, include_zero: bool) -> Result<DiscreteDist> {
    Ok(nu_exact(prof, include_zero)?.to_f64())
}

pub fn nu_exact(prof: &IndepProfile, include_zero: bool) -> Result<ExactDist> {
    let total = check_total(prof, include_zero)?;
    let masses = prof
        .counts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k == 0 && !include_zero {
                BigRational::zero()
            } else {
                big_ratio(c, &total)
            }
        })
        .collect();
    ExactDist::new(0, masses)
}

/// `p = (m+1) I(m+1) / ((m+1) I(m+1) + (n-m) I(m))`, which matches
/// `gamma[m+1]/gamma[m]` to `I(m+1)/I(m)`.
pub fn matroid_binomial_p(prof: &IndepProfile, m: usize) -> Result<BigRational> {
    check_m(prof, m)?;
    let a = BigUint::from(m + 1) * prof.count(m + 1);
    let b = BigUint::from(prof.n - m) * prof.count(m);
    Ok(big_ratio(&a, &(&a + b)))
}

fn check_m(prof: &IndepProfile, m: usize) -> Result<()> {
    if m >= prof.n {
        return Err(Error::NotApplicable(format!("need m <= n - 1 = {}", prof.n as i64 - 1)));
    }
    if prof.count(m + 1).is_zero() {
        return Err(Error::NotApplicable(format!("I({}) = 0", m + 1)));
    }
    Ok(())
}

/// Both binomial bounds in exact arithmetic: `(nu_m/gamma_m - 1, 1 - gamma_m/nu_m)`,
/// with `nu_m = I(m) / total`.
pub fn matroid_binomial_bounds_exact(
    prof: &IndepProfile,
    m: usize,
    include_zero: bool,
) -> Result<(BigRational, BigRational)> {
    let p = matroid_binomial_p(prof, m)?;
    let total = check_total(prof, include_zero)?;
    let gamma = ExactDist::binomial(prof.n as u64, &p)?;
    let nu_m = big_ratio(&prof.count(m), &total);
    let g = gamma.mass(m as i64);
    let ratio = nu_m / g;
    let first = &ratio - BigRational::one();
    let second = BigRational::one() - ratio.recip();
    Ok((first, second))
}

/// Binomial approximation of `nu_M` with the ratio-matched parameter.
pub fn matroid_binomial_bound(
    prof: &IndepProfile,
    m: usize,
    include_zero: bool,
    opts: &CertifyOptions,
) -> Result<BoundReport> {
    let p = matroid_binomial_p(prof, m)?;
    let (first, second) = matroid_binomial_bounds_exact(prof, m, include_zero)?;
    let nu_exact = nu_exact(prof, include_zero)?;
    let gamma_exact = ExactDist::binomial(prof.n as u64, &p)?;
    let nu = nu_exact.to_f64();
    let gamma = gamma_exact.to_f64();

    let mut report = certify_with(&gamma, &nu, Some(m as i64), opts);
    let named = [
        ("matroid_binomial_ratio", &first),
        ("matroid_binomial_reciprocal", &second),
    ];
    for (name, value) in named {
        let v = rational_to_f64(value);
        report.push_bound(if report.is_applicable() {
            NamedBound::claimed(name, v)
        } else {
            NamedBound::reported(name, v)
        });
    }
    let tv = gamma_exact.tv(&nu_exact);
    let dominated_exact = tv <= first.clone().max(BigRational::zero()) && tv <= second;
    report.set_oracle(TvInterval::exact(rational_to_f64(&tv)), opts.dominance_tolerance);
    report.details.insert("p".into(), rational_to_f64(&p));
    report.details.insert("m".into(), m as f64);
    report
        .details
        .insert("dominated_exact".into(), f64::from(u8::from(dominated_exact)));
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), gamma);
    Ok(report)
}

/// Poisson approximation with `lambda = (m+1) I(m+1) / I(m)` and bound
/// `m! e^lambda I(m) / (lambda^m total) - 1`.
pub fn matroid_poisson_bound(
    prof: &IndepProfile,
    m: usize,
    include_zero: bool,
    tail_budget: f64,
    opts: &CertifyOptions,
) -> Result<BoundReport> {
    check_m(prof, m)?;
    let total = check_total(prof, include_zero)?;
    let lambda_exact = big_ratio(&(BigUint::from(m + 1) * prof.count(m + 1)), &prof.count(m));
    let lambda = rational_to_f64(&lambda_exact);
    let ln_bound = ln_factorial(m as u64) + lambda + ln_big(&prof.count(m)) - m as f64 * lambda.ln() - ln_big(&total);
    let bound = ln_bound.exp_m1();

    let nu = nu_distribution(prof, include_zero)?;
    let mu = family_poisson(lambda, tail_budget)?;
    let mut report = certify_with(&mu, &nu, Some(m as i64), opts);
    report.push_bound(if report.is_applicable() {
        NamedBound::claimed("matroid_poisson", bound)
    } else {
        NamedBound::reported("matroid_poisson", bound)
    });
    report.set_oracle(tv_distance(&mu, &nu), opts.dominance_tolerance);
    report.details.insert("lambda".into(), lambda);
    report.details.insert("m".into(), m as f64);
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    Ok(report)
}

fn ln_big(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() && v > 0.0 => v.ln(),
        _ => {
            let shift = x.bits().saturating_sub(60);
            biguint_to_f64(&(x >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// `D = 2^n - sum_{k >= 0} I(k)`, the number of dependent subsets.
pub fn dependent_count(prof: &IndepProfile) -> BigUint {
    (BigUint::one() << prof.n) - prof.total(true)
}

/// `(1 - 2^{-n} D)^{-1} - 1` against `Binomial(n, 1/2)`.
///
/// Needs every category to satisfy `min(c_i, d_i) >= 2`, so that all sets of
/// size one or two are independent.
pub fn partition_half_bound(spec: &PartitionMatroidSpec) -> Result<f64> {
    Ok(rational_to_f64(&partition_half_bound_exact(spec)?))
}

pub fn partition_half_bound_exact(spec: &PartitionMatroidSpec) -> Result<BigRational> {
    if let Some((c, d)) = spec
        .sizes
        .iter()
        .zip(&spec.capacities)
        .find(|(c, d)| (**c).min(**d) < 2)
    {
        return Err(Error::NotApplicable(format!(
            "category of size {c} with capacity {d} has min(c, d) < 2"
        )));
    }
    let prof = profile_partition(spec);
    let full = BigUint::one() << prof.n;
    let total = prof.total(true);
    Ok(big_ratio(&full, &total) - BigRational::one())
}

/// Half-bound report; the oracle uses `nu` normalized over `k >= 0`.
pub fn partition_half_report(spec: &PartitionMatroidSpec, opts: &CertifyOptions) -> Result<BoundReport> {
    let bound = partition_half_bound_exact(spec)?;
    let prof = profile_partition(spec);
    let nu = nu_exact(&prof, true)?;
    let rho = ExactDist::binomial(prof.n as u64, &BigRational::new(BigInt::one(), BigInt::from(2)))?;
    let mut report = BoundReport::empty(mason_check(&prof));
    report.push_bound(NamedBound::claimed("partition_half", rational_to_f64(&bound)));
    let tv = rho.tv(&nu);
    report
        .details
        .insert("dependent_sets".into(), biguint_to_f64(&dependent_count(&prof)));
    report
        .details
        .insert("dominated_exact".into(), f64::from(u8::from(tv <= bound)));
    report.set_oracle(TvInterval::exact(rational_to_f64(&tv)), opts.dominance_tolerance);
    Ok(report)
}

/// `2^{2 - (1 - eps) n}` for the uniform matroid of rank `k`, valid when
/// `k >= n - eps n / log2(n) + 1` and `(1 - eps) n >= 1`.
pub fn uniform_rare_bound(n: usize, k: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps = {eps} outside (0, 1)")));
    }
    if k > n {
        return Err(invalid(format!("rank {k} exceeds n = {n}")));
    }
    if n < 2 {
        return Err(Error::NotApplicable("need n >= 2 for log2(n) > 0".into()));
    }
    let nf = n as f64;
    let threshold = nf - eps * nf / nf.log2() + 1.0;
    if (k as f64) < threshold {
        return Err(Error::NotApplicable(format!(
            "k = {k} < n - eps n / log2 n + 1 = {threshold}"
        )));
    }
    if (1.0 - eps) * nf < 1.0 {
        return Err(Error::NotApplicable("(1 - eps) n < 1".into()));
    }
    if k < 2 {
        return Err(Error::NotApplicable("rank must be at least 2".into()));
    }
    Ok((2.0 - (1.0 - eps) * nf).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn counts(p: &IndepProfile) -> Vec<u64> {
        p.counts().iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn uniform_profiles() {
        assert_eq!(counts(&profile_uniform(4, 4).unwrap()), [1, 4, 6, 4, 1]);
        assert_eq!(counts(&profile_uniform(4, 0).unwrap()), [1, 0, 0, 0, 0]);
        assert_eq!(counts(&profile_uniform(5, 2).unwrap()), [1, 5, 10, 0, 0, 0]);
        assert!(profile_uniform(3, 4).is_err());
    }

    #[test]
    fn partition_profiles() {
        let spec: PartitionMatroidSpec = "2:1,2:1".parse().unwrap();
        let p = profile_partition(&spec);
        assert_eq!(counts(&p), [1, 4, 4, 0, 0]);
        assert_eq!(profile_from_set_system(&spec.enumerate().unwrap()).unwrap(), p);
        let free: PartitionMatroidSpec = "2:2,3:3".parse().unwrap();
        assert_eq!(profile_partition(&free), profile_uniform(5, 5).unwrap());
        let single: PartitionMatroidSpec = "5:2".parse().unwrap();
        assert_eq!(counts(&profile_partition(&single)), [1, 5, 10, 0, 0, 0]);
        assert_eq!(spec.to_string(), "2:1,2:1");
    }

    #[test]
    fn set_systems() {
        let all = SetSystem::new(3, (0..8).collect()).unwrap();
        assert_eq!(counts(&profile_from_set_system(&all).unwrap()), [1, 3, 3, 1]);
        let forests = SetSystem::new(3, (0..7).collect()).unwrap();
        assert_eq!(counts(&profile_from_set_system(&forests).unwrap()), [1, 3, 3, 0]);
        // {0,1} cannot be used to augment {2}
        let bad = SetSystem::from_lists(None, &[vec![], vec![0], vec![1], vec![2], vec![0, 1]]).unwrap();
        let err = profile_from_set_system(&bad).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation { axiom: "exchange", .. }), "{err}");
        if let Error::AxiomViolation { first, second, .. } = err {
            assert!(first.count_ones() < second.count_ones());
        }
        let not_closed = SetSystem::from_lists(None, &[vec![], vec![0, 1], vec![0]]).unwrap();
        assert!(matches!(
            profile_from_set_system(&not_closed),
            Err(Error::AxiomViolation {
                axiom: "hereditary",
                first: 0b11,
                second: 0b10
            })
        ));
    }

    #[test]
    fn mason() {
        assert!(mason_check(&profile_uniform(4, 4).unwrap()).holds);
        assert!(mason_check(&IndepProfile::from_u64(4, &[1, 4, 4, 0, 0]).unwrap()).holds);
        let cert = mason_check(&IndepProfile::from_u64(4, &[1, 2, 4, 0, 0]).unwrap());
        assert!(!cert.holds);
        assert_eq!(cert.first_violation, Some(1));
    }

    #[test]
    fn nu_normalizations() {
        let p = IndepProfile::from_u64(4, &[1, 4, 4, 0, 0]).unwrap();
        assert_eq!(nu_distribution(&p, false).unwrap().masses(), &[0.0, 0.5, 0.5, 0.0, 0.0]);
        let free = profile_uniform(3, 3).unwrap();
        assert_eq!(
            nu_distribution(&free, true).unwrap().masses(),
            &[0.125, 0.375, 0.375, 0.125]
        );
        assert!(nu_distribution(&profile_uniform(3, 0).unwrap(), false).is_err());
    }

    #[test]
    fn binomial_bound_example() {
        let p = IndepProfile::from_u64(4, &[1, 4, 4, 0, 0]).unwrap();
        assert_eq!(matroid_binomial_p(&p, 1).unwrap(), ratio(2, 5));
        let (a, b) = matroid_binomial_bounds_exact(&p, 1, false).unwrap();
        assert_eq!(b, ratio(193, 625));
        assert!((rational_to_f64(&a) - 0.4468).abs() < 1e-4);
        let r = matroid_binomial_bound(&p, 1, false, &CertifyOptions::default()).unwrap();
        assert_eq!(r.oracle_tv.unwrap().upper, 0.3088);
        assert_eq!(r.details["dominated_exact"], 1.0);
        assert_eq!(r.dominated, Some(true));
    }

    #[test]
    fn binomial_bound_free_matroid() {
        let n = 5;
        let p = profile_uniform(n, n).unwrap();
        assert_eq!(matroid_binomial_p(&p, 1).unwrap(), ratio(1, 2));
        let (a, _) = matroid_binomial_bounds_exact(&p, 1, false).unwrap();
        assert_eq!(a, ratio(32, 31) - BigRational::one());
        let (a, b) = matroid_binomial_bounds_exact(&p, 1, true).unwrap();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn poisson_bound_example() {
        let p = IndepProfile::from_u64(4, &[1, 4, 4, 0, 0]).unwrap();
        let r = matroid_poisson_bound(&p, 1, false, 1e-12, &CertifyOptions::default()).unwrap();
        let b = r.corollary_bounds[0].raw;
        assert!((b - (2f64.exp() / 4.0 - 1.0)).abs() < 1e-14);
        assert_eq!(r.details["lambda"], 2.0);
        assert_eq!(r.dominated, Some(true));
        assert!(matroid_poisson_bound(&p, 2, false, 1e-12, &CertifyOptions::default()).is_err());
    }

    #[test]
    fn half_bounds() {
        let free: PartitionMatroidSpec = "3:3,2:2".parse().unwrap();
        assert_eq!(partition_half_bound(&free).unwrap(), 0.0);
        let u: PartitionMatroidSpec = "6:4".parse().unwrap();
        assert_eq!(dependent_count(&profile_partition(&u)), BigUint::from(7u32));
        let b = partition_half_bound(&u).unwrap();
        assert!((b - (64.0 / 57.0 - 1.0)).abs() < 1e-15);
        let r = partition_half_report(&u, &CertifyOptions::default()).unwrap();
        assert_eq!(r.dominated, Some(true));
        assert!((r.oracle_tv.unwrap().upper - 7.0 / 64.0).abs() < 1e-15);
        assert!(partition_half_bound(&"2:1,3:3".parse().unwrap())
            .unwrap_err()
            .is_not_applicable());
    }

    #[test]
    fn half_bound_fails_without_the_empty_set() {
        // against nu normalized over k >= 1 the TV is 1/8 > 64/57 - 1
        let u = profile_uniform(6, 4).unwrap();
        let nu = nu_exact(&u, false).unwrap();
        let rho = ExactDist::binomial(6, &ratio(1, 2)).unwrap();
        assert_eq!(rho.tv(&nu), ratio(1, 8));
        assert!(ratio(1, 8) > partition_half_bound_exact(&"6:4".parse().unwrap()).unwrap());
    }

    #[test]
    fn rare_bound() {
        // n = 16, eps = 1/2: k >= 16 - 2 + 1 = 15
        let b = uniform_rare_bound(16, 15, 0.5).unwrap();
        assert_eq!(b, 2f64.powi(-6));
        let half = partition_half_bound(&"16:15".parse().unwrap()).unwrap();
        assert!(b >= half);
        assert!(uniform_rare_bound(16, 12, 0.5).unwrap_err().is_not_applicable());
    }

    #[test]
    fn profile_serde_round_trip() {
        let p = profile_uniform(80, 40).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains('"'));
        let back: IndepProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
