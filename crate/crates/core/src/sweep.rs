//! Randomized dominance sweeps.
//!
//! Instance `i` of a sweep with seed `s` draws from `ChaCha8Rng` seeded with
//! `s` on stream `i`, so results do not depend on scheduling. Instances run
//! on rayon when the `parallel` feature is on and are merged in index order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compound::{geometric_bound_compound_poisson, CompoundPoissonSpec};
use crate::continuous::{gamma_bound_case_i, GammaParams};
use crate::dist::{tv_distance, DiscreteDist, DEFAULT_TAIL_BUDGET};
use crate::error::{invalid, Error, Result};
use crate::intrinsic::{iv_box, poisson_iv_bound};
use crate::matroids::{matroid_binomial_bound, profile_partition, PartitionMatroidSpec};
use crate::relbound::{theorem1_bounds, BoundReport, CertifyOptions, DOMINANCE_TOLERANCE};
use crate::sums::{pb_binomial_report, BernoulliVector};

/// Largest window drawn by the dominance suite.
pub const MAX_WINDOW: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
    #[cfg(not(feature = "parallel"))]
    #[default]
    SequentialOnly,
}

impl Execution {
    fn is_parallel(self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self == Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Dominance,
    PoissonBinomial,
    Matroid,
    Iv,
    Compound,
    Gamma,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Dominance,
        Suite::PoissonBinomial,
        Suite::Matroid,
        Suite::Iv,
        Suite::Compound,
        Suite::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dominance => "dominance",
            Suite::PoissonBinomial => "poisson-binomial",
            Suite::Matroid => "matroid",
            Suite::Iv => "iv",
            Suite::Compound => "compound",
            Suite::Gamma => "gamma",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite {s:?}")))
    }
}

/// Everything needed to replay one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepCase {
    Dominance {
        mu: DiscreteDist,
        nu: DiscreteDist,
        ell: Option<i64>,
    },
    PoissonBinomial {
        p: Vec<f64>,
    },
    Matroid {
        sizes: Vec<usize>,
        capacities: Vec<usize>,
        m: usize,
    },
    Iv {
        sides: Vec<f64>,
        m: usize,
    },
    Compound {
        lambda: f64,
        severity: Vec<f64>,
    },
    Gamma {
        a: GammaParams,
        b: GammaParams,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub index: usize,
    pub case: SweepCase,
    pub bound: f64,
    pub tv: f64,
    pub passed: bool,
}

impl SweepOutcome {
    pub fn slack(&self) -> f64 {
        self.bound - self.tv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub suite: Suite,
    pub seed: u64,
    pub instances: usize,
    pub dominance_passes: usize,
    pub dominance_failures: Vec<SweepOutcome>,
    /// Minimum of `bound - tv` over instances.
    pub worst_slack: Option<f64>,
}

impl SweepReport {
    pub fn empty(suite: Suite, seed: u64) -> Self {
        Self {
            suite,
            seed,
            instances: 0,
            dominance_passes: 0,
            dominance_failures: Vec::new(),
            worst_slack: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.dominance_failures.is_empty()
    }

    fn absorb(&mut self, o: SweepOutcome) {
        self.instances += 1;
        let s = o.slack();
        self.worst_slack = Some(self.worst_slack.map_or(s, |w| w.min(s)));
        if o.passed {
            self.dominance_passes += 1;
        } else {
            self.dominance_failures.push(o);
        }
    }
}

pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random pair with `nu = e^{-V} mu` for a convex `V`, sometimes restricted
/// to a sub-window, plus a random valid anchor.
pub fn random_dominance_case<R: Rng>(rng: &mut R) -> SweepCase {
    let len = rng.random_range(2..=MAX_WINDOW);
    let offset = rng.random_range(-5..=5i64);
    let mu_w: Vec<f64> = (0..len).map(|_| rng.random_range(-3.0..3.0f64).exp()).collect();
    let (lo, hi) = if rng.random_bool(0.3) {
        let a = rng.random_range(0..len);
        let b = rng.random_range(a..len);
        (a, b)
    } else {
        (0, len - 1)
    };
    let mut slopes: Vec<f64> = (lo..hi).map(|_| rng.random_range(-2.0..2.0)).collect();
    slopes.sort_by(f64::total_cmp);
    let mut v = 0.0;
    let mut nu_w = vec![0.0; len];
    for k in lo..=hi {
        if k > lo {
            v += slopes[k - lo - 1];
        }
        nu_w[k] = (-v).exp() * mu_w[k];
    }
    let mu = DiscreteDist::new(offset, mu_w).expect("positive weights");
    let nu = DiscreteDist::new(offset, nu_w).expect("positive weights");
    let ell = (hi > lo).then(|| offset + rng.random_range(lo..hi) as i64);
    SweepCase::Dominance { mu, nu, ell }
}

fn random_case<R: Rng>(suite: Suite, rng: &mut R) -> SweepCase {
    match suite {
        Suite::Dominance => random_dominance_case(rng),
        Suite::PoissonBinomial => {
            let n = rng.random_range(1..=30);
            SweepCase::PoissonBinomial {
                p: (0..n).map(|_| rng.random_range(0.0..0.95)).collect(),
            }
        }
        Suite::Matroid => loop {
            let blocks = rng.random_range(1..=4);
            let sizes: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=4)).collect();
            let capacities: Vec<usize> = sizes.iter().map(|&s| rng.random_range(1..=s)).collect();
            let rank: usize = capacities.iter().sum();
            if rank >= 1 {
                break SweepCase::Matroid {
                    m: rng.random_range(0..rank),
                    sizes,
                    capacities,
                };
            }
        },
        Suite::Iv => {
            let n = rng.random_range(1..=8);
            let sides: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..2.0)).collect();
            SweepCase::Iv {
                m: rng.random_range(0..n),
                sides,
            }
        }
        Suite::Compound => loop {
            // log-concave severity from a concave log-profile
            let len = rng.random_range(1..=5);
            let mut slopes: Vec<f64> = (0..len).map(|_| rng.random_range(-3.0..1.0)).collect();
            slopes.sort_by(|a, b| b.total_cmp(a));
            let mut w = vec![1.0];
            for s in slopes {
                w.push(w.last().unwrap() * f64::exp(s));
            }
            let total: f64 = w.iter().sum();
            let severity: Vec<f64> = w.iter().map(|x| x / total).collect();
            let lambda = rng.random_range(0.05..6.0);
            let f1 = severity.get(1).copied().unwrap_or(0.0);
            let f2 = severity.get(2).copied().unwrap_or(0.0);
            if lambda * f1 * f1 >= 2.0 * f2 && lambda * f1 < 1.0 {
                break SweepCase::Compound { lambda, severity };
            }
        },
        Suite::Gamma => loop {
            let a = GammaParams::new(rng.random_range(0.5..5.0), rng.random_range(0.3..5.0)).expect("positive");
            let b = GammaParams::new(rng.random_range(0.5..5.0), rng.random_range(0.3..5.0)).expect("positive");
            let (dk, dl) = (a.kappa() - b.kappa(), a.lambda() - b.lambda());
            if dk.abs() > 1e-3 && dl.abs() > 1e-3 && dk / dl > 0.0 {
                break SweepCase::Gamma { a, b };
            }
        },
    }
}

fn from_report(index: usize, case: SweepCase, r: &BoundReport) -> Result<SweepOutcome> {
    let (Some(bound), Some(tv), Some(passed)) = (r.best_bound(), r.oracle_tv, r.dominated) else {
        return Err(Error::NotApplicable(
            r.reason.clone().unwrap_or_else(|| "report carries no verdict".into()),
        ));
    };
    Ok(SweepOutcome {
        index,
        case,
        bound,
        tv: tv.upper,
        passed,
    })
}

/// Evaluate one case; errors mean the instance could not be evaluated at all.
pub fn evaluate(index: usize, case: SweepCase, opts: &CertifyOptions) -> Result<SweepOutcome> {
    match &case {
        SweepCase::Dominance { mu, nu, ell } => {
            let tv = tv_distance(mu, nu).upper;
            let bound = match ell {
                Some(l) => {
                    let (b_nu, b_mu) = theorem1_bounds(mu, nu, *l)?;
                    b_nu.min(b_mu)
                }
                None => {
                    let (k, _) = nu.support().expect("non-empty");
                    1.0 - mu.mass(k)
                }
            };
            Ok(SweepOutcome {
                index,
                passed: bound >= tv - DOMINANCE_TOLERANCE,
                case,
                bound,
                tv,
            })
        }
        SweepCase::PoissonBinomial { p } => {
            let r = pb_binomial_report(&BernoulliVector::new(p.clone())?, opts);
            from_report(index, case, &r)
        }
        SweepCase::Matroid { sizes, capacities, m } => {
            let spec = PartitionMatroidSpec::new(sizes.clone(), capacities.clone())?;
            let r = matroid_binomial_bound(&profile_partition(&spec), *m, true, opts)?;
            from_report(index, case, &r)
        }
        SweepCase::Iv { sides, m } => {
            let r = poisson_iv_bound(&iv_box(sides)?, *m, DEFAULT_TAIL_BUDGET, opts)?;
            from_report(index, case, &r)
        }
        SweepCase::Compound { lambda, severity } => {
            let spec = CompoundPoissonSpec::from_masses(*lambda, severity)?;
            let r = geometric_bound_compound_poisson(&spec, DEFAULT_TAIL_BUDGET, opts)?;
            from_report(index, case, &r)
        }
        SweepCase::Gamma { a, b } => from_report(index, case.clone(), &gamma_bound_case_i(a, b, opts)?),
    }
}

pub fn run_instance(suite: Suite, seed: u64, index: usize, opts: &CertifyOptions) -> Result<SweepOutcome> {
    let case = random_case(suite, &mut instance_rng(seed, index));
    evaluate(index, case, opts)
}

pub fn run_sweep(suite: Suite, n: usize, seed: u64, exec: Execution, opts: &CertifyOptions) -> Result<SweepReport> {
    let outcomes: Vec<Result<SweepOutcome>> = if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            (0..n)
                .into_par_iter()
                .map(|i| run_instance(suite, seed, i, opts))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            unreachable!("parallel execution without the parallel feature")
        }
    } else {
        (0..n).map(|i| run_instance(suite, seed, i, opts)).collect()
    };
    let mut report = SweepReport::empty(suite, seed);
    for o in outcomes {
        report.absorb(o?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_a_short_sweep() {
        for suite in Suite::ALL {
            let r = run_sweep(suite, 40, 11, Execution::default(), &CertifyOptions::default()).unwrap();
            assert_eq!(r.instances, 40);
            assert!(r.all_passed(), "{suite}: {:?}", r.dominance_failures.first());
        }
    }

    #[test]
    fn sequential_and_default_agree() {
        let opts = CertifyOptions::default();
        let a = run_sweep(Suite::Dominance, 64, 3, Execution::Sequential, &opts).unwrap();
        let b = run_sweep(Suite::Dominance, 64, 3, Execution::default(), &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn instances_replay() {
        let opts = CertifyOptions::default();
        let r = run_instance(Suite::Gamma, 9, 5, &opts).unwrap();
        let again = evaluate(5, r.case.clone(), &opts).unwrap();
        assert_eq!(r, again);
        assert_eq!("poisson-binomial".parse::<Suite>().unwrap(), Suite::PoissonBinomial);
        assert!("nope".parse::<Suite>().is_err());
    }
}
