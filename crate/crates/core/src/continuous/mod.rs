//! Continuous regime: exponential approximation in Kolmogorov distance,
//! the density form of the relative log-concavity bound, and Gamma-Gamma
//! comparisons.
//!
//! Gamma laws are rate-parameterized throughout; see [`GammaParams`].

mod density;
mod gamma_fn;
pub mod quadrature;

pub use density::{builtin, gamma_cdf, tilted_normalizer, Density, FnDensity, GammaParams, BUILTIN_NAMES};
pub use gamma_fn::{regularized_lower, regularized_upper};

use crate::dist::TvInterval;
use crate::error::{invalid, Error, Result};
use crate::logconcave::LogConcavityCertificate;
use crate::relbound::{BoundReport, CertifyOptions, NamedBound};
use quadrature::{integrate, DEFAULT_ABS_TOL};

const GRID_POINTS: usize = 4000;
const TAIL_EPS: f64 = 1e-14;

fn attested(holds: bool) -> LogConcavityCertificate {
    LogConcavityCertificate {
        holds,
        first_violation: None,
        support_is_interval: true,
    }
}

fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    let glo = g(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid).signum() == glo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `sup_x |F(x) - G(x)|` on `[0, inf)`: grid search plus bisection on the
/// sign changes of `f - g`.
pub fn kolmogorov_oracle(nu: &dyn Density, gamma: &dyn Density) -> Result<TvInterval> {
    let upper_limit = |d: &dyn Density| -> Result<f64> {
        let mut x = 1.0;
        loop {
            let tail = match d.cdf(x) {
                Some(c) => 1.0 - c,
                None => integrate(|t| d.pdf(t), x, f64::INFINITY, DEFAULT_ABS_TOL)?.value,
            };
            if tail < TAIL_EPS || x > 1e12 {
                return Ok(x);
            }
            x *= 2.0;
        }
    };
    let hi = upper_limit(nu)?.max(upper_limit(gamma)?);
    let cdf = |d: &dyn Density, x: f64| -> Result<f64> {
        match d.cdf(x) {
            Some(c) => Ok(c),
            None => Ok(integrate(|t| d.pdf(t), 0.0, x, DEFAULT_ABS_TOL)?.value),
        }
    };
    let h = |x: f64| -> Result<f64> { Ok(cdf(nu, x)? - cdf(gamma, x)?) };
    let dh = |x: f64| nu.pdf(x) - gamma.pdf(x);
    let step = hi / GRID_POINTS as f64;
    let mut best = 0.0f64;
    let mut prev = (0.0f64, dh(step * 1e-9));
    for i in 1..=GRID_POINTS {
        let x = i as f64 * step;
        best = best.max(h(x)?.abs());
        let d = dh(x);
        if d.signum() != prev.1.signum() && d != 0.0 && prev.1 != 0.0 {
            let root = bisect(dh, prev.0.max(step * 1e-9), x);
            best = best.max(h(root)?.abs());
        }
        prev = (x, d);
    }
    Ok(TvInterval {
        lower: best,
        upper: best + 2.0 * DEFAULT_ABS_TOL,
    })
}

/// Exponential approximation of a log-concave density on `[0, inf)` with rate
/// `r = -f'(0) / f(0)`: `d_K(nu, Exp(r)) <= f(0) / r - 1`.
///
/// The report's oracle interval holds the Kolmogorov distance.
pub fn exp_kolmogorov_bound(d: &dyn Density, opts: &CertifyOptions) -> Result<BoundReport> {
    if d.domain().0 != 0.0 {
        return Err(invalid(format!("{} must be supported on [0, inf)", d.name())));
    }
    let (f0, df0) = (d.pdf(0.0), d.dpdf(0.0));
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(Error::Hypothesis(format!("f(0) = {f0} must be finite and positive")));
    }
    if !(df0.is_finite() && df0 < 0.0) {
        return Err(Error::Hypothesis(format!("f'(0) = {df0} must be finite and negative")));
    }
    if !d.log_concave() {
        return Err(Error::Hypothesis(format!("{} is not log-concave", d.name())));
    }
    let rate = -df0 / f0;
    let gamma = GammaParams::exponential(rate)?;
    let mut report = BoundReport::empty(attested(true));
    report.push_bound(NamedBound::claimed("kolmogorov", f0 / rate - 1.0));
    report.set_oracle(kolmogorov_oracle(d, &gamma)?, opts.dominance_tolerance);
    report.details.insert("rate".into(), rate);
    report.details.insert("f0".into(), f0);
    Ok(report)
}

/// The region where `A e^{(x - z) delta} > 1`, intersected with `[lo, hi]`.
fn positive_region(ln_a: f64, delta: f64, z: f64, (lo, hi): (f64, f64)) -> Option<(f64, f64)> {
    let (a, b) = if delta == 0.0 {
        if ln_a > 0.0 {
            (lo, hi)
        } else {
            return None;
        }
    } else {
        let x0 = z - ln_a / delta;
        if delta > 0.0 {
            (x0.max(lo), hi)
        } else {
            (lo, x0.min(hi))
        }
    };
    (a < b).then_some((a, b))
}

/// Both integrals of the density form of the bound at anchor `z`:
/// `int ((f_nu(z)/f_mu(z)) e^{(x-z) delta} - 1)_+ dmu` and
/// `int (1 - (f_mu(z)/f_nu(z)) e^{-(x-z) delta})_+ dnu`, where `delta` is the
/// score gap at `z`.
pub fn tv_bound_continuous(mu: &dyn Density, nu: &dyn Density, z: f64) -> Result<(f64, f64)> {
    let (lm, ln) = (mu.ln_pdf(z), nu.ln_pdf(z));
    if !(lm.is_finite() && ln.is_finite()) {
        return Err(invalid(format!("densities at z = {z} must be finite and positive")));
    }
    let delta = nu.score(z) - mu.score(z);
    let ln_a = ln - lm;
    let first = match positive_region(ln_a, delta, z, mu.domain()) {
        None => 0.0,
        Some((a, b)) => {
            integrate(
                |x| {
                    let lf = mu.ln_pdf(x);
                    if lf == f64::NEG_INFINITY {
                        return 0.0;
                    }
                    (ln_a + (x - z) * delta + lf).exp() - lf.exp()
                },
                a,
                b,
                DEFAULT_ABS_TOL,
            )?
            .value
        }
    };
    let second = match positive_region(ln_a, delta, z, nu.domain()) {
        None => 0.0,
        Some((a, b)) => {
            integrate(
                |x| {
                    let lf = nu.ln_pdf(x);
                    if lf == f64::NEG_INFINITY {
                        return 0.0;
                    }
                    lf.exp() - (lf - ln_a - (x - z) * delta).exp()
                },
                a,
                b,
                DEFAULT_ABS_TOL,
            )?
            .value
        }
    };
    Ok((first.max(0.0), second.max(0.0)))
}

/// Matched-score case: `(A - 1) min (1 - 1/A)` with `A = f_nu(z) / f_mu(z) >= 1`.
pub fn tv_bound_matched(mu: &dyn Density, nu: &dyn Density, z: f64) -> Result<f64> {
    let (lm, ln) = (mu.ln_pdf(z), nu.ln_pdf(z));
    if !(lm.is_finite() && ln.is_finite()) {
        return Err(invalid(format!("densities at z = {z} must be finite and positive")));
    }
    let (sn, sm) = (nu.score(z), mu.score(z));
    let scale = sn.abs().max(sm.abs()).max(1.0);
    if (sn - sm).abs() > 1e-10 * scale {
        return Err(Error::Hypothesis(format!("scores differ at z = {z}: {sn} vs {sm}")));
    }
    let ln_ratio = ln - lm;
    if ln_ratio < -1e-12 {
        return Err(Error::Hypothesis(format!(
            "f_nu(z) / f_mu(z) = {} < 1 at a matched score",
            ln_ratio.exp()
        )));
    }
    Ok(-(-ln_ratio.max(0.0)).exp_m1())
}

/// Points in `(0, inf)` where the two Gamma densities cross.
pub fn gamma_crossings(a: &GammaParams, b: &GammaParams) -> Vec<f64> {
    let dk = a.kappa() - b.kappa();
    let dl = a.lambda() - b.lambda();
    let c = a.ln_norm() - b.ln_norm();
    let log_ratio = move |x: f64| dk * x.ln() - dl * x + c;
    if dk == 0.0 {
        return if dl != 0.0 && c / dl > 0.0 {
            vec![c / dl]
        } else {
            Vec::new()
        };
    }
    let at_zero = -dk.signum();
    let at_inf = if dl != 0.0 { -dl.signum() } else { dk.signum() };
    let stationary = dl / dk;
    let mut pieces = Vec::new();
    if stationary > 0.0 && dl != 0.0 {
        let xs = dk / dl;
        let mid = log_ratio(xs);
        pieces.push((at_zero, 0.0, mid.signum(), xs));
        pieces.push((mid.signum(), xs, at_inf, f64::INFINITY));
    } else {
        pieces.push((at_zero, 0.0, at_inf, f64::INFINITY));
    }
    let mut roots = Vec::new();
    for (s_lo, lo, s_hi, hi) in pieces {
        if s_lo == s_hi || s_lo == 0.0 || s_hi == 0.0 {
            continue;
        }
        // finite bracket with the limiting signs, then bisection in log x
        let anchor = if hi.is_finite() {
            hi
        } else if lo > 0.0 {
            lo
        } else {
            1.0
        };
        let mut left = if lo > 0.0 { lo } else { anchor / 2.0 };
        while lo == 0.0 && log_ratio(left).signum() != s_lo && left > 1e-300 {
            left /= 2.0;
        }
        let mut right = if hi.is_finite() { hi } else { anchor * 2.0 };
        while hi.is_infinite() && log_ratio(right).signum() != s_hi && right < 1e300 {
            right *= 2.0;
        }
        let u = bisect(|u: f64| log_ratio(u.exp()), left.ln(), right.ln());
        roots.push(u.exp());
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Exact TV between two Gamma laws: CDF differences over the intervals where
/// `f_a > f_b`, split at the crossings.
pub fn tv_gamma_quadrature(a: &GammaParams, b: &GammaParams) -> TvInterval {
    if a == b {
        return TvInterval::exact(0.0);
    }
    let crossings = gamma_crossings(a, b);
    let mut cuts = vec![0.0];
    cuts.extend(&crossings);
    cuts.push(f64::INFINITY);
    let ln_ratio = |x: f64| a.ln_pdf(x) - b.ln_pdf(x);
    let mut tv = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let probe = if hi.is_infinite() {
            2.0 * lo + 1.0
        } else if lo == 0.0 {
            hi / 2.0
        } else {
            (lo * hi).sqrt()
        };
        if ln_ratio(probe) > 0.0 {
            let mass = |g: &GammaParams| g.upper_tail(lo) - g.upper_tail(hi);
            tv += mass(a) - mass(b);
        }
    }
    TvInterval {
        lower: (tv - 1e-12).max(0.0),
        upper: (tv + 1e-12).min(1.0),
    }
}

/// Gamma corollary, case (i): with `z = (k1 - k2) / (l1 - l2) > 0` the scores
/// match at `z`, and the bound is `(A - 1) min (1 - 1/A)` with `A` the exact
/// density ratio at `z`. The pair is ordered so the larger shape plays `nu`.
pub fn gamma_bound_case_i(a: &GammaParams, b: &GammaParams, opts: &CertifyOptions) -> Result<BoundReport> {
    let dk = a.kappa() - b.kappa();
    let dl = a.lambda() - b.lambda();
    if dk == 0.0 || dl == 0.0 || dk / dl <= 0.0 {
        return Err(Error::NotApplicable(format!(
            "(k1 - k2) / (l1 - l2) = {dk} / {dl} is not positive"
        )));
    }
    let z = dk / dl;
    let swapped = dk < 0.0;
    let (nu, mu) = if swapped { (b, a) } else { (a, b) };
    let ln_ratio = nu.ln_norm() - mu.ln_norm() + (nu.kappa() - mu.kappa()) * (z.ln() - 1.0);
    let ratio = ln_ratio.exp();

    let mut report = BoundReport::empty(attested(true));
    report.simplified = Some((-(-ln_ratio).exp_m1()).clamp(0.0, 1.0));
    report.push_bound(NamedBound::claimed("ratio", ln_ratio.exp_m1()));
    report.push_bound(NamedBound::claimed("reciprocal", -(-ln_ratio).exp_m1()));
    // display without the Gamma-function normalizers, in the given orientation
    let ln_display = a.kappa() * a.lambda().ln() - b.kappa() * b.lambda().ln() + dk * (z.ln() - 1.0);
    report.push_bound(NamedBound::reported(
        "display",
        ln_display.exp_m1().min(-(-ln_display).exp_m1()),
    ));
    report.details.insert("z".into(), z);
    report.details.insert("swapped".into(), f64::from(u8::from(swapped)));
    report.details.insert("ratio_at_z".into(), ratio);
    report
        .details
        .insert("matched_density_route".into(), tv_bound_matched(mu, nu, z)?);
    for (i, c) in gamma_crossings(a, b).into_iter().enumerate() {
        report.details.insert(format!("crossing_{}", i + 1), c);
    }
    report.set_oracle(tv_gamma_quadrature(a, b), opts.dominance_tolerance);
    Ok(report)
}

/// Gamma corollary, case (ii), evaluated as displayed:
/// `|(z/e)^{k1-k2} - 1| + (z/e)^{k1-k2} (1 + k1 + k2) 2^{k1+1} |(k1-k2)/(l2 z) + (l2-l1)/l2|^{1/2}`,
/// provided `(k1 - k2)/z + l2 - l1 <= l2 / 4`.
pub fn gamma_bound_case_ii(a: &GammaParams, b: &GammaParams, z: f64) -> Result<f64> {
    let (k1, l1, k2, l2) = (a.kappa(), a.lambda(), b.kappa(), b.lambda());
    if !(z.is_finite() && z > 0.0) {
        return Err(invalid(format!("z = {z} must be positive")));
    }
    let slope = (k1 - k2) / z + l2 - l1;
    if slope > l2 / 4.0 {
        return Err(Error::Hypothesis(format!(
            "(k1 - k2)/z + l2 - l1 = {slope} exceeds l2/4 = {}",
            l2 / 4.0
        )));
    }
    let t = (z / std::f64::consts::E).powf(k1 - k2);
    Ok((t - 1.0).abs() + t * (1.0 + k1 + k2) * 2f64.powf(k1 + 1.0) * (slope / l2).abs().sqrt())
}

/// Equal shapes: `(1 + 2k) 2^{k+1} |(l2 - l1) / l2|^{1/2}`, given `4 (l2 - l1) <= l2`.
pub fn gamma_bound_equal_shapes(kappa: f64, l1: f64, l2: f64) -> Result<f64> {
    GammaParams::new(kappa, l1)?;
    GammaParams::new(kappa, l2)?;
    if 4.0 * (l2 - l1) > l2 {
        return Err(Error::Hypothesis(format!(
            "4 (l2 - l1) = {} exceeds l2 = {l2}",
            4.0 * (l2 - l1)
        )));
    }
    Ok((1.0 + 2.0 * kappa) * 2f64.powf(kappa + 1.0) * ((l2 - l1) / l2).abs().sqrt())
}

/// Equal rates, `z = 4 / lambda`:
/// `|(e l/4)^{k2-k1} - 1| + (e l/4)^{k2-k1} (1 + k1 + k2) 2^{k1+1} |k1 - k2|^{1/2}`.
pub fn gamma_bound_equal_rates(lambda: f64, k1: f64, k2: f64) -> Result<f64> {
    GammaParams::new(k1, lambda)?;
    GammaParams::new(k2, lambda)?;
    if k1 - k2 > 1.0 {
        return Err(Error::Hypothesis(format!(
            "k1 - k2 = {} exceeds 1 at z = 4 / lambda",
            k1 - k2
        )));
    }
    let t = (std::f64::consts::E * lambda / 4.0).powf(k2 - k1);
    Ok((t - 1.0).abs() + t * (1.0 + k1 + k2) * 2f64.powf(k1 + 1.0) * (k1 - k2).abs().sqrt())
}

/// Case (ii) with its specializations where they apply, against the exact TV.
pub fn gamma_case_ii_report(a: &GammaParams, b: &GammaParams, z: f64, opts: &CertifyOptions) -> Result<BoundReport> {
    let bound = gamma_bound_case_ii(a, b, z)?;
    let mut report = BoundReport::empty(attested(a.kappa() >= b.kappa()));
    report.push_bound(NamedBound::claimed("case_ii", bound));
    if a.kappa() == b.kappa() {
        if let Ok(v) = gamma_bound_equal_shapes(a.kappa(), a.lambda(), b.lambda()) {
            report.push_bound(NamedBound::claimed("equal_shapes", v));
        }
    }
    if a.lambda() == b.lambda() {
        if let Ok(v) = gamma_bound_equal_rates(a.lambda(), a.kappa(), b.kappa()) {
            report.push_bound(NamedBound::claimed("equal_rates", v));
        }
    }
    report.details.insert("z".into(), z);
    report.set_oracle(tv_gamma_quadrature(a, b), opts.dominance_tolerance);
    Ok(report)
}
