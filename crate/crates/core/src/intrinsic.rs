//! Intrinsic volumes of boxes, cubes, balls and their products, and the
//! intrinsic-volume random variable `P[Z_K = j] = V_j(K) / W(K)`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::dist::{family_poisson, DiscreteDist};
use crate::error::{invalid, Error, Result};
use crate::numeric::{choose_f64, compensated_sum, ln_factorial};
use crate::relbound::{certify_with, BoundReport, CertifyOptions, NamedBound};

/// `V_0..V_n` of a convex body and `W = sum V_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IVSequence {
    pub n: usize,
    pub v: Vec<f64>,
    pub w: f64,
    /// Side lengths when the body is a box `[0, s_1] x ... x [0, s_n]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_sides: Option<Vec<f64>>,
}

impl IVSequence {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(invalid("empty intrinsic volume sequence"));
        }
        if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("intrinsic volumes must be finite and non-negative"));
        }
        if v[0] != 1.0 {
            return Err(invalid("V_0 must be 1 for a non-empty body"));
        }
        let w = compensated_sum(v.iter().copied());
        Ok(Self {
            n: v.len() - 1,
            v,
            w,
            box_sides: None,
        })
    }

    /// A single point: `V = (1)`.
    pub fn point() -> Self {
        Self::new(vec![1.0]).expect("valid")
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v.get(j).copied().unwrap_or(0.0)
    }

    /// `V_j(s K) = s^j V_j(K)`.
    pub fn dilate(&self, s: f64) -> Self {
        let v: Vec<f64> = self.v.iter().enumerate().map(|(j, x)| x * s.powi(j as i32)).collect();
        Self {
            w: compensated_sum(v.iter().copied()),
            v,
            n: self.n,
            box_sides: self.box_sides.as_ref().map(|b| b.iter().map(|x| x * s).collect()),
        }
    }

    pub fn is_segment(&self) -> bool {
        self.box_sides.as_ref().is_some_and(|b| b.len() == 1)
    }
}

/// Elementary symmetric functions: coefficients of `prod (1 + s_i x)`.
fn elementary_symmetric<T>(s: &[T]) -> Vec<T>
where
    T: Clone + Zero + One + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let mut e = vec![T::one()];
    for si in s {
        e.push(T::zero());
        for j in (1..e.len()).rev() {
            e[j] = e[j].clone() + si.clone() * e[j - 1].clone();
        }
    }
    e
}

/// Box `[0, s_1] x ... x [0, s_n]`: `V_j = e_j(s)`, `W = prod (1 + s_i)`.
pub fn iv_box(s: &[f64]) -> Result<IVSequence> {
    if let Some(x) = s.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(invalid(format!("box side {x} must be positive")));
    }
    let v = elementary_symmetric(s);
    let w = compensated_sum(v.iter().copied());
    let product: f64 = s.iter().map(|x| x.ln_1p()).sum::<f64>().exp();
    if (w - product).abs() > 1e-12 * product {
        return Err(Error::Numerical(format!(
            "sum of V_j = {w} differs from prod(1 + s_i) = {product}"
        )));
    }
    Ok(IVSequence {
        n: s.len(),
        v,
        w,
        box_sides: Some(s.to_vec()),
    })
}

/// Exact intrinsic volumes of a box with rational sides.
pub fn iv_box_exact(s: &[BigRational]) -> Result<Vec<BigRational>> {
    if s.iter().any(|x| !x.is_positive()) {
        return Err(invalid("box sides must be positive"));
    }
    Ok(elementary_symmetric(s))
}

/// Cube of side `s`: `V_j = s^j C(n, j)`.
pub fn iv_cube(n: usize, s: f64) -> Result<IVSequence> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid(format!("cube side {s} must be positive")));
    }
    let v: Vec<f64> = (0..=n)
        .map(|j| choose_f64(n as u64, j as u64) * s.powi(j as i32))
        .collect();
    Ok(IVSequence {
        n,
        w: compensated_sum(v.iter().copied()),
        v,
        box_sides: Some(vec![s; n]),
    })
}

/// `ln kappa_m` with `kappa_m = pi^{m/2} / Gamma(1 + m/2)`, the volume of the unit `m`-ball.
pub fn ln_kappa(m: usize) -> f64 {
    let h = m as f64 / 2.0;
    h * PI.ln() - ln_gamma(1.0 + h)
}

/// Unit ball in `R^n`: `V_j = C(n, j) kappa_n / kappa_{n-j}`.
pub fn iv_ball(n: usize) -> Result<IVSequence> {
    if n == 0 {
        return Err(invalid("ball dimension must be at least 1"));
    }
    let ln_kn = ln_kappa(n);
    let v: Vec<f64> = (0..=n)
        .map(|j| {
            if j == 0 {
                1.0
            } else {
                choose_f64(n as u64, j as u64) * (ln_kn - ln_kappa(n - j)).exp()
            }
        })
        .collect();
    IVSequence::new(v)
}

pub fn z_dist(iv: &IVSequence) -> Result<DiscreteDist> {
    DiscreteDist::new(0, iv.v.clone())
}

/// Poisson approximation of `Z_K` anchored at `m`, with
/// `lambda = (m+1) V_{m+1} / V_m` and bound `m! e^lambda V_m / (lambda^m W) - 1`.
pub fn poisson_iv_bound(iv: &IVSequence, m: usize, tail_budget: f64, opts: &CertifyOptions) -> Result<BoundReport> {
    let (vm, vm1) = (iv.v(m), iv.v(m + 1));
    if !(vm > 0.0 && vm1 > 0.0) {
        return Err(Error::NotApplicable(format!("need V_{m} > 0 and V_{} > 0", m + 1)));
    }
    let lambda = (m + 1) as f64 * vm1 / vm;
    let ln_common = ln_factorial(m as u64) + lambda + vm.ln() - iv.w.ln();
    let bound = (ln_common - m as f64 * lambda.ln()).exp_m1();

    let nu = z_dist(iv)?;
    let mu = family_poisson(lambda, tail_budget)?;
    let mut report = certify_with(&mu, &nu, Some(m as i64), opts);
    report.push_bound(if report.is_applicable() {
        NamedBound::claimed("poisson_iv", bound)
    } else {
        NamedBound::reported("poisson_iv", bound)
    });
    if m > 0 {
        // display without the lambda^m factor; differs from the matched value
        report.push_bound(NamedBound::reported(
            "poisson_iv_without_lambda_power",
            ln_common.exp_m1(),
        ));
    }
    report.refresh_verdict(opts.dominance_tolerance);
    report.details.insert("lambda".into(), lambda);
    report.details.insert("m".into(), m as f64);
    report.details.insert("w".into(), iv.w);
    report.distributions.insert("nu".into(), nu);
    report.distributions.insert("mu".into(), mu);
    Ok(report)
}

/// One factor `K_i = s_i kappa_i` of a product body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductFactor {
    pub scale: f64,
    pub base: IVSequence,
}

impl ProductFactor {
    pub fn new(scale: f64, base: IVSequence) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!("scale {scale} must be positive")));
        }
        Ok(Self { scale, base })
    }

    /// The segment `[0, s]`.
    pub fn segment(s: f64) -> Result<Self> {
        Self::new(s, iv_box(&[1.0])?)
    }

    pub fn body(&self) -> IVSequence {
        self.base.dilate(self.scale)
    }

    pub fn v1(&self) -> f64 {
        self.scale * self.base.v(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    /// `e^{sum V_1(K_i)^2} - 1`.
    Rare,
    /// `e^{d theta sum s_i^2} - 1` with `theta = sup W(kappa_i)`.
    Scaled,
    /// `e^{sum s_i^2} - 1` for a product of segments.
    Box,
}

pub fn product_bounds(factors: &[ProductFactor], mode: ProductMode) -> Result<f64> {
    if factors.is_empty() {
        return Err(invalid("no factors"));
    }
    let exponent = match mode {
        ProductMode::Rare => compensated_sum(factors.iter().map(|f| f.v1().powi(2))),
        ProductMode::Scaled => {
            if let Some(f) = factors.iter().find(|f| f.scale > 1.0) {
                return Err(invalid(format!("scaled mode needs s_i in (0, 1], got {}", f.scale)));
            }
            let d = factors.iter().map(|f| f.base.n).max().unwrap_or(0) as f64;
            let theta = factors.iter().map(|f| f.base.w).fold(0.0, f64::max);
            d * theta * compensated_sum(factors.iter().map(|f| f.scale * f.scale))
        }
        ProductMode::Box => {
            if factors.iter().any(|f| !f.base.is_segment() || f.base.v(1) != 1.0) {
                return Err(invalid("box mode needs factors of the form s [0, 1]"));
            }
            compensated_sum(factors.iter().map(|f| f.scale * f.scale))
        }
    };
    Ok(exponent.exp_m1())
}

/// The product body when every factor is a box; `None` otherwise.
pub fn product_box(factors: &[ProductFactor]) -> Option<Result<IVSequence>> {
    let mut sides = Vec::new();
    for f in factors {
        sides.extend(f.body().box_sides?);
    }
    Some(iv_box(&sides))
}

/// Report for a product body: the `m = 0` Poisson bound on the assembled box
/// when available, plus the product-form bounds. Only the rare and box forms
/// are claimed.
pub fn product_report(factors: &[ProductFactor], tail_budget: f64, opts: &CertifyOptions) -> Result<BoundReport> {
    let mut report = match product_box(factors) {
        Some(body) => poisson_iv_bound(&body?, 0, tail_budget, opts)?,
        None => BoundReport::empty(crate::logconcave::LogConcavityCertificate::ok()),
    };
    let v1: f64 = compensated_sum(factors.iter().map(ProductFactor::v1));
    let w: f64 = factors.iter().map(|f| f.body().w).product();
    report.details.insert("product_v1".into(), v1);
    report.details.insert("product_w".into(), w);
    report.push_bound(NamedBound::claimed(
        "product_rare",
        product_bounds(factors, ProductMode::Rare)?,
    ));
    if let Ok(b) = product_bounds(factors, ProductMode::Box) {
        report.push_bound(NamedBound::claimed("product_box", b));
    }
    if let Ok(b) = product_bounds(factors, ProductMode::Scaled) {
        report.push_bound(NamedBound::reported("product_scaled", b));
    }
    report.refresh_verdict(opts.dominance_tolerance);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{family_binomial, tv_distance};
    use crate::logconcave::{is_ulc, is_ulc_infinity};
    use crate::numeric::ratio;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn boxes_and_cubes() {
        let b = iv_box(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(b.v, [1.0, 3.0, 3.0, 1.0]);
        assert_eq!(b.w, 8.0);
        assert!(close(&iv_box(&[0.1, 0.2]).unwrap().v, &[1.0, 0.3, 0.02], 1e-16));
        assert!((iv_box(&[0.1, 0.2]).unwrap().w - 1.32).abs() < 1e-15);
        let c = iv_cube(2, 0.5).unwrap();
        assert_eq!(c.v, [1.0, 1.0, 0.25]);
        assert_eq!(c.w, 2.25);
        assert_eq!(iv_cube(3, 1.0).unwrap().v, b.v);
        let z = z_dist(&iv_cube(6, 0.7).unwrap()).unwrap();
        assert!(close(
            z.masses(),
            family_binomial(6, 0.7 / 1.7).unwrap().masses(),
            1e-15
        ));
    }

    #[test]
    fn balls() {
        assert!(close(&iv_ball(1).unwrap().v, &[1.0, 2.0], 1e-14));
        assert!(close(&iv_ball(2).unwrap().v, &[1.0, PI, PI], 1e-14));
        let k3 = 4.0 * PI / 3.0;
        let b3 = iv_ball(3).unwrap();
        assert!(close(&b3.v, &[1.0, 3.0 * k3 / PI, 3.0 * k3 / 2.0, k3], 1e-13));
        assert!(!is_ulc(&b3.v, 3).unwrap().holds);
        assert!(is_ulc_infinity(&b3.v).unwrap().holds);
    }

    #[test]
    fn exact_box_is_ulc() {
        let v = iv_box_exact(&[ratio(1, 10), ratio(1, 5), ratio(3, 7)]).unwrap();
        assert!(is_ulc(&v, 3).unwrap().holds);
    }

    #[test]
    fn z_of_a_point() {
        assert_eq!(z_dist(&IVSequence::point()).unwrap(), DiscreteDist::point_mass(0));
    }

    #[test]
    fn poisson_box_example() {
        let iv = iv_box(&[0.1, 0.2]).unwrap();
        let r = poisson_iv_bound(&iv, 0, 1e-12, &CertifyOptions::default()).unwrap();
        let b = r.corollary_bounds[0].raw;
        assert!((b - (0.3f64.exp() / 1.32 - 1.0)).abs() < 1e-15);
        assert!((b - 0.02262).abs() < 1e-5);
        assert!((r.oracle_tv.unwrap().upper - 0.02179).abs() < 1e-5);
        assert_eq!(r.dominated, Some(true));
        assert!((r.simplified.unwrap() - b / (1.0 + b)).abs() < 1e-12);
    }

    #[test]
    fn single_segment_closed_form() {
        let s: f64 = 0.37;
        let r = poisson_iv_bound(&iv_box(&[s]).unwrap(), 0, 1e-12, &CertifyOptions::default()).unwrap();
        assert!((r.corollary_bounds[0].raw - (s.exp() / (1.0 + s) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn product_forms() {
        let f = [
            ProductFactor::segment(0.1).unwrap(),
            ProductFactor::segment(0.2).unwrap(),
        ];
        let boxb = product_bounds(&f, ProductMode::Box).unwrap();
        assert!((boxb - 0.05f64.exp_m1()).abs() < 1e-15);
        assert_eq!(product_bounds(&f, ProductMode::Rare).unwrap(), boxb);
        let r = product_report(&f, 1e-12, &CertifyOptions::default()).unwrap();
        assert_eq!(r.dominated, Some(true));
        assert!(r.corollary_bounds[0].raw <= boxb);

        let square = iv_box(&[1.0, 1.0]).unwrap();
        let sq = [
            ProductFactor::new(0.1, square.clone()).unwrap(),
            ProductFactor::new(0.1, square).unwrap(),
        ];
        let scaled = product_bounds(&sq, ProductMode::Scaled).unwrap();
        assert!((scaled - (2.0f64 * 4.0 * 0.02).exp_m1()).abs() < 1e-15);
        assert!(product_bounds(&sq, ProductMode::Box).is_err());
    }

    #[test]
    fn scaled_form_can_undercut_the_distance() {
        // 0.1 * [0, 10] = [0, 1]: W = 2, V_1 = 1, against Poisson(1)
        let f = [ProductFactor::new(0.1, iv_box(&[10.0]).unwrap()).unwrap()];
        let scaled = product_bounds(&f, ProductMode::Scaled).unwrap();
        let body = product_box(&f).unwrap().unwrap();
        let tv = tv_distance(&family_poisson(1.0, 1e-14).unwrap(), &z_dist(&body).unwrap());
        assert!((scaled - 0.11f64.exp_m1()).abs() < 1e-15);
        assert!(tv.lower > scaled);
        let r = product_report(&f, 1e-12, &CertifyOptions::default()).unwrap();
        assert_eq!(r.dominated, Some(true));
    }

    #[test]
    fn product_identities() {
        let s = [0.3, 0.1, 0.25];
        let t = [0.05, 0.4];
        let joined: Vec<f64> = s.iter().chain(&t).copied().collect();
        let (a, b, ab) = (iv_box(&s).unwrap(), iv_box(&t).unwrap(), iv_box(&joined).unwrap());
        assert!((ab.v[1] - a.v[1] - b.v[1]).abs() < 1e-15);
        assert!((ab.w - a.w * b.w).abs() < 1e-14);
        let eps = 0.3;
        let scaled: Vec<f64> = s.iter().map(|x| x * eps).collect();
        let d = iv_box(&scaled).unwrap();
        for j in 0..=3 {
            assert!((d.v[j] - eps.powi(j as i32) * a.v[j]).abs() < 1e-15);
        }
    }
}
