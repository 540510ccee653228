use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use statrs::function::gamma::ln_gamma;

use super::gamma_fn::{regularized_lower, regularized_upper};
use super::quadrature::integrate;
use crate::error::{invalid, Result};

/// A density with respect to Lebesgue measure, with its derivative.
pub trait Density: Send + Sync {
    fn pdf(&self, x: f64) -> f64;
    fn dpdf(&self, x: f64) -> f64;
    /// Closed support `[lo, hi]`, either end possibly infinite.
    fn domain(&self) -> (f64, f64);
    fn cdf(&self, _x: f64) -> Option<f64> {
        None
    }
    /// Log-concavity of the density, verified or asserted by the constructor.
    fn log_concave(&self) -> bool;
    fn name(&self) -> String;

    fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    /// `f'(x) / f(x)`.
    fn score(&self, x: f64) -> f64 {
        self.dpdf(x) / self.pdf(x)
    }
}

/// Gamma law with shape `kappa` and rate `lambda`:
/// `f(x) = lambda^kappa x^{kappa-1} e^{-lambda x} / Gamma(kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    kappa: f64,
    lambda: f64,
}

impl GammaParams {
    pub fn new(kappa: f64, lambda: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0 && lambda.is_finite() && lambda > 0.0) {
            return Err(invalid(format!(
                "gamma parameters ({kappa}, {lambda}) must be positive"
            )));
        }
        Ok(Self { kappa, lambda })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(1.0, lambda)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ln_norm(&self) -> f64 {
        self.kappa * self.lambda.ln() - ln_gamma(self.kappa)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            return match self.kappa.total_cmp(&1.0) {
                std::cmp::Ordering::Less => f64::INFINITY,
                std::cmp::Ordering::Equal => self.lambda.ln(),
                std::cmp::Ordering::Greater => f64::NEG_INFINITY,
            };
        }
        self.ln_norm() + (self.kappa - 1.0) * x.ln() - self.lambda * x
    }

    pub fn mode(&self) -> f64 {
        ((self.kappa - 1.0) / self.lambda).max(0.0)
    }

    pub fn upper_tail(&self, x: f64) -> f64 {
        regularized_upper(self.kappa, self.lambda * x)
    }

    /// Smallest `x` with upper tail below `eps`, by doubling from the mean.
    pub fn quantile_upper(&self, eps: f64) -> f64 {
        let mut x = (self.kappa / self.lambda).max(1.0 / self.lambda);
        while self.upper_tail(x) > eps {
            x *= 2.0;
        }
        x
    }
}

impl fmt::Display for GammaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gamma({}, {})", self.kappa, self.lambda)
    }
}

impl std::str::FromStr for GammaParams {
    type Err = crate::Error;

    /// `"kappa,lambda"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [k, l] = parts.as_slice() else {
            return Err(invalid(format!("expected kappa,lambda, got {s:?}")));
        };
        let parse = |t: &str| t.parse::<f64>().map_err(|e| invalid(format!("{t:?}: {e}")));
        Self::new(parse(k)?, parse(l)?)
    }
}

impl Density for GammaParams {
    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    fn dpdf(&self, x: f64) -> f64 {
        if x == 0.0 && self.kappa == 1.0 {
            return -self.lambda * self.lambda;
        }
        if x == 0.0 && self.kappa == 2.0 {
            return self.lambda * self.lambda;
        }
        let f = self.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        f * ((self.kappa - 1.0) / x - self.lambda)
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        Some(gamma_cdf(self, x))
    }

    fn log_concave(&self) -> bool {
        self.kappa >= 1.0
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        GammaParams::ln_pdf(self, x)
    }

    fn score(&self, x: f64) -> f64 {
        if self.kappa == 1.0 {
            return -self.lambda;
        }
        (self.kappa - 1.0) / x - self.lambda
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

/// `P(kappa, lambda x)`; zero for `x <= 0`.
pub fn gamma_cdf(g: &GammaParams, x: f64) -> f64 {
    regularized_lower(g.kappa, g.lambda * x)
}

type Eval = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density given by closures. Log-concavity is caller-asserted; see
/// [`FnDensity::spot_check_log_concave`].
pub struct FnDensity {
    name: String,
    pdf: Eval,
    dpdf: Eval,
    cdf: Option<Eval>,
    domain: (f64, f64),
    log_concave: bool,
}

impl FnDensity {
    pub fn new(
        name: impl Into<String>,
        domain: (f64, f64),
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        log_concave: bool,
    ) -> Result<Self> {
        if domain.0.is_nan() || domain.1.is_nan() || domain.0 >= domain.1 {
            return Err(invalid("density domain must be a non-empty interval"));
        }
        Ok(Self {
            name: name.into(),
            pdf: Box::new(pdf),
            dpdf: Box::new(dpdf),
            cdf: None,
            domain,
            log_concave,
        })
    }

    pub fn with_cdf(mut self, cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cdf = Some(Box::new(cdf));
        self
    }

    /// Second differences of `ln f` on an evenly spaced grid over `[lo, hi]`;
    /// returns the first grid point where concavity fails.
    pub fn spot_check_log_concave(&self, lo: f64, hi: f64, points: usize) -> Option<f64> {
        let h = (hi - lo) / (points.max(3) - 1) as f64;
        let ln = |x: f64| (self.pdf)(x).ln();
        (1..points.max(3) - 1).map(|i| lo + i as f64 * h).find(|&x| {
            let d2 = ln(x - h) - 2.0 * ln(x) + ln(x + h);
            d2 > 1e-9 * (1.0 + ln(x).abs())
        })
    }
}

impl Density for FnDensity {
    fn pdf(&self, x: f64) -> f64 {
        if x < self.domain.0 || x > self.domain.1 {
            0.0
        } else {
            (self.pdf)(x)
        }
    }

    fn dpdf(&self, x: f64) -> f64 {
        (self.dpdf)(x)
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        self.cdf.as_ref().map(|c| c(x))
    }

    fn log_concave(&self) -> bool {
        self.log_concave
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

impl fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDensity")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("log_concave", &self.log_concave)
            .finish()
    }
}

/// `c` with `c int_0^inf e^{-x - x^2/2} dx = 1`, by quadrature.
pub fn tilted_normalizer() -> f64 {
    let q = integrate(|x| (-x - 0.5 * x * x).exp(), 0.0, f64::INFINITY, 1e-14).expect("smooth integrand");
    1.0 / q.value
}

pub const BUILTIN_NAMES: [&str; 3] = ["exp", "tilted", "half-normal"];

/// Densities on `[0, inf)` for the exponential approximation:
/// - `exp`: `e^{-x}`
/// - `tilted`: `c e^{-x - x^2/2}`
/// - `half-normal`: `sqrt(2/pi) e^{-x^2/2}`, which has `f'(0) = 0`
pub fn builtin(name: &str) -> Result<FnDensity> {
    let d = match name {
        "exp" => FnDensity::new("exp", (0.0, f64::INFINITY), |x| (-x).exp(), |x| -(-x).exp(), true)?
            .with_cdf(|x: f64| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() }),
        "tilted" => {
            let c = tilted_normalizer();
            let s = 0.5f64.exp() * (PI / 2.0).sqrt();
            FnDensity::new(
                "tilted",
                (0.0, f64::INFINITY),
                move |x| c * (-x - 0.5 * x * x).exp(),
                move |x| -c * (1.0 + x) * (-x - 0.5 * x * x).exp(),
                true,
            )?
            .with_cdf(move |x: f64| {
                if x <= 0.0 {
                    0.0
                } else {
                    c * s * (erf((x + 1.0) * FRAC_1_SQRT_2) - erf(FRAC_1_SQRT_2))
                }
            })
        }
        "half-normal" => {
            let c = (2.0 / PI).sqrt();
            FnDensity::new(
                "half-normal",
                (0.0, f64::INFINITY),
                move |x| c * (-0.5 * x * x).exp(),
                move |x| -c * x * (-0.5 * x * x).exp(),
                true,
            )?
            .with_cdf(|x: f64| if x <= 0.0 { 0.0 } else { erf(x * FRAC_1_SQRT_2) })
        }
        other => {
            return Err(invalid(format!(
                "unknown builtin density {other:?}; available: {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(d)
}
