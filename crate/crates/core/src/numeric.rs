//! Scalar plumbing shared by the float and exact-rational paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

/// Default relative slack for float-mode certificate comparisons.
pub const CERT_SLACK: f64 = 1e-12;

/// A mass type usable by the certificate engine.
///
/// `f64` compares with a relative slack; `BigRational` compares exactly.
pub trait Weight:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_u64(n: u64) -> Self;

    fn is_negative_weight(&self) -> bool;

    fn is_positive_weight(&self) -> bool {
        !self.is_zero() && !self.is_negative_weight()
    }

    /// `lhs <= rhs`, allowing `slack * max(|lhs|, |rhs|)` in float mode.
    fn le_slack(lhs: &Self, rhs: &Self, slack: f64) -> bool;

    /// `prev * next / mid^2`, the discrete curvature of a positive sequence.
    fn curvature(prev: &Self, mid: &Self, next: &Self) -> Self {
        prev.clone() * next.clone() / (mid.clone() * mid.clone())
    }

    fn to_f64_lossy(&self) -> f64;
}

impl Weight for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn is_negative_weight(&self) -> bool {
        *self < 0.0
    }

    fn le_slack(lhs: &Self, rhs: &Self, slack: f64) -> bool {
        *lhs <= *rhs + slack * lhs.abs().max(rhs.abs())
    }

    // ratio form keeps tiny masses from underflowing in the product
    fn curvature(prev: &Self, mid: &Self, next: &Self) -> Self {
        (prev / mid) * (next / mid)
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn is_negative_weight(&self) -> bool {
        self.is_negative()
    }

    fn le_slack(lhs: &Self, rhs: &Self, _slack: f64) -> bool {
        lhs <= rhs
    }

    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Nearest-ish f64 of a big rational, robust to huge numerators/denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = n - d;
    // scale into a representable range, then undo the shift with powi
    let scaled = if shift > 0 {
        r / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Exact rational from an f64 (every finite double is a dyadic rational).
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn biguint_to_f64(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `a*b + c*d` evaluated as if in doubled precision (error-free transforms).
pub fn dot2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let p = a * b;
    let ep = a.mul_add(b, -p);
    let q = c * d;
    let eq = c.mul_add(d, -q);
    let s = p + q;
    let bp = s - p;
    let es = (p - (s - bp)) + (q - bp);
    s + (ep + eq + es)
}

pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Exact binomial coefficient.
pub fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Binomial coefficient as f64; exact below 2^53.
pub fn choose_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round_if_integral()
}

trait RoundIfIntegral {
    fn round_if_integral(self) -> Self;
}

impl RoundIfIntegral for f64 {
    fn round_if_integral(self) -> Self {
        if self < 9.0e15 {
            self.round()
        } else {
            self
        }
    }
}

pub fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn dot2_is_exact_on_cancelling_products() {
        let a = 1.0 + f64::EPSILON;
        let v = dot2(a, a, -1.0, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(v, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(choose(6, 3), BigUint::from(20u32));
        assert_eq!(choose(4, 7), BigUint::zero());
        assert_eq!(choose_f64(60, 30), 118264581564861424.0);
        assert!((ln_choose(10, 3) - 120f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn rational_conversion_handles_huge_terms() {
        let big = BigRational::new(
            BigInt::from(3u32) * (BigInt::one() << 2000),
            BigInt::from(4u32) * (BigInt::one() << 2000),
        );
        assert_eq!(rational_to_f64(&big), 0.75);
        let tiny = BigRational::new(BigInt::one(), BigInt::one() << 1100);
        assert_eq!(rational_to_f64(&tiny), 0.0);
    }
}
