//! Complex scalars at a chosen precision, plus dense polynomial helpers.
//!
//! [`Scalar`] is implemented for `Complex64` (used for cheap low-precision
//! multistart sweeps) and for [`BigComplex`], an MPC value with an explicit
//! mantissa size. All rounding is round-to-nearest-even.

use std::fmt;

use num_complex::Complex64;
use rug::float::Round;
use rug::ops::CompleteRound;
use rug::{Complex, Float, Integer, Rational};

/// Precision in bits of IEEE double mantissas.
pub const F64_BITS: u32 = 53;

pub trait Scalar: Clone + Send + Sync + fmt::Debug {
    fn zero(prec: u32) -> Self;
    fn from_i64(v: i64, prec: u32) -> Self;
    fn from_f64(re: f64, im: f64, prec: u32) -> Self;
    fn from_big(v: &BigComplex) -> Self;
    fn to_big(&self) -> BigComplex;
    fn prec(&self) -> u32;
    fn with_prec(&self, prec: u32) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_i64(&self, k: i64) -> Self;
    fn conj(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// `|z|` as a real-valued scalar.
    fn abs(&self) -> Self;
    /// `log2 |z|`, `-inf` for zero. Never overflows.
    fn log2_abs(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    fn is_zero(&self) -> bool;

    fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }
}

impl Scalar for Complex64 {
    fn zero(_: u32) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_i64(v: i64, _: u32) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_f64(re: f64, im: f64, _: u32) -> Self {
        Complex64::new(re, im)
    }
    fn from_big(v: &BigComplex) -> Self {
        v.to_c64()
    }
    fn to_big(&self) -> BigComplex {
        BigComplex::from_f64(self.re, self.im, F64_BITS)
    }
    fn prec(&self) -> u32 {
        F64_BITS
    }
    fn with_prec(&self, _: u32) -> Self {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_i64(&self, k: i64) -> Self {
        self * k as f64
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        Complex64::new(self.norm(), 0.0)
    }
    fn log2_abs(&self) -> f64 {
        self.norm().log2()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Arbitrary-precision complex number (MPC) carrying its own precision.
#[derive(Clone, PartialEq)]
pub struct BigComplex(pub Complex);

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        BigComplex(Complex::with_val(prec, (re, im)))
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, v))
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, v))
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    /// Parses a pair of decimal strings at the given precision.
    pub fn parse(re: &str, im: &str, prec: u32) -> Option<Self> {
        let re = Float::parse(re).ok()?.complete(prec);
        let im = Float::parse(im).ok()?.complete(prec);
        Some(BigComplex(Complex::with_val(prec, (re, im))))
    }

    /// Decimal digits needed to round-trip `prec` bits.
    pub fn decimal_digits(prec: u32) -> usize {
        (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    /// Decimal scientific strings for the real and imaginary parts.
    pub fn to_decimal_strings(&self) -> (String, String) {
        let digits = Self::decimal_digits(self.prec());
        let fmt = |f: &Float| {
            if f.is_zero() {
                "0".to_string()
            } else {
                f.to_string_radix_round(10, Some(digits), Round::Nearest)
            }
        };
        (fmt(self.re()), fmt(self.im()))
    }

    /// Magnitude of the complex number as a `Float` at its precision.
    pub fn norm(&self) -> Float {
        Float::with_val(self.prec(), self.0.abs_ref())
    }

    /// Nearest Gaussian integer.
    pub fn round_gaussian(&self) -> (Integer, Integer) {
        let re = self.re().to_integer_round(Round::Nearest).map(|v| v.0).unwrap_or_default();
        let im = self.im().to_integer_round(Round::Nearest).map(|v| v.0).unwrap_or_default();
        (re, im)
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.to_c64();
        write!(f, "BigComplex({} + {}i @{})", c.re, c.im, self.prec())
    }
}

impl Scalar for BigComplex {
    fn zero(prec: u32) -> Self {
        BigComplex(Complex::new(prec))
    }
    fn from_i64(v: i64, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, v))
    }
    fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, (re, im)))
    }
    fn from_big(v: &BigComplex) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigComplex {
        self.clone()
    }
    fn prec(&self) -> u32 {
        self.0.prec().0
    }
    fn with_prec(&self, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, &self.0))
    }
    fn add(&self, o: &Self) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 + &o.0))
    }
    fn sub(&self, o: &Self) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 - &o.0))
    }
    fn mul(&self, o: &Self) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 * &o.0))
    }
    fn div(&self, o: &Self) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 / &o.0))
    }
    fn neg(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), -&self.0))
    }
    fn mul_i64(&self, k: i64) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 * k))
    }
    fn conj(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.conj_ref()))
    }
    fn sqrt(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.sqrt_ref()))
    }
    fn abs(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.abs_ref()))
    }
    fn log2_abs(&self) -> f64 {
        let (re, im) = (self.re(), self.im());
        if re.is_zero() && im.is_zero() {
            return f64::NEG_INFINITY;
        }
        // scale to avoid f64 overflow
        let e = re.get_exp().unwrap_or(i32::MIN).max(im.get_exp().unwrap_or(i32::MIN));
        let shift = |f: &Float| {
            if f.is_zero() {
                0.0
            } else {
                let mut g = Float::with_val(64, f);
                g >>= e;
                g.to_f64()
            }
        };
        let (a, b) = (shift(re), shift(im));
        0.5 * (a * a + b * b).log2() + e as f64
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re().to_f64(), self.im().to_f64())
    }
    fn is_zero(&self) -> bool {
        self.re().is_zero() && self.im().is_zero()
    }
}

/// Dense polynomial product (ascending coefficients) by direct convolution.
pub fn poly_mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let prec = a[0].prec();
    let mut out = vec![T::zero(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

pub fn poly_pow<T: Scalar>(a: &[T], e: u32) -> Vec<T> {
    let prec = a.first().map(|c| c.prec()).unwrap_or(F64_BITS);
    let mut acc = vec![T::one(prec)];
    for _ in 0..e {
        acc = poly_mul(&acc, a);
    }
    acc
}

pub fn poly_eval<T: Scalar>(p: &[T], x: &T) -> T {
    let mut acc = T::zero(x.prec());
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// `p` and `p'` at `x` in one Horner pass.
pub fn poly_eval_with_derivative<T: Scalar>(p: &[T], x: &T) -> (T, T) {
    let mut v = T::zero(x.prec());
    let mut d = T::zero(x.prec());
    for c in p.iter().rev() {
        d = d.mul(x).add(&v);
        v = v.mul(x).add(c);
    }
    (v, d)
}

/// `p(λ·y + μ) / λ^deg` for a monic `p`, returning a monic polynomial in `y`.
pub fn poly_affine_substitute<T: Scalar>(p: &[T], lambda: &T, mu: &T) -> Vec<T> {
    let d = p.len() - 1;
    // Taylor shift: coefficients of p(y + μ)
    let mut c: Vec<T> = p.to_vec();
    for i in 0..d {
        for j in (i..d).rev() {
            let t = c[j + 1].mul(mu);
            c[j] = c[j].add(&t);
        }
    }
    // p(λy + μ) has coefficient c_k λ^k; divide by λ^d
    let inv = T::one(lambda.prec()).div(lambda);
    let mut scale = T::one(lambda.prec());
    let mut out = vec![T::zero(lambda.prec()); d + 1];
    for k in (0..=d).rev() {
        out[k] = c[k].mul(&scale);
        scale = scale.mul(&inv);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_arithmetic_round_trips() {
        let a = BigComplex::from_f64(1.5, -2.0, 256);
        let b = BigComplex::from_i64(3, 256);
        let c = a.mul(&b).div(&b);
        assert_eq!(c, a);
        assert!((a.log2_abs() - 2.5f64.log2()).abs() < 1e-12);
        let (re, im) = a.to_decimal_strings();
        assert_eq!(BigComplex::parse(&re, &im, 256).unwrap(), a);
    }

    #[test]
    fn log2_abs_does_not_overflow() {
        let mut big = BigComplex::from_i64(1, 128);
        big.0 <<= 5000u32;
        assert!((big.log2_abs() - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn affine_substitution() {
        // (x - 1)(x - 2) with x = 2y + 1 → 4y(y - 1/2) → y² - y/2
        let p: Vec<Complex64> = [2.0, -3.0, 1.0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let q = poly_affine_substitute(&p, &Complex64::new(2.0, 0.0), &Complex64::new(1.0, 0.0));
        assert!((q[0] - 0.0).norm() < 1e-14);
        assert!((q[1] + 0.5).norm() < 1e-14);
        assert!((q[2] - 1.0).norm() < 1e-14);
    }
}
