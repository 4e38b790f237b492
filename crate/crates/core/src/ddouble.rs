//! Double-double real and complex arithmetic (~31 significant digits), plus a
//! small field trait so that root finding and the closed-form torsion
//! expressions can run unchanged in either precision.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// Nearest double-double to an exact rational.
    pub fn from_rational(r: &BigRational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() || hi == 0.0 {
            return Dd::from_f64(hi);
        }
        let exact_hi = BigRational::from_float(hi).expect("finite double");
        let lo = (r - exact_hi).to_f64().unwrap_or(0.0);
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Dd::from_rational(&BigRational::from_integer(n.clone()))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    /// Square root by one Newton correction of the double result.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = (self - Dd::new(p, e)).to_f64();
        let (hi, lo) = quick_two_sum(x, r / (2.0 * x));
        Dd { hi, lo }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}", self.to_f64())
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const fn new(re: Dd, im: Dd) -> Self {
        Cdd { re, im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    /// Principal square root, computed without cancellation.
    pub fn sqrt_principal(self) -> Self {
        if self.re.is_zero() && self.im.is_zero() {
            return self;
        }
        let r = self.norm_sqr().sqrt();
        if self.re.hi >= 0.0 {
            let t = ((r + self.re) * Dd::from_f64(0.5)).sqrt();
            Cdd::new(t, self.im / (t * Dd::from_f64(2.0)))
        } else {
            let t = ((r - self.re) * Dd::from_f64(0.5)).sqrt();
            let t = if self.im.hi < 0.0 { -t } else { t };
            Cdd::new(self.im / (t * Dd::from_f64(2.0)), t)
        }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    #[inline]
    fn add(self, b: Cdd) -> Cdd {
        Cdd::new(self.re + b.re, self.im + b.im)
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    #[inline]
    fn sub(self, b: Cdd) -> Cdd {
        Cdd::new(self.re - b.re, self.im - b.im)
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    #[inline]
    fn neg(self) -> Cdd {
        Cdd::new(-self.re, -self.im)
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    #[inline]
    fn mul(self, b: Cdd) -> Cdd {
        Cdd::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl Div for Cdd {
    type Output = Cdd;
    #[inline]
    fn div(self, b: Cdd) -> Cdd {
        // Scale by a power of two to keep the squared modulus in range.
        let s = b.re.hi.abs().max(b.im.hi.abs());
        let k = if s > 0.0 && s.is_finite() { 2f64.powi(-(s.log2().floor() as i32)) } else { 1.0 };
        let br = b.re * Dd::from_f64(k);
        let bi = b.im * Dd::from_f64(k);
        let d = br * br + bi * bi;
        let re = (self.re * br + self.im * bi) / d;
        let im = (self.im * br - self.re * bi) / d;
        Cdd::new(re * Dd::from_f64(k), im * Dd::from_f64(k))
    }
}

impl AddAssign for Cdd {
    fn add_assign(&mut self, b: Cdd) {
        *self = *self + b;
    }
}

impl SubAssign for Cdd {
    fn sub_assign(&mut self, b: Cdd) {
        *self = *self - b;
    }
}

impl MulAssign for Cdd {
    fn mul_assign(&mut self, b: Cdd) {
        *self = *self * b;
    }
}

/// Complex scalar field used by the generic numeric kernels.
pub trait CField:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_parts(re: f64, im: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_c64(z: Complex64) -> Self {
        Self::from_parts(z.re, z.im)
    }
    fn to_c64(self) -> Complex64;
    /// Modulus rounded to double.
    fn abs(self) -> f64;
    fn conj(self) -> Self;
    fn sqrt(self) -> Self;
    /// Unit machine epsilon of the representation.
    fn epsilon() -> f64;
    fn i() -> Self {
        Self::from_parts(0.0, 1.0)
    }
    fn is_zero(self) -> bool {
        self.abs() == 0.0
    }
    fn powi(self, n: i64) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
    fn scale(self, s: f64) -> Self {
        self * Self::from_parts(s, 0.0)
    }
}

impl CField for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn epsilon() -> f64 {
        f64::EPSILON
    }
}

impl CField for Cdd {
    fn zero() -> Self {
        Cdd::new(Dd::ZERO, Dd::ZERO)
    }
    fn one() -> Self {
        Cdd::new(Dd::ONE, Dd::ZERO)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Cdd::new(Dd::from_f64(re), Dd::from_f64(im))
    }
    fn from_i64(n: i64) -> Self {
        Cdd::new(Dd::from_i64(n), Dd::ZERO)
    }
    fn from_rational(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cdd::new(Dd::from_rational(r), Dd::ZERO)
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn abs(self) -> f64 {
        self.to_c64().norm()
    }
    fn conj(self) -> Self {
        Cdd::new(self.re, -self.im)
    }
    fn sqrt(self) -> Self {
        self.sqrt_principal()
    }
    fn epsilon() -> f64 {
        4.93e-32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_third_round_trips_beyond_double_precision() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squared_is_two() {
        let s = Dd::from_f64(2.0).sqrt();
        assert!((s * s - Dd::from_f64(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn rational_conversion_keeps_low_word() {
        let r = BigRational::new(1.into(), 10.into());
        let d = Dd::from_rational(&r);
        let err = (d * Dd::from_f64(10.0) - Dd::ONE).to_f64().abs();
        assert!(err < 1e-31, "{err}");
        assert!(d.lo != 0.0);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = Cdd::from_parts(0.3, -1.7);
        let b = Cdd::from_parts(-2.5, 0.125);
        let q = (a * b) / b - a;
        assert!(q.abs() < 1e-30);
    }

    #[test]
    fn principal_sqrt_on_negative_axis() {
        let z = Cdd::from_parts(-4.0, 0.0).sqrt_principal();
        assert!((z - Cdd::from_parts(0.0, 2.0)).abs() < 1e-30);
        let w = Cdd::from_parts(-3.0, -4.0).sqrt_principal();
        assert!((w * w - Cdd::from_parts(-3.0, -4.0)).abs() < 1e-30);
        assert!(w.im.hi < 0.0);
    }

    #[test]
    fn powi_negative_exponent() {
        let z = Cdd::from_parts(0.5, 0.5);
        let p = z.powi(-3) * z.powi(3) - Cdd::one();
        assert!(p.abs() < 1e-30);
    }
}
