//! Double-double floats (about 32 significant digits) and their complex
//! counterpart, enough for RK4 drift measurements far below `f64` roundoff.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::Gq;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to a rational, by scaled integer division.
    pub fn from_rational(q: &BigRational) -> Dd {
        if q.is_zero() {
            return Dd::ZERO;
        }
        let hi = crate::scalar::ratio_to_f64(q);
        let exact_hi = BigRational::from_float(hi).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)));
        let lo = crate::scalar::ratio_to_f64(&(q - exact_hi));
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step from the f64 root
        let x = libm::sqrt(self.hi);
        let xx = Dd::new(x) * Dd::new(x);
        let corr = (self - xx).hi / (2.0 * x);
        let (h, l) = quick_two_sum(x, corr);
        Dd { hi: h, lo: l }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn powi(self, e: i32) -> Dd {
        let mut base = if e < 0 { self.recip() } else { self };
        let mut n = e.unsigned_abs();
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        acc
    }

    pub fn max(self, o: Dd) -> Dd {
        if o > self {
            o
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::new(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, o: Dd) {
        *self = *self + o;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, o: Dd) {
        *self = *self - o;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, o: Dd) {
        *self = *self * o;
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: Cdd = Cdd { re: Dd::ONE, im: Dd::ZERO };
    pub const I: Cdd = Cdd { re: Dd::ZERO, im: Dd::ONE };

    pub fn new(re: Dd, im: Dd) -> Cdd {
        Cdd { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Cdd {
        Cdd { re: Dd::new(re), im: Dd::new(im) }
    }

    pub fn real(x: Dd) -> Cdd {
        Cdd { re: x, im: Dd::ZERO }
    }

    pub fn from_gq(c: &Gq) -> Cdd {
        Cdd { re: Dd::from_rational(&c.re), im: Dd::from_rational(&c.im) }
    }

    pub fn conj(self) -> Cdd {
        Cdd { re: self.re, im: -self.im }
    }

    pub fn norm_sq(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> Dd {
        self.norm_sq().sqrt()
    }

    /// `|z|` in `f64`, for tolerances.
    pub fn abs_f64(self) -> f64 {
        libm::hypot(self.re.to_f64(), self.im.to_f64())
    }

    pub fn to_f64_pair(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, s: Dd) -> Cdd {
        Cdd { re: self.re * s, im: self.im * s }
    }

    pub fn recip(self) -> Cdd {
        let d = self.norm_sq();
        Cdd { re: self.re / d, im: -self.im / d }
    }

    pub fn powi(self, e: i32) -> Cdd {
        let mut base = if e < 0 { self.recip() } else { self };
        let mut n = e.unsigned_abs();
        let mut acc = Cdd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, o: Cdd) -> Cdd {
        self * o.recip()
    }
}

impl AddAssign for Cdd {
    fn add_assign(&mut self, o: Cdd) {
        *self = *self + o;
    }
}

impl fmt::Debug for Cdd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e}{:+e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

/// Rounds to the nearest rational with denominator `2^bits` (used to turn
/// numeric seeds into exact states).
pub fn dyadic(x: f64, bits: u32) -> BigRational {
    let scale = (1u64 << bits) as f64;
    let n = libm::round(x * scale);
    let num = BigInt::from(n.to_i64().unwrap_or(0));
    BigRational::new(num, BigInt::from(1u64 << bits))
}

/// `|q|` as `f64`, for diagnostics.
pub fn rational_abs_f64(q: &BigRational) -> f64 {
    crate::scalar::ratio_to_f64(&q.abs())
}
