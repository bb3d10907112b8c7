//! Gaussian rationals `a + b·i` with arbitrary-precision parts.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use alloc::string::String;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact Gaussian rational. Both parts are kept reduced by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn zero() -> Self {
        Gq { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Gq::int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Gq { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn int(n: i64) -> Self {
        Gq { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Gq::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(re: BigRational) -> Self {
        Gq { re, im: BigRational::zero() }
    }

    pub fn complex(re: (i64, i64), im: (i64, i64)) -> Self {
        Gq {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gq { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|²`, always a nonnegative rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Gq { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, e: i32) -> Self {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut acc = Gq::one();
        let mut base = self.clone();
        let mut k = e as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Gq { re: &self.re * q, im: &self.im * q }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Human-readable text, e.g. `3/2`, `-i`, `1/2+3/4i`.
    pub fn to_text(&self) -> String {
        alloc::format!("{}", self)
    }
}

/// Best-effort conversion; huge values saturate rather than panic.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down by a common power of two
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900);
            let n = (q.numer() >> shift as usize).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift as usize).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

fn fmt_ratio(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_ratio(&self.re, f),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-i")
                } else {
                    fmt_ratio(&self.im, f)?;
                    write!(f, "i")
                }
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_ratio(&self.re, f)?;
                if self.im.is_positive() {
                    write!(f, "+")?;
                }
                fmt_ratio(&self.im, f)?;
                write!(f, "i)")
            }
        }
    }
}

impl fmt::Debug for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for Gq {
    fn default() -> Self {
        Gq::zero()
    }
}

impl From<i64> for Gq {
    fn from(n: i64) -> Self {
        Gq::int(n)
    }
}

impl From<BigRational> for Gq {
    fn from(q: BigRational) -> Self {
        Gq::real(q)
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq::real(&self.re * &o.re);
        }
        if self.im.is_zero() {
            return o.scale(&self.re);
        }
        if o.im.is_zero() {
            return self.scale(&o.re);
        }
        Gq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn div(self, o: &Gq) -> Gq {
        self * &o.inv().expect("division by zero Gaussian rational")
    }
}

impl Add for Gq {
    type Output = Gq;
    fn add(self, o: Gq) -> Gq {
        &self + &o
    }
}

impl Sub for Gq {
    type Output = Gq;
    fn sub(self, o: Gq) -> Gq {
        &self - &o
    }
}

impl Mul for Gq {
    type Output = Gq;
    fn mul(self, o: Gq) -> Gq {
        &self * &o
    }
}

impl Div for Gq {
    type Output = Gq;
    fn div(self, o: Gq) -> Gq {
        &self / &o
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re, im: -self.im }
    }
}

impl<'a> Neg for &'a Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, o: &Gq) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Gq> for Gq {
    fn sub_assign(&mut self, o: &Gq) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Gq> for Gq {
    fn mul_assign(&mut self, o: &Gq) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Gq::i() * &Gq::i(), Gq::int(-1));
    }

    #[test]
    fn canonical_reduction() {
        let a = Gq::ratio(6, -4);
        assert_eq!(a, Gq::ratio(-3, 2));
        assert_eq!(a.re.denom(), &BigInt::from(2));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = Gq::complex((3, 2), (-5, 7));
        assert!((&z * &z.inv().unwrap()).is_one());
        assert!(Gq::zero().inv().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(Gq::ratio(3, 2).to_text(), "3/2");
        assert_eq!((-Gq::i()).to_text(), "-i");
        assert_eq!(Gq::complex((1, 2), (3, 4)).to_text(), "(1/2+3/4i)");
    }

    #[test]
    fn pow_negative() {
        assert_eq!(Gq::int(2).pow(-3), Gq::ratio(1, 8));
        assert_eq!(Gq::i().pow(4), Gq::one());
    }
}
