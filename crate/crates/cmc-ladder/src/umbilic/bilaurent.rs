//! Truncated Laurent series in `w, w̄` with exact coefficients.
//!
//! A series carries an absolute precision `prec`: every coefficient of total
//! degree `a + b < prec` is exact, nothing is known at or above `prec`.
//! Terms at or above the precision are dropped eagerly. Exact finite series
//! (monomials, polynomials) have `prec = INF`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::scalar::Gq;

/// Precision of an exact series.
pub const INF: i64 = i64::MAX / 4;

#[derive(Clone, PartialEq, Eq)]
pub struct BiLaurent {
    terms: BTreeMap<(i32, i32), Gq>,
    prec: i64,
}

fn deg(k: &(i32, i32)) -> i64 {
    k.0 as i64 + k.1 as i64
}

impl BiLaurent {
    pub fn zero() -> Self {
        BiLaurent { terms: BTreeMap::new(), prec: INF }
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Gq::one())
    }

    pub fn constant(c: Gq) -> Self {
        Self::monomial(0, 0, c)
    }

    /// `c · w^a w̄^b`, exact.
    pub fn monomial(a: i32, b: i32, c: Gq) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        BiLaurent { terms, prec: INF }
    }

    pub fn from_terms<I: IntoIterator<Item = ((i32, i32), Gq)>>(it: I, prec: i64) -> Self {
        let mut s = BiLaurent { terms: BTreeMap::new(), prec };
        for (k, c) in it {
            s.add_term(k, c);
        }
        s
    }

    fn add_term(&mut self, k: (i32, i32), c: Gq) {
        if c.is_zero() || deg(&k) >= self.prec {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= INF
    }

    /// Lowers the precision to `p`, dropping terms at or above it.
    pub fn truncate(&self, p: i64) -> Self {
        let prec = self.prec.min(p);
        BiLaurent { terms: self.terms.iter().filter(|(k, _)| deg(k) < prec).map(|(k, c)| (*k, c.clone())).collect(), prec }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &Gq)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i32, b: i32) -> Gq {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Gq::zero)
    }

    /// Lowest total degree of a nonzero term.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().map(deg).min()
    }

    /// Lowest exponent of `w` among the known terms.
    pub fn w_valuation(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    /// Lowest degree that is certainly represented: the valuation, or the
    /// precision for a series known to vanish below it.
    fn floor(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return BiLaurent { terms: BTreeMap::new(), prec: self.prec };
        }
        BiLaurent { terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(), prec: self.prec }
    }

    /// Multiplication by `w^a w̄^b`.
    pub fn shift(&self, a: i32, b: i32) -> Self {
        let prec = if self.is_exact() { INF } else { self.prec + a as i64 + b as i64 };
        BiLaurent { terms: self.terms.iter().map(|(k, x)| ((k.0 + a, k.1 + b), x.clone())).collect(), prec }
    }

    /// Complex conjugate: swaps `w` and `w̄`.
    pub fn conj(&self) -> Self {
        BiLaurent { terms: self.terms.iter().map(|(k, x)| ((k.1, k.0), x.conj())).collect(), prec: self.prec }
    }

    pub fn d_w(&self) -> Self {
        let prec = if self.is_exact() { INF } else { self.prec - 1 };
        let mut out = BiLaurent { terms: BTreeMap::new(), prec };
        for (k, c) in &self.terms {
            if k.0 != 0 {
                out.add_term((k.0 - 1, k.1), c * &Gq::int(k.0 as i64));
            }
        }
        out
    }

    pub fn d_wbar(&self) -> Self {
        self.conj().d_w().conj()
    }

    /// `∂_z = (2w)⁻¹ ∂_w` for `z = w²`.
    pub fn d_z(&self) -> Self {
        self.d_w().shift(-1, 0).scale(&Gq::ratio(1, 2))
    }

    pub fn d_zbar(&self) -> Self {
        self.d_wbar().shift(0, -1).scale(&Gq::ratio(1, 2))
    }

    /// `exp(self)`; requires every known term to have positive degree.
    pub fn exp(&self) -> Self {
        let v = self.floor();
        assert!(v >= 1, "exp needs a series without constant or polar part");
        if self.is_zero() && self.is_exact() {
            return BiLaurent::one();
        }
        assert!(!self.is_exact(), "exp of an exact series needs a truncation");
        let mut out = BiLaurent::one().truncate(self.prec);
        let mut power = BiLaurent::one();
        let mut k: i64 = 1;
        loop {
            power = (&power * self).scale(&Gq::ratio(1, k)).truncate(self.prec);
            if power.is_zero() {
                break;
            }
            out = &out + &power;
            k += 1;
        }
        out
    }

    /// Inverse of a series whose lowest term is a nonzero constant.
    pub fn inv(&self) -> Option<Self> {
        let c = self.coeff(0, 0);
        let c_inv = c.inv()?;
        if self.floor() < 0 || self.terms.keys().any(|k| deg(k) == 0 && *k != (0, 0)) {
            return None;
        }
        if self.is_exact() && self.len() > 1 {
            return None;
        }
        // 1/(c(1 + t)) = c⁻¹ Σ (−t)^k with t of positive valuation
        let t = (self.scale(&c_inv) - BiLaurent::one()).truncate(self.prec);
        let mut out = BiLaurent::one().truncate(self.prec);
        let mut power = BiLaurent::one();
        loop {
            power = -(&power * &t).truncate(self.prec);
            if power.is_zero() {
                break;
            }
            out = &out + &power;
        }
        Some(out.scale(&c_inv))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = BiLaurent::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Sorted list of terms, lowest total degree first.
    pub fn sorted_terms(&self) -> Vec<((i32, i32), Gq)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c.clone())).collect();
        v.sort_by_key(|(k, _)| (deg(k), k.0));
        v
    }
}

impl Default for BiLaurent {
    fn default() -> Self {
        BiLaurent::zero()
    }
}

impl<'a> Add<&'a BiLaurent> for &'a BiLaurent {
    type Output = BiLaurent;
    fn add(self, o: &BiLaurent) -> BiLaurent {
        let prec = self.prec.min(o.prec);
        let mut out = self.truncate(prec);
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BiLaurent> for &'a BiLaurent {
    type Output = BiLaurent;
    fn sub(self, o: &BiLaurent) -> BiLaurent {
        self + &(-o)
    }
}

impl Sub for BiLaurent {
    type Output = BiLaurent;
    fn sub(self, o: BiLaurent) -> BiLaurent {
        &self - &o
    }
}

impl Add for BiLaurent {
    type Output = BiLaurent;
    fn add(self, o: BiLaurent) -> BiLaurent {
        &self + &o
    }
}

impl<'a> Mul<&'a BiLaurent> for &'a BiLaurent {
    type Output = BiLaurent;
    fn mul(self, o: &BiLaurent) -> BiLaurent {
        let p1 = if self.is_exact() { INF } else { self.prec.saturating_add(o.floor()) };
        let p2 = if o.is_exact() { INF } else { o.prec.saturating_add(self.floor()) };
        let prec = p1.min(p2).min(INF);
        let mut out = BiLaurent { terms: BTreeMap::new(), prec };
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let k = (k1.0 + k2.0, k1.1 + k2.1);
                if deg(&k) < prec {
                    out.add_term(k, c1 * c2);
                }
            }
        }
        out
    }
}

impl Mul for BiLaurent {
    type Output = BiLaurent;
    fn mul(self, o: BiLaurent) -> BiLaurent {
        &self * &o
    }
}

impl<'a> Neg for &'a BiLaurent {
    type Output = BiLaurent;
    fn neg(self) -> BiLaurent {
        self.scale(&-Gq::one())
    }
}

impl Neg for BiLaurent {
    type Output = BiLaurent;
    fn neg(self) -> BiLaurent {
        -&self
    }
}

impl fmt::Display for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, ((a, b), c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*w^{}*wb^{}", c, a, b)?;
        }
        if !self.is_exact() {
            write!(f, " + O(deg {})", self.prec)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `n/d` as a real scalar; shorthand for tests and jets.
pub fn q(n: i64, d: i64) -> Gq {
    Gq::real(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> BiLaurent {
        BiLaurent::monomial(1, 0, Gq::one())
    }

    #[test]
    fn exp_of_log_series_round_trip() {
        // exp(w) · exp(−w) = 1 to the precision
        let t = x().truncate(12);
        let e = t.exp();
        let e_neg = (-&t).exp();
        let prod = &e * &e_neg;
        assert_eq!(prod, BiLaurent::one().truncate(12));
        assert_eq!(e.coeff(3, 0), Gq::ratio(1, 6));
    }

    #[test]
    fn inverse_of_unit() {
        let s = (&BiLaurent::one() + &BiLaurent::monomial(1, 1, Gq::int(3))).truncate(10);
        let inv = s.inv().unwrap();
        assert_eq!(&s * &inv, BiLaurent::one().truncate(10));
        assert!(BiLaurent::monomial(1, 0, Gq::one()).inv().is_none());
    }

    #[test]
    fn precision_tracks_poles() {
        let s = BiLaurent::one().truncate(10);
        let pole = BiLaurent::monomial(-4, 0, Gq::one());
        assert_eq!((&s * &pole).prec(), 6);
        assert_eq!(s.d_z().prec(), 8);
    }

    #[test]
    fn d_z_of_z_power() {
        // z^3 = w^6, ∂_z z^3 = 3 z^2 = 3 w^4
        let z3 = BiLaurent::monomial(6, 0, Gq::one());
        assert_eq!(z3.d_z(), BiLaurent::monomial(4, 0, Gq::int(3)));
        assert!(z3.d_zbar().is_zero());
    }

    #[test]
    fn conj_swaps() {
        let s = BiLaurent::monomial(2, 5, Gq::i());
        assert_eq!(s.conj(), BiLaurent::monomial(5, 2, -Gq::i()));
    }
}
