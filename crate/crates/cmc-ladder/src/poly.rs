//! Sparse Laurent polynomials over [`Gq`] in an arbitrary ordered variable set.
//!
//! Every ring in the crate (the jet ring, the finite-type structure ring, the
//! sinh-Gordon jet ring) is an instance of [`Poly`] with its own variable enum.
//! Terms live in a `BTreeMap`, so iteration order is the canonical order and
//! structural equality is mathematical equality.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scalar::Gq;

/// A polynomial variable. `weight` is the grading used for the canonical order.
pub trait Var: Clone + Ord + fmt::Debug {
    fn weight(&self) -> i64 {
        0
    }
    /// Short ASCII name used for display and serialization.
    fn name(&self) -> String;
}

/// A Laurent monomial: sorted `(variable, nonzero exponent)` pairs.
///
/// The cached total weight is the first sort key, which gives the
/// graded-lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono<V> {
    weight: i64,
    factors: Vec<(V, i32)>,
}

impl<V: Var> Mono<V> {
    pub fn one() -> Self {
        Mono { weight: 0, factors: Vec::new() }
    }

    pub fn var(v: V, e: i32) -> Self {
        if e == 0 {
            return Mono::one();
        }
        Mono { weight: v.weight() * e as i64, factors: alloc::vec![(v, e)] }
    }

    /// Builds a monomial from arbitrary (possibly repeated, possibly zero) factors.
    pub fn from_factors<I: IntoIterator<Item = (V, i32)>>(it: I) -> Self {
        let mut m = Mono::one();
        for (v, e) in it {
            m = m.mul(&Mono::var(v, e));
        }
        m
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn factors(&self) -> &[(V, i32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exp(&self, v: &V) -> i32 {
        match self.factors.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + o.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < o.factors.len() {
            let (a, b) = (&self.factors[i], &o.factors[j]);
            match a.0.cmp(&b.0) {
                core::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    let e = a.1 + b.1;
                    if e != 0 {
                        out.push((a.0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&o.factors[j..]);
        Mono { weight: self.weight + o.weight, factors: out }
    }

    pub fn inv(&self) -> Self {
        Mono {
            weight: -self.weight,
            factors: self.factors.iter().map(|(v, e)| (v.clone(), -e)).collect(),
        }
    }

    /// Multiplies by `v^de`.
    pub fn shift(&self, v: &V, de: i32) -> Self {
        self.mul(&Mono::var(v.clone(), de))
    }

    /// Applies a variable map that must be injective on the variables present.
    pub fn map_vars<W: Var>(&self, f: impl Fn(&V) -> W) -> Mono<W> {
        Mono::from_factors(self.factors.iter().map(|(v, e)| (f(v), *e)))
    }

    pub fn vars(&self) -> impl Iterator<Item = &V> {
        self.factors.iter().map(|(v, _)| v)
    }
}

impl<V: Var> fmt::Display for Mono<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{}", v.name())?;
            } else {
                write!(f, "{}^{}", v.name(), e)?;
            }
        }
        Ok(())
    }
}

impl<V: Var> fmt::Debug for Mono<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Result of a homogeneity test under [`Var::weight`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightReport {
    pub homogeneous: bool,
    pub weight: Option<i64>,
}

/// A finite sum of monomials with nonzero Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<V: Var> {
    terms: BTreeMap<Mono<V>, Gq>,
}

impl<V: Var> Default for Poly<V> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<V: Var> Poly<V> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Gq::one())
    }

    pub fn constant(c: Gq) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Gq::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Poly::constant(Gq::ratio(n, d))
    }

    pub fn var(v: V) -> Self {
        Poly::term(Mono::var(v, 1), Gq::one())
    }

    pub fn var_pow(v: V, e: i32) -> Self {
        Poly::term(Mono::var(v, e), Gq::one())
    }

    pub fn term(m: Mono<V>, c: Gq) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono<V>, Gq)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono<V>, &Gq)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Mono<V>, Gq> {
        self.terms
    }

    pub fn term_map(&self) -> &BTreeMap<Mono<V>, Gq> {
        &self.terms
    }

    pub fn coeff(&self, m: &Mono<V>) -> Gq {
        self.terms.get(m).cloned().unwrap_or_else(Gq::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Gq {
        self.coeff(&Mono::one())
    }

    /// Returns `Some(c)` when the polynomial is the constant `c` (including 0).
    pub fn as_constant(&self) -> Option<Gq> {
        match self.terms.len() {
            0 => Some(Gq::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Mono<V>, c: &Gq) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, o: &Self, c: &Gq) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &o.terms {
            self.add_term(m.clone(), &(a * c));
        }
    }

    pub fn add_mono_scaled(&mut self, o: &Self, m: &Mono<V>, c: &Gq) {
        if c.is_zero() {
            return;
        }
        for (n, a) in &o.terms {
            self.add_term(n.mul(m), &(a * c));
        }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono<V>) -> Self {
        Poly { terms: self.terms.iter().map(|(n, a)| (n.mul(m), a.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single-term polynomial.
    pub fn inv_monomial(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        Some(Poly::term(m.inv(), c.inv()?))
    }

    pub fn weight_report(&self) -> WeightReport {
        let mut it = self.terms.keys().map(|m| m.weight());
        match it.next() {
            None => WeightReport { homogeneous: true, weight: None },
            Some(w) => {
                if it.all(|x| x == w) {
                    WeightReport { homogeneous: true, weight: Some(w) }
                } else {
                    WeightReport { homogeneous: false, weight: None }
                }
            }
        }
    }

    /// Extends a rule on variables to a derivation of the ring (Leibniz rule).
    pub fn derive<E>(&self, rule: impl FnMut(&V) -> Result<Poly<V>, E>) -> Result<Poly<V>, E> {
        self.derive_cached(&mut BTreeMap::new(), rule)
    }

    /// [`Poly::derive`] with a caller-owned cache of variable images, so that
    /// many derivations under the same rule evaluate each image once.
    pub fn derive_cached<E>(
        &self,
        cache: &mut BTreeMap<V, Poly<V>>,
        mut rule: impl FnMut(&V) -> Result<Poly<V>, E>,
    ) -> Result<Poly<V>, E> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (v, e) in m.factors() {
                if !cache.contains_key(v) {
                    let img = rule(v)?;
                    cache.insert(v.clone(), img);
                }
                let dv = &cache[v];
                if dv.is_zero() {
                    continue;
                }
                let rest = m.shift(v, -1);
                out.add_mono_scaled(dv, &rest, &(c * &Gq::int(*e as i64)));
            }
        }
        Ok(out)
    }

    /// Partial derivative in `v`.
    pub fn partial(&self, v: &V) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                out.add_term(m.shift(v, -1), &(c * &Gq::int(e as i64)));
            }
        }
        out
    }

    /// Ring homomorphism determined by images of variables. `None` keeps the
    /// variable. Negative powers require the image to be a single term.
    pub fn substitute(&self, f: impl Fn(&V) -> Option<Poly<V>>) -> Self {
        self.substitute_into(|v| f(v).unwrap_or_else(|| Poly::var(v.clone())))
    }

    /// Homomorphism into another ring given images of every variable.
    pub fn substitute_into<W: Var>(&self, f: impl Fn(&V) -> Poly<W>) -> Poly<W> {
        let mut cache: BTreeMap<(V, i32), Poly<W>> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.factors() {
                let key = (v.clone(), *e);
                if !cache.contains_key(&key) {
                    let img = f(v);
                    let pw = if *e >= 0 {
                        img.pow(*e as u32)
                    } else {
                        img.inv_monomial()
                            .expect("negative power substituted by a non-monomial")
                            .pow((-*e) as u32)
                    };
                    cache.insert(key.clone(), pw);
                }
                t = &t * &cache[&key];
                if t.is_zero() {
                    break;
                }
            }
            out = out + t;
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Gq) -> Gq) -> Self {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Collects terms by the exponent of `v`: `self = Σ v^k · out[k]`.
    pub fn collect_by(&self, v: &V) -> BTreeMap<i32, Poly<V>> {
        let mut out: BTreeMap<i32, Poly<V>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            out.entry(e).or_default().add_term(m.shift(v, -e), c);
        }
        out
    }

    pub fn vars(&self) -> alloc::collections::BTreeSet<V> {
        self.terms.keys().flat_map(|m| m.vars().cloned()).collect()
    }

    /// Smallest and largest exponent of `v` across all terms.
    pub fn exp_range(&self, v: &V) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m.exp(v));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    pub fn to_text(&self) -> String {
        alloc::format!("{}", self)
    }
}

impl<V: Var> fmt::Display for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", c, m)?;
            }
        }
        Ok(())
    }
}

impl<V: Var> fmt::Debug for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a, V: Var> Add<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn add(self, o: &Poly<V>) -> Poly<V> {
        let (big, small) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<V: Var> Add for Poly<V> {
    type Output = Poly<V>;
    fn add(mut self, o: Poly<V>) -> Poly<V> {
        if self.len() < o.len() {
            return o + self;
        }
        for (m, c) in o.terms {
            self.add_term(m, &c);
        }
        self
    }
}

impl<'a, V: Var> Sub<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn sub(self, o: &Poly<V>) -> Poly<V> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<V: Var> Sub for Poly<V> {
    type Output = Poly<V>;
    fn sub(mut self, o: Poly<V>) -> Poly<V> {
        for (m, c) in o.terms {
            self.add_term(m, &-c);
        }
        self
    }
}

impl<'a, V: Var> Mul<&'a Poly<V>> for &'a Poly<V> {
    type Output = Poly<V>;
    fn mul(self, o: &Poly<V>) -> Poly<V> {
        let mut out = Poly::zero();
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                out.add_term(m.mul(n), &(a * b));
            }
        }
        out
    }
}

impl<V: Var> Mul for Poly<V> {
    type Output = Poly<V>;
    fn mul(self, o: Poly<V>) -> Poly<V> {
        &self * &o
    }
}

impl<V: Var> Neg for Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<'a, V: Var> Neg for &'a Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
    enum X {
        A,
        B,
    }

    impl Var for X {
        fn weight(&self) -> i64 {
            match self {
                X::A => 1,
                X::B => 2,
            }
        }
        fn name(&self) -> String {
            match self {
                X::A => "a".to_string(),
                X::B => "b".to_string(),
            }
        }
    }

    fn a() -> Poly<X> {
        Poly::var(X::A)
    }
    fn b() -> Poly<X> {
        Poly::var(X::B)
    }

    #[test]
    fn laurent_cancellation() {
        let p = &a() * &Poly::var_pow(X::A, -1);
        assert_eq!(p, Poly::one());
    }

    #[test]
    fn subtraction_to_zero() {
        let p = &(&a() * &b()) + &Poly::int(3);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn derive_leibniz_on_power() {
        // d/da of a^3 b = 3 a^2 b
        let p = &a().pow(3) * &b();
        let d = p
            .derive::<()>(|v| Ok(if *v == X::A { Poly::one() } else { Poly::zero() }))
            .unwrap();
        assert_eq!(d, (&a().pow(2) * &b()).scale(&Gq::int(3)));
        assert_eq!(d, p.partial(&X::A));
    }

    #[test]
    fn weight_report_mixed() {
        let p = &a() + &b();
        assert!(!p.weight_report().homogeneous);
        let q = &a().pow(2) + &b();
        assert_eq!(q.weight_report(), WeightReport { homogeneous: true, weight: Some(2) });
        assert_eq!(Poly::<X>::zero().weight_report().weight, None);
    }

    #[test]
    fn substitute_negative_power() {
        let p = Poly::var_pow(X::A, -2);
        let q = p.substitute(|v| if *v == X::A { Some(b().scale(&Gq::int(2))) } else { None });
        assert_eq!(q, Poly::var_pow(X::B, -2).scale(&Gq::ratio(1, 4)));
    }

    #[test]
    fn display_order_is_graded() {
        let p = &b() + &a();
        assert_eq!(p.to_text(), "a + b");
    }
}
