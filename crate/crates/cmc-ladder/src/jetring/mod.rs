//! The jet ring: Gaussian-rational Laurent polynomials in `γ`, `r` and the jet
//! generators `z_j`, `z̄_j`, `w_k`, `w̄_k`, together with the two total
//! derivations `∂_ω`, `∂_ω̄`, the coefficients `T̂_j`, and the Jacobi operator.

mod solve;

pub use solve::{
    antiderivative_omega_bar, antiderivative_omega_bar_with, bidegree_profile, holomorphic_kernel,
    jacobi_kernel, joint_antiderivative, joint_antiderivative_with, z_monomials, Ansatz,
};

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use once_cell::race::OnceBox;

use crate::error::{Error, Result};
use crate::poly::{Mono, Poly, Var};
use crate::scalar::Gq;

/// A variable of the jet ring.
///
/// `W(0)` is the real inhomogeneous Jacobi field `u` itself; there is no
/// `WBar(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JetVar {
    Gamma,
    R,
    Z(u32),
    ZBar(u32),
    W(u32),
    WBar(u32),
}

impl Var for JetVar {
    fn weight(&self) -> i64 {
        match *self {
            JetVar::Gamma | JetVar::R => 0,
            JetVar::Z(j) => j as i64 - 2,
            JetVar::ZBar(j) => -(j as i64 - 2),
            JetVar::W(k) => k as i64,
            JetVar::WBar(k) => -(k as i64),
        }
    }

    fn name(&self) -> String {
        match *self {
            JetVar::Gamma => String::from("gamma"),
            JetVar::R => String::from("r"),
            JetVar::Z(j) => alloc::format!("z{}", j),
            JetVar::ZBar(j) => alloc::format!("zbar{}", j),
            JetVar::W(k) => alloc::format!("w{}", k),
            JetVar::WBar(k) => alloc::format!("wbar{}", k),
        }
    }
}

impl JetVar {
    /// Parses the names produced by [`Var::name`].
    pub fn parse(s: &str) -> Option<JetVar> {
        let num = |p: &str| s.strip_prefix(p).and_then(|t| t.parse::<u32>().ok());
        match s {
            "gamma" => Some(JetVar::Gamma),
            "r" => Some(JetVar::R),
            _ => {
                if let Some(j) = num("zbar") {
                    (j >= 3).then_some(JetVar::ZBar(j))
                } else if let Some(k) = num("wbar") {
                    (k >= 1).then_some(JetVar::WBar(k))
                } else if let Some(j) = num("z") {
                    (j >= 3).then_some(JetVar::Z(j))
                } else {
                    num("w").map(JetVar::W)
                }
            }
        }
    }

    pub fn conj(self) -> JetVar {
        match self {
            JetVar::Z(j) => JetVar::ZBar(j),
            JetVar::ZBar(j) => JetVar::Z(j),
            JetVar::W(0) => JetVar::W(0),
            JetVar::W(k) => JetVar::WBar(k),
            JetVar::WBar(k) => JetVar::W(k),
            v => v,
        }
    }

    /// Secondary grading: `γ`, `r` count 2, `z_j`, `z̄_j` count `j−2`, `w_k`, `w̄_k`
    /// count `k`. Both derivations raise it by exactly 1.
    pub fn bidegree(self) -> i64 {
        match self {
            JetVar::Gamma | JetVar::R => 2,
            JetVar::Z(j) | JetVar::ZBar(j) => j as i64 - 2,
            JetVar::W(k) | JetVar::WBar(k) => k as i64,
        }
    }

    fn index(self) -> Option<u32> {
        match self {
            JetVar::Z(j) | JetVar::ZBar(j) | JetVar::W(j) | JetVar::WBar(j) => Some(j),
            _ => None,
        }
    }
}

pub type JetPoly = Poly<JetVar>;
pub type JetMono = Mono<JetVar>;

pub fn gamma() -> JetPoly {
    Poly::var(JetVar::Gamma)
}
pub fn r() -> JetPoly {
    Poly::var(JetVar::R)
}
pub fn z(j: u32) -> JetPoly {
    Poly::var(JetVar::Z(j))
}
pub fn zbar(j: u32) -> JetPoly {
    Poly::var(JetVar::ZBar(j))
}
pub fn w(k: u32) -> JetPoly {
    Poly::var(JetVar::W(k))
}
pub fn wbar(k: u32) -> JetPoly {
    Poly::var(JetVar::WBar(k))
}
pub fn gamma_pow(e: i32) -> JetPoly {
    Poly::var_pow(JetVar::Gamma, e)
}
pub fn r_pow(e: i32) -> JetPoly {
    Poly::var_pow(JetVar::R, e)
}
pub fn c(n: i64, d: i64) -> JetPoly {
    Poly::ratio(n, d)
}
pub fn ci() -> JetPoly {
    Poly::constant(Gq::i())
}

/// Formal conjugation: swaps barred and unbarred generators and conjugates
/// coefficients; `γ`, `r` and `w₀` are real.
pub fn conj(p: &JetPoly) -> JetPoly {
    Poly::from_terms(p.terms().map(|(m, c)| (m.map_vars(|v| v.conj()), c.conj())))
}

pub fn mono_bidegree(m: &JetMono) -> i64 {
    m.factors().iter().map(|(v, e)| v.bidegree() * *e as i64).sum()
}

/// The common bidegree of all terms, `None` if mixed or zero.
pub fn bidegree(p: &JetPoly) -> Option<i64> {
    let mut it = p.terms().map(|(m, _)| mono_bidegree(m));
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}

/// Largest `z_j`/`z̄_j` index occurring, or 2 if none.
pub fn max_z_index(p: &JetPoly) -> u32 {
    p.vars()
        .into_iter()
        .filter_map(|v| match v {
            JetVar::Z(j) | JetVar::ZBar(j) => Some(j),
            _ => None,
        })
        .max()
        .unwrap_or(2)
}

/// True when only `γ`, `r` and unbarred `z_j` occur.
pub fn is_z_pure(p: &JetPoly) -> bool {
    p.vars().into_iter().all(|v| matches!(v, JetVar::Gamma | JetVar::R | JetVar::Z(_)))
}

/// Hard upper bound on any configurable cap.
pub const MAX_CAP: u32 = 96;
/// Default generator index cap.
pub const DEFAULT_CAP: u32 = 25;

type Memo = [OnceBox<JetPoly>; MAX_CAP as usize + 2];
#[allow(clippy::declare_interior_mutable_const)]
const EMPTY: OnceBox<JetPoly> = OnceBox::new();
static THAT: Memo = [EMPTY; MAX_CAP as usize + 2];
static N_SOURCE: Memo = [EMPTY; MAX_CAP as usize + 2];
static N_HOMOGENEOUS: Memo = [EMPTY; MAX_CAP as usize + 2];

/// Generator images under both derivations, filled lazily. Valid only for
/// the [`Rules`] it was used with.
#[derive(Clone, Debug, Default)]
pub struct ImageCache {
    omega: alloc::collections::BTreeMap<JetVar, JetPoly>,
    omega_bar: alloc::collections::BTreeMap<JetVar, JetPoly>,
}

/// Configuration of the generator rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rules {
    /// Largest generator index a derivation may produce.
    pub cap: u32,
    /// Keep the `−r²` source of the inhomogeneous Jacobi equation
    /// `E(u) = −r²` in the `∂_ω̄ w_k` rule. Turning it off models a homogeneous
    /// Jacobi field.
    pub inhomogeneous_source: bool,
}

impl Default for Rules {
    fn default() -> Self {
        Rules { cap: DEFAULT_CAP, inhomogeneous_source: true }
    }
}

impl Rules {
    pub fn with_cap(cap: u32) -> Self {
        Rules { cap: cap.min(MAX_CAP), ..Rules::default() }
    }

    fn check(&self, idx: u32) -> Result<()> {
        if idx > self.cap {
            Err(Error::TruncationExceeded { needed: idx, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// `T̂_j`, memoized process-wide. Needs `z_{j−1}`, so `j ≤ cap + 1`.
    pub fn that(&self, j: u32) -> Result<JetPoly> {
        if j < 3 {
            return Err(Error::Precondition(alloc::format!("T-hat index {} < 3", j)));
        }
        self.check(j - 1)?;
        Ok(that_unchecked(j))
    }

    /// The coefficient `N_k` in `∂_ω̄ w_k = N_k`, `k ≥ 1`.
    pub fn n_coeff(&self, k: u32) -> Result<JetPoly> {
        if k < 1 {
            return Err(Error::Precondition(String::from("N_k needs k >= 1")));
        }
        self.check(k)?;
        Ok(n_unchecked(k, self.inhomogeneous_source))
    }

    fn d_omega_var(&self, v: &JetVar) -> Result<JetPoly> {
        Ok(match *v {
            JetVar::Gamma => Poly::zero(),
            JetVar::R => (&r() * &z(3)).scale(&Gq::ratio(1, 2)),
            JetVar::Z(j) => {
                self.check(j + 1)?;
                &z(j + 1) - &(&z(3) * &z(j)).scale(&Gq::ratio(j as i64, 2))
            }
            JetVar::ZBar(j) => &conj(&self.that(j)?) * &r_pow(-1),
            JetVar::W(k) => {
                self.check(k + 1)?;
                &w(k + 1) - &(&z(3) * &w(k)).scale(&Gq::ratio(k as i64, 2))
            }
            JetVar::WBar(k) => conj(&self.n_coeff(k)?),
        })
    }

    fn d_omega_bar_var(&self, v: &JetVar) -> Result<JetPoly> {
        Ok(match *v {
            JetVar::Gamma => Poly::zero(),
            JetVar::R => (&r() * &zbar(3)).scale(&Gq::ratio(1, 2)),
            JetVar::Z(j) => &self.that(j)? * &r_pow(-1),
            JetVar::ZBar(j) => {
                self.check(j + 1)?;
                &zbar(j + 1) - &(&zbar(3) * &zbar(j)).scale(&Gq::ratio(j as i64, 2))
            }
            JetVar::W(0) => {
                self.check(1)?;
                wbar(1)
            }
            JetVar::W(k) => self.n_coeff(k)?,
            JetVar::WBar(k) => {
                self.check(k + 1)?;
                &wbar(k + 1) - &(&zbar(3) * &wbar(k)).scale(&Gq::ratio(k as i64, 2))
            }
        })
    }

    /// `∂_ω`, the Leibniz extension of the generator rules.
    pub fn d_omega(&self, p: &JetPoly) -> Result<JetPoly> {
        p.derive(|v| self.d_omega_var(v))
    }

    /// `∂_ω̄`.
    pub fn d_omega_bar(&self, p: &JetPoly) -> Result<JetPoly> {
        p.derive(|v| self.d_omega_bar_var(v))
    }

    /// `∂_ω` reusing generator images across calls.
    pub fn d_omega_in(&self, cache: &mut ImageCache, p: &JetPoly) -> Result<JetPoly> {
        p.derive_cached(&mut cache.omega, |v| self.d_omega_var(v))
    }

    /// `∂_ω̄` reusing generator images across calls.
    pub fn d_omega_bar_in(&self, cache: &mut ImageCache, p: &JetPoly) -> Result<JetPoly> {
        p.derive_cached(&mut cache.omega_bar, |v| self.d_omega_bar_var(v))
    }

    /// `E(p) = r·∂_ω̄∂_ω p + ½(γ² + r²)p`.
    pub fn jacobi(&self, p: &JetPoly) -> Result<JetPoly> {
        let dd = self.d_omega_bar(&self.d_omega(p)?)?;
        Ok(&(&r() * &dd) + &(&half_gr_sum() * p))
    }
}

fn half_gr_sum() -> JetPoly {
    (&gamma_pow(2) + &r_pow(2)).scale(&Gq::ratio(1, 2))
}

fn gr_diff() -> JetPoly {
    &gamma_pow(2) - &r_pow(2)
}

const INTERNAL: Rules = Rules { cap: MAX_CAP, inhomogeneous_source: true };

fn that_unchecked(j: u32) -> JetPoly {
    assert!((3..=MAX_CAP + 1).contains(&j), "T-hat index out of range");
    if let Some(p) = THAT[j as usize].get() {
        return p.clone();
    }
    let value = if j == 3 {
        gr_diff()
    } else {
        let prev = that_unchecked(j - 1);
        let k = (j - 1) as i64;
        let d = INTERNAL.d_omega(&prev).expect("T-hat recursion within MAX_CAP");
        d + (&z(3) * &prev).scale(&Gq::ratio(k - 1, 2)) + (&gr_diff() * &z(j - 1)).scale(&Gq::ratio(k, 2))
    };
    THAT[j as usize].get_or_init(|| Box::new(value)).clone()
}

fn n_unchecked(k: u32, source: bool) -> JetPoly {
    assert!((1..=MAX_CAP).contains(&k), "N index out of range");
    let memo = if source { &N_SOURCE } else { &N_HOMOGENEOUS };
    if let Some(p) = memo[k as usize].get() {
        return p.clone();
    }
    let value = if k == 1 {
        let mut inner = -(&half_gr_sum() * &w(0));
        if source {
            inner = inner - r_pow(2);
        }
        &r_pow(-1) * &inner
    } else {
        let prev = n_unchecked(k - 1, source);
        let rules = Rules { cap: MAX_CAP, inhomogeneous_source: source };
        let m = (k - 1) as i64;
        let d = rules.d_omega(&prev).expect("N recursion within MAX_CAP");
        d + (&z(3) * &prev).scale(&Gq::ratio(m, 2))
            + (&(&gr_diff() * &r_pow(-1)) * &w(k - 1)).scale(&Gq::ratio(m, 2))
    };
    memo[k as usize].get_or_init(|| Box::new(value)).clone()
}

/// Snapshot of the `T̂_j` memo, ascending in `j`.
pub fn that_cache_snapshot() -> Vec<(u32, JetPoly)> {
    (3..=MAX_CAP + 1)
        .filter_map(|j| THAT[j as usize].get().map(|p| (j, p.clone())))
        .collect()
}

/// Seeds the `T̂_j` memo from a persisted table. Entries already present are
/// kept. Returns `false` if the supplied value disagrees with an existing one.
pub fn preload_that(j: u32, p: JetPoly) -> bool {
    if !(3..=MAX_CAP + 1).contains(&j) {
        return false;
    }
    let stored = THAT[j as usize].get_or_init(|| Box::new(p.clone()));
    *stored == p
}

/// `∂_ω` with default rules.
pub fn d_omega(p: &JetPoly) -> Result<JetPoly> {
    Rules::default().d_omega(p)
}

/// `∂_ω̄` with default rules.
pub fn d_omega_bar(p: &JetPoly) -> Result<JetPoly> {
    Rules::default().d_omega_bar(p)
}

/// `T̂_j` with default rules.
pub fn that(j: u32) -> Result<JetPoly> {
    Rules::default().that(j)
}

/// Jacobi operator with default rules.
pub fn jacobi_e(p: &JetPoly) -> Result<JetPoly> {
    Rules::default().jacobi(p)
}

/// Largest generator index in `p` (any kind), 0 if none.
pub fn max_index(p: &JetPoly) -> u32 {
    p.vars().into_iter().filter_map(|v| v.index()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: i64, d: i64) -> Gq {
        Gq::ratio(n, d)
    }

    #[test]
    fn d_omega_z3() {
        let expect = &z(4) - &z(3).pow(2).scale(&h(3, 2));
        assert_eq!(d_omega(&z(3)).unwrap(), expect);
    }

    #[test]
    fn d_omega_r_squared() {
        assert_eq!(d_omega(&r_pow(2)).unwrap(), &r_pow(2) * &z(3));
    }

    #[test]
    fn d_omega_b4_shape() {
        let p = &z(4) - &z(3).pow(2).scale(&h(5, 4));
        let expect = z(5) - (&z(3) * &z(4)).scale(&h(9, 2)) + z(3).pow(3).scale(&h(15, 4));
        assert_eq!(d_omega(&p).unwrap(), expect);
    }

    #[test]
    fn d_omega_bar_examples() {
        assert_eq!(d_omega_bar(&z(3)).unwrap(), &gr_diff() * &r_pow(-1));
        assert!(d_omega_bar(&gamma()).unwrap().is_zero());
        let p = &z(4) - &z(3).pow(2).scale(&h(7, 4));
        let expect = -(&(&gamma_pow(2) * &r_pow(-1)) * &z(3));
        assert_eq!(d_omega_bar(&p).unwrap(), expect);
    }

    #[test]
    fn that_low_orders() {
        assert_eq!(that(3).unwrap(), gr_diff());
        let t4 = &(gamma_pow(2).scale(&h(5, 2)) - r_pow(2).scale(&h(7, 2))) * &z(3);
        assert_eq!(that(4).unwrap(), t4);
    }

    #[test]
    fn n1_matches_inhomogeneous_jacobi() {
        let expect = &r_pow(-1) * &(-(&half_gr_sum() * &w(0)) - r_pow(2));
        assert_eq!(Rules::default().n_coeff(1).unwrap(), expect);
    }

    #[test]
    fn truncation_is_an_error() {
        let rules = Rules::with_cap(5);
        assert_eq!(rules.d_omega(&z(5)), Err(Error::TruncationExceeded { needed: 6, cap: 5 }));
        assert!(rules.d_omega(&z(4)).is_ok());
    }

    #[test]
    fn z3_is_jacobi() {
        assert!(jacobi_e(&z(3)).unwrap().is_zero());
        assert_eq!(jacobi_e(&Poly::one()).unwrap(), half_gr_sum());
    }

    #[test]
    fn jacobi_z4_matches_closed_form() {
        // E(z_j) = T̂_{j+1} − (j/2)(T̂_3 z_j + T̂_j z_3) + ½(γ²+r²) z_j
        let j = 4u32;
        let expect = that(j + 1).unwrap()
            - (&(&that(3).unwrap() * &z(j)) + &(&that(j).unwrap() * &z(3))).scale(&h(j as i64, 2))
            + &half_gr_sum() * &z(j);
        let got = jacobi_e(&z(j)).unwrap();
        assert!(!got.is_zero());
        assert_eq!(got, expect);
    }

    #[test]
    fn derivations_commute() {
        let p = &(&z(3) * &zbar(4)) + &(&r() * &w(2));
        let a = d_omega_bar(&d_omega(&p).unwrap()).unwrap();
        let b = d_omega(&d_omega_bar(&p).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conj_intertwines_derivations() {
        let p = &(&z(5) * &z(3)) + &(&gamma() * &r_pow(-1));
        assert_eq!(conj(&d_omega(&p).unwrap()), d_omega_bar(&conj(&p)).unwrap());
    }

    #[test]
    fn parse_names_roundtrip() {
        for v in [JetVar::Gamma, JetVar::R, JetVar::Z(7), JetVar::ZBar(3), JetVar::W(0), JetVar::WBar(2)] {
            assert_eq!(JetVar::parse(&v.name()), Some(v));
        }
        assert_eq!(JetVar::parse("z2"), None);
        assert_eq!(JetVar::parse("wbar0"), None);
    }
}
