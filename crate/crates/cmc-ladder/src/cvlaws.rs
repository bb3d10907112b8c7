//! Conservation laws `φ_n`, closedness, polynomial-level exactness, and the
//! Poisson-bracket 1-forms of pairs of Jacobi fields.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::jetring::{joint_antiderivative_with, r_pow, Ansatz, JetPoly, Rules};
use crate::poly::Poly;
use crate::scalar::Gq;

/// `prefactor · (f_omega ω + f_omega_bar ω̄)` modulo the contact ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    pub f_omega: JetPoly,
    pub f_omega_bar: JetPoly,
    pub prefactor: Gq,
}

impl OneForm {
    pub fn new(f_omega: JetPoly, f_omega_bar: JetPoly) -> Self {
        OneForm { f_omega, f_omega_bar, prefactor: Gq::one() }
    }

    /// The exact form `dF`.
    pub fn exact(rules: &Rules, f: &JetPoly) -> Result<Self> {
        Ok(OneForm::new(rules.d_omega(f)?, rules.d_omega_bar(f)?))
    }

    pub fn is_zero(&self) -> bool {
        self.prefactor.is_zero() || (self.f_omega.is_zero() && self.f_omega_bar.is_zero())
    }

    /// Components with the prefactor multiplied in.
    pub fn components(&self) -> (JetPoly, JetPoly) {
        (self.f_omega.scale(&self.prefactor), self.f_omega_bar.scale(&self.prefactor))
    }

    pub fn add(&self, o: &OneForm) -> OneForm {
        let (a, b) = self.components();
        let (c, d) = o.components();
        OneForm::new(&a + &c, &b + &d)
    }

    pub fn scale(&self, s: &Gq) -> OneForm {
        OneForm { prefactor: &self.prefactor * s, ..self.clone() }
    }

    /// Spectral weight of the form, counting `ω` as −1 and `ω̄` as +1.
    pub fn weight(&self) -> Option<i64> {
        let a = self.f_omega.weight_report().weight.map(|w| w - 1);
        let b = self.f_omega_bar.weight_report().weight.map(|w| w + 1);
        match (a, b) {
            (Some(x), Some(y)) if x != y => None,
            (Some(x), _) | (_, Some(x)) => Some(x),
            _ => None,
        }
    }
}

/// `φ_n = −i(C^{2n+2} ω + r⁻¹ B^{2n} ω̄)` with `B⁰ := 0`.
pub fn phi(n: u32, h: &Hierarchy) -> Result<OneForm> {
    let l = h
        .level(n)
        .ok_or_else(|| Error::Precondition(alloc::format!("hierarchy has no level {}", n)))?;
    let g = if n == 0 { Poly::zero() } else { &r_pow(-1) * &h.level(n - 1).unwrap().b };
    Ok(OneForm { f_omega: l.c.clone(), f_omega_bar: g, prefactor: -Gq::i() })
}

/// `d(fω + gω̄) = (∂_ω g − ∂_ω̄ f) ω∧ω̄`.
pub fn d_form(rules: &Rules, phi: &OneForm) -> Result<JetPoly> {
    let lhs = rules.d_omega(&phi.f_omega_bar)?;
    let rhs = rules.d_omega_bar(&phi.f_omega)?;
    Ok((&lhs - &rhs).scale(&phi.prefactor))
}

pub fn is_closed(rules: &Rules, phi: &OneForm) -> Result<bool> {
    d_form(rules, phi).map(|d| d.is_zero())
}

/// Outcome of the exactness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exactness {
    /// `F` with `dF` equal to the form (prefactor included).
    Witness(JetPoly),
    NonExact,
}

/// Looks for a polynomial primitive, first among z-pure candidates, then in
/// the extended ansatz. `NonExact` refers to the extended ansatz.
pub fn is_exact(rules: &Rules, phi: &OneForm) -> Result<Exactness> {
    match is_exact_in(rules, phi, Ansatz::ZPure)? {
        Exactness::NonExact => is_exact_in(rules, phi, Ansatz::extended()),
        w => Ok(w),
    }
}

pub fn is_exact_in(rules: &Rules, phi: &OneForm, ansatz: Ansatz) -> Result<Exactness> {
    if phi.is_zero() {
        return Ok(Exactness::Witness(Poly::zero()));
    }
    let (f, g) = phi.components();
    match joint_antiderivative_with(rules, &f, &g, ansatz) {
        Ok(w) => Ok(Exactness::Witness(w)),
        Err(Error::Obstructed) => Ok(Exactness::NonExact),
        Err(e) => Err(e),
    }
}

/// The 1-form whose class is the bracket `{P, Q}`:
/// `i[(P Q_ω − Q P_ω) ω + (−P Q_ω̄ + Q P_ω̄) ω̄]`.
///
/// The sign pattern is the one for which the form is closed whenever both
/// arguments are Jacobi fields.
pub fn poisson_form(rules: &Rules, p: &JetPoly, q: &JetPoly) -> Result<OneForm> {
    let (pw, qw) = (rules.d_omega(p)?, rules.d_omega(q)?);
    let (pb, qb) = (rules.d_omega_bar(p)?, rules.d_omega_bar(q)?);
    let f = &(p * &qw) - &(q * &pw);
    let g = &(q * &pb) - &(p * &qb);
    Ok(OneForm { f_omega: f, f_omega_bar: g, prefactor: Gq::i() })
}

/// Per-level summary used by reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvLawRow {
    pub n: u32,
    pub closed: bool,
    /// `None` when exactness was not requested for this level.
    pub exact: Option<bool>,
    pub weight: Option<i64>,
    /// Spectral weight of `a^{2n+3}`, the Jacobi field generating `dφ_n`.
    pub generating_weight: Option<i64>,
}

pub fn report(h: &Hierarchy, max_n: u32, exact_up_to: u32) -> Result<Vec<CvLawRow>> {
    let rules = h.rules();
    let mut out = Vec::new();
    for n in 0..=max_n {
        let form = phi(n, h)?;
        let closed = is_closed(rules, &form)?;
        let exact = if n <= exact_up_to {
            Some(matches!(is_exact(rules, &form)?, Exactness::Witness(_)))
        } else {
            None
        };
        let generating_weight = h.a(n + 1).and_then(|a| a.weight_report().weight);
        out.push(CvLawRow { n, closed, exact, weight: form.weight(), generating_weight });
    }
    Ok(out)
}
