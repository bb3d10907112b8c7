//! The ladder of formal Killing coefficients `(A^{2n+1}, B^{2n+2}, C^{2n+2})`.
//!
//! Two independent constructions are provided. The algebraic recursion is
//! purely differential-algebraic and is the production path; the integration
//! recursion solves a `∂_ω̄` antiderivative problem at every step and works in
//! the `γ`-free normalization `A³ = z₃`. The two agree up to the constant
//! `2(−γ)^{n−1}` at level `n`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jetring::{
    antiderivative_omega_bar_with, gamma, gamma_pow, r, r_pow, z, JetPoly, JetVar, Rules,
};
use crate::poly::{Mono, Poly};
use crate::scalar::Gq;

/// One rung `(A^{2n+1}, B^{2n+2}, C^{2n+2})` in the normalized frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyLevel {
    pub n: u32,
    pub a: JetPoly,
    pub b: JetPoly,
    pub c: JetPoly,
}

/// Scaling data back to the `(a, b, c)` frame:
/// `a = 2A`, `b = −i h₂^{−1/2} B`, `c = −i h₂^{1/2} C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbcTriple {
    pub a_poly: JetPoly,
    pub b_poly: JetPoly,
    pub c_poly: JetPoly,
    /// Exponents of `h₂^{1/2}` multiplying `a`, `b`, `c`.
    pub h_weights: [i32; 3],
    pub prefactors: [Gq; 3],
}

impl AbcTriple {
    /// `prefactor · poly` for `a`, `b`, `c` in turn; the `h₂` power is in
    /// [`AbcTriple::h_weights`].
    pub fn scaled(&self) -> [JetPoly; 3] {
        [
            self.a_poly.scale(&self.prefactors[0]),
            self.b_poly.scale(&self.prefactors[1]),
            self.c_poly.scale(&self.prefactors[2]),
        ]
    }
}

impl HierarchyLevel {
    pub fn abc_frame(&self) -> AbcTriple {
        AbcTriple {
            a_poly: self.a.clone(),
            b_poly: self.b.clone(),
            c_poly: self.c.clone(),
            h_weights: [0, -1, 1],
            prefactors: [Gq::int(2), -Gq::i(), -Gq::i()],
        }
    }
}

/// The algebraic ladder, grown one level at a time.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    levels: Vec<HierarchyLevel>,
    next_a: JetPoly,
    rules: Rules,
}

/// Level 0 and the seed Jacobi field `A³ = z₃/2`.
pub fn seed() -> (HierarchyLevel, JetPoly) {
    let l0 = HierarchyLevel { n: 0, a: Poly::zero(), b: gamma(), c: Poly::int(-1) };
    (l0, z(3).scale(&Gq::ratio(1, 2)))
}

impl Default for Hierarchy {
    fn default() -> Self {
        Hierarchy::new(Rules::default())
    }
}

impl Hierarchy {
    pub fn new(rules: Rules) -> Self {
        let (l0, a3) = seed();
        Hierarchy { levels: alloc::vec![l0], next_a: a3, rules }
    }

    /// Levels `0..=depth`, computed by the algebraic recursion.
    pub fn build(depth: u32) -> Result<Self> {
        let mut rules = Rules::default();
        rules.cap = rules.cap.max(2 * depth + 6);
        let mut h = Hierarchy::new(rules);
        while h.depth() < depth {
            h.step()?;
        }
        Ok(h)
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    /// Index of the last complete level.
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn levels(&self) -> &[HierarchyLevel] {
        &self.levels
    }

    pub fn level(&self, n: u32) -> Option<&HierarchyLevel> {
        self.levels.get(n as usize)
    }

    /// `A^{2n+1}` for `n ≤ depth + 1`.
    pub fn a(&self, n: u32) -> Option<&JetPoly> {
        if (n as usize) < self.levels.len() {
            Some(&self.levels[n as usize].a)
        } else if n as usize == self.levels.len() {
            Some(&self.next_a)
        } else {
            None
        }
    }

    /// The Jacobi field `a^{2n+1} = 2A^{2n+1}`.
    pub fn jacobi_field(&self, n: u32) -> Option<JetPoly> {
        self.a(n).map(|a| a.scale(&Gq::int(2)))
    }

    fn bc(&self, i: u32) -> (&JetPoly, &JetPoly) {
        let l = &self.levels[i as usize];
        (&l.b, &l.c)
    }

    fn a_hat(&self, i: u32, j: u32) -> JetPoly {
        let a = (self.a(i).unwrap() * self.a(j + 1).unwrap()).scale(&Gq::int(4));
        let (bi, ci) = self.bc(i);
        let (bj, cj) = self.bc(j);
        a + (&(bi * cj) + &(bj * ci)).scale(&Gq::int(2))
    }

    /// `m̂_n` for the next level `n = depth + 1`.
    fn m_hat(&self, n: u32) -> JetPoly {
        let mut s = Poly::zero();
        for i in 1..=n / 2 {
            let j = n - i;
            s = s + self.a_hat(i, j);
        }
        if n % 2 == 0 {
            let h = n / 2;
            let extra = (self.a(h).unwrap() * self.a(h + 1).unwrap()).scale(&Gq::int(4)) - self.a_hat(h, h);
            s + extra.scale(&Gq::ratio(1, 2))
        } else {
            let a = self.a(n.div_ceil(2)).unwrap();
            s + (a * a).scale(&Gq::int(2))
        }
    }

    /// Completes level `depth + 1` and produces the next `A`.
    pub fn step(&mut self) -> Result<&HierarchyLevel> {
        let n = self.levels.len() as u32;
        let a = self.next_a.clone();
        let m = self.m_hat(n).scale(&Gq::ratio(1, 4));
        let da = self.rules.d_omega(&a)?;
        let inv_g = gamma_pow(-1);
        let b = &da + &m;
        let c = &(&da - &m) * &inv_g;
        let a3 = self.a(1).unwrap().clone();
        let next = &(&(&a3 * &b) - &self.rules.d_omega(&b)?) * &inv_g;
        let level = HierarchyLevel { n, a, b, c };
        let quick = quick_checks(&level, &self.rules)?;
        if let Some(bad) = quick.iter().find(|c| !c.passed) {
            return Err(Error::InvariantViolation(alloc::format!("{}: {}", bad.id, bad.detail)));
        }
        self.levels.push(level);
        self.next_a = next;
        Ok(self.levels.last().unwrap())
    }
}

/// One step of the integration recursion in the `γ`-free normalization.
///
/// Returns the intermediate `C = (∂_ω̄)^{-1}(γ² r⁻¹ A)` and the next field
/// `A' = ∂_ω∂_ω A − ½ z₃ (∂_ω A + C)`.
pub fn step_integration_detail(rules: &Rules, a: &JetPoly, weight: i64) -> Result<(JetPoly, JetPoly)> {
    let target = &(&gamma_pow(2) * &r_pow(-1)) * a;
    let c = antiderivative_omega_bar_with(rules, &target, weight + 1)?;
    let da = rules.d_omega(a)?;
    let dda = rules.d_omega(&da)?;
    let next = &dda - &(&z(3) * &(&da + &c)).scale(&Gq::ratio(1, 2));
    Ok((c, next))
}

pub fn step_integration(a: &JetPoly, weight: i64) -> Result<JetPoly> {
    let rules = Rules::with_cap(crate::jetring::max_index(a) + 3);
    step_integration_detail(&rules, a, weight).map(|(_, next)| next)
}

/// `γ`-free Jacobi fields `A_1 = z₃, A_2, …, A_count` by the integration recursion.
pub fn integration_ladder(count: u32) -> Result<Vec<JetPoly>> {
    let mut out = alloc::vec![z(3)];
    while (out.len() as u32) < count {
        let n = out.len() as i64;
        let next = step_integration(out.last().unwrap(), 2 * n - 1)?;
        out.push(next);
    }
    Ok(out)
}

/// The constant `2(−γ)^{n−1}` with `A_free = const · A_normalized` at level `n`.
pub fn free_normalization(n: u32) -> JetPoly {
    let sign = if (n - 1) % 2 == 0 { 2 } else { -2 };
    gamma_pow(n as i32 - 1).scale(&Gq::int(sign))
}

/// A named invariant check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(id: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { id, passed, detail: detail.into() }
}

#[derive(Clone, Debug)]
pub struct LevelReport {
    pub n: u32,
    pub checks: Vec<Check>,
}

impl LevelReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn leading_ok(p: &JetPoly, g_exp: i32, j: u32, coeff: Gq) -> bool {
    let m = Mono::from_factors([(JetVar::Gamma, g_exp), (JetVar::Z(j), 1)]);
    p.coeff(&m) == coeff
}

fn quick_checks(l: &HierarchyLevel, rules: &Rules) -> Result<Vec<Check>> {
    let n = l.n as i64;
    let mut out = Vec::new();
    let wa = l.a.weight_report();
    let wb = l.b.weight_report();
    let wc = l.c.weight_report();
    let a_ok = if n == 0 { l.a.is_zero() } else { wa.homogeneous && wa.weight == Some(2 * n - 1) };
    out.push(check("weight.A", a_ok, alloc::format!("{:?}", wa)));
    let bc_ok = wb.weight == Some(2 * n) && wc.weight == Some(2 * n) && wb.homogeneous && wc.homogeneous;
    out.push(check("weight.BC", bc_ok, alloc::format!("B {:?}, C {:?}", wb, wc)));
    let db = rules.d_omega_bar(&l.b)?;
    out.push(check("closure.B", db == -(&r() * &l.a), "dOmegaBar(B) = -r A"));
    let dc = rules.d_omega_bar(&l.c)?;
    out.push(check("closure.C", dc == -(&(&gamma() * &r_pow(-1)) * &l.a), "dOmegaBar(C) = -gamma r^-1 A"));
    Ok(out)
}

/// Runs every invariant of a level. `next_a` enables the cross-route check
/// `A^{2n+3} = −∂_ω C − A³ C`. Failures are collected, never raised.
pub fn verify_level(rules: &Rules, l: &HierarchyLevel, next_a: Option<&JetPoly>) -> LevelReport {
    let mut checks = match quick_checks(l, rules) {
        Ok(c) => c,
        Err(e) => alloc::vec![check("derivation", false, alloc::format!("{}", e))],
    };
    let n = l.n;
    match rules.jacobi(&l.a.scale(&Gq::int(2))) {
        Ok(e) => checks.push(check("jacobi", e.is_zero(), alloc::format!("{} residual terms", e.len()))),
        Err(e) => checks.push(check("jacobi", false, alloc::format!("{}", e))),
    }
    if n >= 1 {
        let s = |k: u32| if k % 2 == 0 { Gq::ratio(1, 2) } else { Gq::ratio(-1, 2) };
        let g = 1 - n as i32;
        checks.push(check("leading.A", leading_ok(&l.a, g, 2 * n + 1, s(n - 1)), "A leading term"));
        checks.push(check("leading.B", leading_ok(&l.b, g, 2 * n + 2, s(n + 1)), "B leading term"));
        checks.push(check("leading.C", leading_ok(&l.c, g - 1, 2 * n + 2, s(n + 1)), "C leading term"));
    }
    let rational = [&l.a, &l.b, &l.c].iter().all(|p| p.terms().all(|(_, c)| c.is_real()));
    checks.push(check("rational", rational, "coefficients are rational"));
    if let Some(next) = next_a {
        let a3 = z(3).scale(&Gq::ratio(1, 2));
        match rules.d_omega(&l.c) {
            Ok(dc) => {
                let via_c = -(dc + &a3 * &l.c);
                checks.push(check("cross.C-route", &via_c == next, "A' = -dOmega(C) - A3 C"));
            }
            Err(e) => checks.push(check("cross.C-route", false, alloc::format!("{}", e))),
        }
    }
    LevelReport { n, checks }
}

impl Hierarchy {
    /// Verifies every complete level.
    pub fn verify_all(&self) -> Vec<LevelReport> {
        self.levels
            .iter()
            .map(|l| verify_level(&self.rules, l, self.a(l.n + 1)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetring::c;

    fn q(n: i64, d: i64) -> Gq {
        Gq::ratio(n, d)
    }

    #[test]
    fn level_one_matches_table() {
        let h = Hierarchy::build(1).unwrap();
        let l1 = h.level(1).unwrap();
        let b4 = (&z(4) - &z(3).pow(2).scale(&q(5, 4))).scale(&q(1, 2));
        let c4 = &(&z(4) - &z(3).pow(2).scale(&q(7, 4))) * &gamma_pow(-1).scale(&q(1, 2));
        assert_eq!(l1.b, b4);
        assert_eq!(l1.c, c4);
        let a5 = z(5) - (&z(4) * &z(3)).scale(&q(5, 1)) + z(3).pow(3).scale(&q(35, 8));
        let expect = &a5 * &gamma_pow(-1).scale(&q(-1, 2));
        assert_eq!(h.a(2).unwrap(), &expect);
    }

    #[test]
    fn m_hat_one() {
        let h = Hierarchy::default();
        assert_eq!(h.m_hat(1), z(3).pow(2).scale(&q(1, 2)));
    }

    #[test]
    fn integration_first_step() {
        let rules = Rules::default();
        let (cc, next) = step_integration_detail(&rules, &z(3), 1).unwrap();
        assert_eq!(cc, &z(3).pow(2).scale(&q(7, 4)) - &z(4));
        let a5 = z(5) - (&z(3) * &z(4)).scale(&q(5, 1)) + z(3).pow(3).scale(&q(35, 8));
        assert_eq!(next, a5);
    }

    #[test]
    fn corrupted_level_fails_jacobi() {
        let h = Hierarchy::build(2).unwrap();
        let mut l = h.level(1).unwrap().clone();
        l.a = &l.a + &(&z(3).pow(3) * &c(1, 7));
        let rep = verify_level(h.rules(), &l, h.a(2));
        assert!(!rep.passed());
        assert!(rep.checks.iter().any(|c| c.id == "jacobi" && !c.passed));
    }

    #[test]
    fn low_levels_verify() {
        let h = Hierarchy::build(3).unwrap();
        for rep in h.verify_all() {
            assert!(rep.passed(), "level {}: {:?}", rep.n, rep.checks);
        }
    }

    #[test]
    fn normalization_constant_level_two() {
        let h = Hierarchy::build(2).unwrap();
        let free = integration_ladder(2).unwrap();
        assert_eq!(&free_normalization(2) * h.a(2).unwrap(), free[1]);
    }
}
