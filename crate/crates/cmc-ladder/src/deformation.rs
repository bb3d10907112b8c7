//! First-order deformation scaling the Hopf differential by `e^{−2t}`.
//!
//! The dot is a derivation on the jet ring with `γ̇ = 0`,
//! `ṙ = −2(w₀ + 1) r`, `ż_j = (j − 2) z_j − ε_j` and
//! `ε_j = Σ_{k=2}^{j−1} C_j^k w_{j−k} z_k` (`z₂ := 1`), where `w₀ = u` is the
//! inhomogeneous Jacobi field. Only a single dot is supported, so the
//! `w` generators have no dot rule. A factor `h₂^{k/2}` contributes
//! `−k(w₀ + 1)`.

use alloc::format;
use alloc::vec::Vec;

use crate::cvlaws::{d_form, phi, OneForm};
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, AbcTriple};
use crate::jetring::{conj, r, w, z, JetPoly, JetVar, Rules};
use crate::poly::Poly;
use crate::scalar::Gq;

/// `C_j^k` for `2 ≤ k ≤ j`: `C_j² = 4`, `C_j^j = 2j`, Pascal in between.
pub fn c_table(j: u32, k: u32) -> i64 {
    assert!(j >= 3 && (2..=j).contains(&k), "C_j^k needs 2 <= k <= j, j >= 3");
    if k == 2 {
        4
    } else if k == j {
        2 * j as i64
    } else {
        c_table(j - 1, k - 1) + c_table(j - 1, k)
    }
}

/// `ε_j = h₂^{−j/2} δ_j`; zero for `j = 2`.
pub fn epsilon(j: u32) -> Result<JetPoly> {
    if j < 2 {
        return Err(Error::Precondition(format!("epsilon_{} is undefined", j)));
    }
    let mut out = JetPoly::zero();
    for k in 2..j {
        let zk = if k == 2 { JetPoly::one() } else { z(k) };
        out = &out + &(&w(j - k) * &zk).scale(&Gq::int(c_table(j, k)));
    }
    Ok(out)
}

/// Dot of one generator.
pub fn dot_var(v: &JetVar) -> Result<JetPoly> {
    Ok(match *v {
        JetVar::Gamma => Poly::zero(),
        JetVar::R => (&(&w(0) + &JetPoly::one()) * &r()).scale(&Gq::int(-2)),
        JetVar::Z(j) => &z(j).scale(&Gq::int(j as i64 - 2)) - &epsilon(j)?,
        JetVar::ZBar(j) => &Poly::var(JetVar::ZBar(j)).scale(&Gq::int(j as i64 - 2)) - &conj(&epsilon(j)?),
        other => {
            return Err(Error::Precondition(format!("{:?} has no dot rule (first-order deformation only)", other)))
        }
    })
}

/// Dot of a polynomial in `γ, r, z, z̄`.
pub fn dot(p: &JetPoly) -> Result<JetPoly> {
    p.derive(dot_var)
}

/// Dot of `h₂^{k/2} · p`, returned as the coefficient of `h₂^{k/2}`.
pub fn dot_weighted(p: &JetPoly, h_weight: i32) -> Result<JetPoly> {
    let shift = (&(&w(0) + &JetPoly::one()) * p).scale(&Gq::int(-(h_weight as i64)));
    Ok(&dot(p)? + &shift)
}

/// Dotted coefficients `ȧ^{2n+1}, ḃ^{2n+2}, ċ^{2n+2}` with the
/// prefactors and `h₂` powers of the undotted frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DottedLevel {
    pub n: u32,
    pub frame: AbcTriple,
    pub dotted: AbcTriple,
}

impl DottedLevel {
    /// `dotted − m · frame` for each of `a, b, c`, prefactors applied.
    pub fn remainder(&self, m: [i64; 3]) -> [JetPoly; 3] {
        let f = self.frame.scaled();
        let d = self.dotted.scaled();
        [
            &d[0] - &f[0].scale(&Gq::int(m[0])),
            &d[1] - &f[1].scale(&Gq::int(m[1])),
            &d[2] - &f[2].scale(&Gq::int(m[2])),
        ]
    }
}

pub fn dot_level(h: &Hierarchy, n: u32) -> Result<DottedLevel> {
    let level = h.level(n).ok_or_else(|| Error::Precondition(format!("hierarchy has no level {}", n)))?;
    let frame = level.abc_frame();
    let [ka, kb, kc] = frame.h_weights;
    let dotted = AbcTriple {
        a_poly: dot_weighted(&frame.a_poly, ka)?,
        b_poly: dot_weighted(&frame.b_poly, kb)?,
        c_poly: dot_weighted(&frame.c_poly, kc)?,
        ..frame.clone()
    };
    Ok(DottedLevel { n, frame, dotted })
}

/// `ψ_j = φ̇_j − (2j − 1) φ_j`. With `ω̇ = −ω` and
/// `φ_j = −i(C ω + r⁻¹B ω̄)` this is
/// `−i[(Ċ − 2jC) ω + ((r⁻¹B)˙ − 2j r⁻¹B) ω̄]`.
pub fn psi(j: u32, h: &Hierarchy) -> Result<OneForm> {
    let f = phi(j, h)?;
    let k = Gq::int(2 * j as i64);
    let fo = &dot(&f.f_omega)? - &f.f_omega.scale(&k);
    let fb = &dot(&f.f_omega_bar)? - &f.f_omega_bar.scale(&k);
    Ok(OneForm { f_omega: fo, f_omega_bar: fb, prefactor: f.prefactor })
}

/// Exact closedness of `ψ_j` under `rules`; the inhomogeneous Jacobi
/// relation enters through the `∂_ω̄ w_k` rule.
pub fn check_psi_closed_with(rules: &Rules, j: u32, h: &Hierarchy) -> Result<bool> {
    Ok(d_form(rules, &psi(j, h)?)?.is_zero())
}

pub fn check_psi_closed(j: u32, h: &Hierarchy) -> Result<bool> {
    check_psi_closed_with(h.rules(), j, h)
}

/// Closedness with `∂_ω̄ w_k` left unresolved, i.e. without the
/// inhomogeneous Jacobi relation: the unknowns `∂_ω̄ w_k` enter `dψ_j` through
/// `−∂f/∂w_k`, so `ψ_j` is closed only if its `ω`-part is free of every `w_k`
/// and the resolved check passes.
pub fn check_psi_closed_unresolved(j: u32, h: &Hierarchy) -> Result<bool> {
    let form = psi(j, h)?;
    let (f, _) = form.components();
    let free = f.vars().iter().all(|v| !matches!(v, JetVar::W(_)));
    Ok(free && check_psi_closed(j, h)?)
}

/// Total degree in `w_k, w̄_k` of each term.
pub fn w_degrees(p: &JetPoly) -> Vec<i32> {
    let mut out: Vec<i32> = p
        .terms()
        .map(|(m, _)| {
            m.factors().iter().filter(|(v, _)| matches!(v, JetVar::W(_) | JetVar::WBar(_))).map(|(_, e)| *e).sum()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `dot ∘ D − D ∘ dot − D` applied to `p`, for `D = ∂_ω` (`bar = false`) or
/// `∂_ω̄`. Vanishes because `ω̇ = −ω` and the dot commutes with `d`.
pub fn commutator_defect(rules: &Rules, p: &JetPoly, bar: bool) -> Result<JetPoly> {
    let d = |q: &JetPoly| if bar { rules.d_omega_bar(q) } else { rules.d_omega(q) };
    let dp = d(p)?;
    Ok(&(&dot(&dp)? - &d(&dot(p)?)?) - &dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetring::{gamma, r_pow};

    #[test]
    fn table_and_first_epsilons() {
        assert_eq!(c_table(4, 3), 10);
        assert_eq!(c_table(5, 2), 4);
        assert_eq!(c_table(5, 5), 10);
        assert_eq!(epsilon(2).unwrap(), JetPoly::zero());
        assert_eq!(epsilon(3).unwrap(), w(1).scale(&Gq::int(4)));
        let e4 = &w(2).scale(&Gq::int(4)) + &(&w(1) * &z(3)).scale(&Gq::int(10));
        assert_eq!(epsilon(4).unwrap(), e4);
    }

    #[test]
    fn dot_of_r_and_gamma() {
        let rr = r();
        assert_eq!(dot(&rr).unwrap(), &(&rr * &w(0)).scale(&Gq::int(-2)) - &rr.scale(&Gq::int(2)));
        assert!(dot(&gamma()).unwrap().is_zero());
        // (r⁻¹)˙ = 2(w₀ + 1) r⁻¹
        let inv = r_pow(-1);
        assert_eq!(dot(&inv).unwrap(), (&(&w(0) + &JetPoly::one()) * &inv).scale(&Gq::int(2)));
    }

    #[test]
    fn w_has_no_dot() {
        assert!(dot(&w(1)).is_err());
    }

    #[test]
    fn psi_zero_vanishes() {
        let h = Hierarchy::build(1).unwrap();
        assert!(psi(0, &h).unwrap().is_zero());
    }
}
