//! The polynomial Killing field of a level-`m` relation, its spectral
//! polynomial `P(λ)`, and the translation from jets to the structure frame.
//!
//! Coefficients are kept in the bold frame `𝐚 = λ^{½} â`,
//! `𝐛 = λ^{−½} h₂^{½} b̂`, `𝐜 = λ^{½} h₂^{−½} ĉ`, where every entry is an
//! honest polynomial in `λ` with jet-ring coefficients. In jets,
//! `a^{2n+1} = 2A`, `h₂^{½} b^{2n+2} = −iB`, `h₂^{−½} c^{2n+2} = −iC`,
//! `h₂^{½} c̄^{2n+2} = i r C̄`, `h₂^{−½} b̄^{2n+2} = i r⁻¹ B̄`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::system::{self, FtPoly, FtVar};
use super::FiniteTypeSpec;
use crate::error::{Error, Result};
use crate::hierarchy::{free_normalization, step_integration_detail, Hierarchy};
use crate::jetring::{self, r_pow, JetPoly, JetVar, Rules};
use crate::poly::Poly;
use crate::scalar::Gq;

/// A polynomial in `λ` with jet coefficients, lowest degree first.
pub type LambdaPoly = Vec<JetPoly>;

fn lp_add(out: &mut LambdaPoly, k: usize, p: &JetPoly) {
    if out.len() <= k {
        out.resize(k + 1, Poly::zero());
    }
    out[k] = &out[k] + p;
}

fn lp_trim(mut p: LambdaPoly) -> LambdaPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn lp_mul(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let mut out = Vec::new();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                lp_add(&mut out, i + j, &(x * y));
            }
        }
    }
    out
}

/// `Σ_k c_k λ^k` for scalar constants, lowest degree first.
type ScalarPoly = Vec<Gq>;

/// `p_j(λ) = −1 + Σ_{k=j+1}^{m−1} U_k λ^{m−k}`.
fn p_coeffs(spec: &FiniteTypeSpec, j: u32) -> ScalarPoly {
    let m = spec.m();
    let mut out = alloc::vec![Gq::zero(); m as usize];
    out[0] = Gq::int(-1);
    for k in (j + 1)..m {
        let d = (m - k) as usize;
        out[d] = &out[d] + &spec.u()[k as usize - 1];
    }
    out
}

/// `q_j(λ) = −Σ_{k=j}^{m−1} V_k λ^{m+k−1}`.
fn q_coeffs(spec: &FiniteTypeSpec, j: u32) -> ScalarPoly {
    let m = spec.m();
    let mut out = alloc::vec![Gq::zero(); 2 * m as usize];
    for k in j..m {
        let d = (m + k - 1) as usize;
        out[d] = &out[d] - &spec.v()[k as usize - 1];
    }
    out
}

/// Adds `λ^shift · s(λ) · p` (a negative `shift` is absorbed by `s`).
fn add_scaled(out: &mut LambdaPoly, s: &ScalarPoly, shift: i64, p: &JetPoly, sign: i64) {
    if p.is_zero() {
        return;
    }
    for (d, c) in s.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = d as i64 + shift;
        assert!(k >= 0, "negative lambda power in the Killing field");
        lp_add(out, k as usize, &p.scale(&(c * &Gq::int(sign))));
    }
}

/// `𝐗 = (𝐚, 𝐛, 𝐜)` in the bold frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingField {
    pub m: u32,
    pub a: LambdaPoly,
    pub b: LambdaPoly,
    pub c: LambdaPoly,
}

/// Support (degrees with nonzero coefficient) of a `λ`-polynomial.
pub fn support(p: &LambdaPoly) -> Vec<usize> {
    p.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, _)| k).collect()
}

fn need_depth(h: &Hierarchy, depth: u32) -> Result<()> {
    if h.depth() < depth {
        return Err(Error::Precondition(format!("hierarchy depth {} < {}", h.depth(), depth)));
    }
    Ok(())
}

impl KillingField {
    /// Assembles the Killing field from the hierarchy through level `m − 1`.
    pub fn build(spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<KillingField> {
        let m = spec.m();
        need_depth(h, m - 1)?;
        let i = Gq::i();
        let lv = |n: u32| h.level(n).unwrap();
        let a_jet = |n: u32| lv(n).a.scale(&Gq::int(2));
        let abar_jet = |n: u32| jetring::conj(&lv(n).a).scale(&Gq::int(2));
        // h^{½} b^{2n+2}, h^{½} c̄^{2n+2}, h^{−½} c^{2n+2}, h^{−½} b̄^{2n+2}
        let beta = |n: u32| lv(n).b.scale(&-&i);
        let cbar_up = |n: u32| (&r_pow(1) * &jetring::conj(&lv(n).c)).scale(&i);
        let kappa = |n: u32| lv(n).c.scale(&-&i);
        let bbar_down = |n: u32| (&r_pow(-1) * &jetring::conj(&lv(n).b)).scale(&i);

        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut c = Vec::new();
        let p0 = p_coeffs(spec, 0);
        add_scaled(&mut b, &p0, 0, &beta(0), 1);
        add_scaled(&mut c, &p0, 0, &kappa(0), 1);
        for j in 1..m {
            let p = p_coeffs(spec, j);
            let q = q_coeffs(spec, j);
            let jj = j as i64;
            add_scaled(&mut a, &p, jj, &a_jet(j), 1);
            add_scaled(&mut a, &q, 1 - jj, &abar_jet(j), 1);
            add_scaled(&mut b, &p, jj, &beta(j), 1);
            add_scaled(&mut b, &q, 1 - jj, &cbar_up(j - 1), -1);
            add_scaled(&mut c, &p, jj, &kappa(j), 1);
            add_scaled(&mut c, &q, 1 - jj, &bbar_down(j - 1), -1);
        }
        Ok(KillingField { m, a: lp_trim(a), b: lp_trim(b), c: lp_trim(c) })
    }

    /// `P(λ) = λ⁻¹𝐚² − 4𝐛𝐜`, coefficients `P_0..P_{4m−4}`.
    pub fn spectral_coefficients(&self) -> LambdaPoly {
        let aa = lp_mul(&self.a, &self.a);
        let mut out: LambdaPoly = Vec::new();
        for (k, t) in aa.iter().enumerate() {
            if k == 0 {
                assert!(t.is_zero(), "a(0) must vanish");
                continue;
            }
            lp_add(&mut out, k - 1, t);
        }
        for (k, t) in lp_mul(&self.b, &self.c).iter().enumerate() {
            lp_add(&mut out, k, &t.scale(&Gq::int(-4)));
        }
        lp_trim(out)
    }
}

/// The jet form of the relation, `a^{2m+1} − Σ U_j a^{2j+1} + V_j ā^{2j+1}`.
pub fn jet_relation(spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<JetPoly> {
    let m = spec.m();
    let top = h.jacobi_field(m).ok_or_else(|| Error::Precondition(format!("hierarchy lacks a{}", 2 * m + 1)))?;
    let mut out = top;
    for j in 1..m {
        let aj = h.jacobi_field(j).unwrap();
        out = out - aj.scale(&spec.u()[j as usize - 1]) - jetring::conj(&aj).scale(&spec.v()[j as usize - 1]);
    }
    Ok(out)
}

/// Solves a polynomial that is linear in `var` with a monomial coefficient.
fn solve_linear(p: &JetPoly, var: JetVar) -> Result<JetPoly> {
    let parts = p.collect_by(&var);
    if parts.keys().any(|&e| !(0..=1).contains(&e)) {
        return Err(Error::InvariantViolation(format!("{:?} does not enter linearly", var)));
    }
    let lead = parts.get(&1).ok_or_else(|| Error::InvariantViolation(format!("{:?} is absent", var)))?;
    let inv = lead
        .inv_monomial()
        .ok_or_else(|| Error::InvariantViolation(format!("coefficient of {:?} is not a monomial", var)))?;
    let rest = parts.get(&0).cloned().unwrap_or_default();
    Ok(-(&rest * &inv))
}

/// Rewrites jets above `z_{2m}` using the relation and `order` of its
/// `∂_ω`-derivatives, together with their conjugates. Optionally also
/// eliminates `z̄_{2m}` through the `∂_ω̄`-derivative of the relation, which
/// is a constraint among the lower jets.
#[derive(Clone, Debug)]
pub struct RelationReducer {
    /// Highest generator first.
    solutions: Vec<(JetVar, JetPoly)>,
    tail: Option<(JetVar, JetPoly)>,
}

impl RelationReducer {
    pub fn new(spec: &FiniteTypeSpec, h: &Hierarchy, order: u32) -> Result<Self> {
        let m = spec.m();
        let rules = Rules::with_cap(2 * m + order + 4);
        let mut rel = jet_relation(spec, h)?;
        let mut sols = Vec::new();
        for k in 0..=order {
            let var = JetVar::Z(2 * m + 1 + k);
            let s = solve_linear(&rel, var)?;
            sols.push((JetVar::ZBar(2 * m + 1 + k), jetring::conj(&s)));
            sols.push((var, s));
            if k < order {
                rel = rules.d_omega(&rel)?;
            }
        }
        sols.reverse();
        Ok(RelationReducer { solutions: sols, tail: None })
    }

    /// Adds the elimination of `z̄_{2m}` by `∂_ω̄` of the relation.
    pub fn with_bar_constraint(mut self, spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<Self> {
        let m = spec.m();
        let rules = Rules::with_cap(2 * m + 4);
        let e = self.reduce(&rules.d_omega_bar(&jet_relation(spec, h)?)?);
        let var = JetVar::ZBar(2 * m);
        self.tail = Some((var, solve_linear(&e, var)?));
        Ok(self)
    }

    pub fn reduce(&self, p: &JetPoly) -> JetPoly {
        let mut out = p.clone();
        for (var, sol) in &self.solutions {
            if out.vars().contains(var) {
                out = out.substitute(|v| (v == var).then(|| sol.clone()));
            }
        }
        if let Some((var, sol)) = &self.tail {
            out = out.substitute(|v| (v == var).then(|| sol.clone()));
        }
        out
    }
}

/// `(k, ∂_ω P_k, ∂_ω̄ P_k)` reduced by the relation and its `∂_ω̄`
/// constraint; all vanish exactly when `P(λ)` is a first integral.
pub fn first_integral_defects(spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<Vec<(usize, JetPoly, JetPoly)>> {
    let x = KillingField::build(spec, h)?;
    let red = RelationReducer::new(spec, h, 0)?.with_bar_constraint(spec, h)?;
    let rules = Rules::with_cap(2 * spec.m() + 4);
    let mut out = Vec::new();
    for (k, pk) in x.spectral_coefficients().iter().enumerate() {
        let dw = red.reduce(&rules.d_omega(pk)?);
        let db = red.reduce(&rules.d_omega_bar(pk)?);
        out.push((k, dw, db));
    }
    Ok(out)
}

/// The shift identity: `U₀ = P^{2m+2}/(iγ)` with
/// `P^{2m+2} = h₂^{½}(−b^{2m+2} + Σ_j U_j b^{2j+2} − V_j c̄^{2j})`, its two
/// derivatives modulo the relation, and the defect of
/// `a^{2m+3} = Σ_j (U_j a^{2j+3} + V_j ā^{2j−1}) + U₀ a³`.
#[derive(Clone, Debug)]
pub struct ShiftReport {
    pub u0: JetPoly,
    pub d_omega_u0: JetPoly,
    pub d_omega_bar_u0: JetPoly,
    pub defect: JetPoly,
}

impl ShiftReport {
    pub fn holds(&self) -> bool {
        self.d_omega_u0.is_zero() && self.d_omega_bar_u0.is_zero() && self.defect.is_zero()
    }
}

pub fn shift_identity(spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<ShiftReport> {
    let m = spec.m();
    need_depth(h, m)?;
    let i = Gq::i();
    let beta = |n: u32| h.level(n).unwrap().b.scale(&-&i);
    let cbar_up = |n: u32| (&r_pow(1) * &jetring::conj(&h.level(n).unwrap().c)).scale(&i);
    let mut p = -beta(m);
    for j in 1..m {
        p = p + beta(j).scale(&spec.u()[j as usize - 1]) - cbar_up(j - 1).scale(&spec.v()[j as usize - 1]);
    }
    // U₀ = P / (iγ)
    let u0 = (&p * &jetring::gamma_pow(-1)).scale(&-&i);
    let red = RelationReducer::new(spec, h, 2)?;
    let rules = Rules::with_cap(2 * m + 8);
    let d_omega_u0 = red.reduce(&rules.d_omega(&u0)?);
    let d_omega_bar_u0 = red.reduce(&rules.d_omega_bar(&u0)?);
    let aj = |n: u32| h.jacobi_field(n).unwrap();
    let mut rhs = &u0 * &aj(1);
    for j in 1..m {
        rhs = rhs + aj(j + 1).scale(&spec.u()[j as usize - 1]);
        if j >= 2 {
            rhs = rhs + jetring::conj(&aj(j - 1)).scale(&spec.v()[j as usize - 1]);
        }
    }
    let defect = red.reduce(&(&aj(m + 1) - &rhs));
    Ok(ShiftReport { u0, d_omega_u0, d_omega_bar_u0, defect })
}

/// Triangular translation from jets to the structure frame through level
/// `n`: `z_{2k+1}` from `A^k = z_{2k+1} + …` and `z_{2k+2}` from
/// `B^k = ∂_ω A^k`.
#[derive(Clone, Debug)]
pub struct FrameDictionary {
    n: u32,
    images: BTreeMap<u32, FtPoly>,
    /// `A^k`, `B^k`, `C^k` as jet polynomials, `k = 1..=n`.
    a: Vec<JetPoly>,
    b: Vec<JetPoly>,
    c: Vec<JetPoly>,
}

impl FrameDictionary {
    pub fn new(n: u32, h: &Hierarchy) -> Result<Self> {
        need_depth(h, n)?;
        let rules = Rules::with_cap(2 * n + 6);
        let mut d = FrameDictionary { n, images: BTreeMap::new(), a: Vec::new(), b: Vec::new(), c: Vec::new() };
        for k in 1..=n {
            let ak = &free_normalization(k) * h.a(k).unwrap();
            let bk = rules.d_omega(&ak)?;
            let (ck, _) = step_integration_detail(&rules, &ak, 2 * k as i64 - 1)?;
            for (jet, top, frame) in [(&ak, 2 * k + 1, FtVar::A(k)), (&bk, 2 * k + 2, FtVar::B(k))] {
                let parts = jet.collect_by(&JetVar::Z(top));
                let lead = parts.get(&1).and_then(|p| p.as_constant()).filter(|c| !c.is_zero()).ok_or_else(|| {
                    Error::InvariantViolation(format!("frame generator {:?} is not monic-linear in z{}", frame, top))
                })?;
                let rest = d.to_frame(&parts.get(&0).cloned().unwrap_or_default())?;
                let img = (&system::v(frame) - &rest).scale(&lead.inv().unwrap());
                d.images.insert(top, img);
            }
            d.a.push(ak);
            d.b.push(bk);
            d.c.push(ck);
        }
        Ok(d)
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    /// Jet form of `C^k`.
    pub fn c_jet(&self, k: u32) -> &JetPoly {
        &self.c[k as usize - 1]
    }

    pub fn a_jet(&self, k: u32) -> &JetPoly {
        &self.a[k as usize - 1]
    }

    pub fn b_jet(&self, k: u32) -> &JetPoly {
        &self.b[k as usize - 1]
    }

    /// Image of a polynomial in `γ, r, z_j, z̄_j` with `j ≤ 2n + 2`.
    pub fn to_frame(&self, p: &JetPoly) -> Result<FtPoly> {
        for var in p.vars() {
            let ok = match var {
                JetVar::Gamma | JetVar::R => true,
                JetVar::Z(j) | JetVar::ZBar(j) => self.images.contains_key(&j),
                _ => false,
            };
            if !ok {
                return Err(Error::Precondition(format!("{:?} has no frame image at level {}", var, self.n)));
            }
        }
        Ok(p.substitute_into(|var| match *var {
            JetVar::Gamma => system::gamma(),
            JetVar::R => system::r_pow(1),
            JetVar::Z(j) => self.images[&j].clone(),
            JetVar::ZBar(j) => system::conj(&self.images[&j]),
            _ => unreachable!(),
        }))
    }
}

/// `P_k` in structure-frame generators.
pub fn spectral_coefficients_in_frame(spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<Vec<FtPoly>> {
    let d = FrameDictionary::new(spec.frame_level(), h)?;
    let x = KillingField::build(spec, h)?;
    x.spectral_coefficients().iter().map(|p| d.to_frame(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetring::gamma;

    fn spec2(u: Gq, v: Gq) -> FiniteTypeSpec {
        FiniteTypeSpec::unit(2, alloc::vec![u], alloc::vec![v]).unwrap()
    }

    #[test]
    fn level_two_boundary_entries() {
        let h = Hierarchy::build(2).unwrap();
        let v = Gq::complex((3, 5), (4, 5));
        let x = KillingField::build(&spec2(Gq::ratio(1, 2), v.clone()), &h).unwrap();
        // 𝐚 = −a³λ − V ā³ λ²
        let a3 = h.jacobi_field(1).unwrap();
        assert_eq!(x.a[1], -&a3);
        assert_eq!(x.a[2], -jetring::conj(&a3).scale(&v));
        assert_eq!(x.b[0], gamma().scale(&Gq::i()));
        assert_eq!(x.c[0], Poly::constant(-Gq::i()));
        assert_eq!(x.b[2], r_pow(1).scale(&-(&Gq::i() * &v)));
        assert_eq!(x.c[2], (&gamma() * &r_pow(-1)).scale(&(&Gq::i() * &v)));
    }

    #[test]
    fn frame_dictionary_inverts_the_generators() {
        let h = Hierarchy::build(2).unwrap();
        let d = FrameDictionary::new(2, &h).unwrap();
        assert_eq!(d.to_frame(d.a_jet(2)).unwrap(), system::v(FtVar::A(2)));
        assert_eq!(d.to_frame(d.b_jet(1)).unwrap(), system::v(FtVar::B(1)));
        let c = d.to_frame(&jetring::conj(d.b_jet(2))).unwrap();
        assert_eq!(c, system::v(FtVar::Bb(2)));
    }
}
