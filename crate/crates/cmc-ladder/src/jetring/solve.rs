//! Antiderivatives and kernels by exact linear algebra over a monomial ansatz.
//!
//! Every problem here is bigraded: spectral weight and [`JetVar::bidegree`]
//! are both shifted by a fixed amount under `∂_ω` and `∂_ω̄`, and the Jacobi
//! operator preserves both. An ansatz therefore only needs monomials of the
//! one bidegree dictated by the target, and powers of `γ` decouple.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{is_z_pure, ImageCache, max_z_index, mono_bidegree, JetMono, JetPoly, JetVar, Rules};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::poly::{Mono, Poly};
use crate::scalar::Gq;

/// Which monomials an exactness search may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ansatz {
    /// Unbarred `z_j` times the power of `γ` fixed by the bidegree.
    ZPure,
    /// `z^α z̄^β r^e γ^g` with barred weight up to `max_bar_weight` and
    /// `|e| ≤ r_window`; `g` is fixed by the bidegree.
    Extended { max_bar_weight: i64, r_window: i32 },
}

impl Ansatz {
    pub fn extended() -> Self {
        Ansatz::Extended { max_bar_weight: 3, r_window: 3 }
    }
}

/// All monomials in `z_3..=z_max_index` of the given spectral weight.
pub fn z_monomials(weight: i64, max_index: u32) -> Vec<JetMono> {
    let mut out = Vec::new();
    let mut stack: Vec<(JetVar, i32)> = Vec::new();
    fn rec(rem: i64, top: u32, stack: &mut Vec<(JetVar, i32)>, out: &mut Vec<JetMono>) {
        if rem == 0 {
            out.push(Mono::from_factors(stack.iter().cloned()));
            return;
        }
        // parts are j − 2 for j = top, top−1, …, 3, non-increasing
        let mut j = top;
        while j >= 3 {
            let part = j as i64 - 2;
            if part <= rem {
                stack.push((JetVar::Z(j), 1));
                rec(rem - part, j, stack, out);
                stack.pop();
            }
            j -= 1;
        }
    }
    if weight >= 0 {
        rec(weight, max_index, &mut stack, &mut out);
    }
    out.sort();
    out
}

fn bar_monomials(weight: i64, max_index: u32) -> Vec<JetMono> {
    z_monomials(weight, max_index)
        .into_iter()
        .map(|m| m.map_vars(|v| v.conj()))
        .collect()
}

fn to_vec(p: &JetPoly) -> SparseVec<JetMono> {
    p.term_map().clone()
}

fn tagged(f: &JetPoly, g: &JetPoly) -> SparseVec<(u8, JetMono)> {
    let mut v = SparseVec::new();
    for (m, c) in f.terms() {
        v.insert((0u8, m.clone()), c.clone());
    }
    for (m, c) in g.terms() {
        v.insert((1u8, m.clone()), c.clone());
    }
    v
}

fn assemble(basis: &[JetMono], comb: &SparseVec<usize>) -> JetPoly {
    Poly::from_terms(comb.iter().map(|(i, c)| (basis[*i].clone(), c.clone())))
}

fn homogeneous_weight(p: &JetPoly, what: &str) -> Result<Option<i64>> {
    let rep = p.weight_report();
    if !rep.homogeneous {
        return Err(Error::Precondition(alloc::format!("{} is not weighted homogeneous", what)));
    }
    Ok(rep.weight)
}

/// Solves `∂_ω̄ C = target` for z-pure `C` of the given spectral weight.
///
/// The target must be homogeneous of weight `weight − 1`, involve only `γ`,
/// `r`, `z_j`, and carry only odd powers of `r`. `Obstructed` is returned when
/// no solution exists.
pub fn antiderivative_omega_bar(target: &JetPoly, weight: i64) -> Result<JetPoly> {
    antiderivative_omega_bar_with(&Rules::default(), target, weight)
}

pub fn antiderivative_omega_bar_with(rules: &Rules, target: &JetPoly, weight: i64) -> Result<JetPoly> {
    if target.is_zero() {
        return Ok(Poly::zero());
    }
    if let Some(w) = homogeneous_weight(target, "target")? {
        if w != weight - 1 {
            return Err(Error::Precondition(alloc::format!(
                "target has weight {} but the requested antiderivative weight is {}",
                w,
                weight
            )));
        }
    }
    if !is_z_pure(target) {
        return Err(Error::Precondition(String::from("target must involve only gamma, r and z_j")));
    }
    if target.terms().any(|(m, _)| m.exp(&JetVar::R) % 2 == 0) {
        return Err(Error::Precondition(String::from("target must lie in r^-1 * Q[gamma, r^2, z]")));
    }
    if weight < 1 {
        return Err(Error::Obstructed);
    }
    let (gmin, gmax) = target.exp_range(&JetVar::Gamma).unwrap_or((0, 0));
    let top = (max_z_index(target) + 1).max(3).min(rules.cap);
    let mut basis = Vec::new();
    for m in z_monomials(weight, top) {
        for e in (gmin - 2)..=gmax {
            basis.push(m.shift(&JetVar::Gamma, e));
        }
    }
    let mut ech = Echelon::new();
    let mut cache = ImageCache::default();
    for m in &basis {
        let col = rules.d_omega_bar_in(&mut cache, &Poly::term(m.clone(), Gq::one()))?;
        ech.insert(to_vec(&col));
    }
    match ech.solve(&to_vec(target)) {
        Some(comb) => Ok(assemble(&basis, &comb)),
        None => Err(Error::Obstructed),
    }
}

fn ansatz_monomials(ansatz: Ansatz, weight: i64, bideg: i64, max_index: u32) -> Vec<JetMono> {
    let mut out = Vec::new();
    let (max_bar, r_window) = match ansatz {
        Ansatz::ZPure => (0, 0),
        Ansatz::Extended { max_bar_weight, r_window } => (max_bar_weight, r_window),
    };
    for b in 0..=max_bar {
        let a = weight + b;
        if a < 0 {
            continue;
        }
        let rem = bideg - a - b;
        if rem % 2 != 0 {
            continue;
        }
        let s = (rem / 2) as i32;
        let zs = z_monomials(a, max_index);
        let zbs = bar_monomials(b, max_index);
        for zm in &zs {
            for zb in &zbs {
                let base = zm.mul(zb);
                for e in -r_window..=r_window {
                    out.push(base.shift(&JetVar::R, e).shift(&JetVar::Gamma, s - e));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Finds `F` with `∂_ω F = f` and `∂_ω̄ F = g` within the ansatz.
///
/// `f` and `g` must be homogeneous in both gradings with compatible weights.
/// `Obstructed` means the 1-form `f ω + g ω̄` has no primitive in the ansatz.
pub fn joint_antiderivative(f: &JetPoly, g: &JetPoly, ansatz: Ansatz) -> Result<JetPoly> {
    joint_antiderivative_with(&Rules::default(), f, g, ansatz)
}

pub fn joint_antiderivative_with(rules: &Rules, f: &JetPoly, g: &JetPoly, ansatz: Ansatz) -> Result<JetPoly> {
    if f.is_zero() && g.is_zero() {
        return Ok(Poly::zero());
    }
    let wf = homogeneous_weight(f, "f")?.map(|w| w - 1);
    let wg = homogeneous_weight(g, "g")?.map(|w| w + 1);
    let df = if f.is_zero() { None } else { Some(super::bidegree(f).ok_or_else(bideg_err)? - 1) };
    let dg = if g.is_zero() { None } else { Some(super::bidegree(g).ok_or_else(bideg_err)? - 1) };
    let weight = agree(wf, wg, "spectral weights")?;
    let bideg = agree(df, dg, "bidegrees")?;
    let top = (max_z_index(f).max(max_z_index(g)) + 1).max(3).min(rules.cap);
    let basis = ansatz_monomials(ansatz, weight, bideg, top);
    let mut ech = Echelon::new();
    let mut cache = ImageCache::default();
    for m in &basis {
        let p = Poly::term(m.clone(), Gq::one());
        let col = tagged(&rules.d_omega_in(&mut cache, &p)?, &rules.d_omega_bar_in(&mut cache, &p)?);
        ech.insert(col);
    }
    match ech.solve(&tagged(f, g)) {
        Some(comb) => Ok(assemble(&basis, &comb)),
        None => Err(Error::Obstructed),
    }
}

fn bideg_err() -> Error {
    Error::Precondition(String::from("1-form components must be homogeneous in the bidegree"))
}

fn agree(a: Option<i64>, b: Option<i64>, what: &str) -> Result<i64> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => {
            Err(Error::Precondition(alloc::format!("components disagree on {}: {} vs {}", what, x, y)))
        }
        (Some(x), _) | (_, Some(x)) => Ok(x),
        (None, None) => Err(Error::Precondition(alloc::format!("no {} available", what))),
    }
}

fn kernel_of(
    weight: i64,
    max_index: u32,
    op: impl Fn(&JetPoly) -> Result<JetPoly>,
) -> Result<Vec<JetPoly>> {
    let basis = z_monomials(weight, max_index);
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for m in &basis {
        let col = op(&Poly::term(m.clone(), Gq::one()))?;
        if let Some(rel) = ech.insert(to_vec(&col)) {
            out.push(assemble(&basis, &rel));
        }
    }
    Ok(out)
}

/// Basis of z-pure homogeneous polynomials of the given nonzero weight, in
/// `z_3..=z_max_index`, annihilated by `∂_ω̄`.
///
/// The ansatz is `γ`-free: the operator commutes with multiplication by `γ`
/// and preserves the bidegree, so `γ` powers cannot combine into new kernel
/// elements.
pub fn holomorphic_kernel(weight: i64, max_index: u32) -> Result<Vec<JetPoly>> {
    if weight == 0 {
        return Err(Error::Precondition(String::from("weight 0 is spanned by constants")));
    }
    let rules = Rules::with_cap(max_index.max(3));
    kernel_of(weight, max_index, |p| rules.d_omega_bar(p))
}

/// Basis of the kernel of `E` on z-pure homogeneous polynomials of the given
/// weight in `z_3..=z_max_index`.
pub fn jacobi_kernel(weight: i64, max_index: u32) -> Result<Vec<JetPoly>> {
    let rules = Rules::with_cap(max_index + 1);
    kernel_of(weight, max_index, |p| rules.jacobi(p))
}

/// Pairs each monomial of `p` with its bidegree (diagnostic helper).
pub fn bidegree_profile(p: &JetPoly) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (m, _) in p.terms() {
        *out.entry(mono_bidegree(m)).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn partitions_count() {
        // partitions of 6 into parts ≤ 6
        assert_eq!(z_monomials(6, 8).len(), 11);
        assert_eq!(z_monomials(0, 8).len(), 1);
        assert!(z_monomials(-1, 8).is_empty());
        assert!(z_monomials(3, 8).iter().all(|m| m.weight() == 3));
    }

    #[test]
    fn antiderivative_a3_step() {
        let target = &(&gamma_pow(2) * &r_pow(-1)) * &z(3);
        let got = antiderivative_omega_bar(&target, 2).unwrap();
        let expect = &z(3).pow(2).scale(&Gq::ratio(7, 4)) - &z(4);
        assert_eq!(got, expect);
        assert_eq!(d_omega_bar(&got).unwrap(), target);
    }

    #[test]
    fn antiderivative_of_that3() {
        let target = &(&gamma_pow(2) - &r_pow(2)) * &r_pow(-1);
        assert_eq!(antiderivative_omega_bar(&target, 1).unwrap(), z(3));
        assert!(antiderivative_omega_bar(&Poly::zero(), 5).unwrap().is_zero());
    }

    #[test]
    fn antiderivative_obstructed() {
        // γ² r⁻¹ alone is not ∂_ω̄ of anything of weight 1
        let target = &gamma_pow(2) * &r_pow(-1);
        assert_eq!(antiderivative_omega_bar(&target, 1), Err(Error::Obstructed));
    }

    #[test]
    fn joint_on_exact_forms() {
        for p in [z(3), &z(3) * &z(4)] {
            let f = d_omega(&p).unwrap();
            let g = d_omega_bar(&p).unwrap();
            assert_eq!(joint_antiderivative(&f, &g, Ansatz::ZPure).unwrap(), p);
            assert_eq!(joint_antiderivative(&f, &g, Ansatz::extended()).unwrap(), p);
        }
    }

    #[test]
    fn kernels_small() {
        assert!(holomorphic_kernel(1, 6).unwrap().is_empty());
        assert!(holomorphic_kernel(3, 8).unwrap().is_empty());
        assert!(holomorphic_kernel(0, 8).is_err());
        let k = jacobi_kernel(1, 5).unwrap();
        assert_eq!(k, alloc::vec![z(3)]);
    }
}
