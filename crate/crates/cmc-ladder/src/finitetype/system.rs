//! Closed structure systems of linear finite type in the frame
//! `A^j ~ z_{2j+1} + …`, `B^j = ∂_ω A^j`, with `B⁰ = 0`, `C⁰ = −2`.
//!
//! A system lists the `∂_ω`, `∂_ω̄` images of its unbarred generators; barred
//! images follow by conjugation, `∂_ω X̄ = conj(∂_ω̄ X)`. The inverse
//! `1/(γ² − r²)` is a generator of its own (`Dinv`) and is cleared before any
//! zero test. Constants are generators with zero derivatives: `U_j`, `Ū_j`
//! and the top coefficient `V`, whose conjugate is `γ² V⁻¹` (this encodes
//! `|V|² = γ²`). The lower `V_j` are `−V Ū_{j+1}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::scalar::Gq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FtVar {
    Gamma,
    R,
    /// `1/(γ² − r²)`.
    Dinv,
    A(u32),
    Ab(u32),
    B(u32),
    Bb(u32),
    C(u32),
    Cb(u32),
    U(u32),
    Ub(u32),
    V,
}

impl Var for FtVar {
    fn name(&self) -> String {
        match *self {
            FtVar::Gamma => String::from("gamma"),
            FtVar::R => String::from("r"),
            FtVar::Dinv => String::from("D"),
            FtVar::A(j) => format!("A{}", j),
            FtVar::Ab(j) => format!("Abar{}", j),
            FtVar::B(j) => format!("B{}", j),
            FtVar::Bb(j) => format!("Bbar{}", j),
            FtVar::C(j) => format!("C{}", j),
            FtVar::Cb(j) => format!("Cbar{}", j),
            FtVar::U(j) => format!("U{}", j),
            FtVar::Ub(j) => format!("Ubar{}", j),
            FtVar::V => String::from("V"),
        }
    }
}

pub type FtPoly = Poly<FtVar>;

pub fn v(x: FtVar) -> FtPoly {
    Poly::var(x)
}

pub fn gamma() -> FtPoly {
    v(FtVar::Gamma)
}

pub fn r_pow(e: i32) -> FtPoly {
    Poly::var_pow(FtVar::R, e)
}

fn gr_diff() -> FtPoly {
    &gamma().pow(2) - &r_pow(2)
}

fn gr_sum() -> FtPoly {
    &gamma().pow(2) + &r_pow(2)
}

/// Formal conjugation. `V ↦ γ² V⁻¹`; `γ`, `r`, `Dinv` are real.
pub fn conj(p: &FtPoly) -> FtPoly {
    let mapped: FtPoly = p.map_coeffs(|c| c.conj());
    mapped.substitute_into(|x| match *x {
        FtVar::A(j) => v(FtVar::Ab(j)),
        FtVar::Ab(j) => v(FtVar::A(j)),
        FtVar::B(j) => v(FtVar::Bb(j)),
        FtVar::Bb(j) => v(FtVar::B(j)),
        FtVar::C(j) => v(FtVar::Cb(j)),
        FtVar::Cb(j) => v(FtVar::C(j)),
        FtVar::U(j) => v(FtVar::Ub(j)),
        FtVar::Ub(j) => v(FtVar::U(j)),
        FtVar::V => &gamma().pow(2) * &Poly::var_pow(FtVar::V, -1),
        other => v(other),
    })
}

/// Multiplies by `(γ² − r²)^N` so that no negative power of `γ² − r²`
/// (i.e. no `Dinv`) remains.
pub fn clear_dinv(p: &FtPoly) -> FtPoly {
    let parts = p.collect_by(&FtVar::Dinv);
    let top = parts.keys().next_back().copied().unwrap_or(0).max(0);
    if parts.len() == 1 && parts.contains_key(&0) {
        return p.clone();
    }
    let base = gr_diff();
    let mut out = Poly::zero();
    for (k, q) in parts {
        out = out + &q * &base.pow((top - k) as u32);
    }
    out
}

/// Zero test modulo the identity `Dinv · (γ² − r²) = 1`.
pub fn is_zero_mod_dinv(p: &FtPoly) -> bool {
    clear_dinv(p).is_zero()
}

/// One `d²` residual: `∂_ω̄∂_ω x − ∂_ω∂_ω̄ x` with `Dinv` cleared, or a
/// consistency defect for a derived quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Row {
    pub label: String,
    pub residual: FtPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Report {
    pub system: String,
    pub rows: Vec<D2Row>,
}

impl D2Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.residual.is_zero())
    }

    /// `NotCompatible` naming the first nonzero residual.
    pub fn require(&self) -> Result<()> {
        match self.rows.iter().find(|r| !r.residual.is_zero()) {
            None => Ok(()),
            Some(row) => Err(Error::NotCompatible(format!(
                "{}: d^2 of {} leaves {} terms, e.g. {}",
                self.system,
                row.label,
                row.residual.len(),
                row.residual.terms().next().map(|(m, c)| format!("{} {}", c, m)).unwrap_or_default()
            ))),
        }
    }
}

/// A derived quantity together with the derivatives it must have.
#[derive(Clone, Debug)]
pub struct Derived {
    pub label: String,
    pub expr: FtPoly,
    pub expect_omega: Option<FtPoly>,
    pub expect_omega_bar: Option<FtPoly>,
}

#[derive(Clone, Debug)]
pub struct StructureSystem {
    pub label: String,
    /// Finite-type level `n` (the relation expresses `A^{n+1}`).
    pub level: u32,
    generators: Vec<FtVar>,
    omega: BTreeMap<FtVar, FtPoly>,
    omega_bar: BTreeMap<FtVar, FtPoly>,
    derived: Vec<Derived>,
}

fn bar_of(x: FtVar) -> Option<FtVar> {
    Some(match x {
        FtVar::Ab(j) => FtVar::A(j),
        FtVar::Bb(j) => FtVar::B(j),
        FtVar::Cb(j) => FtVar::C(j),
        _ => return None,
    })
}

impl StructureSystem {
    /// Unbarred generators (and `r`).
    pub fn generators(&self) -> &[FtVar] {
        &self.generators
    }

    pub fn derived(&self) -> &[Derived] {
        &self.derived
    }

    fn image(&self, x: &FtVar, bar: bool) -> Result<FtPoly> {
        let missing = || Error::Precondition(format!("{:?} is not a generator of {}", x, self.label));
        Ok(match *x {
            FtVar::Gamma | FtVar::U(_) | FtVar::Ub(_) | FtVar::V => Poly::zero(),
            FtVar::Dinv => {
                // ∂(γ² − r²)⁻¹ = 2 r Dinv² ∂r
                let dr = self.image(&FtVar::R, bar)?;
                &(&r_pow(1) * &Poly::var_pow(FtVar::Dinv, 2)).scale(&Gq::int(2)) * &dr
            }
            ref y => match bar_of(*y) {
                Some(u) => {
                    let map = if bar { &self.omega } else { &self.omega_bar };
                    conj(map.get(&u).ok_or_else(missing)?)
                }
                None => {
                    let map = if bar { &self.omega_bar } else { &self.omega };
                    map.get(y).ok_or_else(missing)?.clone()
                }
            },
        })
    }

    pub fn d_omega(&self, p: &FtPoly) -> Result<FtPoly> {
        p.derive(|x| self.image(x, false))
    }

    pub fn d_omega_bar(&self, p: &FtPoly) -> Result<FtPoly> {
        p.derive(|x| self.image(x, true))
    }

    /// `[∂_ω̄, ∂_ω] p`; since `dω = 0` this is the coefficient of `ω̄ ∧ ω` in `d²p`.
    pub fn commutator(&self, p: &FtPoly) -> Result<FtPoly> {
        let a = self.d_omega_bar(&self.d_omega(p)?)?;
        let b = self.d_omega(&self.d_omega_bar(p)?)?;
        Ok(&a - &b)
    }

    /// `d²` on every generator and its conjugate, then the consistency rows of
    /// the derived quantities. All residuals have `Dinv` cleared.
    pub fn d2_check(&self) -> Result<D2Report> {
        let mut rows = Vec::new();
        for g in &self.generators {
            let p = v(*g);
            rows.push(D2Row { label: g.name(), residual: clear_dinv(&self.commutator(&p)?) });
            if let Some(b) = barred(*g) {
                rows.push(D2Row { label: b.name(), residual: clear_dinv(&self.commutator(&v(b))?) });
            }
        }
        for d in &self.derived {
            if let Some(e) = &d.expect_omega {
                let eo = &self.d_omega(&d.expr)? - e;
                rows.push(D2Row { label: format!("d_omega {}", d.label), residual: clear_dinv(&eo) });
            }
            if let Some(e) = &d.expect_omega_bar {
                let eb = &self.d_omega_bar(&d.expr)? - e;
                rows.push(D2Row { label: format!("d_omega_bar {}", d.label), residual: clear_dinv(&eb) });
            }
        }
        Ok(D2Report { system: self.label.clone(), rows })
    }
}

fn barred(x: FtVar) -> Option<FtVar> {
    Some(match x {
        FtVar::A(j) => FtVar::Ab(j),
        FtVar::B(j) => FtVar::Bb(j),
        FtVar::C(j) => FtVar::Cb(j),
        _ => return None,
    })
}

/// Level 1 with `|V₁|² ≠ γ²`: the relation forces
/// `B¹ = (A¹/Ā¹)(γ² − r²)/r` and leaves `r`, `A¹` with
/// `dA¹ = ((γ² − r²)/r)((A¹/Ā¹) ω + ω̄)`.
pub fn level_one_reduced() -> StructureSystem {
    let a1 = v(FtVar::A(1));
    let k = &gr_diff() * &r_pow(-1);
    let mut omega = BTreeMap::new();
    let mut omega_bar = BTreeMap::new();
    omega.insert(FtVar::R, (&r_pow(1) * &a1).scale(&Gq::ratio(1, 2)));
    omega_bar.insert(FtVar::R, (&r_pow(1) * &v(FtVar::Ab(1))).scale(&Gq::ratio(1, 2)));
    omega.insert(FtVar::A(1), &(&k * &a1) * &Poly::var_pow(FtVar::Ab(1), -1));
    omega_bar.insert(FtVar::A(1), k);
    StructureSystem {
        label: String::from("level 1, |V1|^2 != gamma^2"),
        level: 1,
        generators: alloc::vec![FtVar::R, FtVar::A(1)],
        omega,
        omega_bar,
        derived: Vec::new(),
    }
}

/// Constants of a level-`n` system: `U_j` for `1 ≤ j ≤ n`, `V_j` for
/// `1 ≤ j ≤ n` with `V_n` on the circle `|V_n|² = γ²`.
#[derive(Clone, Debug)]
pub struct FrameConstants {
    pub u: Vec<FtPoly>,
    pub v: Vec<FtPoly>,
}

impl FrameConstants {
    /// Fully symbolic: `U_j`, `V = V_n`, `V_j = −V Ū_{j+1}`.
    pub fn symbolic(n: u32) -> FrameConstants {
        let u = (1..=n).map(|j| v(FtVar::U(j))).collect();
        let vv = (1..=n)
            .map(|j| if j == n { v(FtVar::V) } else { -(&v(FtVar::V) * &v(FtVar::Ub(j + 1))) })
            .collect();
        FrameConstants { u, v: vv }
    }

    fn u(&self, j: u32) -> &FtPoly {
        &self.u[j as usize - 1]
    }

    fn v(&self, j: u32) -> &FtPoly {
        &self.v[j as usize - 1]
    }
}

fn a(j: u32) -> FtPoly {
    v(FtVar::A(j))
}
fn ab(j: u32) -> FtPoly {
    v(FtVar::Ab(j))
}
fn b(j: u32) -> FtPoly {
    if j == 0 {
        Poly::zero()
    } else {
        v(FtVar::B(j))
    }
}
fn bb(j: u32) -> FtPoly {
    if j == 0 {
        Poly::zero()
    } else {
        v(FtVar::Bb(j))
    }
}

/// `A^{n+1} = Σ_j U_j A^j + V_j Ā^j`.
pub fn relation(n: u32, k: &FrameConstants) -> FtPoly {
    let mut out = Poly::zero();
    for j in 1..=n {
        out = out + (k.u(j) * &a(j)) + (k.v(j) * &ab(j));
    }
    out
}

/// `C^n` forced by the `∂_ω̄` derivative of the relation:
/// `(2/(γ²−r²)) Σ_{j<n} [U_{j+1}(γ²B^j + ½(γ²−r²)C^j) − r V_j B̄^j]
///  − (2/(γ²−r²))(γ²B^n + r V_n B̄^n) − 2U₁`.
pub fn c_condition(n: u32, k: &FrameConstants) -> FtPoly {
    let d2 = Poly::var(FtVar::Dinv).scale(&Gq::int(2));
    let g2 = gamma().pow(2);
    let r1 = r_pow(1);
    let mut inner = Poly::zero();
    for j in 1..n {
        let cj = v(FtVar::C(j));
        let t = &(&g2 * &b(j)) + &(&gr_diff() * &cj).scale(&Gq::ratio(1, 2));
        inner = inner + k.u(j + 1) * &t - &(&r1 * k.v(j)) * &bb(j);
    }
    inner = inner - (&g2 * &b(n)) - &(&r1 * k.v(n)) * &bb(n);
    &(&d2 * &inner) - &k.u(1).scale(&Gq::int(2))
}

/// The closed system of level `n ≥ 1` with the given constants:
/// generators `r, A^1..A^n, B^1..B^n, C^1..C^{n−1}`, with `A^{n+1}` from the
/// relation and `C^n` from [`c_condition`].
pub fn with_constants(n: u32, k: &FrameConstants, label: &str) -> Result<StructureSystem> {
    if n == 0 || k.u.len() != n as usize || k.v.len() != n as usize {
        return Err(Error::Precondition(format!("level {} needs {} constants of each kind", n, n)));
    }
    let g2 = gamma().pow(2);
    let half = Gq::ratio(1, 2);
    let rinv = r_pow(-1);
    let next_a = relation(n, k);
    let cn = c_condition(n, k);
    let cc = |j: u32| -> FtPoly {
        if j == 0 {
            Poly::int(-2)
        } else if j == n {
            cn.clone()
        } else {
            v(FtVar::C(j))
        }
    };
    let aa = |j: u32| if j == n + 1 { next_a.clone() } else { a(j) };

    let mut omega = BTreeMap::new();
    let mut omega_bar = BTreeMap::new();
    omega.insert(FtVar::R, (&r_pow(1) * &a(1)).scale(&half));
    omega_bar.insert(FtVar::R, (&r_pow(1) * &ab(1)).scale(&half));
    for j in 1..=n {
        omega.insert(FtVar::A(j), b(j));
        let t = &(&g2 * &b(j - 1)) + &(&gr_diff() * &cc(j - 1)).scale(&half);
        omega_bar.insert(FtVar::A(j), -(&rinv * &t));
        omega.insert(FtVar::B(j), &aa(j + 1) + &(&a(1) * &(&b(j) + &cc(j))).scale(&half));
        omega_bar.insert(FtVar::B(j), -(&(&gr_sum() * &rinv) * &a(j)).scale(&half));
        if j < n {
            omega.insert(FtVar::C(j), -(&aa(j + 1) + &(&a(1) * &cc(j)).scale(&half)));
            omega_bar.insert(FtVar::C(j), &(&g2 * &rinv) * &a(j));
        }
    }
    let mut generators = alloc::vec![FtVar::R];
    generators.extend((1..=n).map(FtVar::A));
    generators.extend((1..=n).map(FtVar::B));
    generators.extend((1..n).map(FtVar::C));

    let derived = alloc::vec![
        Derived {
            label: format!("C{} (c-condition)", n),
            expr: cn.clone(),
            expect_omega: Some(-(&next_a + &(&a(1) * &cn).scale(&half))),
            expect_omega_bar: Some(&(&g2 * &rinv) * &a(n)),
        },
        Derived {
            label: format!("A{} (relation)", n + 1),
            expr: next_a.clone(),
            expect_omega: None,
            expect_omega_bar: Some(-(&rinv * &(&(&g2 * &b(n)) + &(&gr_diff() * &cn).scale(&half)))),
        },
    ];
    Ok(StructureSystem {
        label: String::from(label),
        level: n,
        generators,
        omega,
        omega_bar,
        derived,
    })
}

/// Level `n` with fully symbolic adapted constants.
pub fn level_symbolic(n: u32) -> Result<StructureSystem> {
    with_constants(n, &FrameConstants::symbolic(n), &format!("level {}, symbolic adapted constants", n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_is_an_involution_on_the_circle() {
        let p = &(&v(FtVar::V) * &v(FtVar::A(1))).scale(&Gq::complex((1, 2), (1, 3))) + &v(FtVar::Ub(2));
        assert_eq!(conj(&conj(&p)), p);
    }

    #[test]
    fn dinv_clears() {
        let p = &(&Poly::var(FtVar::Dinv) * &gr_diff()) - &Poly::one();
        assert!(is_zero_mod_dinv(&p));
    }

    #[test]
    fn level_one_both_branches_close() {
        let rep = level_one_reduced().d2_check().unwrap();
        assert!(rep.passed(), "{:?}", rep.require());
        let rep = level_symbolic(1).unwrap().d2_check().unwrap();
        assert!(rep.passed(), "{:?}", rep.require());
    }
}
