//! Local expansions at an umbilic point.
//!
//! The chart is `ξ = e^u dz`, `η₁ = e^{−u} z^p dz`, Hopf differential
//! `z^p dz²`, and every series is written in `w` with `z = w²`, for odd and
//! even `p` alike (for even `p` residues are twice the `z`-chart values).
//! With `h_j = e^{−ju} g_j` the prolongation recursion becomes
//! `g₂ = z^p`, `g_{j+1} = ∂_z g_j − 2j u_z g_j`, and
//! `z_j = h₂^{−j/2} h_j = g_j w^{−jp}`, `r = e^{−2u} |w|^{2p}`,
//! `ω = 2w^{p+1} dw`.

pub mod bilaurent;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use bilaurent::BiLaurent;

use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::jetring::{JetPoly, JetVar};
use crate::scalar::Gq;

/// Umbilic degree, Taylor jet of the conformal factor, a rational value of
/// `γ` and the working precision `M` (total degree in `w, w̄`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UmbilicModel {
    pub p: u32,
    pub u_jet: BTreeMap<(u32, u32), Gq>,
    pub gamma: Gq,
    pub order: i64,
}

impl UmbilicModel {
    pub fn new(p: u32, u_jet: BTreeMap<(u32, u32), Gq>, gamma: Gq, order: i64) -> Result<Self> {
        let m = UmbilicModel { p, u_jet, gamma, order };
        m.validate()?;
        Ok(m)
    }

    /// Completes Cauchy data `c_{i0}` (`i ≥ 1`, with `c_{0i} = conj c_{i0}`)
    /// to the formal solution of the Gauss equation
    /// `u_{zz̄} = −¼γ² e^{2u} + ¼ e^{−2u} |z|^{2p}`, through `z`-degree
    /// `order / 2`.
    pub fn solve(p: u32, cauchy: &BTreeMap<u32, Gq>, gamma: Gq, order: i64) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::Precondition("gamma must be nonzero".into()));
        }
        let top = (order.max(0) as usize) / 2;
        let n = top + 1;
        let mut c = alloc::vec![alloc::vec![Gq::zero(); n]; n];
        // e^{2u} and e^{−2u}, filled degree by degree through
        // i·E_ij = ±2 Σ k c_kl E_{i−k, j−l}
        let mut e_pos = alloc::vec![alloc::vec![Gq::zero(); n]; n];
        let mut e_neg = alloc::vec![alloc::vec![Gq::zero(); n]; n];
        e_pos[0][0] = Gq::one();
        e_neg[0][0] = Gq::one();
        let g2 = &gamma * &gamma;
        let quarter = Gq::ratio(1, 4);
        let p = p as usize;
        for d in 1..=top {
            for i in 0..=d {
                let j = d - i;
                c[i][j] = if j == 0 {
                    cauchy.get(&(i as u32)).cloned().unwrap_or_else(Gq::zero)
                } else if i == 0 {
                    cauchy.get(&(j as u32)).map(|x| x.conj()).unwrap_or_else(Gq::zero)
                } else {
                    let (a, b) = (i - 1, j - 1);
                    let mut rhs = -(&(&g2 * &quarter) * &e_pos[a][b]);
                    if a >= p && b >= p {
                        rhs += &(&quarter * &e_neg[a - p][b - p]);
                    }
                    &rhs * &Gq::ratio(1, (i * j) as i64)
                };
            }
            for i in 0..=d {
                let j = d - i;
                let (mut sp, mut sn) = (Gq::zero(), Gq::zero());
                for k in 0..=i {
                    for l in 0..=j {
                        if k + l == 0 || c[k][l].is_zero() {
                            continue;
                        }
                        // differentiate in z when i > 0, in z̄ otherwise
                        let w = if i > 0 { k } else { l };
                        if w == 0 {
                            continue;
                        }
                        let t = &c[k][l] * &Gq::int(2 * w as i64);
                        sp += &(&t * &e_pos[i - k][j - l]);
                        sn -= &(&t * &e_neg[i - k][j - l]);
                    }
                }
                let div = Gq::ratio(1, if i > 0 { i } else { j } as i64);
                e_pos[i][j] = &sp * &div;
                e_neg[i][j] = &sn * &div;
            }
        }
        let mut jet = BTreeMap::new();
        for (i, row) in c.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    jet.insert((i as u32, j as u32), x.clone());
                }
            }
        }
        UmbilicModel::new(p as u32, jet, gamma, order)
    }

    /// Random Cauchy data of `z`-degree `1..=jet_degree` with small rational
    /// coefficients, reproducible from `seed`, completed by [`Self::solve`].
    pub fn random(p: u32, seed: u64, jet_degree: u32, gamma: Gq, order: i64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let num = (rng.next_u32() % 7) as i64 - 3;
            let den = (rng.next_u32() % 4) as i64 + 1;
            (num, den)
        };
        let mut cauchy = BTreeMap::new();
        for i in 1..=jet_degree {
            let re = draw();
            let im = draw();
            cauchy.insert(i, Gq::complex(re, im));
        }
        UmbilicModel::solve(p, &cauchy, gamma, order)
    }

    /// `u_{zz̄} + ¼γ² e^{2u} − ¼ e^{−2u}|z|^{2p}` in the `w` chart; zero
    /// through its precision exactly when the jet solves the Gauss equation.
    pub fn gauss_residual(&self) -> BiLaurent {
        let u = self.u_series();
        let lap = u.d_z().d_zbar();
        let two_u = u.scale(&Gq::int(2));
        let g2 = &self.gamma * &self.gamma;
        let s = 2 * self.p as i32;
        let e_neg = (-&two_u).exp().shift(s, s);
        &(&lap + &two_u.exp().scale(&(&g2 * &Gq::ratio(1, 4)))) - &e_neg.scale(&Gq::ratio(1, 4))
    }

    pub fn validate(&self) -> Result<()> {
        if self.u_jet.get(&(0, 0)).map_or(false, |c| !c.is_zero()) {
            return Err(Error::Precondition("the jet of u must have c00 = 0".into()));
        }
        for (&(i, j), c) in &self.u_jet {
            let mirror = self.u_jet.get(&(j, i)).cloned().unwrap_or_else(Gq::zero);
            if mirror != c.conj() {
                return Err(Error::Precondition(format!("jet is not Hermitian at ({}, {})", i, j)));
            }
        }
        if self.gamma.is_zero() {
            return Err(Error::Precondition("gamma must be nonzero".into()));
        }
        if self.order < 4 {
            return Err(Error::Precondition("truncation order must be at least 4".into()));
        }
        Ok(())
    }

    /// `u = Σ c_ij w^{2i} w̄^{2j}` truncated at the working order.
    pub fn u_series(&self) -> BiLaurent {
        BiLaurent::from_terms(self.u_jet.iter().map(|(&(i, j), c)| ((2 * i as i32, 2 * j as i32), c.clone())), self.order)
    }
}

/// Series of the surface in the `w` chart.
#[derive(Clone, Debug)]
pub struct SurfaceJets {
    pub p: u32,
    pub gamma: Gq,
    pub u: BiLaurent,
    pub u_z: BiLaurent,
    /// `g_j` for `j = 2..`, at index `j − 2`.
    g: Vec<BiLaurent>,
    exp_u: BTreeMap<i64, BiLaurent>,
}

impl SurfaceJets {
    pub fn new(model: &UmbilicModel, max_j: u32) -> Result<Self> {
        model.validate()?;
        let u = model.u_series();
        let u_z = u.d_z();
        let mut g = Vec::new();
        g.push(BiLaurent::monomial(2 * model.p as i32, 0, Gq::one()));
        for j in 2..max_j.max(2) {
            let last = &g[g.len() - 1];
            let next = &last.d_z() - &(&u_z * last).scale(&Gq::int(2 * j as i64));
            g.push(next);
        }
        Ok(SurfaceJets { p: model.p, gamma: model.gamma.clone(), u, u_z, g, exp_u: BTreeMap::new() })
    }

    pub fn max_j(&self) -> u32 {
        self.g.len() as u32 + 1
    }

    /// `e^{k u}`.
    pub fn exp_u(&mut self, k: i64) -> BiLaurent {
        if let Some(e) = self.exp_u.get(&k) {
            return e.clone();
        }
        let e = self.u.scale(&Gq::int(k)).exp();
        self.exp_u.insert(k, e.clone());
        e
    }

    fn g(&self, j: u32) -> Result<&BiLaurent> {
        if j < 2 || j > self.max_j() {
            return Err(Error::Precondition(format!("z_{} outside the built range 2..={}", j, self.max_j())));
        }
        Ok(&self.g[j as usize - 2])
    }

    /// `z_j = g_j w^{−jp}`.
    pub fn z(&self, j: u32) -> Result<BiLaurent> {
        Ok(self.g(j)?.shift(-((j * self.p) as i32), 0))
    }

    /// `h_j = e^{−ju} g_j`.
    pub fn h(&mut self, j: u32) -> Result<BiLaurent> {
        let g = self.g(j)?.clone();
        Ok(&self.exp_u(-(j as i64)) * &g)
    }

    /// `r^e = e^{−2eu} w^{ep} w̄^{ep}`.
    pub fn r_pow(&mut self, e: i32) -> BiLaurent {
        let s = e * self.p as i32;
        self.exp_u(-2 * e as i64).shift(s, s)
    }

    /// Evaluates a polynomial in `γ^{±1}, r^{±1}, z_j` on the series.
    pub fn eval(&mut self, poly: &JetPoly) -> Result<BiLaurent> {
        let mut z_pows: BTreeMap<(u32, i32), BiLaurent> = BTreeMap::new();
        let mut out = BiLaurent::zero();
        for (m, c) in poly.terms() {
            let mut coeff = c.clone();
            let mut term = BiLaurent::one();
            for (v, e) in m.factors() {
                match v {
                    JetVar::Gamma => coeff = &coeff * &self.gamma.pow(*e),
                    JetVar::R => term = &term * &self.r_pow(*e),
                    JetVar::Z(j) if *e > 0 => {
                        if !z_pows.contains_key(&(*j, *e)) {
                            let zj = self.z(*j)?;
                            z_pows.insert((*j, *e), zj.pow(*e as u32));
                        }
                        term = &term * &z_pows[&(*j, *e)];
                    }
                    other => {
                        return Err(Error::Precondition(format!("cannot evaluate {:?}^{} at an umbilic", other, e)))
                    }
                }
            }
            out = &out + &term.scale(&coeff);
        }
        Ok(out)
    }
}

/// The two parts of `φ_n = F dw + G dw̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiExpansion {
    pub n: u32,
    pub p: u32,
    pub dw: BiLaurent,
    pub dwbar: BiLaurent,
}

impl PhiExpansion {
    pub fn prec(&self) -> i64 {
        self.dw.prec().min(self.dwbar.prec())
    }

    /// `φ_n ⊗ ω^{4n}`, i.e. both parts times `(2w^{p+1})^{4n}`; the scalar
    /// factor is dropped.
    pub fn twisted(&self) -> PhiExpansion {
        let s = (4 * self.n * (self.p + 1)) as i32;
        PhiExpansion { n: self.n, p: self.p, dw: self.dw.shift(s, 0), dwbar: self.dwbar.shift(s, 0) }
    }

    /// `∂_w G − ∂_w̄ F` through the known precision.
    pub fn exterior_derivative(&self) -> BiLaurent {
        &self.dwbar.d_w() - &self.dw.d_wbar()
    }

    pub fn is_closed(&self) -> bool {
        self.exterior_derivative().is_zero()
    }
}

/// Default working order for `φ_n` and the Killing coefficients through
/// level `n` at degree `p`: `4n + (2n − 1)p` plus a margin of two, even.
pub fn default_order(n: u32, p: u32) -> i64 {
    let (n, p) = (n as i64, p as i64);
    let raw = 4 * n + (2 * n - 1).max(1) * p + 2;
    (raw + raw % 2).max(8)
}

/// Expands `φ_n = −i(C^{2n+2} ω + r⁻¹ B^{2n} ω̄)` with `ω = 2w^{p+1}dw`.
pub fn expand_phi(n: u32, jets: &mut SurfaceJets, h: &Hierarchy) -> Result<PhiExpansion> {
    let level = h.level(n).ok_or_else(|| Error::Precondition(format!("hierarchy has no level {}", n)))?;
    let s = jets.p as i32 + 1;
    let minus_2i = -(Gq::i() * Gq::int(2));
    let c = jets.eval(&level.c)?;
    let dw = c.shift(s, 0).scale(&minus_2i);
    let dwbar = if n == 0 {
        BiLaurent::zero()
    } else {
        let b = jets.eval(&h.level(n - 1).unwrap().b)?;
        (&jets.r_pow(-1) * &b).shift(0, s).scale(&minus_2i)
    };
    let out = PhiExpansion { n, p: jets.p, dw, dwbar };
    if out.prec() < 1 {
        return Err(Error::TruncationInsufficient { needed: 1, available: out.prec() });
    }
    Ok(out)
}

/// The `φ₁` closed form, built from `u` directly:
/// `(i/w^p)[(3p² + 4p − 16p u₁ w² + 16(u₂ + u₁²) w⁴)/(4γw³) dw − 2γ e^{2u} w̄ dw̄]`.
pub fn phi1_closed_form(jets: &mut SurfaceJets) -> PhiExpansion {
    let p = jets.p as i64;
    let u1 = jets.u_z.clone();
    let u2 = u1.d_z();
    let bracket = &(&BiLaurent::constant(Gq::int(3 * p * p + 4 * p)) - &u1.shift(2, 0).scale(&Gq::int(16 * p)))
        + &(&u2 + &(&u1 * &u1)).shift(4, 0).scale(&Gq::int(16));
    let i = Gq::i();
    let gamma_inv = jets.gamma.inv().expect("gamma is nonzero");
    let dw = bracket.shift(-(p as i32) - 3, 0).scale(&(&i * &(&gamma_inv * &Gq::ratio(1, 4))));
    let e2u = jets.exp_u(2);
    let dwbar = e2u.shift(-(p as i32), 1).scale(&(&i * &(&jets.gamma * &Gq::int(-2))));
    PhiExpansion { n: 1, p: jets.p, dw, dwbar }
}

fn circle_integrals(phi: &PhiExpansion) -> BTreeMap<i64, Gq> {
    let mut by_power: BTreeMap<i64, Gq> = BTreeMap::new();
    for (&(a, b), c) in phi.dw.terms() {
        if b == a + 1 {
            *by_power.entry(a as i64 + b as i64 + 1).or_insert_with(Gq::zero) += c;
        }
    }
    for (&(a, b), c) in phi.dwbar.terms() {
        if a == b + 1 {
            *by_power.entry(a as i64 + b as i64 + 1).or_insert_with(Gq::zero) -= c;
        }
    }
    by_power
}

/// `(1/2πi)∮_{|w|=ε} φ`. Every `ε`-power other than `ε⁰` must cancel; a
/// surviving one is reported as [`Error::EpsilonDependent`].
pub fn residue(phi: &PhiExpansion) -> Result<Gq> {
    let prec = phi.prec();
    if prec < 0 {
        return Err(Error::TruncationInsufficient { needed: 0, available: prec });
    }
    let mut by_power = circle_integrals(phi);
    for (k, c) in &by_power {
        // a power of ε is trustworthy only if it comes from degrees below
        // the precision of both parts
        if *k != 0 && *k - 1 < prec && !c.is_zero() {
            return Err(Error::EpsilonDependent(format!("coefficient {} at eps^{}", c, k)));
        }
    }
    Ok(by_power.remove(&0).unwrap_or_else(Gq::zero))
}

/// The `ε⁰` coefficient of the circle integral with no closedness check.
pub fn residue_slot(phi: &PhiExpansion) -> Gq {
    circle_integrals(phi).remove(&0).unwrap_or_else(Gq::zero)
}

/// Which Killing coefficient or `φ` part a pole bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PoleKind {
    /// `b^{2n} = −i e^{u} w^{−p} B^{2n}`.
    B,
    /// `c^{2n} = −i e^{−u} w^{p} C^{2n}`.
    C,
    /// `a^{2n+1} = 2A^{2n+1}`.
    A,
    PhiDw,
    PhiDwbar,
}

impl PoleKind {
    pub fn label(self) -> &'static str {
        match self {
            PoleKind::B => "b^{2n}",
            PoleKind::C => "c^{2n}",
            PoleKind::A => "a^{2n+1}",
            PoleKind::PhiDw => "phi_n dw",
            PoleKind::PhiDwbar => "phi_n dwbar",
        }
    }

    /// Lower bound for the valuation. Killing coefficients and the `dw` part
    /// are bounded in the `w`-exponent; the `dw̄` part carries an extra `w̄`
    /// and is bounded in total degree.
    pub fn bound(self, n: u32, p: u32) -> i64 {
        let (n, p) = (n as i64, p as i64);
        match self {
            PoleKind::B => -((2 * n - 1) * p + (4 * n - 4)),
            PoleKind::C => -((2 * n - 3) * p + (4 * n - 4)),
            PoleKind::A => -((2 * n - 1) * p + (4 * n - 2)),
            PoleKind::PhiDw => -((2 * n - 1) * p + (4 * n - 1)),
            PoleKind::PhiDwbar => -((2 * n - 1) * p + (4 * n - 4)) + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleRow {
    pub kind: PoleKind,
    pub n: u32,
    pub p: u32,
    pub bound: i64,
    /// The valuation compared with the bound, `None` for a vanishing series.
    pub observed: Option<i64>,
    pub prec: i64,
}

impl PoleRow {
    pub fn holds(&self) -> bool {
        self.observed.map_or(true, |v| v >= self.bound)
    }
}

fn observe(kind: PoleKind, n: u32, p: u32, s: &BiLaurent) -> Result<PoleRow> {
    let bound = kind.bound(n, p);
    if s.prec() <= bound {
        return Err(Error::TruncationInsufficient { needed: bound + 1, available: s.prec() });
    }
    let observed = match kind {
        PoleKind::PhiDwbar => s.valuation(),
        _ => s.w_valuation().map(|v| v as i64),
    };
    Ok(PoleRow { kind, n, p, bound, observed, prec: s.prec() })
}

/// Pole orders of `b^{2n}, c^{2n}, a^{2n+1}` for `1 ≤ n ≤ max_n`.
pub fn killing_pole_rows(max_n: u32, jets: &mut SurfaceJets, h: &Hierarchy) -> Result<Vec<PoleRow>> {
    let p = jets.p;
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let lower = h.level(n - 1).ok_or_else(|| Error::Precondition(format!("hierarchy has no level {}", n - 1)))?;
        let upper = h.level(n).ok_or_else(|| Error::Precondition(format!("hierarchy has no level {}", n)))?;
        let mi = -Gq::i();
        let b = (&jets.exp_u(1) * &jets.eval(&lower.b)?).shift(-(p as i32), 0).scale(&mi);
        let c = (&jets.exp_u(-1) * &jets.eval(&lower.c)?).shift(p as i32, 0).scale(&mi);
        let a = jets.eval(&upper.a)?.scale(&Gq::int(2));
        rows.push(observe(PoleKind::B, n, p, &b)?);
        rows.push(observe(PoleKind::C, n, p, &c)?);
        rows.push(observe(PoleKind::A, n, p, &a)?);
    }
    Ok(rows)
}

pub fn phi_pole_rows(phi: &PhiExpansion) -> Result<Vec<PoleRow>> {
    Ok(alloc::vec![
        observe(PoleKind::PhiDw, phi.n, phi.p, &phi.dw)?,
        observe(PoleKind::PhiDwbar, phi.n, phi.p, &phi.dwbar)?,
    ])
}

/// Residue, closedness and smoothness of the twisted form for one `φ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRow {
    pub n: u32,
    pub p: u32,
    pub residue: Gq,
    pub closed: bool,
    pub twisted_smooth: bool,
    pub poles: Vec<PoleRow>,
    pub prec: i64,
}

pub fn analyze_phi(n: u32, jets: &mut SurfaceJets, h: &Hierarchy) -> Result<ResidueRow> {
    let phi = expand_phi(n, jets, h)?;
    let tw = phi.twisted();
    let twisted_smooth = tw.dw.valuation().map_or(true, |v| v >= 0) && tw.dwbar.valuation().map_or(true, |v| v >= 0);
    Ok(ResidueRow {
        n,
        p: jets.p,
        residue: residue(&phi)?,
        closed: phi.is_closed(),
        twisted_smooth,
        poles: phi_pole_rows(&phi)?,
        prec: phi.prec(),
    })
}

/// Human-readable chart note carried by reports.
pub fn chart_note(p: u32) -> String {
    if p % 2 == 0 {
        format!("w-chart (z = w^2); p = {} is even, so residues are twice the z-chart values", p)
    } else {
        format!("w-chart (z = w^2) on the double cover; p = {}", p)
    }
}
