//! Dictionary between the invariant jet variables `z_j` and the jets
//! `u_k = ∂_z^k u` of the elliptic sinh-Gordon equation
//! `u_{zz̄} = −f(u)`, `f(u) = ¼(γ² e^{2u} − e^{−2u})`.
//!
//! With `p₃ = z₃` and `p_{j+2} = ∂_ω p_{j+1}` the relations are
//! `p_{j+2} ≡ −4u_j`; since `p_{j+2} = z_{j+2} + (lower z)`, the system is
//! triangular and is inverted one index at a time.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jetring::{d_omega, is_z_pure, max_z_index, z, JetPoly, JetVar};
use crate::poly::{Poly, Var};
use crate::scalar::Gq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UVar {
    Gamma,
    /// `e^{2u}`.
    EPlus,
    /// `e^{−2u}`.
    EMinus,
    U(u32),
}

impl Var for UVar {
    fn weight(&self) -> i64 {
        match self {
            UVar::U(k) => *k as i64,
            _ => 0,
        }
    }

    fn name(&self) -> String {
        match self {
            UVar::Gamma => "gamma".into(),
            UVar::EPlus => "Ep".into(),
            UVar::EMinus => "Em".into(),
            UVar::U(k) => format!("u{}", k),
        }
    }
}

pub type UJetPoly = Poly<UVar>;

pub fn u(k: u32) -> UJetPoly {
    Poly::var(UVar::U(k))
}

/// `∂_z` on u-jets: `u_k ↦ u_{k+1}`, `E_± ↦ ±2u₁E_±`, `γ ↦ 0`.
pub fn total_dz(q: &UJetPoly) -> UJetPoly {
    let r: core::result::Result<_, core::convert::Infallible> = q.derive(|v| {
        Ok(match v {
            UVar::Gamma => Poly::zero(),
            UVar::U(k) => u(k + 1),
            UVar::EPlus => (&u(1) * &Poly::var(UVar::EPlus)).scale(&Gq::int(2)),
            UVar::EMinus => (&u(1) * &Poly::var(UVar::EMinus)).scale(&Gq::int(-2)),
        })
    });
    r.unwrap()
}

/// `S₁ = f(u) = ¼(γ²E₊ − E₋)`.
pub fn source_term() -> UJetPoly {
    let g2 = Poly::var_pow(UVar::Gamma, 2);
    (&(&g2 * &Poly::var(UVar::EPlus)) - &Poly::var(UVar::EMinus)).scale(&Gq::ratio(1, 4))
}

/// `S_j = ∂_z^{j−1} f(u)`, `j ≥ 1`.
pub fn source(j: u32) -> Result<UJetPoly> {
    if j == 0 {
        return Err(Error::Precondition("source terms start at S_1".into()));
    }
    let mut s = source_term();
    for _ in 1..j {
        s = total_dz(&s);
    }
    Ok(s)
}

/// The triangular table: `p_{j+2}` and the image of `z_{j+2}` for
/// `1 ≤ j ≤ depth`.
#[derive(Clone, Debug)]
pub struct Dictionary {
    p: Vec<JetPoly>,
    image: BTreeMap<u32, UJetPoly>,
}

impl Dictionary {
    pub fn new(depth: u32) -> Result<Self> {
        let mut p = Vec::new();
        let mut image: BTreeMap<u32, UJetPoly> = BTreeMap::new();
        let mut cur = z(3);
        for j in 1..=depth {
            if j > 1 {
                cur = d_omega(&cur)?;
            }
            // z_{j+2} = −4u_j − (p_{j+2} − z_{j+2}) with lower z's substituted
            let rest = &cur - &z(j + 2);
            let rest_u = map_z(&rest, &image)?;
            image.insert(j + 2, &u(j).scale(&Gq::int(-4)) - &rest_u);
            p.push(cur.clone());
        }
        Ok(Dictionary { p, image })
    }

    pub fn depth(&self) -> u32 {
        self.p.len() as u32
    }

    /// `p_{j+2}`.
    pub fn p(&self, j: u32) -> Option<&JetPoly> {
        if j == 0 {
            return None;
        }
        self.p.get(j as usize - 1)
    }

    /// Image of `z_k`.
    pub fn z_image(&self, k: u32) -> Option<&UJetPoly> {
        self.image.get(&k)
    }

    /// Substitutes `z_j` in a z-pure polynomial (γ allowed).
    pub fn apply(&self, q: &JetPoly) -> Result<UJetPoly> {
        if !is_z_pure(q) {
            return Err(Error::Precondition("the dictionary applies to z-pure polynomials".into()));
        }
        if max_z_index(q) > self.depth() + 2 {
            return Err(Error::TruncationExceeded { needed: max_z_index(q), cap: self.depth() + 2 });
        }
        map_z(q, &self.image)
    }

    /// The inverse map `u_j ↦ −¼ p_{j+2}`; `u₀` and `E_±` have no preimage.
    pub fn invert(&self, q: &UJetPoly) -> Result<JetPoly> {
        let mut out = JetPoly::zero();
        for (m, c) in q.terms() {
            let mut t = JetPoly::constant(c.clone());
            for (v, e) in m.factors() {
                let base = match v {
                    UVar::Gamma => JetPoly::var_pow(JetVar::Gamma, *e),
                    UVar::U(j) if *j >= 1 && *e >= 0 => match self.p(*j) {
                        Some(p) => p.scale(&Gq::ratio(-1, 4)).pow(*e as u32),
                        None => return Err(Error::TruncationExceeded { needed: *j, cap: self.depth() }),
                    },
                    other => return Err(Error::Precondition(format!("{} has no preimage", other.name()))),
                };
                t = &t * &base;
            }
            out = &out + &t;
        }
        Ok(out)
    }
}

fn map_z(q: &JetPoly, image: &BTreeMap<u32, UJetPoly>) -> Result<UJetPoly> {
    let missing = core::cell::Cell::new(None);
    let out = q.substitute_into(|v| match v {
        JetVar::Gamma => Poly::var(UVar::Gamma),
        JetVar::Z(j) => image.get(j).cloned().unwrap_or_else(|| {
            missing.set(Some(*j));
            Poly::zero()
        }),
        _ => Poly::zero(),
    });
    match missing.get() {
        Some(j) => Err(Error::Precondition(format!("z{} is not in the dictionary", j))),
        None => Ok(out),
    }
}

/// Weight check of the dictionary on one polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeRow {
    pub label: String,
    pub source_weight: Option<i64>,
    pub image_weight: Option<i64>,
    pub image: UJetPoly,
}

impl BridgeRow {
    pub fn preserved(&self) -> bool {
        self.source_weight.is_some() && self.source_weight == self.image_weight
    }
}

pub fn bridge_row(d: &Dictionary, label: &str, q: &JetPoly) -> Result<BridgeRow> {
    let image = d.apply(q)?;
    Ok(BridgeRow {
        label: label.into(),
        source_weight: q.weight_report().weight,
        image_weight: image.weight_report().weight,
        image,
    })
}
