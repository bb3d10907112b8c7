//! Linear finite-type surfaces: the closed structure systems, the polynomial
//! Killing field and its spectral polynomial, numeric path integration, and
//! the flat structure 3-web.
//!
//! Two conventions meet here. A relation
//! `a^{2m+1} = Σ_{j<m} U_j a^{2j+1} + V_j ā^{2j+1}` among the canonical Jacobi
//! fields has Killing level `m`; in the structure frame `A^n` it reads
//! `A^m = Σ U'_j A^j + V'_j Ā^j` with `U'_j = (−γ)^{m−j} U_j` and the same
//! factor for `V'_j`, so the structure system has level `n = m − 1` and
//! `|V'_n|² = γ²` exactly when `|V_{m−1}| = 1`.

pub mod dd;
pub mod killing;
pub mod numeric;
pub mod system;
pub mod web;

use alloc::format;
use alloc::vec::Vec;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Gq;

pub use system::{FrameConstants, FtPoly, FtVar, StructureSystem};

/// How the constants of a [`FiniteTypeSpec`] are given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `|V_{m−1}| = 1`, coefficients of the canonical Jacobi fields.
    Unit,
    /// Coefficients of the structure frame `A^j`, with `|V'_{m−1}|² = γ²`
    /// for the given rational `γ`.
    Frame { gamma: Gq },
}

/// Constants of a level-`m` relation, stored in the unit normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTypeSpec {
    m: u32,
    u: Vec<Gq>,
    v: Vec<Gq>,
}

fn neg_gamma_pow(g: &Gq, e: i32) -> Gq {
    (-g).pow(e)
}

impl FiniteTypeSpec {
    /// Validates `|V_{m−1}| = 1` and `V_j = −V_{m−1} Ū_{j+1}` for
    /// `1 ≤ j ≤ m − 2`. Level 1 is the cylinder relation `a³ = 0` and is
    /// rejected.
    pub fn new(m: u32, u: Vec<Gq>, v: Vec<Gq>, normalization: Normalization) -> Result<Self> {
        if m <= 1 {
            return Err(Error::DegenerateLevel(format!(
                "level {} is the relation a3 = 0 (a cylinder); there is no Killing field to build",
                m
            )));
        }
        let k = (m - 1) as usize;
        if u.len() != k || v.len() != k {
            return Err(Error::Precondition(format!(
                "level {} needs {} constants U and {} constants V, got {} and {}",
                m,
                k,
                k,
                u.len(),
                v.len()
            )));
        }
        let (u, v) = match normalization {
            Normalization::Unit => (u, v),
            Normalization::Frame { gamma } => {
                if gamma.is_zero() || !gamma.is_real() {
                    return Err(Error::Precondition(format!("gamma must be a nonzero real, got {}", gamma)));
                }
                let back = |x: &[Gq]| -> Vec<Gq> {
                    x.iter().enumerate().map(|(i, c)| c * &neg_gamma_pow(&gamma, -(m as i32 - 1 - i as i32))).collect()
                };
                (back(&u), back(&v))
            }
        };
        let top = &v[k - 1];
        if !top.norm_sq().is_one() {
            return Err(Error::ConstantsNotAdapted(format!("|V_{}|^2 = {} is not 1", m - 1, top.norm_sq())));
        }
        for j in 1..=(m as usize).saturating_sub(2) {
            let want = -(top * &u[j].conj());
            if v[j - 1] != want {
                return Err(Error::ConstantsNotAdapted(format!(
                    "V_{} = {} but -V_{} conj(U_{}) = {}",
                    j,
                    v[j - 1],
                    m - 1,
                    j + 1,
                    want
                )));
            }
        }
        Ok(FiniteTypeSpec { m, u, v })
    }

    /// Convenience for unit-normalized constants.
    pub fn unit(m: u32, u: Vec<Gq>, v: Vec<Gq>) -> Result<Self> {
        FiniteTypeSpec::new(m, u, v, Normalization::Unit)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Level of the structure system, `m − 1`.
    pub fn frame_level(&self) -> u32 {
        self.m - 1
    }

    pub fn u(&self) -> &[Gq] {
        &self.u
    }

    pub fn v(&self) -> &[Gq] {
        &self.v
    }

    /// `V_{m−1}`.
    pub fn top_v(&self) -> &Gq {
        &self.v[self.v.len() - 1]
    }

    /// Structure-frame constants `U'_j = (−γ)^{m−j} U_j`, `V'_j = (−γ)^{m−j} V_j`
    /// as polynomials in a symbolic `γ`.
    pub fn frame_constants(&self) -> FrameConstants {
        let m = self.m as i32;
        let conv = |x: &[Gq]| -> Vec<FtPoly> {
            x.iter()
                .enumerate()
                .map(|(i, c)| {
                    let e = m - 1 - i as i32;
                    let sign = if e % 2 == 0 { Gq::one() } else { -Gq::one() };
                    Poly::var_pow(FtVar::Gamma, e).scale(&(c * &sign))
                })
                .collect()
        };
        FrameConstants { u: conv(&self.u), v: conv(&self.v) }
    }

    /// The closed structure system of level `m − 1` with these constants.
    pub fn closed_system(&self) -> Result<StructureSystem> {
        system::with_constants(self.m - 1, &self.frame_constants(), &format!("Killing level {}", self.m))
    }
}
