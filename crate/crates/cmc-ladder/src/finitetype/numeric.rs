//! Numeric side of linear finite type: admissible initial states, classical
//! RK4 along straight paths in double-double arithmetic, drift of the
//! spectral polynomial, and its roots.
//!
//! A state assigns values to the unbarred generators `r, A^k, B^k, C^k` of
//! the closed system; barred generators are conjugates. A state is
//! admissible when every `C^k` agrees with its jet expression in the lower
//! generators, `C^n` being the c-condition. The `∂_ω̄`-derivative of the
//! relation is this last constraint, so admissible states are exactly the
//! points of surfaces satisfying the relation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::dd::{Cdd, Dd};
use super::killing::{spectral_coefficients_in_frame, FrameDictionary};
use super::system::{self, FtPoly, FtVar, StructureSystem};
use super::FiniteTypeSpec;
use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::poly::Var;
#[cfg(test)]
use crate::poly::Poly;
use crate::scalar::Gq;

fn conj_var(x: FtVar) -> Option<FtVar> {
    Some(match x {
        FtVar::Ab(j) => FtVar::A(j),
        FtVar::Bb(j) => FtVar::B(j),
        FtVar::Cb(j) => FtVar::C(j),
        _ => return None,
    })
}

/// Values of `γ`, `r` and the unbarred generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactState {
    pub gamma: BigRational,
    pub r: BigRational,
    pub values: BTreeMap<FtVar, Gq>,
}

impl ExactState {
    fn get(&self, x: &FtVar) -> Result<Gq> {
        let missing = || Error::Precondition(format!("state has no value for {}", x.name()));
        Ok(match *x {
            FtVar::Gamma => Gq::real(self.gamma.clone()),
            FtVar::R => Gq::real(self.r.clone()),
            FtVar::Dinv => {
                let d = &self.gamma * &self.gamma - &self.r * &self.r;
                if d.is_zero() {
                    return Err(Error::DegenerateState(String::from("r^2 = gamma^2")));
                }
                Gq::real(d.recip())
            }
            y => match conj_var(y) {
                Some(u) => self.values.get(&u).ok_or_else(missing)?.conj(),
                None => self.values.get(&y).ok_or_else(missing)?.clone(),
            },
        })
    }

    /// Exact value of a frame polynomial.
    pub fn eval(&self, p: &FtPoly) -> Result<Gq> {
        let mut acc = Gq::zero();
        let mut cache: BTreeMap<FtVar, Gq> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut t = c.clone();
            for (x, e) in m.factors() {
                if !cache.contains_key(x) {
                    cache.insert(*x, self.get(x)?);
                }
                let base = &cache[x];
                if *e < 0 && base.is_zero() {
                    return Err(Error::DegenerateState(format!("{} = 0 in a denominator", x.name())));
                }
                t = &t * &base.pow(*e);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub fn to_numeric(&self) -> Result<NumericState> {
        let g = Dd::from_rational(&self.gamma);
        NumericState::new(
            g * g,
            Dd::from_rational(&self.r),
            self.values.iter().filter(|(k, _)| **k != FtVar::R).map(|(k, v)| (*k, Cdd::from_gq(v))).collect(),
        )
    }
}

/// Floating state in double-double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericState {
    gamma: Dd,
    pub r: Dd,
    pub values: BTreeMap<FtVar, Cdd>,
}

impl NumericState {
    /// Rejects `γ² ≤ 0`, `r ≤ 0` and `r² = γ²`.
    pub fn new(gamma_sq: Dd, r: Dd, values: BTreeMap<FtVar, Cdd>) -> Result<Self> {
        if !(gamma_sq.to_f64() > 0.0) {
            return Err(Error::Precondition(format!("gamma^2 = {} must be positive", gamma_sq.to_f64())));
        }
        if !(r.to_f64() > 0.0) {
            return Err(Error::Precondition(format!("r = {} must be positive", r.to_f64())));
        }
        if (gamma_sq - r * r).abs().to_f64() < 1e-14 {
            return Err(Error::DegenerateState(String::from("r^2 = gamma^2")));
        }
        Ok(NumericState { gamma: gamma_sq.sqrt(), r, values })
    }

    pub fn gamma(&self) -> Dd {
        self.gamma
    }

    fn get(&self, x: &FtVar) -> Cdd {
        match *x {
            FtVar::Gamma => Cdd::real(self.gamma),
            FtVar::R => Cdd::real(self.r),
            FtVar::Dinv => Cdd::real((self.gamma * self.gamma - self.r * self.r).recip()),
            y => match conj_var(y) {
                Some(u) => self.values.get(&u).copied().unwrap_or_default().conj(),
                None => self.values.get(&y).copied().unwrap_or_default(),
            },
        }
    }
}

/// A frame polynomial with coefficients rounded to double-double.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(Cdd, Vec<(FtVar, i32)>)>,
}

impl Compiled {
    pub fn new(p: &FtPoly) -> Result<Self> {
        for x in p.vars() {
            if matches!(x, FtVar::U(_) | FtVar::Ub(_) | FtVar::V) {
                return Err(Error::Precondition(String::from("numeric evaluation needs numeric constants")));
            }
        }
        Ok(Compiled { terms: p.terms().map(|(m, c)| (Cdd::from_gq(c), m.factors().to_vec())).collect() })
    }

    pub fn eval(&self, s: &NumericState) -> Cdd {
        let mut acc = Cdd::ZERO;
        for (c, fs) in &self.terms {
            let mut t = *c;
            for (x, e) in fs {
                t = t * s.get(x).powi(*e);
            }
            acc += t;
        }
        acc
    }
}

/// Frame data shared by state construction, integration and spectral
/// reports: the closed system, the jet expressions of every `C^k`, the
/// c-condition and `P_k` in frame generators.
#[derive(Clone, Debug)]
pub struct FrameModel {
    pub spec: FiniteTypeSpec,
    pub system: StructureSystem,
    /// `C^k` from jets, `k = 1..=n`.
    pub c_jets: Vec<FtPoly>,
    pub c_condition: FtPoly,
    pub spectral: Vec<FtPoly>,
}

impl FrameModel {
    pub fn new(spec: &FiniteTypeSpec, h: &Hierarchy) -> Result<Self> {
        let n = spec.frame_level();
        let dict = FrameDictionary::new(n, h)?;
        let c_jets = (1..=n).map(|k| dict.to_frame(dict.c_jet(k))).collect::<Result<Vec<_>>>()?;
        Ok(FrameModel {
            spec: spec.clone(),
            system: spec.closed_system()?,
            c_jets,
            c_condition: system::c_condition(n, &spec.frame_constants()),
            spectral: spectral_coefficients_in_frame(spec, h)?,
        })
    }

    pub fn level(&self) -> u32 {
        self.spec.frame_level()
    }

    /// `C^k_state − C^k_jet` for `k < n` and `c-condition − C^n_jet`.
    pub fn constraints(&self) -> Vec<FtPoly> {
        let n = self.level();
        (1..=n)
            .map(|k| {
                let lhs = if k == n { self.c_condition.clone() } else { system::v(FtVar::C(k)) };
                &lhs - &self.c_jets[k as usize - 1]
            })
            .collect()
    }

    /// The admissible state with the given `r`, `A^1..A^n` and
    /// `B^1..B^{n−1}`: each `C^k` (`k < n`) from its jet expression and `B^n`
    /// from the c-condition, which is real-affine in `B^n`.
    pub fn admissible_state(&self, gamma: &BigRational, r: &BigRational, a: &[Gq], b_lower: &[Gq]) -> Result<ExactState> {
        let n = self.level() as usize;
        if a.len() != n || b_lower.len() + 1 != n {
            return Err(Error::Precondition(format!("level {} needs {} A values and {} B values", n, n, n - 1)));
        }
        if !gamma.is_positive() || !r.is_positive() {
            return Err(Error::Precondition(String::from("gamma and r must be positive")));
        }
        let mut st = ExactState { gamma: gamma.clone(), r: r.clone(), values: BTreeMap::new() };
        for (k, x) in a.iter().enumerate() {
            st.values.insert(FtVar::A(k as u32 + 1), x.clone());
        }
        for (k, x) in b_lower.iter().enumerate() {
            st.values.insert(FtVar::B(k as u32 + 1), x.clone());
        }
        for k in 1..n {
            let c = st.eval(&self.c_jets[k - 1])?;
            st.values.insert(FtVar::C(k as u32), c);
        }
        let top = FtVar::B(n as u32);
        let d = &self.c_condition - &self.c_jets[n - 1];
        let mut at = |x: Gq| -> Result<Gq> {
            st.values.insert(top, x);
            st.eval(&d)
        };
        let alpha = at(Gq::zero())?;
        let e1 = &at(Gq::one())? - &alpha;
        let ei = &at(Gq::i())? - &alpha;
        // D(B) = α + βB + δB̄
        let half = Gq::ratio(1, 2);
        let beta = &(&e1 - &(&Gq::i() * &ei)) * &half;
        let delta = &(&e1 + &(&Gq::i() * &ei)) * &half;
        let det = Gq::real(beta.norm_sq() - delta.norm_sq());
        if det.is_zero() {
            return Err(Error::DegenerateState(String::from("the c-condition does not determine B^n")));
        }
        let bn = &(&(&delta * &alpha.conj()) - &(&alpha * &beta.conj())) / &det;
        st.values.insert(top, bn);
        if !st.eval(&d)?.is_zero() {
            return Err(Error::InvariantViolation(String::from("c-condition is not affine in B^n")));
        }
        Ok(st)
    }

    /// Exact `P_0..P_{4m−4}` at a state.
    pub fn spectral_at(&self, st: &ExactState) -> Result<Vec<Gq>> {
        self.spectral.iter().map(|p| st.eval(p)).collect()
    }
}

/// Options for [`integrate_path`].
#[derive(Clone, Copy, Debug)]
pub struct PathOptions {
    pub length: f64,
    pub dt: f64,
    /// Unit direction of the straight path in the surface coordinate.
    pub direction: (f64, f64),
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { length: 1.0, dt: 1e-3, direction: (1.0, 0.0) }
    }
}

#[derive(Clone, Debug)]
pub struct DriftReport {
    pub steps: usize,
    pub dt: f64,
    /// Sample points of `P(λ)`.
    pub lambdas: Vec<Cdd>,
    /// `max_{t, λ} |P(λ; t) − P(λ; 0)|`.
    pub p_drift: f64,
    /// `max_t` of the largest constraint residual.
    pub constraint_drift: f64,
    pub initial_constraint: f64,
    pub final_state: NumericState,
}

/// Eight sample points spread over annuli inside and outside the unit circle.
pub fn sample_lambdas() -> Vec<Cdd> {
    (0..8)
        .map(|k| {
            let rho = 0.5 + 0.25 * k as f64;
            let th = 0.3 + 0.7 * k as f64;
            Cdd::from_f64(rho * libm::cos(th), rho * libm::sin(th))
        })
        .collect()
}

fn horner(coeffs: &[Cdd], z: Cdd) -> Cdd {
    coeffs.iter().rev().fold(Cdd::ZERO, |acc, c| acc * z + *c)
}

struct Flow {
    gens: Vec<FtVar>,
    omega: Vec<Compiled>,
    omega_bar: Vec<Compiled>,
    dir: Cdd,
}

impl Flow {
    fn new(sys: &StructureSystem, dir: Cdd) -> Result<Self> {
        let gens = sys.generators().to_vec();
        let mut omega = Vec::new();
        let mut omega_bar = Vec::new();
        for g in &gens {
            omega.push(Compiled::new(&sys.d_omega(&system::v(*g))?)?);
            omega_bar.push(Compiled::new(&sys.d_omega_bar(&system::v(*g))?)?);
        }
        Ok(Flow { gens, omega, omega_bar, dir })
    }

    fn pack(&self, s: &NumericState) -> Vec<Cdd> {
        self.gens.iter().map(|g| s.get(g)).collect()
    }

    fn unpack(&self, base: &NumericState, x: &[Cdd]) -> NumericState {
        let mut out = base.clone();
        for (g, v) in self.gens.iter().zip(x) {
            if *g == FtVar::R {
                out.r = v.re;
            } else {
                out.values.insert(*g, *v);
            }
        }
        out
    }

    fn rhs(&self, s: &NumericState) -> Vec<Cdd> {
        let db = self.dir.conj();
        self.gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let d = self.omega[i].eval(s) * self.dir + self.omega_bar[i].eval(s) * db;
                if *g == FtVar::R {
                    Cdd::real(d.re)
                } else {
                    d
                }
            })
            .collect()
    }

    fn step(&self, s: &NumericState, h: Dd) -> NumericState {
        let x0 = self.pack(s);
        let axpy = |x: &[Cdd], k: &[Cdd], c: Dd| -> Vec<Cdd> { x.iter().zip(k).map(|(a, b)| *a + b.scale(c)).collect() };
        let half = h * Dd::new(0.5);
        let k1 = self.rhs(s);
        let k2 = self.rhs(&self.unpack(s, &axpy(&x0, &k1, half)));
        let k3 = self.rhs(&self.unpack(s, &axpy(&x0, &k2, half)));
        let k4 = self.rhs(&self.unpack(s, &axpy(&x0, &k3, h)));
        let sixth = h / Dd::new(6.0);
        let x1: Vec<Cdd> = (0..x0.len())
            .map(|i| {
                let s = k1[i] + k2[i].scale(Dd::new(2.0)) + k3[i].scale(Dd::new(2.0)) + k4[i];
                x0[i] + s.scale(sixth)
            })
            .collect();
        self.unpack(s, &x1)
    }
}

/// Integrates the closed system along `t ↦ z₀ + t·direction`, `0 ≤ t ≤ length`,
/// with classical RK4, tracking the drift of `P(λ)` at the eight
/// [`sample_lambdas`] and of the constraints.
pub fn integrate_path(model: &FrameModel, initial: &NumericState, opts: PathOptions) -> Result<DriftReport> {
    if !(opts.dt > 0.0) || !(opts.length >= 0.0) {
        return Err(Error::Precondition(String::from("step size must be positive and length non-negative")));
    }
    let (dx, dy) = opts.direction;
    let norm = libm::hypot(dx, dy);
    if !(norm > 0.0) {
        return Err(Error::Precondition(String::from("zero direction")));
    }
    let flow = Flow::new(&model.system, Cdd::from_f64(dx / norm, dy / norm))?;
    let spectral: Vec<Compiled> = model.spectral.iter().map(Compiled::new).collect::<Result<_>>()?;
    let constraints: Vec<Compiled> = model.constraints().iter().map(Compiled::new).collect::<Result<_>>()?;
    let lambdas = sample_lambdas();
    let p_values = |s: &NumericState| -> Vec<Cdd> {
        let coeffs: Vec<Cdd> = spectral.iter().map(|c| c.eval(s)).collect();
        lambdas.iter().map(|l| horner(&coeffs, *l)).collect()
    };
    let residual = |s: &NumericState| constraints.iter().map(|c| c.eval(s).abs_f64()).fold(0.0, f64::max);

    let steps = libm::round(opts.length / opts.dt) as usize;
    let h = Dd::new(opts.length) / Dd::new(steps.max(1) as f64);
    let p0 = p_values(initial);
    let initial_constraint = residual(initial);
    let mut s = initial.clone();
    let mut p_drift: f64 = 0.0;
    let mut constraint_drift = initial_constraint;
    let g2 = initial.gamma * initial.gamma;
    let side = (g2 - initial.r * initial.r).to_f64().signum();
    for i in 0..steps {
        s = flow.step(&s, h);
        let gap = (g2 - s.r * s.r).to_f64();
        let finite = s.r.is_finite() && s.values.values().all(|v| v.is_finite());
        // the c-condition divides by γ² − r²; stepping across it is meaningless
        if !finite || s.r.to_f64() < 1e-8 || gap.signum() != side || gap.abs() < 1e-6 * g2.to_f64() {
            return Err(Error::StepFailure(format!(
                "singular approach at t = {:.6} (r = {:e}, gamma^2 - r^2 = {:e})",
                (i + 1) as f64 * h.to_f64(),
                s.r.to_f64(),
                gap
            )));
        }
        for (a, b) in p_values(&s).iter().zip(&p0) {
            p_drift = p_drift.max((*a - *b).abs_f64());
        }
        constraint_drift = constraint_drift.max(residual(&s));
    }
    Ok(DriftReport { steps, dt: h.to_f64(), lambdas, p_drift, constraint_drift, initial_constraint, final_state: s })
}

/// `drift(dt) / drift(dt/2)`; about 16 for a fourth-order method.
pub fn halving_ratio(model: &FrameModel, initial: &NumericState, opts: PathOptions) -> Result<(DriftReport, DriftReport, f64)> {
    let coarse = integrate_path(model, initial, opts)?;
    let fine = integrate_path(model, initial, PathOptions { dt: opts.dt / 2.0, ..opts })?;
    let ratio = coarse.p_drift / fine.p_drift;
    Ok((coarse, fine, ratio))
}

/// Roots of `Σ c_k λ^k`: eigenvalues of the companion matrix in `f64`, each
/// polished by Newton's method in double-double.
pub fn polynomial_roots(coeffs: &[Cdd]) -> Result<Vec<Cdd>> {
    let mut c: Vec<Cdd> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.abs_f64() == 0.0) {
        c.pop();
    }
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = c[d];
    let mut comp = DMatrix::<Complex<f64>>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..d {
        let (re, im) = (c[i] / lead).to_f64_pair();
        comp[(i, d - 1)] = Complex::new(-re, -im);
    }
    let eig = comp
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::InvariantViolation(String::from("Schur iteration did not triangularize")))?;
    let deriv: Vec<Cdd> = (1..=d).map(|k| c[k].scale(Dd::new(k as f64))).collect();
    let mut roots = Vec::with_capacity(d);
    for z in eig.iter() {
        let mut x = Cdd::from_f64(z.re, z.im);
        for _ in 0..12 {
            let dp = horner(&deriv, x);
            if dp.abs_f64() == 0.0 {
                break;
            }
            let step = horner(&c, x) / dp;
            x = x - step;
            if step.abs_f64() <= 1e-30 * x.abs_f64().max(1.0) {
                break;
            }
        }
        roots.push(x);
    }
    Ok(roots)
}

/// Largest distance in a greedy matching of the roots against their images
/// under `λ ↦ 1/conj(λ)`.
pub fn reflection_defect(roots: &[Cdd]) -> f64 {
    let mut used = alloc::vec![false; roots.len()];
    let mut worst: f64 = 0.0;
    for z in roots {
        let img = z.conj().recip();
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, w) in roots.iter().enumerate() {
            if !used[j] {
                let d = (img - *w).abs_f64();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        if best.1 == usize::MAX {
            return f64::INFINITY;
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub m: u32,
    /// `P_0..P_{4m−4}`.
    pub coefficients: Vec<Gq>,
    pub roots: Vec<(f64, f64)>,
    /// Newton step size at the last polishing iteration bound.
    pub root_precision: f64,
    pub reflection_defect: f64,
    /// Clusters of odd multiplicity, paired by the reflection.
    pub odd_root_pairs: usize,
    /// Odd-multiplicity roots on the unit circle (never expected).
    pub odd_roots_on_circle: usize,
    pub genus_arithmetic: u32,
    pub genus_geometric: u32,
}

impl SpectralReport {
    pub fn symmetric(&self, tol: f64) -> bool {
        self.reflection_defect <= tol
    }
}

fn clusters(roots: &[Cdd], tol: f64) -> Vec<(Cdd, usize)> {
    let mut out: Vec<(Cdd, usize)> = Vec::new();
    for z in roots {
        match out.iter_mut().find(|(c, _)| (*c - *z).abs_f64() < tol) {
            Some(c) => c.1 += 1,
            None => out.push((*z, 1)),
        }
    }
    out
}

/// `P(λ)` at an admissible state, with roots and genus data.
pub fn spectral_report(model: &FrameModel, st: &ExactState) -> Result<SpectralReport> {
    let m = model.spec.m();
    let coefficients = model.spectral_at(st)?;
    if coefficients.len() != 4 * m as usize - 3 || coefficients.last().is_none_or(|c| c.is_zero()) {
        return Err(Error::DegenerateState(String::from("leading coefficient of P vanishes")));
    }
    let c: Vec<Cdd> = coefficients.iter().map(Cdd::from_gq).collect();
    let roots = polynomial_roots(&c)?;
    let root_precision = roots.iter().map(|z| horner(&c, *z).abs_f64()).fold(0.0, f64::max);
    let defect = reflection_defect(&roots);
    let cl = clusters(&roots, 1e-6);
    let odd: Vec<&(Cdd, usize)> = cl.iter().filter(|(_, k)| k % 2 == 1).collect();
    let on_circle = odd.iter().filter(|(z, _)| (z.abs_f64() - 1.0).abs() < 1e-8).count();
    let pairs = (odd.len() - on_circle) / 2;
    Ok(SpectralReport {
        m,
        coefficients,
        roots: roots.iter().map(|z| z.to_f64_pair()).collect(),
        root_precision,
        reflection_defect: defect,
        odd_root_pairs: pairs,
        odd_roots_on_circle: on_circle,
        genus_arithmetic: 2 * m - 2,
        genus_geometric: pairs as u32,
    })
}

/// A deterministic pseudo-random admissible state with small dyadic data.
pub fn seeded_state(model: &FrameModel, gamma: &BigRational, seed: u64) -> Result<ExactState> {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut dy = |lo: i64, hi: i64| -> BigRational {
        let span = (hi - lo) as u64;
        let k = lo + (rng.next_u64() % (span + 1)) as i64;
        BigRational::new(k.into(), 64.into())
    };
    let n = model.level() as usize;
    // r in (0.2, 0.8)·γ keeps away from both singular loci
    let r = &dy(13, 51) * gamma;
    let a: Vec<Gq> = (0..n).map(|_| Gq::new(dy(-48, 48), dy(-48, 48))).collect();
    let b: Vec<Gq> = (1..n).map(|_| Gq::new(dy(-32, 32), dy(-32, 32))).collect();
    let a: Vec<Gq> = a.into_iter().map(|x| if x.is_zero() { Gq::ratio(1, 4) } else { x }).collect();
    model.admissible_state(gamma, &r, &a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_a_known_quartic() {
        // (λ−2)(λ−1/2)(λ−i)(λ+3i)
        let r = [Cdd::from_f64(2.0, 0.0), Cdd::from_f64(0.5, 0.0), Cdd::from_f64(0.0, 1.0), Cdd::from_f64(0.0, -3.0)];
        let mut c = alloc::vec![Cdd::ONE];
        for z in r {
            let mut next = alloc::vec![Cdd::ZERO; c.len() + 1];
            for (k, x) in c.iter().enumerate() {
                next[k + 1] += *x;
                next[k] = next[k] - *x * z;
            }
            c = next;
        }
        let found = polynomial_roots(&c).unwrap();
        for z in r {
            assert!(found.iter().any(|w| (*w - z).abs_f64() < 1e-25), "{:?}", z);
        }
    }

    #[test]
    fn reflection_pairs() {
        let z = Cdd::from_f64(0.3, 0.4);
        let roots = [z, z.conj().recip(), Cdd::from_f64(0.0, 1.0)];
        assert!(reflection_defect(&roots) < 1e-28);
        assert!(reflection_defect(&[z, Cdd::from_f64(1.0, 1.0)]) > 0.1);
    }

    #[test]
    fn negative_gamma_squared_is_rejected() {
        let e = NumericState::new(Dd::new(-1.0), Dd::new(0.5), BTreeMap::new());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn compiled_matches_exact() {
        let p: FtPoly = &(&system::v(FtVar::A(1)) * &system::v(FtVar::Ab(1))) + &Poly::var_pow(FtVar::R, -2);
        let mut values = BTreeMap::new();
        values.insert(FtVar::A(1), Gq::complex((1, 3), (1, 2)));
        let st = ExactState { gamma: BigRational::from_integer(1.into()), r: BigRational::new(1.into(), 2.into()), values };
        let exact = Cdd::from_gq(&st.eval(&p).unwrap());
        let num = Compiled::new(&p).unwrap().eval(&st.to_numeric().unwrap());
        assert!((exact - num).abs_f64() < 1e-28);
    }
}
