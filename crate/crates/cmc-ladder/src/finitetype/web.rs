//! The flat structure 3-web, `Im(z₄/z₃²) = 0`.
//!
//! Symbolically the condition eliminates `z̄₄ = z̄₃² (z₄/z₃² − 2ic)` (with
//! `c = 0` for the flat web); its `∂_ω`- and `∂_ω̄`-derivatives give `z₅` and
//! `z̄₅`, which closes the jet structure equations at order 5 on the
//! generators `r, z₃, z̄₃, z₄`. [`web_check`] verifies `d² = 0` on that
//! system.
//!
//! In the frame where `h₂, h₃, h₄` share a phase the system un-couples into a
//! real ODE for `A, B, C` along `ω¹ = ds`, with `ω² = q ds'`,
//! `q = BA/(−2CA + 3B² − 2A⁴ + 2γ²A²)` and `dω² = −ρ̃ ω¹∧ω²`.
//! [`flat_web_integrate`] integrates it together with `q' = −ρ̃ q` and the
//! Gauss equation `q'' = (A² − γ²) q` and reports how far both stay from the
//! algebraic `q`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jetring::{self, r, z, zbar, JetPoly, JetVar, Rules};
use crate::poly::{Poly, Var};
use crate::scalar::Gq;

use super::dd::Dd;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebRow {
    pub label: String,
    pub residual: JetPoly,
}

/// Outcome of the symbolic check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebCheck {
    /// The imposed value of `Im(z₄/z₃²)`.
    pub phase: Gq,
    pub zbar4: JetPoly,
    pub z5: JetPoly,
    pub zbar5: JetPoly,
    pub rows: Vec<WebRow>,
}

impl WebCheck {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.residual.is_zero())
    }

    pub fn require(&self) -> Result<()> {
        match self.rows.iter().find(|r| !r.residual.is_zero()) {
            None => Ok(()),
            Some(row) => Err(Error::NotCompatible(format!(
                "Im(z4/z3^2) = {}: {} leaves {} terms",
                self.phase,
                row.label,
                row.residual.len()
            ))),
        }
    }
}

struct WebSystem {
    rules: Rules,
    zbar4: JetPoly,
    z5: JetPoly,
}

impl WebSystem {
    fn reduce(&self, p: &JetPoly) -> JetPoly {
        p.substitute(|x| (*x == JetVar::ZBar(4)).then(|| self.zbar4.clone()))
    }

    fn image(&self, x: &JetVar, bar: bool) -> Result<JetPoly> {
        let half = Gq::ratio(1, 2);
        let p = match (*x, bar) {
            (JetVar::Gamma, _) => return Ok(Poly::zero()),
            (JetVar::R, false) => (&r() * &z(3)).scale(&half),
            (JetVar::R, true) => (&r() * &zbar(3)).scale(&half),
            (JetVar::Z(3), false) => &z(4) - &z(3).pow(2).scale(&Gq::ratio(3, 2)),
            (JetVar::ZBar(3), true) => &zbar(4) - &zbar(3).pow(2).scale(&Gq::ratio(3, 2)),
            (JetVar::Z(4), false) => &self.z5 - &(&z(3) * &z(4)).scale(&Gq::int(2)),
            (JetVar::Z(3), true) | (JetVar::Z(4), true) | (JetVar::ZBar(3), false) => {
                if bar {
                    self.rules.d_omega_bar(&Poly::var(*x))?
                } else {
                    self.rules.d_omega(&Poly::var(*x))?
                }
            }
            (y, _) => {
                return Err(Error::Precondition(format!("{} is not a generator of the web system", y.name())));
            }
        };
        Ok(self.reduce(&p))
    }

    fn d(&self, p: &JetPoly, bar: bool) -> Result<JetPoly> {
        p.derive(|x| self.image(x, bar))
    }

    fn commutator(&self, p: &JetPoly) -> Result<JetPoly> {
        Ok(&self.d(&self.d(p, false)?, true)? - &self.d(&self.d(p, true)?, false)?)
    }
}

/// Solves the linear equation `e = 0` for the generator `x`.
fn solve_for(e: &JetPoly, x: JetVar) -> Result<JetPoly> {
    let parts = e.collect_by(&x);
    let lead = parts
        .get(&1)
        .and_then(|c| c.inv_monomial())
        .filter(|_| parts.keys().all(|k| *k == 0 || *k == 1))
        .ok_or_else(|| Error::Precondition(format!("equation is not linear in {} with monomial coefficient", x.name())))?;
    Ok(-(&parts.get(&0).cloned().unwrap_or_else(Poly::zero) * &lead))
}

/// `d² = 0` for the system closed by `Im(z₄/z₃²) = phase`.
///
/// Only `phase = 0` is the flat web; a nonzero constant is a negative
/// control and does not close.
pub fn web_check(phase: &Gq) -> Result<WebCheck> {
    if !phase.is_real() {
        return Err(Error::Precondition(format!("Im(z4/z3^2) must be real, got {}", phase)));
    }
    let rules = Rules::with_cap(6);
    let two_i_c = &(&Gq::i() * &Gq::int(2)) * phase;
    let q = &z(4) * &Poly::var_pow(JetVar::Z(3), -2);
    let zbar4 = &zbar(3).pow(2) * &(&q - &Poly::constant(two_i_c.clone()));
    // F = z₄/z₃² − z̄₄/z̄₃² − 2ic
    let f = &(&q - &(&zbar(4) * &Poly::var_pow(JetVar::ZBar(3), -2))) - &Poly::constant(two_i_c);
    let sub = |p: &JetPoly| p.substitute(|x| (*x == JetVar::ZBar(4)).then(|| zbar4.clone()));
    let z5 = sub(&solve_for(&rules.d_omega(&f)?, JetVar::Z(5))?);
    let zbar5 = sub(&solve_for(&rules.d_omega_bar(&f)?, JetVar::ZBar(5))?);

    let sys = WebSystem { rules, zbar4: zbar4.clone(), z5: z5.clone() };
    let mut rows = Vec::new();
    rows.push(WebRow { label: String::from("zbar5 - conj(z5)"), residual: &zbar5 - &sub(&jetring::conj(&z5)) });
    for g in [JetVar::R, JetVar::Z(3), JetVar::ZBar(3), JetVar::Z(4)] {
        rows.push(WebRow { label: format!("d^2 {}", g.name()), residual: sys.commutator(&Poly::var(g))? });
    }
    // z̄₄ is no longer a generator; its derivatives must match the jet rules
    let want_o = sub(&sys.rules.d_omega(&zbar(4))?);
    let want_b = &zbar5 - &(&zbar(3) * &zbar4).scale(&Gq::int(2));
    rows.push(WebRow { label: String::from("d_omega zbar4"), residual: &sys.d(&zbar4, false)? - &want_o });
    rows.push(WebRow { label: String::from("d_omega_bar zbar4"), residual: &sys.d(&zbar4, true)? - &want_b });
    rows.push(WebRow { label: String::from("d^2 zbar4"), residual: sys.commutator(&zbar4)? });
    Ok(WebCheck { phase: phase.clone(), zbar4, z5, zbar5, rows })
}

/// [`web_check`] for the flat web itself.
pub fn flat_web_check() -> Result<WebCheck> {
    web_check(&Gq::zero())
}

/// Variables of the un-coupled system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WebVar {
    Gamma,
    A,
    B,
    C,
}

impl Var for WebVar {
    fn name(&self) -> String {
        String::from(match self {
            WebVar::Gamma => "gamma",
            WebVar::A => "A",
            WebVar::B => "B",
            WebVar::C => "C",
        })
    }
}

pub type WebPoly = Poly<WebVar>;

fn wv(x: WebVar) -> WebPoly {
    Poly::var(x)
}

fn inv_ba() -> WebPoly {
    &Poly::var_pow(WebVar::B, -1) * &Poly::var_pow(WebVar::A, -1)
}

/// `dA/ds`, `dB/ds`, `dC/ds` of the un-coupled system.
pub fn uncoupled_rhs(x: WebVar) -> WebPoly {
    let (a, b, c, g2) = (wv(WebVar::A), wv(WebVar::B), wv(WebVar::C), wv(WebVar::Gamma).pow(2));
    match x {
        WebVar::Gamma => Poly::zero(),
        WebVar::A => b,
        WebVar::B => &(&c - &a.pow(3)) + &(&g2 * &a),
        WebVar::C => {
            let t1 = (&c.pow(2) * &Poly::var_pow(WebVar::B, -1)).scale(&Gq::int(2));
            let t2 = &(&(&(&a.pow(4).scale(&Gq::int(2)) - &b.pow(2)) - &(&g2 * &a.pow(2)).scale(&Gq::int(2))) * &c)
                * &inv_ba();
            let t3 = &(&g2 * &b).scale(&Gq::int(5)) - &(&b * &a.pow(2)).scale(&Gq::int(7));
            &(&t1 + &t2) + &t3
        }
    }
}

/// `ρ̃ = (CA − B² + A⁴ − γ²A²)/(BA)`.
pub fn rho() -> WebPoly {
    let (a, b, c, g2) = (wv(WebVar::A), wv(WebVar::B), wv(WebVar::C), wv(WebVar::Gamma).pow(2));
    &(&(&(&(&c * &a) - &b.pow(2)) + &a.pow(4)) - &(&g2 * &a.pow(2))) * &inv_ba()
}

/// `Φ = (−2CA + 3B² − 2A⁴ + 2γ²A²)/(BA)`, the `ω²`-coefficient of `dφ`.
pub fn phi_coefficient() -> WebPoly {
    let (a, b, c, g2) = (wv(WebVar::A), wv(WebVar::B), wv(WebVar::C), wv(WebVar::Gamma).pow(2));
    let num = &(&(&b.pow(2).scale(&Gq::int(3)) - &(&c * &a).scale(&Gq::int(2))) - &a.pow(4).scale(&Gq::int(2)))
        + &(&g2 * &a.pow(2)).scale(&Gq::int(2));
    &num * &inv_ba()
}

/// `d/ds` along the un-coupled flow.
pub fn d_s(p: &WebPoly) -> WebPoly {
    p.derive(|x| Ok::<_, ()>(uncoupled_rhs(*x))).unwrap_or_else(|_| Poly::zero())
}

/// The two Laurent identities behind the numeric residuals, as residuals:
/// `Φ' − ρ̃Φ` and `ρ̃' − ρ̃² − γ² + A²`.
pub fn uncoupled_identities() -> [(&'static str, WebPoly); 2] {
    let (rho, phi) = (rho(), phi_coefficient());
    let g2 = wv(WebVar::Gamma).pow(2);
    let a2 = wv(WebVar::A).pow(2);
    [
        ("phi' - rho phi", &d_s(&phi) - &(&rho * &phi)),
        ("rho' - rho^2 - gamma^2 + A^2", &(&(&d_s(&rho) - &rho.pow(2)) - &g2) + &a2),
    ]
}

/// Real initial data `A, B, C` at `s = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WebState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WebOptions {
    pub gamma: f64,
    pub length: f64,
    pub dt: f64,
}

impl Default for WebOptions {
    fn default() -> Self {
        WebOptions { gamma: 1.0, length: 0.5, dt: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WebReport {
    pub steps: usize,
    pub dt: f64,
    /// `max |q_Gauss − q|` with `q_Gauss'' = (A² − γ²) q_Gauss`.
    pub gauss_residual: f64,
    /// `max |q_ρ − q|` with `q_ρ' = −ρ̃ q_ρ`.
    pub rho_residual: f64,
    pub final_state: WebState,
    /// `Φ` at the end of the path.
    pub final_phi: f64,
}

impl WebReport {
    pub fn residual(&self) -> f64 {
        self.gauss_residual.max(self.rho_residual)
    }
}

type Y = [Dd; 6];

struct Flow {
    g2: Dd,
}

impl Flow {
    fn parts(&self, y: &Y) -> (Dd, Dd) {
        let (a, b, c) = (y[0], y[1], y[2]);
        let ba = b * a;
        let a2 = a * a;
        let a4 = a2 * a2;
        let rho = (c * a - b * b + a4 - self.g2 * a2) / ba;
        let two = Dd::new(2.0);
        let phi = (Dd::new(3.0) * b * b - two * c * a - two * a4 + two * self.g2 * a2) / ba;
        (rho, phi)
    }

    fn rhs(&self, y: &Y) -> Y {
        let (a, b, c) = (y[0], y[1], y[2]);
        let (rho, _) = self.parts(y);
        let a2 = a * a;
        let two = Dd::new(2.0);
        let dc = two * c * c / b + (two * a2 * a2 - b * b - two * self.g2 * a2) * c / (b * a)
            + Dd::new(5.0) * self.g2 * b
            - Dd::new(7.0) * b * a2;
        [b, c - a2 * a + self.g2 * a, dc, -(rho * y[3]), y[5], (a2 - self.g2) * y[4]]
    }

    fn step(&self, y: &Y, h: Dd) -> Y {
        let half = h * Dd::new(0.5);
        let axpy = |y: &Y, k: &Y, s: Dd| -> Y {
            let mut o = *y;
            for i in 0..6 {
                o[i] += k[i] * s;
            }
            o
        };
        let k1 = self.rhs(y);
        let k2 = self.rhs(&axpy(y, &k1, half));
        let k3 = self.rhs(&axpy(y, &k2, half));
        let k4 = self.rhs(&axpy(y, &k3, h));
        let mut o = *y;
        let sixth = h / Dd::new(6.0);
        for i in 0..6 {
            o[i] += (k1[i] + Dd::new(2.0) * (k2[i] + k3[i]) + k4[i]) * sixth;
        }
        o
    }

    fn admissible(&self, y: &Y) -> core::result::Result<(Dd, Dd), String> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(String::from("non-finite state"));
        }
        if y[0].abs().to_f64() < 1e-8 || y[1].abs().to_f64() < 1e-8 {
            return Err(format!("A = {:e}, B = {:e}", y[0].to_f64(), y[1].to_f64()));
        }
        let (rho, phi) = self.parts(y);
        if phi.abs().to_f64() < 1e-8 {
            return Err(String::from("the dphi coefficient vanishes"));
        }
        Ok((rho, phi))
    }
}

/// Integrates the un-coupled system with classical RK4 along `ω¹` and
/// measures the Gauss-equation and `ρ̃`-consistency residuals.
pub fn flat_web_integrate(initial: WebState, opts: WebOptions) -> Result<WebReport> {
    if !(opts.gamma > 0.0) || !(opts.dt > 0.0) || !(opts.length >= 0.0) {
        return Err(Error::Precondition(format!(
            "need gamma > 0, dt > 0, length >= 0; got {}, {}, {}",
            opts.gamma, opts.dt, opts.length
        )));
    }
    let g = Dd::new(opts.gamma);
    let flow = Flow { g2: g * g };
    let mut y: Y = [Dd::new(initial.a), Dd::new(initial.b), Dd::new(initial.c), Dd::ZERO, Dd::ZERO, Dd::ZERO];
    let (rho0, phi0) = flow.admissible(&y).map_err(|e| Error::Precondition(format!("initial state: {}", e)))?;
    let signs = |y: &Y, phi: Dd| (y[0].hi > 0.0, y[1].hi > 0.0, phi.hi > 0.0);
    let sign0 = signs(&y, phi0);
    let q0 = phi0.recip();
    y[3] = q0;
    y[4] = q0;
    y[5] = -(rho0 * q0);

    let steps = libm::round(opts.length / opts.dt) as usize;
    let h = Dd::new(opts.length) / Dd::new(steps.max(1) as f64);
    let (mut gauss, mut rho_res) = (0.0f64, 0.0f64);
    let mut phi = phi0;
    for i in 0..steps {
        y = flow.step(&y, h);
        let fail = |e: String| Error::StepFailure(format!("singular approach at s = {:.6}: {}", (i + 1) as f64 * h.to_f64(), e));
        let (_, p) = flow.admissible(&y).map_err(fail)?;
        if signs(&y, p) != sign0 {
            return Err(fail(String::from("A, B or the dphi coefficient changed sign")));
        }
        phi = p;
        let q = p.recip();
        gauss = gauss.max((y[4] - q).abs().to_f64());
        rho_res = rho_res.max((y[3] - q).abs().to_f64());
    }
    Ok(WebReport {
        steps,
        dt: h.to_f64(),
        gauss_residual: gauss,
        rho_residual: rho_res,
        final_state: WebState { a: y[0].to_f64(), b: y[1].to_f64(), c: y[2].to_f64() },
        final_phi: phi.to_f64(),
    })
}

/// Runs at `dt` and `dt/2`; the ratio of the larger residuals is about 16
/// for a fourth-order method.
pub fn flat_web_halving(initial: WebState, opts: WebOptions) -> Result<(WebReport, WebReport, f64)> {
    let coarse = flat_web_integrate(initial, opts)?;
    let fine = flat_web_integrate(initial, WebOptions { dt: opts.dt / 2.0, ..opts })?;
    let ratio = coarse.residual() / fine.residual();
    Ok((coarse, fine, ratio))
}
