use std::path::Path;

use cmc_ladder::cvlaws;
use cmc_ladder::deformation::{check_psi_closed, psi, w_degrees};
use cmc_ladder::finitetype::killing::{first_integral_defects, shift_identity, support, KillingField};
use cmc_ladder::finitetype::numeric::{
    halving_ratio, seeded_state, spectral_report, ExactState, FrameModel, PathOptions,
};
use cmc_ladder::finitetype::web::{flat_web_check, flat_web_halving, uncoupled_identities, WebOptions, WebState};
use cmc_ladder::finitetype::{FiniteTypeSpec, Normalization};
use cmc_ladder::hierarchy::{free_normalization, integration_ladder, Hierarchy};
use cmc_ladder::jetring::{gamma, r, r_pow, z, JetPoly};
use cmc_ladder::pdebridge::{bridge_row, u, Dictionary};
use cmc_ladder::umbilic::{
    analyze_phi, chart_note, default_order, expand_phi, killing_pole_rows, phi1_closed_form, residue, SurfaceJets,
    UmbilicModel,
};
use cmc_ladder::{Gq, Poly, Rules};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::codec::{self, gq, poly_entry};
use crate::error::{CliError, CliResult};
use crate::report::{Report, SCHEMA};
use crate::{Command, Method, VerifyCheck};

/// Tolerances for the numeric checks.
pub const DRIFT_TOL: f64 = 1e-8;
pub const MIN_ORDER_RATIO: f64 = 12.0;
pub const ROOT_SYMMETRY_TOL: f64 = 1e-10;

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Hierarchy { .. } => "hierarchy",
        Command::Verify { .. } => "verify",
        Command::Cvlaws { .. } => "cvlaws",
        Command::Umbilic { .. } => "umbilic",
        Command::FiniteType { .. } => "finite-type",
        Command::Simulate { .. } => "simulate",
        Command::Deform { .. } => "deform",
        Command::PdeBridge { .. } => "pde-bridge",
    }
}

pub fn dispatch(c: &Command) -> CliResult<Report> {
    match c {
        Command::Hierarchy { depth, method } => hierarchy(*depth, *method),
        Command::Verify { input, checks } => verify(input, checks),
        Command::Cvlaws { max_n, exact_up_to } => cvlaws_cmd(*max_n, *exact_up_to),
        Command::Umbilic { p, order, seed, n, gamma } => umbilic(*p, *order, *seed, *n, gamma),
        Command::FiniteType { level, constants, state, integrate, dt, seed } => {
            finite_type(*level, constants, state.as_deref(), *integrate, *dt, *seed)
        }
        Command::Simulate { a, b, c, gamma, length, dt } => {
            simulate(WebState { a: *a, b: *b, c: *c }, WebOptions { gamma: *gamma, length: *length, dt: *dt })
        }
        Command::Deform { max_j } => deform(*max_j),
        Command::PdeBridge { depth } => pde_bridge(*depth),
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Algebraic => "algebraic",
        Method::Integration => "integration",
        Method::Both => "both",
    }
}

pub fn hierarchy(depth: u32, method: Method) -> CliResult<Report> {
    let mut rep = Report::new("hierarchy", json!({ "depth": depth, "method": method_name(method) }));
    if depth == 0 {
        return Err(CliError::Input(String::from("depth must be at least 1")));
    }
    let h = if method != Method::Integration { Some(Hierarchy::build(depth)?) } else { None };
    if let Some(h) = &h {
        for level in h.verify_all() {
            for c in level.checks {
                rep.check(format!("hierarchy.{}[n={}]", c.id, level.n), c.passed, c.detail);
            }
        }
        let levels: Vec<Value> = h
            .levels()
            .iter()
            .map(|l| json!({ "n": l.n, "a": poly_entry(&l.a), "b": poly_entry(&l.b), "c": poly_entry(&l.c) }))
            .collect();
        rep.put("levels", Value::Array(levels));
    }
    if method != Method::Algebraic {
        let ladder = integration_ladder(depth)?;
        let rules = Rules::default();
        for (i, a) in ladder.iter().enumerate() {
            let n = i as u32 + 1;
            let e = rules.jacobi(&a.scale(&Gq::int(2)))?;
            rep.check(format!("integration.jacobi[n={}]", n), e.is_zero(), format!("{} residual terms", e.len()));
            if let Some(h) = &h {
                let same = h.a(n).map(|x| &free_normalization(n) * x) == Some(a.clone());
                rep.check(format!("integration.agrees[n={}]", n), same, "free normalization of A matches the ladder");
            }
        }
        rep.put("ladder", Value::Array(ladder.iter().map(poly_entry).collect()));
    }
    Ok(rep)
}

fn level_field(level: &Value, key: &str) -> CliResult<JetPoly> {
    let terms = level
        .get(key)
        .and_then(|e| e.get("terms"))
        .ok_or_else(|| CliError::Input(format!("level entry lacks {}.terms", key)))?;
    codec::parse_jet_poly(terms)
}

pub fn verify(input: &Path, checks: &[VerifyCheck]) -> CliResult<Report> {
    let names: Vec<&str> = checks
        .iter()
        .map(|c| match c {
            VerifyCheck::Jacobi => "jacobi",
            VerifyCheck::Weights => "weights",
            VerifyCheck::Closedness => "closedness",
        })
        .collect();
    let mut rep = Report::new("verify", json!({ "input": input.display().to_string(), "checks": names }));
    let doc = read_json(input)?;
    if doc.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        return Err(CliError::Input(format!("{}: schema must be {:?}", input.display(), SCHEMA)));
    }
    let levels = doc
        .pointer("/data/levels")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Input(format!("{}: no data.levels; write it with `hierarchy --method algebraic`", input.display())))?;
    let rules = Rules::default();
    let mut prev_b: Option<JetPoly> = None;
    for (i, lv) in levels.iter().enumerate() {
        let n = lv.get("n").and_then(Value::as_u64).ok_or_else(|| CliError::Input(format!("level {} lacks n", i)))? as i64;
        if n != i as i64 {
            return Err(CliError::Input(format!("levels out of order at position {}", i)));
        }
        let (a, b, c) = (level_field(lv, "a")?, level_field(lv, "b")?, level_field(lv, "c")?);
        if checks.contains(&VerifyCheck::Jacobi) {
            let e = rules.jacobi(&a.scale(&Gq::int(2)))?;
            rep.check(format!("verify.jacobi[n={}]", n), e.is_zero(), format!("{} residual terms", e.len()));
        }
        if checks.contains(&VerifyCheck::Weights) {
            let (wa, wb, wc) = (a.weight_report(), b.weight_report(), c.weight_report());
            let a_ok = if n == 0 { a.is_zero() } else { wa.homogeneous && wa.weight == Some(2 * n - 1) };
            rep.check(format!("verify.weight.A[n={}]", n), a_ok, format!("{:?}", wa.weight));
            let bc_ok = wb.homogeneous && wc.homogeneous && wb.weight == Some(2 * n) && wc.weight == Some(2 * n);
            rep.check(format!("verify.weight.BC[n={}]", n), bc_ok, format!("B {:?}, C {:?}", wb.weight, wc.weight));
        }
        if checks.contains(&VerifyCheck::Closedness) {
            let db = rules.d_omega_bar(&b)?;
            rep.check(format!("verify.closure.B[n={}]", n), db == -(&r() * &a), "dOmegaBar(B) = -r A");
            let dc = rules.d_omega_bar(&c)?;
            rep.check(format!("verify.closure.C[n={}]", n), dc == -(&(&gamma() * &r_pow(-1)) * &a), "dOmegaBar(C) = -gamma r^-1 A");
            let lhs = match &prev_b {
                Some(pb) => rules.d_omega(&(&r_pow(-1) * pb))?,
                None => Poly::zero(),
            };
            rep.check(format!("verify.phi-closed[n={}]", n), lhs == dc, "dOmega(r^-1 B') = dOmegaBar(C)");
        }
        prev_b = Some(b);
    }
    rep.put("levels_checked", json!(levels.len()));
    Ok(rep)
}

pub fn cvlaws_cmd(max_n: u32, exact_up_to: u32) -> CliResult<Report> {
    let mut rep = Report::new("cvlaws", json!({ "max_n": max_n, "exact_up_to": exact_up_to }));
    let h = Hierarchy::build(max_n.max(1))?;
    let rows = cvlaws::report(&h, max_n, exact_up_to)?;
    let mut out = Vec::new();
    for row in &rows {
        rep.check(format!("cvlaws.closed[n={}]", row.n), row.closed, "d(phi_n) = 0");
        if let Some(exact) = row.exact {
            rep.check(format!("cvlaws.nonexact[n={}]", row.n), !exact, "no polynomial potential of the generating weight");
        }
        out.push(json!({
            "n": row.n,
            "closed": row.closed,
            "exact": row.exact,
            "weight": row.weight,
            "generating_weight": row.generating_weight,
        }));
    }
    rep.put("rows", Value::Array(out));
    Ok(rep)
}

fn parse_gamma(s: &str) -> CliResult<Gq> {
    let g = codec::parse_rational(s)?;
    if g <= BigRational::from_integer(0.into()) {
        return Err(CliError::Input(format!("gamma must be positive, got {}", s)));
    }
    Ok(Gq::real(g))
}

pub fn umbilic(p: u32, order: Option<i64>, seed: u64, n: u32, gamma_s: &str) -> CliResult<Report> {
    if p == 0 {
        return Err(CliError::Input(String::from("umbilic order p must be positive")));
    }
    let g = parse_gamma(gamma_s)?;
    let order = order.unwrap_or_else(|| default_order(n.max(1), p));
    let mut rep = Report::new("umbilic", json!({ "p": p, "order": order, "seed": seed, "n": n, "gamma": gq(&g) }));
    let h = Hierarchy::build(n.max(1))?;
    let model = UmbilicModel::random(p, seed, 3, g, order)?;
    let mut jets = SurfaceJets::new(&model, 2 * n + 3)?;
    let mut rows = Vec::new();
    for k in 0..=n {
        let row = analyze_phi(k, &mut jets, &h)?;
        rep.check(format!("umbilic.closed[n={}]", k), row.closed, format!("to order {}", row.prec));
        rep.check(format!("umbilic.twisted-smooth[n={}]", k), row.twisted_smooth, "twisted form has no poles");
        for pr in &row.poles {
            rep.check(
                format!("umbilic.pole.{}[n={}]", pr.kind.label(), k),
                pr.holds(),
                format!("observed {:?}, bound {}", pr.observed, pr.bound),
            );
        }
        rows.push(json!({ "n": k, "residue": gq(&row.residue), "prec": row.prec }));
    }
    if n >= 1 {
        let phi = expand_phi(1, &mut jets, &h)?;
        let closed = phi1_closed_form(&mut jets);
        let (a, b) = (residue(&phi)?, residue(&closed)?);
        rep.check("umbilic.residue-closed-form[n=1]", a == b, format!("{:?} vs {:?}", a.to_string(), b.to_string()));
    }
    let mut killing = Vec::new();
    for pr in killing_pole_rows(n, &mut jets, &h)? {
        rep.check(
            format!("umbilic.killing.{}[n={}]", pr.kind.label(), pr.n),
            pr.holds(),
            format!("observed {:?}, bound {}", pr.observed, pr.bound),
        );
        killing.push(json!({ "kind": pr.kind.label(), "n": pr.n, "bound": pr.bound, "observed": pr.observed, "prec": pr.prec }));
    }
    rep.put("chart", json!(chart_note(p)));
    rep.put("phi", Value::Array(rows));
    rep.put("killing_poles", Value::Array(killing));
    Ok(rep)
}

fn gq_list(v: &Value, key: &str) -> CliResult<Vec<Gq>> {
    match v.get(key) {
        None => Ok(Vec::new()),
        Some(Value::Array(a)) => a.iter().map(codec::parse_gq).collect(),
        Some(other) => Err(CliError::Input(format!("{} must be a list, got {}", key, other))),
    }
}

fn rational_field(v: &Value, key: &str, default: Option<&str>) -> CliResult<BigRational> {
    match v.get(key) {
        Some(Value::String(s)) => codec::parse_rational(s),
        Some(Value::Number(x)) => codec::parse_rational(&x.to_string()),
        None => match default {
            Some(d) => codec::parse_rational(d),
            None => Err(CliError::Input(format!("missing {}", key))),
        },
        Some(other) => Err(CliError::Input(format!("{} must be a rational, got {}", key, other))),
    }
}

fn parse_spec(level: u32, v: &Value) -> CliResult<FiniteTypeSpec> {
    let norm = match v.get("normalization") {
        None => Normalization::Unit,
        Some(Value::String(s)) if s == "unit" => Normalization::Unit,
        Some(n) => match n.get("frame") {
            Some(f) => Normalization::Frame { gamma: Gq::real(rational_field(f, "gamma", None)?) },
            None => return Err(CliError::Input(format!("unknown normalization {}", n))),
        },
    };
    Ok(FiniteTypeSpec::new(level, gq_list(v, "U")?, gq_list(v, "V")?, norm)?)
}

fn state_json(st: &ExactState) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("gamma".into(), json!(codec::rational(&st.gamma)));
    m.insert("r".into(), json!(codec::rational(&st.r)));
    for (k, x) in &st.values {
        m.insert(cmc_ladder::Var::name(k), gq(x));
    }
    Value::Object(m)
}

pub fn finite_type(
    level: u32,
    constants: &Path,
    state: Option<&Path>,
    integrate: Option<f64>,
    dt: f64,
    seed: u64,
) -> CliResult<Report> {
    let kv = read_json(constants)?;
    let sv = state.map(read_json).transpose()?;
    let mut rep = Report::new(
        "finite-type",
        json!({
            "level": level,
            "constants": kv,
            "state": sv.clone(),
            "seed": if sv.is_none() { Some(seed) } else { None },
            "integrate": integrate,
            "dt": dt,
        }),
    );
    let spec = parse_spec(level, &kv)?;
    rep.put("U", Value::Array(spec.u().iter().map(gq).collect()));
    rep.put("V", Value::Array(spec.v().iter().map(gq).collect()));

    let d2 = spec.closed_system()?.d2_check()?;
    for row in &d2.rows {
        rep.check(format!("finite-type.d2[{}]", row.label), row.residual.is_zero(), format!("{} residual terms", row.residual.len()));
    }

    let h = Hierarchy::build(level)?;
    let x = KillingField::build(&spec, &h)?;
    let top = 2 * level as usize - 2;
    let within = |s: &[usize], lo: usize| s.iter().all(|&k| k >= lo && k <= top);
    let (sa, sb, sc) = (support(&x.a), support(&x.b), support(&x.c));
    rep.check("finite-type.support", within(&sa, 1) && within(&sb, 0) && within(&sc, 0), format!("a {:?}, b {:?}, c {:?}", sa, sb, sc));
    let p = x.spectral_coefficients();
    let constant = |q: &JetPoly| q.terms().all(|(m, _)| m.factors().iter().all(|(v, _)| *v == cmc_ladder::JetVar::Gamma));
    let ends = p.len() == 4 * level as usize - 3 && constant(&p[0]) && constant(&p[p.len() - 1]);
    rep.check("finite-type.boundary-coefficients", ends, "P_0 and the top coefficient involve gamma only");
    rep.put("lambda_profile", json!({ "a": sa, "b": sb, "c": sc }));

    for (k, dw, dwb) in first_integral_defects(&spec, &h)? {
        rep.check(format!("finite-type.first-integral[P{}]", k), dw.is_zero() && dwb.is_zero(), "dOmega and dOmegaBar vanish on the relation");
    }
    if level == 2 {
        rep.check("finite-type.shift-identity", shift_identity(&spec, &h)?.holds(), "shifted relation holds");
    }

    let model = FrameModel::new(&spec, &h)?;
    let st = match &sv {
        Some(v) => model.admissible_state(
            &rational_field(v, "gamma", Some("1"))?,
            &rational_field(v, "r", None)?,
            &gq_list(v, "A")?,
            &gq_list(v, "B")?,
        )?,
        None => seeded_state(&model, &BigRational::from_integer(1.into()), seed)?,
    };
    for c in model.constraints() {
        if !st.eval(&c)?.is_zero() {
            return Err(cmc_ladder::Error::DegenerateState(String::from("state violates the relation")).into());
        }
    }
    rep.put("initial_state", state_json(&st));
    let sr = spectral_report(&model, &st)?;
    rep.check(
        "finite-type.root-symmetry",
        sr.symmetric(ROOT_SYMMETRY_TOL),
        format!("defect {:.3e}, root precision {:.3e}", sr.reflection_defect, sr.root_precision),
    );
    rep.put(
        "spectral",
        json!({
            "coefficients": sr.coefficients.iter().map(gq).collect::<Vec<_>>(),
            "roots": sr.roots.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "reflection_defect": sr.reflection_defect,
            "root_precision": sr.root_precision,
            "genus_arithmetic": sr.genus_arithmetic,
            "genus_geometric": sr.genus_geometric,
        }),
    );

    if let Some(length) = integrate {
        let ns = st.to_numeric()?;
        let opts = PathOptions { length, dt, ..PathOptions::default() };
        let (coarse, fine, ratio) = halving_ratio(&model, &ns, opts)?;
        rep.check("finite-type.drift", coarse.p_drift < DRIFT_TOL, format!("{:.3e} over {} steps", coarse.p_drift, coarse.steps));
        rep.check("finite-type.constraint-drift", coarse.constraint_drift < DRIFT_TOL, format!("{:.3e}", coarse.constraint_drift));
        rep.check("finite-type.order", ratio >= MIN_ORDER_RATIO, format!("halving ratio {:.2}", ratio));
        rep.put(
            "integration",
            json!({
                "steps": coarse.steps,
                "p_drift": coarse.p_drift,
                "p_drift_half_step": fine.p_drift,
                "constraint_drift": coarse.constraint_drift,
                "ratio": ratio,
                "lambdas": coarse.lambdas.len(),
            }),
        );
    }
    Ok(rep)
}

pub fn simulate(init: WebState, opts: WebOptions) -> CliResult<Report> {
    let mut rep = Report::new(
        "simulate",
        json!({ "a": init.a, "b": init.b, "c": init.c, "gamma": opts.gamma, "length": opts.length, "dt": opts.dt }),
    );
    let web = flat_web_check()?;
    for row in &web.rows {
        rep.check(format!("web.compatibility[{}]", row.label), row.residual.is_zero(), format!("{} residual terms", row.residual.len()));
    }
    for (label, p) in uncoupled_identities() {
        rep.check(format!("web.identity[{}]", label), p.is_zero(), "holds in the Laurent ring");
    }
    let (coarse, fine, ratio) = flat_web_halving(init, opts)?;
    rep.check("web.residual", coarse.residual() < DRIFT_TOL, format!("{:.3e} over {} steps", coarse.residual(), coarse.steps));
    rep.check("web.order", ratio >= MIN_ORDER_RATIO, format!("halving ratio {:.2}", ratio));
    rep.put(
        "integration",
        json!({
            "steps": coarse.steps,
            "gauss_residual": coarse.gauss_residual,
            "rho_residual": coarse.rho_residual,
            "residual_half_step": fine.residual(),
            "ratio": ratio,
            "final": { "a": coarse.final_state.a, "b": coarse.final_state.b, "c": coarse.final_state.c, "phi": coarse.final_phi },
        }),
    );
    rep.put("zbar4", poly_entry(&web.zbar4));
    Ok(rep)
}

pub fn deform(max_j: u32) -> CliResult<Report> {
    let mut rep = Report::new("deform", json!({ "max_j": max_j }));
    let h = Hierarchy::build(max_j + 1)?;
    rep.check("deform.psi0-zero", psi(0, &h)?.is_zero(), "psi_0 vanishes");
    let mut forms = Vec::new();
    for j in 1..=max_j {
        let form = psi(j, &h)?;
        let (f, g) = form.components();
        rep.check(format!("deform.psi-closed[j={}]", j), check_psi_closed(j, &h)?, "d(psi_j) = 0 on the deformed jets");
        let linear = w_degrees(&f).iter().chain(w_degrees(&g).iter()).all(|&d| d == 1);
        rep.check(format!("deform.w-linear[j={}]", j), linear, "linear in the variation jets");
        forms.push(json!({ "j": j, "omega": poly_entry(&f), "omega_bar": poly_entry(&g) }));
    }
    rep.put("psi", Value::Array(forms));
    Ok(rep)
}

pub fn pde_bridge(depth: u32) -> CliResult<Report> {
    if depth < 2 {
        return Err(CliError::Input(String::from("depth must be at least 2")));
    }
    let mut rep = Report::new("pde-bridge", json!({ "depth": depth }));
    let d = Dictionary::new(depth)?;
    let z3 = d.z_image(3).cloned().unwrap_or_default();
    rep.check("bridge.z3", z3 == u(1).scale(&Gq::int(-4)), z3.to_text());
    let p4 = &z(4) - &z(3).pow(2).scale(&Gq::ratio(3, 2));
    let im = d.apply(&p4)?;
    rep.check("bridge.z4", im == u(2).scale(&Gq::int(-4)), im.to_text());
    let nmax = (depth + 1) / 2;
    let h = Hierarchy::build(nmax)?;
    let mut rows = Vec::new();
    for n in 1..=nmax {
        let a = h.a(n).ok_or_else(|| CliError::Input(format!("no level {}", n)))?;
        let row = bridge_row(&d, &format!("a{}", 2 * n + 1), a)?;
        rep.check(
            format!("bridge.weight[a{}]", 2 * n + 1),
            row.preserved(),
            format!("{:?} -> {:?}", row.source_weight, row.image_weight),
        );
        rows.push(json!({ "label": row.label, "source_weight": row.source_weight, "image_weight": row.image_weight, "image": poly_entry(&row.image) }));
    }
    let images: Vec<Value> = (3..=depth + 2)
        .filter_map(|k| d.z_image(k).map(|p| json!({ "z": k, "image": poly_entry(p) })))
        .collect();
    rep.put("z_images", Value::Array(images));
    rep.put("jacobi_fields", Value::Array(rows));
    Ok(rep)
}
