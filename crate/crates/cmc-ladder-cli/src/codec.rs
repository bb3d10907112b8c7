//! JSON encodings of exact scalars and polynomials.
//!
//! A rational is the string `"n"` or `"n/d"`. A Gaussian rational is a
//! rational string when real and `["re", "im"]` otherwise. A polynomial is a
//! list of `[coefficient, [[variable, exponent], …]]` terms in the library's
//! canonical monomial order, so equal polynomials encode to equal JSON.

use std::str::FromStr;

use cmc_ladder::{Gq, JetPoly, JetVar, Mono, Poly, Var};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub fn rational(q: &BigRational) -> String {
    if q.denom() == &1.into() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> CliResult<BigRational> {
    BigRational::from_str(s.trim()).map_err(|_| CliError::Input(format!("not a rational number: {:?}", s)))
}

pub fn gq(c: &Gq) -> Value {
    if c.im.is_zero() {
        Value::String(rational(&c.re))
    } else {
        json!([rational(&c.re), rational(&c.im)])
    }
}

/// Accepts `"n/d"`, a JSON integer, or `["re", "im"]`.
pub fn parse_gq(v: &Value) -> CliResult<Gq> {
    match v {
        Value::String(s) => Ok(Gq::real(parse_rational(s)?)),
        Value::Number(n) => {
            let s = n.to_string();
            Ok(Gq::real(parse_rational(&s)?))
        }
        Value::Array(a) if a.len() == 2 => {
            let part = |x: &Value| match x {
                Value::String(s) => parse_rational(s),
                Value::Number(n) => parse_rational(&n.to_string()),
                _ => Err(CliError::Input(format!("bad complex part {}", x))),
            };
            Ok(Gq::new(part(&a[0])?, part(&a[1])?))
        }
        _ => Err(CliError::Input(format!("not a Gaussian rational: {}", v))),
    }
}

pub fn poly<V: Var>(p: &Poly<V>) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let fs: Vec<Value> = m.factors().iter().map(|(x, e)| json!([x.name(), e])).collect();
                json!([gq(c), fs])
            })
            .collect(),
    )
}

/// A polynomial with its readable text alongside the exact terms.
pub fn poly_entry<V: Var>(p: &Poly<V>) -> Value {
    json!({ "text": p.to_text(), "terms": poly(p) })
}

pub fn parse_jet_poly(v: &Value) -> CliResult<JetPoly> {
    let terms = v.as_array().ok_or_else(|| CliError::Input(String::from("polynomial must be a list of terms")))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let bad = || CliError::Input(format!("bad polynomial term {}", t));
        let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
        let c = parse_gq(&pair[0])?;
        let mut fs = Vec::new();
        for f in pair[1].as_array().ok_or_else(bad)? {
            let name = f.get(0).and_then(Value::as_str).ok_or_else(bad)?;
            let x = JetVar::parse(name).ok_or_else(|| CliError::Input(format!("unknown variable {:?}", name)))?;
            let e = f.get(1).and_then(Value::as_i64).and_then(|e| i32::try_from(e).ok()).ok_or_else(bad)?;
            fs.push((x, e));
        }
        out.push((Mono::from_factors(fs), c));
    }
    Ok(Poly::from_terms(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmc_ladder::jetring::{gamma_pow, r_pow, z, zbar};

    #[test]
    fn rationals_and_gaussians() {
        assert_eq!(rational(&parse_rational("-6/4").unwrap()), "-3/2");
        assert_eq!(parse_gq(&json!(3)).unwrap(), Gq::int(3));
        let c = Gq::complex((1, 2), (-3, 5));
        assert_eq!(parse_gq(&gq(&c)).unwrap(), c);
        assert!(parse_gq(&json!({"re": 1})).is_err());
    }

    #[test]
    fn polynomial_round_trip() {
        let p = &(&z(4) * &zbar(3).pow(2)).scale(&Gq::complex((7, 3), (1, 1))) + &(&r_pow(-2) * &gamma_pow(3));
        assert_eq!(parse_jet_poly(&poly(&p)).unwrap(), p);
        assert!(parse_jet_poly(&json!([["1", [["q7", 1]]]])).is_err());
    }
}
