use cmc_ladder::error::Error;
use cmc_ladder::finitetype::web::{
    flat_web_check, flat_web_halving, flat_web_integrate, uncoupled_identities, web_check, WebOptions, WebState,
};
use cmc_ladder::Gq;
use proptest::prelude::*;

const START: WebState = WebState { a: 1.0, b: 1.0, c: 0.0 };

#[test]
fn flat_web_is_compatible() {
    let rep = flat_web_check().unwrap();
    assert!(rep.passed(), "{:?}", rep.require());
    assert!(rep.rows.len() >= 8);
}

#[test]
fn constant_nonzero_phase_is_not() {
    for c in [Gq::ratio(1, 3), Gq::int(-2)] {
        let rep = web_check(&c).unwrap();
        let bad: Vec<&str> = rep.rows.iter().filter(|r| !r.residual.is_zero()).map(|r| r.label.as_str()).collect();
        assert!(bad.contains(&"d^2 z4"), "{:?}", bad);
    }
    assert!(matches!(web_check(&Gq::i()), Err(Error::Precondition(_))));
}

#[test]
fn laurent_identities() {
    for (label, res) in uncoupled_identities() {
        assert!(res.is_zero(), "{}", label);
    }
}

#[test]
fn residual_and_order() {
    let (coarse, fine, ratio) = flat_web_halving(START, WebOptions::default()).unwrap();
    assert_eq!(coarse.steps, 500);
    assert!(coarse.residual() < 1e-8, "{:e}", coarse.residual());
    assert!(fine.residual() < coarse.residual());
    assert!((12.0..20.0).contains(&ratio), "ratio {}", ratio);
}

#[test]
fn b_vanishing_stops_the_flow() {
    let e = flat_web_integrate(START, WebOptions { length: 1.0, ..WebOptions::default() });
    assert!(matches!(e, Err(Error::StepFailure(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn short_paths_stay_consistent(a in 0.5f64..1.5, b in 0.5f64..1.5, c in -0.5f64..0.5) {
        let opts = WebOptions { length: 0.1, dt: 1e-3, gamma: 1.0 };
        match flat_web_integrate(WebState { a, b, c }, opts) {
            Ok(rep) => prop_assert!(rep.residual() < 1e-10, "{:e}", rep.residual()),
            Err(Error::StepFailure(_)) | Err(Error::Precondition(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
