use std::collections::BTreeMap;

use cmc_ladder::hierarchy::Hierarchy;
use cmc_ladder::umbilic::{
    analyze_phi, default_order, PoleKind, expand_phi, killing_pole_rows, phi1_closed_form, residue, residue_slot, SurfaceJets, UmbilicModel,
};
use cmc_ladder::Gq;

fn jets(p: u32, seed: u64, order: i64, max_j: u32) -> SurfaceJets {
    let m = UmbilicModel::random(p, seed, 3, Gq::ratio(3, 2), order).unwrap();
    SurfaceJets::new(&m, max_j).unwrap()
}

#[test]
fn phi1_residue_matches_closed_form_for_random_jets() {
    let h = Hierarchy::build(1).unwrap();
    for seed in 1..=5u64 {
        let mut s = jets(2, seed, default_order(1, 2), 4);
        let phi = expand_phi(1, &mut s, &h).unwrap();
        let closed = phi1_closed_form(&mut s);
        let prec = phi.prec().min(closed.prec());
        // the whole expansion agrees, not only the residue slot
        assert_eq!(phi.dw.truncate(prec), closed.dw.truncate(prec), "seed {}", seed);
        assert_eq!(phi.dwbar.truncate(prec), closed.dwbar.truncate(prec), "seed {}", seed);
        assert_eq!(residue(&phi).unwrap(), residue(&closed).unwrap(), "seed {}", seed);
    }
}

#[test]
fn phi1_slot_with_only_c11() {
    // not a solution of the Gauss equation: the expansions still agree and
    // the ε⁰ slots agree, but the form is not closed
    let h = Hierarchy::build(1).unwrap();
    let mut jet = BTreeMap::new();
    jet.insert((1, 1), Gq::ratio(-2, 3));
    let m = UmbilicModel::new(2, jet, Gq::ratio(1, 2), 24).unwrap();
    let mut s = SurfaceJets::new(&m, 4).unwrap();
    let phi = expand_phi(1, &mut s, &h).unwrap();
    let closed = phi1_closed_form(&mut s);
    assert_eq!(residue_slot(&phi), residue_slot(&closed));
    assert!(!phi.is_closed());
    assert!(!m.gauss_residual().is_zero());
}

#[test]
fn residue_depends_on_the_holomorphic_jet() {
    // p = 2: Res φ₁ = (i/γ)(4c₁₀² − 8c₂₀) in the w-chart
    let h = Hierarchy::build(1).unwrap();
    let mut jet = BTreeMap::new();
    jet.insert((1, 0), Gq::ratio(1, 2));
    jet.insert((0, 1), Gq::ratio(1, 2));
    jet.insert((2, 0), Gq::complex((1, 3), (1, 1)));
    jet.insert((0, 2), Gq::complex((1, 3), (-1, 1)));
    let gamma = Gq::int(2);
    let cauchy: BTreeMap<u32, Gq> = jet.iter().filter(|(k, _)| k.1 == 0).map(|(k, c)| (k.0, c.clone())).collect();
    let m = UmbilicModel::solve(2, &cauchy, gamma.clone(), 20).unwrap();
    let mut s = SurfaceJets::new(&m, 4).unwrap();
    let res = residue(&expand_phi(1, &mut s, &h).unwrap()).unwrap();
    let c10 = Gq::ratio(1, 2);
    let c20 = Gq::complex((1, 3), (1, 1));
    let expect = &(&Gq::i() / &gamma) * &(&(&Gq::int(4) * &(&c10 * &c10)) - &(&Gq::int(8) * &c20));
    assert_eq!(res, expect);
    assert!(!res.is_zero());
}

#[test]
fn pole_bounds_and_twisted_smoothness() {
    let h = Hierarchy::build(3).unwrap();
    for p in 1..=3u32 {
        let mut s = jets(p, 100 + p as u64, default_order(3, p), 9);
        for row in killing_pole_rows(3, &mut s, &h).unwrap() {
            assert!(row.holds(), "{:?}", row);
        }
        for n in 0..=3u32 {
            let r = analyze_phi(n, &mut s, &h).unwrap();
            assert!(r.closed, "phi_{} p={} not closed", n, p);
            assert!(r.twisted_smooth, "phi_{} p={} twisted form not smooth", n, p);
            for row in &r.poles {
                assert!(row.holds(), "{:?}", row);
            }
        }
    }
}

#[test]
fn killing_bounds_are_attained_at_leading_order() {
    // the numerators are nonzero constants at w = 0 for a^{2n+1}
    let h = Hierarchy::build(2).unwrap();
    let mut s = jets(1, 3, default_order(2, 1), 7);
    for row in killing_pole_rows(2, &mut s, &h).unwrap() {
        if row.kind == PoleKind::A {
            assert_eq!(row.observed, Some(row.bound), "{:?}", row);
        }
    }
}
