use cmc_ladder::cvlaws::{is_closed, is_exact, phi, poisson_form, Exactness, OneForm};
use cmc_ladder::hierarchy::{integration_ladder, Hierarchy};
use cmc_ladder::jetring::{gamma_pow, r_pow, z};
use cmc_ladder::Gq;

#[test]
fn phi_closed_through_six() {
    let h = Hierarchy::build(6).unwrap();
    for n in 0..=6 {
        let f = phi(n, &h).unwrap();
        assert!(is_closed(h.rules(), &f).unwrap(), "phi_{}", n);
        if n >= 1 {
            // dOmega(r^-1 B^{2n}) = -gamma r^-1 A^{2n+1}... equals dOmegaBar(C^{2n+2})
            let lhs = h.rules().d_omega(&(&r_pow(-1) * &h.level(n - 1).unwrap().b)).unwrap();
            let rhs = h.rules().d_omega_bar(&h.level(n).unwrap().c).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn phi_nonexact_through_four() {
    let h = Hierarchy::build(4).unwrap();
    for n in 0..=4 {
        let f = phi(n, &h).unwrap();
        assert_eq!(is_exact(h.rules(), &f).unwrap(), Exactness::NonExact, "phi_{}", n);
    }
}

#[test]
fn adding_exact_form_keeps_class() {
    let h = Hierarchy::build(1).unwrap();
    let rules = h.rules();
    let f = phi(1, &h).unwrap();
    // gamma^-1 z3 has the bidegree of a primitive of phi_1
    let dz = OneForm::exact(rules, &(&gamma_pow(-1) * &z(3))).unwrap();
    let shifted = f.add(&dz.scale(&Gq::ratio(3, 2)));
    assert!(is_closed(rules, &shifted).unwrap());
    assert_eq!(is_exact(rules, &shifted).unwrap(), Exactness::NonExact);
    let back = shifted.add(&dz.scale(&Gq::ratio(-3, 2)));
    assert_eq!(back.components(), f.components());
}

#[test]
fn poisson_forms_exact_for_ladder_pairs() {
    let ladder = integration_ladder(3).unwrap();
    let rules = cmc_ladder::Rules::default();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let form = poisson_form(&rules, &ladder[i], &ladder[j]).unwrap();
        assert!(is_closed(&rules, &form).unwrap(), "pair ({}, {})", i, j);
        match is_exact(&rules, &form).unwrap() {
            Exactness::Witness(w) => {
                let back = OneForm::exact(&rules, &w).unwrap();
                assert_eq!(back.components(), form.components());
            }
            Exactness::NonExact => panic!("bracket ({}, {}) not exact", i, j),
        }
    }
}

#[test]
fn phi_weights_track_generating_field() {
    let h = Hierarchy::build(5).unwrap();
    for n in 1..=5u32 {
        let f = phi(n, &h).unwrap();
        let w = f.weight().unwrap();
        assert_eq!(w, 2 * n as i64 - 1);
        assert_eq!(h.a(n + 1).unwrap().weight_report().weight, Some(w + 2));
    }
}
