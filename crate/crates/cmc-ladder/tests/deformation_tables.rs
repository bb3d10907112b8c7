use cmc_ladder::deformation::{
    check_psi_closed, check_psi_closed_unresolved, check_psi_closed_with, commutator_defect, dot, dot_level, psi, w_degrees,
};
use cmc_ladder::hierarchy::Hierarchy;
use cmc_ladder::jetring::{gamma, gamma_pow, r_pow, w, z, JetPoly, Rules};
use cmc_ladder::Gq;

fn g(n: i64, d: i64) -> Gq {
    Gq::ratio(n, d)
}

fn i_times(n: i64, d: i64) -> Gq {
    &Gq::i() * &g(n, d)
}

#[test]
fn deformed_killing_rows() {
    let h = Hierarchy::build(3).unwrap();
    let u0 = w(0);

    let l0 = dot_level(&h, 0).unwrap();
    let [ra, rb, rc] = l0.remainder([0, 1, -1]);
    assert!(ra.is_zero());
    // ḃ² − b² = −u iγ h^{−1/2}, ċ² + c² = −u i h^{1/2}
    assert_eq!(rb, (&u0 * &gamma()).scale(&-Gq::i()));
    assert_eq!(rc, u0.scale(&-Gq::i()));

    let l1 = dot_level(&h, 1).unwrap();
    let [ra, rb, rc] = l1.remainder([1, 3, 1]);
    assert_eq!(ra, w(1).scale(&Gq::int(-4)));
    let b4 = &w(2).scale(&Gq::int(16)) + &(&u0 * &(&z(3).pow(2).scale(&Gq::int(5)) - &z(4).scale(&Gq::int(4))));
    assert_eq!(rb, b4.scale(&i_times(1, 8)));
    let c4 = &(&w(2).scale(&Gq::int(16)) - &(&w(1) * &z(3)).scale(&Gq::int(16)))
        + &(&u0 * &(&z(4).scale(&Gq::int(4)) - &z(3).pow(2).scale(&Gq::int(7))));
    assert_eq!(rc, &c4 * &gamma_pow(-1).scale(&i_times(1, 8)));

    let l2 = dot_level(&h, 2).unwrap();
    let [ra, _, _] = l2.remainder([3, 0, 0]);
    let a5 = &(&w(3).scale(&Gq::int(-8)) + &(&w(2) * &z(3)).scale(&Gq::int(12)))
        + &(&w(1) * &(&z(4).scale(&Gq::int(4)) - &z(3).pow(2).scale(&Gq::int(5))));
    assert_eq!(ra, &a5 * &gamma_pow(-1).scale(&g(-1, 2)));
}

#[test]
fn psi_zero_one_two() {
    let h = Hierarchy::build(3).unwrap();
    assert!(psi(0, &h).unwrap().is_zero());

    let (f1, g1) = psi(1, &h).unwrap().components();
    let f1_expect = &(&(&w(1) * &z(3)) - &w(2)) * &gamma_pow(-1).scale(&i_times(-2, 1));
    assert_eq!(f1, f1_expect);
    assert_eq!(g1, &(&w(0) * &gamma()) * &r_pow(-1).scale(&i_times(-2, 1)));

    let (f2, g2) = psi(2, &h).unwrap().components();
    let terms: [(i64, JetPoly); 7] = [
        (-8, w(4)),
        (28, &w(3) * &z(3)),
        (-35, &w(2) * &z(3).pow(2)),
        (35, &w(1) * &z(3).pow(3)),
        (-40, &(&w(1) * &z(3)) * &z(4)),
        (12, &w(2) * &z(4)),
        (8, &w(1) * &z(5)),
    ];
    let mut f2_expect = JetPoly::zero();
    for (c, t) in terms.iter() {
        f2_expect = &f2_expect + &t.scale(&Gq::int(*c));
    }
    assert_eq!(f2, &f2_expect * &gamma_pow(-2).scale(&i_times(1, 4)));
    let g2_inner = &(&w(2).scale(&Gq::int(8)) + &(&w(0) * &z(3).pow(2)).scale(&Gq::int(5)))
        - &(&w(0) * &z(4)).scale(&Gq::int(4));
    assert_eq!(g2, &g2_inner * &r_pow(-1).scale(&i_times(1, 4)));
}

#[test]
fn psi_closed_and_linear_in_w() {
    let h = Hierarchy::build(4).unwrap();
    for j in 1..=3u32 {
        assert!(check_psi_closed(j, &h).unwrap(), "psi_{}", j);
        let (f, g) = psi(j, &h).unwrap().components();
        assert_eq!(w_degrees(&f), vec![1], "psi_{} omega part", j);
        assert_eq!(w_degrees(&g), vec![1], "psi_{} omega-bar part", j);
    }
}

#[test]
fn psi_needs_the_jacobi_relation() {
    let h = Hierarchy::build(3).unwrap();
    for j in 1..=3 {
        assert!(!check_psi_closed_unresolved(j, &h).unwrap(), "psi_{}", j);
    }
}

#[test]
fn psi_closedness_does_not_see_the_source_term() {
    // the r² source cancels inside dψ_j; only the commutator test below pins it
    let h = Hierarchy::build(4).unwrap();
    let homogeneous = Rules { inhomogeneous_source: false, ..*h.rules() };
    for j in 1..=3 {
        assert!(check_psi_closed_with(&homogeneous, j, &h).unwrap(), "psi_{}", j);
    }
}

#[test]
fn dot_commutes_with_the_derivations_up_to_scaling() {
    let rules = Rules::default();
    for j in 3..=8 {
        assert!(commutator_defect(&rules, &z(j), false).unwrap().is_zero(), "d_omega on z{}", j);
        assert!(commutator_defect(&rules, &z(j), true).unwrap().is_zero(), "d_omega_bar on z{}", j);
    }
    let h = Hierarchy::build(3).unwrap();
    for n in 1..=3 {
        let l = h.level(n).unwrap();
        for p in [&l.a, &l.b, &l.c] {
            assert!(commutator_defect(h.rules(), p, false).unwrap().is_zero(), "level {}", n);
        }
    }
    // without the r² source the ∂_ω̄ relation breaks already on z₃
    let homogeneous = Rules { inhomogeneous_source: false, ..rules };
    assert!(!commutator_defect(&homogeneous, &z(3), true).unwrap().is_zero());
}

#[test]
fn dot_preserves_weight() {
    let h = Hierarchy::build(4).unwrap();
    for n in 0..=4 {
        let l = h.level(n).unwrap();
        for p in [&l.a, &l.b, &l.c] {
            if p.is_zero() {
                continue;
            }
            let dotted = dot(p).unwrap();
            if dotted.is_zero() {
                // B² = γ is a constant of the deformation
                continue;
            }
            let before = p.weight_report().weight;
            let after = dotted.weight_report().weight;
            assert!(before.is_some());
            assert_eq!(before, after, "level {}", n);
        }
    }
}
