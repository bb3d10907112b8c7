use cmc_ladder::hierarchy::Hierarchy;
use cmc_ladder::jetring::{gamma_pow, z, JetPoly};
use cmc_ladder::pdebridge::{bridge_row, u, Dictionary};
use cmc_ladder::Gq;
use proptest::prelude::*;

#[test]
fn jacobi_fields_keep_their_weight() {
    let h = Hierarchy::build(4).unwrap();
    let d = Dictionary::new(10).unwrap();
    for n in 1..=4u32 {
        let row = bridge_row(&d, "a", h.a(n).unwrap()).unwrap();
        assert!(row.preserved(), "n = {}: {:?} vs {:?}", n, row.source_weight, row.image_weight);
        assert_eq!(row.image_weight, Some(2 * n as i64 - 1));
    }
}

#[test]
fn round_trip_through_p() {
    let d = Dictionary::new(8).unwrap();
    for j in 1..=8u32 {
        let back = d.apply(&d.invert(&u(j)).unwrap()).unwrap();
        assert_eq!(back, u(j), "u{}", j);
        let zk = z(j + 2);
        assert_eq!(d.invert(&d.apply(&zk).unwrap()).unwrap(), zk, "z{}", j + 2);
    }
}

fn small_poly() -> impl Strategy<Value = JetPoly> {
    let term = (3u32..=7, 0u32..=2, -3i64..=3, -1i32..=1);
    proptest::collection::vec(term, 1..4).prop_map(|ts| {
        let mut p = JetPoly::zero();
        for (j, e, c, g) in ts {
            p = &p + &(&z(j).pow(e) * &gamma_pow(g)).scale(&Gq::int(c));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dictionary_is_multiplicative(p in small_poly(), q in small_poly()) {
        let d = Dictionary::new(6).unwrap();
        let lhs = d.apply(&(&p * &q)).unwrap();
        let rhs = &d.apply(&p).unwrap() * &d.apply(&q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dictionary_is_additive(p in small_poly(), q in small_poly()) {
        let d = Dictionary::new(6).unwrap();
        prop_assert_eq!(d.apply(&(&p + &q)).unwrap(), &d.apply(&p).unwrap() + &d.apply(&q).unwrap());
    }
}
