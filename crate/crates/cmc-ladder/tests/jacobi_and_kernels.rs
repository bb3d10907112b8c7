use std::time::{Duration, Instant};

use cmc_ladder::hierarchy::Hierarchy;
use cmc_ladder::jetring::{holomorphic_kernel, jacobi_e};

#[test]
fn jacobi_fields_through_level_eight() {
    let start = Instant::now();
    let h = Hierarchy::build(8).unwrap();
    for n in 1..=8u32 {
        let a = h.a(n).unwrap();
        assert!(jacobi_e(a).unwrap().is_zero(), "E(a^{})", 2 * n + 1);
        assert_eq!(a.weight_report().weight, Some(2 * n as i64 - 1));
    }
    let spent = start.elapsed();
    eprintln!("levels 1..8 in {:?}", spent);
    assert!(spent < Duration::from_secs(60));
}

#[test]
fn no_holomorphic_polynomials_of_positive_weight() {
    for wgt in 1..=8i64 {
        let start = Instant::now();
        let ker = holomorphic_kernel(wgt, 10).unwrap();
        let spent = start.elapsed();
        assert!(ker.is_empty(), "weight {}: {} elements", wgt, ker.len());
        assert!(spent < Duration::from_secs(5), "weight {} took {:?}", wgt, spent);
    }
}
