//! Threshold arithmetic on the quoted parameter tables.

use proptest::prelude::*;

use ftqec::analytics::*;
use ftqec::report::{budget, cooling, quoted_threshold};

#[test]
fn printed_polynomials() {
    let k1 = eval_exrec_formulas(&ParamTable::QUOTED_K1);
    let kn = eval_exrec_formulas(&ParamTable::QUOTED_KN);
    assert_eq!((k1.a_cnot, k1.a_btoff, k1.a_vn, kn.a_cnot), (32640, 14586, 14493, 21294));
    assert!(ParamTable::QUOTED_K1.is_consistent() && ParamTable::QUOTED_KN.is_consistent());
}

#[test]
fn threshold_budget_and_cooling() {
    let t = quoted_threshold();
    assert!((t.quoted.p_thresh - 3.76e-5).abs() / 3.76e-5 < 0.01);
    let b = budget(2.82e-5, 6);
    assert!((b.encoder_bound - 8.32e-3).abs() / 8.32e-3 < 0.05);
    assert!(b.msd.h_distillable && b.msd.i_distillable);
    let c = cooling(0.01, 2, t.quoted.p_thresh);
    assert!((c.required_pg - 2.32e-6).abs() / 2.32e-6 < 0.05);
    assert!(b.measurement_levels.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(3.0 * MEASUREMENT_THRESHOLD * MEASUREMENT_THRESHOLD, MEASUREMENT_THRESHOLD);
}

#[test]
fn cooling_grid_is_strictly_decreasing() {
    for i in 1..50 {
        let eps0 = i as f64 / 100.0;
        let s = cooling_sequence(eps0, 5);
        assert!(s.windows(2).all(|w| w[1] < w[0]), "eps0 = {eps0}");
    }
}

proptest! {
    #[test]
    fn a_prime_bounds(a in 1.0f64..1e6, b in 0.0f64..1e12) {
        let ap = a_prime(a, b);
        prop_assert!(ap >= a);
        prop_assert!((ap * ap - a * ap - b).abs() <= 1e-9 * ap * ap);
    }

    #[test]
    fn below_threshold_levels_shrink(scale in 0.05f64..0.9) {
        let t = quoted_threshold().quoted;
        let p = iterate_levels(scale / t.ak_prime, t.ak_prime, t.ak_prime, 5);
        prop_assert!(p.windows(2).all(|w| w[1] < w[0]));
    }
}
