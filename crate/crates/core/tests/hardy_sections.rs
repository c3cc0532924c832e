use std::collections::BTreeMap;
use std::f64::consts::PI;

use esspos_core::hardy::{classify_hardy, hull_cross_check, CircleSymbol, HULL_TOL};
use esspos_core::spectra::Verdict;
use num_complex::Complex64;
use proptest::prelude::*;

fn dense_min(s: &CircleSymbol) -> f64 {
    (0..50_000)
        .map(|j| s.eval(2.0 * PI * j as f64 / 50_000.0))
        .fold(f64::INFINITY, f64::min)
}

fn complex_symbol() -> impl Strategy<Value = CircleSymbol> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(|c| {
        let mut map = BTreeMap::new();
        for (k, &(a, b)) in c.iter().enumerate() {
            let z = if k == 0 { Complex64::new(a, 0.0) } else { Complex64::new(a, b) };
            map.insert(k as i64, z);
            map.insert(-(k as i64), z.conj());
        }
        CircleSymbol::from_fourier(&map).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdict_is_the_sign_of_the_minimum(c in proptest::collection::vec(-1.0f64..1.0, 1..7)) {
        let s = CircleSymbol::from_real_cosine(&c).unwrap();
        let v = classify_hardy(&s, 1e-8).unwrap().classification.verdict;
        prop_assert_ne!(v, Verdict::EssentiallyPositiveOnly);
        let min = dense_min(&s);
        // the dense grid overestimates the minimum by at most ~1e-7 here
        if min.abs() > 1e-6 {
            prop_assert_eq!(v == Verdict::Positive, min >= 0.0);
        }
    }

    #[test]
    fn sections_stay_in_the_hull(s in complex_symbol()) {
        let h = hull_cross_check(&s, &[4, 16, 64, 128]).unwrap();
        prop_assert!(h.monotone);
        for e in &h.entries {
            prop_assert!(e.gap_lower >= -HULL_TOL && e.gap_upper >= -HULL_TOL);
        }
    }
}

#[test]
fn large_sections_stay_in_the_hull() {
    let s = CircleSymbol::from_real_cosine(&[0.1, -0.4, 0.2, 0.0, 0.15]).unwrap();
    let h = hull_cross_check(&s, &[64, 256, 512]).unwrap();
    assert!(h.monotone);
    // the extremes approach the hull as N grows
    assert!(h.entries[2].gap_lower <= h.entries[0].gap_lower);
    assert!(h.entries[2].gap_lower < 1e-3);
}
