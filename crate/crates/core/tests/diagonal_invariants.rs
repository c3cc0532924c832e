use std::collections::BTreeMap;

use esspos_core::density::Atom;
use esspos_core::radial::{eigenvalue_sequence, lacunary_operator, RadialProfileMeasure};
use esspos_core::spectra::{
    basis_weyl_probe, classify_diagonal, split_positive_compact, EigenvalueSequence, Generator,
    HermitianTruncation, Verdict, DEFAULT_EPSILON,
};
use proptest::prelude::*;

fn measure() -> impl Strategy<Value = RadialProfileMeasure> {
    (
        proptest::collection::vec(-1.0f64..1.0, 1..5),
        proptest::collection::btree_map(5u32..95, -1.0f64..1.0, 0..3),
    )
        .prop_map(|(poly, atoms)| {
            let atoms = atoms
                .into_iter()
                .map(|(r, m)| Atom::new(m, r as f64 / 100.0).unwrap())
                .collect();
            RadialProfileMeasure::new(poly, atoms).unwrap()
        })
}

fn family() -> impl Strategy<Value = EigenvalueSequence> {
    prop_oneof![
        measure().prop_map(|m| eigenvalue_sequence(&m, 4096).unwrap()),
        Just(lacunary_operator(4096).unwrap()),
        (proptest::collection::vec(-2.0f64..2.0, 1..20), -2.0f64..2.0).prop_map(|(head, tail)| {
            EigenvalueSequence::from_generator(Generator::EventuallyConstant { head, tail }, 4096).unwrap()
        }),
    ]
}

fn alterations() -> impl Strategy<Value = BTreeMap<usize, f64>> {
    proptest::collection::btree_map(0usize..4096, -5.0f64..5.0, 1..=10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_alterations_keep_the_class(seq in family(), entries in alterations()) {
        let before = classify_diagonal(&seq, DEFAULT_EPSILON).unwrap();
        let after = classify_diagonal(&seq.altered(&entries).unwrap(), DEFAULT_EPSILON).unwrap();
        if before.verdict.is_certified() && after.verdict.is_certified() {
            prop_assert_eq!(
                before.verdict.essentially_positive(),
                after.verdict.essentially_positive()
            );
        }
    }

    #[test]
    fn split_recombines_exactly(values in proptest::collection::vec(-10.0f64..10.0, 8..200)) {
        let seq = EigenvalueSequence::from_values(values.clone()).unwrap();
        let s = split_positive_compact(&seq).unwrap();
        for ((&v, &p), &q) in values.iter().zip(s.positive.values()).zip(s.negative.values()) {
            prop_assert!(p >= 0.0 && q <= 0.0);
            prop_assert_eq!(p + q, v);
        }
    }

    #[test]
    fn weyl_probe_of_diagonal_is_the_diagonal(values in proptest::collection::vec(-10.0f64..10.0, 1..64)) {
        let probe = basis_weyl_probe(&HermitianTruncation::diagonal(&values)).unwrap();
        prop_assert_eq!(probe.values(), &values[..]);
        let seq = EigenvalueSequence::from_values(values.clone()).unwrap();
        let again = basis_weyl_probe(&seq).unwrap();
        prop_assert_eq!(again.values(), &values[..]);
    }

    #[test]
    fn positive_verdict_bounds_every_truncation(seq in family(), n in 1usize..96) {
        let c = classify_diagonal(&seq, DEFAULT_EPSILON).unwrap();
        if c.verdict == Verdict::Positive {
            let t = HermitianTruncation::diagonal(&seq.values()[..n]);
            let spec = t.eigen().unwrap();
            prop_assert!(spec.values.iter().all(|&v| v >= -DEFAULT_EPSILON));
        }
    }
}

#[test]
fn lacunary_alteration_cannot_repair_it() {
    let lac = lacunary_operator(4096).unwrap();
    let entries: BTreeMap<usize, f64> = (0..12).map(|k| (1usize << k, 1.0)).collect();
    let c = classify_diagonal(&lac.altered(&entries).unwrap(), DEFAULT_EPSILON).unwrap();
    assert_eq!(c.verdict, Verdict::NotEssentiallyPositive);
}
