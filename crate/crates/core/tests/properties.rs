//! Property-based invariants over randomized inputs.

use num_complex::Complex;
use proptest::prelude::*;

use quasicomb::combs::{check_norm_sup_domination, sup_norm};
use quasicomb::geom::{BoxRegion, PointPatch};
use quasicomb::groups::{
    char_eval, haar_measure, internal_add, internal_neg, InternalCharacter, InternalElement,
    InternalGroupSpec, InternalWindow,
};
use quasicomb::pointset::minkowski;
use quasicomb::scheme::WeightedComb;

fn cyclic_el(n: u64) -> impl Strategy<Value = InternalElement<f64>> {
    (0..n).prop_map(InternalElement::Cyclic)
}

proptest! {
    #[test]
    fn cyclic_add_assoc_comm(a in cyclic_el(24), b in cyclic_el(24), c in cyclic_el(24)) {
        let g = InternalGroupSpec::cyclic(24).unwrap();
        let ab = internal_add(&g, &a, &b).unwrap();
        let ba = internal_add(&g, &b, &a).unwrap();
        prop_assert_eq!(&ab, &ba);
        let abc = internal_add(&g, &ab, &c).unwrap();
        let bc = internal_add(&g, &b, &c).unwrap();
        let a_bc = internal_add(&g, &a, &bc).unwrap();
        prop_assert_eq!(abc, a_bc);
        let neg = internal_neg(&g, &a).unwrap();
        prop_assert_eq!(internal_add(&g, &a, &neg).unwrap(), g.zero());
    }

    #[test]
    fn character_homomorphism(r in 0u64..12, h1 in 0u64..12, h2 in 0u64..12) {
        let g = InternalGroupSpec::cyclic(12).unwrap();
        let chi = InternalCharacter::Cyclic { r };
        let a = InternalElement::<f64>::Cyclic(h1);
        let b = InternalElement::Cyclic(h2);
        let sum = internal_add(&g, &a, &b).unwrap();
        let lhs: Complex<f64> = char_eval(&g, &chi, &sum).unwrap();
        let rhs = char_eval(&g, &chi, &a).unwrap() * char_eval(&g, &chi, &b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
        prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_additive_over_disjoint_intervals(
        a in -5.0f64..5.0,
        len1 in 0.01f64..2.0,
        gap in 0.01f64..2.0,
        len2 in 0.01f64..2.0,
    ) {
        let g = InternalGroupSpec::euclidean(1);
        let b1 = quasicomb::groups::HalfOpenBox::interval(a, a + len1).unwrap();
        let b2 =
            quasicomb::groups::HalfOpenBox::interval(a + len1 + gap, a + len1 + gap + len2)
                .unwrap();
        let w1 = InternalWindow::Euclidean { boxes: vec![b1.clone()] };
        let w2 = InternalWindow::Euclidean { boxes: vec![b2.clone()] };
        let both = InternalWindow::Euclidean { boxes: vec![b1, b2] };
        let cal = 2.0;
        let m1: f64 = haar_measure(&g, &w1, cal).unwrap();
        let m2: f64 = haar_measure(&g, &w2, cal).unwrap();
        let m: f64 = haar_measure(&g, &both, cal).unwrap();
        prop_assert!((m - (m1 + m2)).abs() < 1e-12);
    }

    #[test]
    fn minkowski_commutes(
        xs in proptest::collection::btree_set(-20i64..20, 1..6),
        ys in proptest::collection::btree_set(-20i64..20, 1..6),
    ) {
        let region = BoxRegion::interval(-45.0, 45.0);
        let mk = |s: &std::collections::BTreeSet<i64>| {
            PointPatch::from_scalars(
                s.iter().map(|&v| v as f64).collect(),
                BoxRegion::interval(-21.0, 21.0),
            )
            .unwrap()
        };
        let a = mk(&xs);
        let b = mk(&ys);
        let ab = minkowski(&[&a, &b], &[1, 1], &region).unwrap();
        let ba = minkowski(&[&b, &a], &[1, 1], &region).unwrap();
        prop_assert_eq!(ab.scalars().unwrap(), ba.scalars().unwrap());
    }

    #[test]
    fn sup_is_dominated_by_k_norm(
        entries in proptest::collection::btree_map(-40i64..40, -3.0f64..3.0, 1..20),
        len in 0.5f64..4.0,
    ) {
        let region = BoxRegion::interval(-40.0, 40.0);
        let comb = WeightedComb::new(
            entries
                .iter()
                .map(|(&k, &w)| (vec![k as f64], Complex::new(w, 0.0)))
                .collect(),
            region,
            1e-12,
        )
        .unwrap();
        let k = BoxRegion::interval(0.0, len);
        let (sup, kn, ok) = check_norm_sup_domination(&comb, &k, 0.0).unwrap();
        prop_assert!(ok, "sup {} vs K-norm {}", sup, kn);
        prop_assert!((sup - sup_norm(&comb)).abs() < 1e-15);
    }

    #[test]
    fn window_json_round_trip(
        lo in -3.0f64..0.0,
        hi in 0.1f64..3.0,
        residues in proptest::collection::btree_set(0u64..8, 0..8),
    ) {
        let w = InternalWindow::<f64>::Euclidean {
            boxes: vec![quasicomb::groups::HalfOpenBox::interval(lo, hi).unwrap()],
        };
        let s = serde_json::to_string(&w).unwrap();
        let back: InternalWindow<f64> = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(w, back);

        let w = InternalWindow::<f64>::cyclic(residues.into_iter().collect());
        let s = serde_json::to_string(&w).unwrap();
        let back: InternalWindow<f64> = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(w, back);
    }
}
