use num_complex::Complex64;
use proptest::prelude::*;
use tightframe::frame_analysis::coset_fold_integral;
use tightframe::lattice::{fractional_reps, integer_reps};
use tightframe::{validate_dilation, DilationMatrix, TrigPolynomial};

fn expansive_2x2() -> impl Strategy<Value = DilationMatrix> {
    prop::collection::vec(-3i64..=3, 4).prop_filter_map("not expansive", |e| {
        validate_dilation(&[vec![e[0], e[1]], vec![e[2], e[3]]]).ok()
    })
}

fn trig_poly() -> impl Strategy<Value = TrigPolynomial> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), (-1.0f64..1.0, -1.0f64..1.0)), 1..8).prop_map(|terms| {
        TrigPolynomial::from_terms(
            2,
            terms
                .into_iter()
                .map(|((a, b), (re, im))| (vec![a, b], Complex64::new(re, im))),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coset_counts_match_determinant(a in expansive_2x2()) {
        let d = a.d_a() as usize;
        prop_assert_eq!(integer_reps(&a).len(), d);
        let fr = fractional_reps(&a);
        prop_assert_eq!(fr.len(), d);
        prop_assert!(fr[0].iter().all(|c| *c.numer() == 0));
        // every fractional representative maps back to an integer point
        for q in &fr {
            for i in 0..2 {
                let v = q[0] * a.entry(i, 0) + q[1] * a.entry(i, 1);
                prop_assert!(v.is_integer());
            }
        }
    }

    #[test]
    fn torus_integrals_survive_dilation_and_folding(a in expansive_2x2(), g in trig_poly()) {
        let r = coset_fold_integral(&g, &a, None).unwrap();
        let mean = g.coeffs().get(&vec![0, 0]).copied().unwrap_or_default();
        prop_assert!((r.integral - mean).norm() < 1e-12);
        prop_assert!(r.residual_dilated < 1e-12, "{:?}", r);
        prop_assert!(r.residual_folded < 1e-12, "{:?}", r);
    }
}
