mod common;

use common::*;
use modcancel::bundles::{lambda_st_product_check, BundleExpr, Geometry};
use modcancel::cli::{invoke, ReportDocument};
use modcancel::formring::Form;
use modcancel::qseries::QSeries;
use modcancel::rational::{frac, int, pow};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(
        (a, b, c) in (form(small_ring()), form(small_ring()), form(small_ring()))
    ) {
        let ring = a.ring().clone();
        let zero = Form::zero(&ring);
        let one = Form::one(&ring);
        prop_assert_eq!(&(&a + &b), &(&b + &a));
        prop_assert_eq!(&(&(&a + &b) + &c), &(&a + &(&b + &c)));
        prop_assert_eq!(&(&a * &b), &(&b * &a));
        prop_assert_eq!(&(&(&a * &b) * &c), &(&a * &(&b * &c)));
        prop_assert_eq!(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)));
        prop_assert_eq!(&(&a + &zero), &a);
        prop_assert_eq!(&(&a * &one), &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&(&a + &(-&a)), &zero);
    }

    #[test]
    fn components_reassemble(a in form(small_ring())) {
        let ring = a.ring().clone();
        let mut sum = Form::zero(&ring);
        for (n, f) in a.components() {
            prop_assert_eq!(&f, &a.component(n));
            prop_assert!(f.terms().all(|(m, _)| m.degree() == n));
            sum = &sum + &f;
        }
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn scale_covariance(a in form(small_ring()), num in 1i64..=5, den in 1i64..=4) {
        let lambda = frac(num, den);
        let ring = a.ring().clone();
        let mut scaled = a.clone();
        for v in 0..ring.num_vars() {
            scaled = scaled.scale_variable(v, &lambda);
        }
        // each variable has weight 2, so degree n picks up lambda^(n/2)
        for (n, f) in a.components() {
            let expected = f.scale(&pow(&lambda, (n / 2) as u32));
            prop_assert_eq!(scaled.component(n), expected);
        }
    }

    #[test]
    fn unit_inverse(a in form(small_ring()), k in 1i64..=5) {
        let ring = a.ring().clone();
        let u = &Form::int(&ring, k) + &(&a - &a.component(0));
        let inv = u.invert_unit().unwrap();
        prop_assert_eq!(&u * &inv, Form::one(&ring));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ch_is_a_ring_homomorphism(e in bundle_tree()) {
        let g = bundle_geometry();
        let direct = e.ch(&g).unwrap();
        prop_assert_eq!(&direct, &ch_by_parts(&e, &g));
        prop_assert_eq!(direct.constant_term(), int(e.rank(&g).unwrap()));
    }

    #[test]
    fn ch_of_sum_and_product((a, b) in (bundle_tree(), bundle_tree())) {
        let g = bundle_geometry();
        let (ca, cb) = (a.ch(&g).unwrap(), b.ch(&g).unwrap());
        prop_assert_eq!((a.clone() + b.clone()).ch(&g).unwrap(), &ca + &cb);
        prop_assert_eq!((a.clone() * b.clone()).ch(&g).unwrap(), &ca * &cb);
        prop_assert_eq!((a - b).ch(&g).unwrap(), &ca - &cb);
    }

    #[test]
    fn qseries_product_commutes(
        xs in prop::collection::vec((0i64..24, -5i64..=5), 0..6),
        ys in prop::collection::vec((0i64..24, -5i64..=5), 0..6),
    ) {
        let order = 24;
        let s = QSeries::from_terms(&(), xs.into_iter().map(|(e, c)| (e, int(c))), order);
        let t = QSeries::from_terms(&(), ys.into_iter().map(|(e, c)| (e, int(c))), order);
        prop_assert_eq!(s.mul(&t).unwrap(), t.mul(&s).unwrap());
        let constant = QSeries::from_terms(&(), [(0, s.coefficient(0).unwrap())], order);
        let unit = QSeries::one(&(), order).add(&s.sub(&constant).unwrap()).unwrap();
        let inv = unit.invert_unit().unwrap();
        prop_assert_eq!(unit.mul(&inv).unwrap(), QSeries::one(&(), order));
    }
}

#[test]
fn lambda_s_inverse_for_every_generator() {
    let geometries = [
        Geometry::tangent(8).unwrap(),
        Geometry::with_plane(10, true).unwrap(),
        Geometry::with_plane(6, false).unwrap(),
        Geometry::with_powers(8, &[1, 2, 3]).unwrap(),
        bundle_geometry(),
    ];
    for g in &geometries {
        let names: Vec<String> = g.generator_names().map(str::to_string).collect();
        assert!(!names.is_empty());
        for n in names {
            assert!(
                lambda_st_product_check(&BundleExpr::gen(&n), g, 4).unwrap(),
                "S_t Lambda_-t != 1 for {n}"
            );
        }
    }
}

#[test]
fn lambda_two_of_opposite_roots_is_one() {
    let g = bundle_geometry();
    for n in ["xi^1", "xi^2", "eta"] {
        assert_eq!(g.rank(n).unwrap(), 2);
        assert_eq!(
            BundleExpr::Lambda(2, n.into()).ch(&g).unwrap(),
            Form::one(g.ring())
        );
    }
}

const COMMANDS: &[&[&str]] = &[
    &["expand", "modform", "--id", "delta2"],
    &["expand", "theta", "--index", "3"],
    &["expand", "e2"],
    &["check", "jacobi"],
    &["check", "tshift"],
    &["check", "fourier-tables"],
    &[
        "derive",
        "--pipeline",
        "p2tilde",
        "--m0",
        "1",
        "--m1",
        "1",
        "--relation",
        "1/2",
    ],
    &["verify", "--theorem", "3.3", "--m0", "0"],
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cli_output_is_deterministic(
        idx in 0..COMMANDS.len(),
        order in 3u32..=6,
        json in any::<bool>(),
    ) {
        let mut args = vec!["modcancel".to_string(), "--order".into(), order.to_string()];
        if json {
            args.extend(["--format".into(), "json".into()]);
        }
        args.extend(COMMANDS[idx].iter().map(|s| s.to_string()));
        let first = invoke(args.clone()).unwrap();
        let second = invoke(args).unwrap();
        prop_assert_eq!(first.rendered(), second.rendered());
        prop_assert_eq!(first.exit_code(), second.exit_code());
        let text = first.document.to_json();
        let parsed: ReportDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(parsed.to_json(), text);
    }
}
