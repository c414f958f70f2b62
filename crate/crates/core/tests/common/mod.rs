//! Strategies shared by the property suites and the acceptance runner.
#![allow(dead_code)]

use modcancel::bundles::{BundleExpr, Geometry};
use modcancel::formring::{Form, Monomial, Ring, RingSpec, Variable};
use modcancel::rational::{frac, Rational};
use proptest::prelude::*;

/// Three polynomial variables and one Laurent one, truncated at degree 6.
pub fn small_ring() -> Ring {
    Ring::new(RingSpec {
        variables: vec![
            Variable::polynomial("x"),
            Variable::polynomial("y"),
            Variable::polynomial("z"),
            Variable::laurent("c"),
        ],
        truncation: 6,
    })
    .unwrap()
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| frac(n, d))
}

/// Random forms with nonnegative exponents. Products of forms with negative
/// exponents are not associative under truncation, so poles stay out.
pub fn form(ring: Ring) -> impl Strategy<Value = Form> {
    prop::collection::vec(((0i32..=2, 0i32..=2, 0i32..=1, 0i32..=2), rational()), 0..6).prop_map(
        move |terms| {
            Form::from_terms(
                &ring,
                terms
                    .into_iter()
                    .map(|((a, b, c, d), r)| (Monomial::from_exponents(&[a, b, c, d]), r)),
            )
            .unwrap()
        },
    )
}

/// Dimension-4 geometry with tangent, two line-bundle powers and `eta`.
pub fn bundle_geometry() -> Geometry {
    Geometry::with_powers_and_eta(4, &[1, 2], true).unwrap()
}

pub const GENERATORS: [&str; 4] = ["T", "xi^1", "xi^2", "eta"];

fn leaf() -> impl Strategy<Value = BundleExpr> {
    let gen = prop::sample::select(GENERATORS.to_vec());
    prop_oneof![
        gen.clone().prop_map(BundleExpr::gen),
        (-3i64..=3).prop_map(BundleExpr::trivial),
        (0u32..=3, gen.clone()).prop_map(|(k, g)| BundleExpr::Lambda(k, g.to_string())),
        (0u32..=3, gen).prop_map(|(k, g)| BundleExpr::Sym(k, g.to_string())),
    ]
}

pub fn bundle_tree() -> impl Strategy<Value = BundleExpr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (-3i64..=3, inner.clone()).prop_map(|(k, a)| k * a),
            inner.prop_map(BundleExpr::reduced),
        ]
    })
}

/// `ch` evaluated node by node with form arithmetic; only leaves go through
/// the library's `ch`.
pub fn ch_by_parts(e: &BundleExpr, g: &Geometry) -> Form {
    let ring = g.ring();
    match e {
        BundleExpr::Sum(a, b) => &ch_by_parts(a, g) + &ch_by_parts(b, g),
        BundleExpr::Diff(a, b) => &ch_by_parts(a, g) - &ch_by_parts(b, g),
        BundleExpr::Tensor(a, b) => &ch_by_parts(a, g) * &ch_by_parts(b, g),
        BundleExpr::Scale(k, a) => ch_by_parts(a, g).scale_int(*k),
        BundleExpr::Reduce(a) => {
            let r = a.rank(g).unwrap();
            &ch_by_parts(a, g) - &Form::int(ring, r)
        }
        leaf => leaf.ch(g).unwrap(),
    }
}
