use modcancel::bundles::{theta_product_expand, Geometry, ThetaLabel, ThetaProductSpec};
use modcancel::qseries::{half, whole};
use modcancel::verifier::{
    default_grid, pipeline, pipeline_in, solve_basis, verify_all, verify_theorem, PipelineId,
    TheoremId, TheoremParams, VerifyOptions,
};
use modcancel::Error;

#[test]
fn spare_variable_changes_nothing() {
    let spare = VerifyOptions {
        spare_variable: true,
        ..VerifyOptions::default()
    };
    for (t, p) in [
        (TheoremId::T31, TheoremParams::none()),
        (TheoremId::T34, TheoremParams::m0(1)),
        (TheoremId::T41, TheoremParams::ab(&[1], &[2])),
        (TheoremId::T43, TheoremParams::ab(&[2], &[1])),
        (TheoremId::Agw, TheoremParams::none()),
    ] {
        let plain = verify_theorem(t, &p, VerifyOptions::default()).unwrap();
        let wide = verify_theorem(t, &p, spare).unwrap();
        assert_eq!(plain.status(), wide.status(), "{t} {p}");
        assert_eq!(plain.derived_multipliers, wide.derived_multipliers);
        assert_eq!(plain.lhs.display(), wide.lhs.display());
        assert_eq!(plain.rhs.display(), wide.rhs.display());
    }
}

#[test]
fn factor_order_does_not_matter() {
    let g = Geometry::with_powers(8, &[1, 2, 3]).unwrap();
    let spec = ThetaProductSpec::new(ThetaLabel::Powers {
        a: vec![1, 3],
        b: vec![2, 1],
    })
    .unwrap();
    let n = spec.factors.len();
    let reversed: Vec<usize> = (0..n).rev().collect();
    let rotated: Vec<usize> = (0..n).map(|i| (i + 2) % n).collect();
    let base = theta_product_expand(&spec, &g, whole(2)).unwrap();
    for perm in [reversed, rotated] {
        let other = theta_product_expand(&spec.permuted(&perm), &g, whole(2)).unwrap();
        assert_eq!(base, other);
    }
}

#[test]
fn raising_the_order_keeps_lower_coefficients() {
    let id = PipelineId::tilde(1, 2);
    let low = pipeline(&id, whole(1) + 1).unwrap();
    let high = pipeline(&id, whole(2) + 1).unwrap();
    assert_eq!(high.truncate(low.order()), low);
}

#[test]
fn residuals_vanish_with_spare_variable() {
    let id = PipelineId::Q2Bar { d: 2, a: 1, b: 2 };
    let g = id.geometry().unwrap().with_spare_variable().unwrap();
    let s = pipeline_in(&id, &g, whole(2) + 1).unwrap();
    assert!(solve_basis(&s, id.weight()).unwrap().residuals_vanish());
}

#[test]
fn parameter_constraints_are_reported() {
    assert!(matches!(
        PipelineId::P2Tilde { n: 1, d: 2 }.validate(),
        Err(Error::InvalidParameters(msg)) if msg.contains("violated")
    ));
    assert!(PipelineId::Q2 {
        d: 2,
        a: vec![1],
        b: vec![]
    }
    .validate()
    .is_err());
    assert!(verify_theorem(
        TheoremId::T33,
        &TheoremParams::none(),
        VerifyOptions::default()
    )
    .is_err());
    let short = VerifyOptions {
        order: half(1),
        ..VerifyOptions::default()
    };
    assert!(verify_theorem(TheoremId::T34, &TheoremParams::m0(0), short).is_err());
}

#[test]
fn grid_keeps_order_and_errors() {
    assert!(verify_all(&Vec::new(), VerifyOptions::default()).is_empty());
    let grid = vec![
        (TheoremId::T33, TheoremParams::m0(2)),
        (TheoremId::T41, TheoremParams::ab(&[1, 2], &[1])),
        (TheoremId::T33, TheoremParams::m0(0)),
    ];
    let out = verify_all(&grid, VerifyOptions::default());
    let ids: Vec<_> = out.iter().map(|o| (o.theorem, o.params.clone())).collect();
    assert_eq!(ids, grid);
    assert!(out[0].result.is_ok());
    assert!(out[1].result.is_err());
    assert_eq!(out[2].result.as_ref().unwrap().status(), "pass");
}

#[test]
fn default_grid_covers_every_theorem() {
    let grid = default_grid();
    for t in TheoremId::ALL {
        assert!(grid.iter().any(|(g, _)| *g == t), "{t} missing");
    }
}
