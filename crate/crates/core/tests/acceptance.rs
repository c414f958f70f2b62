//! Acceptance runner: one PASS/FAIL line per criterion.
//!
//! Two criteria cannot pass because the printed values they compare against
//! are wrong. They are listed in `KNOWN_FAILURES` together with the exact
//! failure they must show; the runner exits nonzero if any other criterion
//! fails, or if a known failure changes shape or starts passing.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use modcancel::bundles::printed::{printed_coefficient, PrintedId};
use modcancel::bundles::{
    lambda_st_product_check, theta_product_expand, BundleExpr, Geometry, ThetaLabel,
    ThetaProductSpec,
};
use modcancel::cli::{invoke, printed_fourier_table, ReportDocument};
use modcancel::formring::Form;
use modcancel::modforms::{eisenstein_e2, modform, theta_const, theta_prime_normalized};
use modcancel::qseries::{half, whole};
use modcancel::rational::{frac, int};
use modcancel::verifier::{
    default_grid, pipeline, solve_basis, verify_agw, verify_all, verify_theorem, PipelineId,
    TheoremId, TheoremParams, VerifyOptions,
};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome, String> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Coefficient checks whose printed expression is off, as found by hand.
fn expected_coefficient_mismatches() -> BTreeSet<String> {
    let mut s: BTreeSet<String> = ["A'3[C2]".to_string()].into();
    for i in [1, 2] {
        s.insert(format!("B2^{i}[a=[1],b=[2]]"));
        s.insert(format!("B2^{i}[a=[1, 2],b=[1, 1]]"));
    }
    s
}

fn fourier_tables() -> Result<Outcome, String> {
    let start = Instant::now();
    let order = whole(2) + 1;
    let mut bad = Vec::new();
    for (name, e, printed) in printed_fourier_table() {
        let s = match name {
            "E2" => eisenstein_e2(order),
            "8delta2" => modform("delta2".parse().map_err(err)?, order)
                .map_err(err)?
                .scale(&int(8)),
            other => modform(other.parse().map_err(err)?, order).map_err(err)?,
        };
        if s.coefficient(e).map_err(err)? != printed {
            bad.push(format!("{name}@{e}"));
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < Duration::from_secs(1),
        format!(
            "{} printed coefficients, mismatches {bad:?}, {t:.0?}",
            printed_fourier_table().len()
        ),
    )
}

fn jacobi() -> Result<Outcome, String> {
    let start = Instant::now();
    let order = whole(20) + 1;
    let lhs = theta_prime_normalized(order).map_err(err)?;
    let rhs = theta_const(1, order)
        .and_then(|a| a.mul(&theta_const(2, order)?))
        .and_then(|a| a.mul(&theta_const(3, order)?))
        .map_err(err)?;
    let t = start.elapsed();
    outcome(
        lhs == rhs && t < Duration::from_secs(1),
        format!(
            "theta'/pi = theta1 theta2 theta3 through q^20 ({} terms), {t:.0?}",
            lhs.terms().count()
        ),
    )
}

fn e2() -> Result<Outcome, String> {
    let start = Instant::now();
    let s = eisenstein_e2(whole(3));
    let got: Vec<_> = [0, whole(1), whole(2)]
        .iter()
        .map(|&e| s.coefficient(e))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let t = start.elapsed();
    outcome(
        got == [int(1), int(-24), int(-72)] && t < Duration::from_secs(1),
        format!("E2 = 1 - 24q - 72q^2 + ..., {t:.0?}"),
    )
}

fn t_shift() -> Result<Outcome, String> {
    let order = whole(10) + 1;
    let mut ok = true;
    for (from, to) in [("delta2", "delta3"), ("epsilon2", "epsilon3")] {
        let shifted = modform(from.parse().map_err(err)?, order)
            .and_then(|s| s.t_shift())
            .map_err(err)?;
        ok &= shifted == modform(to.parse().map_err(err)?, order).map_err(err)?;
    }
    outcome(ok, "delta2 -> delta3 and epsilon2 -> epsilon3 through q^10")
}

fn expansion_cross_checks() -> Result<Outcome, String> {
    let grid: Vec<_> = default_grid()
        .into_iter()
        .filter(|(t, _)| *t != TheoremId::Agw)
        .collect();
    let mut total = 0;
    let mut off = BTreeSet::new();
    for o in verify_all(&grid, VerifyOptions::default()) {
        let r = o.result.map_err(err)?;
        for c in &r.coefficient_checks {
            total += 1;
            if !c.matches {
                off.insert(format!(
                    "{} (correction {})",
                    c.id,
                    c.correction.as_deref().unwrap_or("none")
                ));
            }
        }
    }
    outcome(
        off.is_empty(),
        format!(
            "{total} printed coefficients checked, {} differ: {}",
            off.len(),
            off.into_iter().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn residual_instances() -> Vec<PipelineId> {
    let mut v = vec![PipelineId::P2 { k: 1 }, PipelineId::P2Prime { k: 1 }];
    for m0 in 0..=3 {
        for m1 in 1..=3 {
            v.push(PipelineId::tilde(m0, m1));
        }
    }
    for m0 in 0..=2 {
        v.push(PipelineId::tilde(m0, 4));
    }
    for d in [2, 3] {
        v.push(PipelineId::Q2 {
            d,
            a: vec![1],
            b: vec![2],
        });
        v.push(PipelineId::Q2 {
            d,
            a: vec![1, 2],
            b: vec![1, 1],
        });
        v.push(PipelineId::Q2Bar { d, a: 1, b: 2 });
        v.push(PipelineId::Q2Bar { d, a: 2, b: 1 });
    }
    v
}

fn residuals() -> Result<Outcome, String> {
    let instances = residual_instances();
    let mut bad = Vec::new();
    let mut slowest = (Duration::ZERO, String::new());
    for id in &instances {
        let start = Instant::now();
        let s = pipeline(id, whole(2) + 1).map_err(err)?;
        let solve = solve_basis(&s, id.weight()).map_err(err)?;
        let reaches = solve.residuals.iter().any(|(e, _)| *e == whole(2));
        if !(reaches && solve.residuals_vanish()) {
            bad.push(id.to_string());
        }
        let t = start.elapsed();
        if t > slowest.0 {
            slowest = (t, id.to_string());
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} pipelines, residuals through q^2 zero except {bad:?}; slowest {} {:.0?}",
            instances.len(),
            slowest.1,
            slowest.0
        ),
    )
}

fn theorem_suite() -> Result<Outcome, String> {
    let grid: Vec<_> = default_grid()
        .into_iter()
        .filter(|(t, _)| *t != TheoremId::Agw)
        .collect();
    let mut tier1_failures = Vec::new();
    let mut unexplained = Vec::new();
    let mut mismatches = Vec::new();
    for o in verify_all(&grid, VerifyOptions::default()) {
        let name = format!("{} {}", o.theorem, o.params).trim_end().to_string();
        let r = o.result.map_err(err)?;
        if !r.derived_holds {
            tier1_failures.push(name);
            continue;
        }
        if r.status() == "printed-mismatch" {
            // a tier-2 failure must name a monomial with its computed value,
            // or a coefficient with the exact correction
            let located = r.discrepancy.is_some()
                || r.coefficient_checks
                    .iter()
                    .any(|c| !c.matches && c.discrepancy.is_some() && c.correction.is_some());
            if located {
                let at = r
                    .discrepancy
                    .as_ref()
                    .map(|d| format!(" at {} (computed {})", d.monomial, d.computed))
                    .unwrap_or_default();
                mismatches.push(format!("{name}{at}"));
            } else {
                unexplained.push(name);
            }
        }
    }
    let exit = invoke(["modcancel", "verify", "--theorem", "3.2"])
        .map_err(err)?
        .exit_code();
    outcome(
        tier1_failures.is_empty() && unexplained.is_empty() && exit == 2,
        format!(
            "tier 1 holds on {} entries; tier-2 mismatches, each located: {}; mismatch exit code {exit}",
            grid.len() - tier1_failures.len(),
            mismatches.join("; ")
        ),
    )
}

fn sanity_anchors() -> Result<Outcome, String> {
    let r = verify_theorem(
        TheoremId::T33,
        &TheoremParams::m0(0),
        VerifyOptions::default(),
    )
    .map_err(err)?;
    let g = PipelineId::tilde(0, 1).geometry().map_err(err)?;
    let expected = g.p1_tangent().scale(&frac(-1, 24));
    let anchor = r.lhs.display() == expected.display() && r.rhs.display() == expected.display();

    let mut b1 = true;
    for (a, d) in [(vec![1], 2), (vec![2], 2), (vec![1, 3], 3)] {
        let id = PipelineId::Q2 {
            d,
            a: a.clone(),
            b: a.clone(),
        };
        let g = id.geometry().map_err(err)?;
        for i in [1, 2] {
            let e = printed_coefficient(&PrintedId::B {
                i,
                j: 1,
                a: a.clone(),
                b: a.clone(),
            })
            .map_err(err)?;
            b1 &= e.ch(&g).map_err(err)?.is_zero();
        }
        let spec = ThetaProductSpec::new(ThetaLabel::Powers {
            a: a.clone(),
            b: a.clone(),
        })
        .map_err(err)?;
        let s = theta_product_expand(&spec, &g, half(1) + 1).map_err(err)?;
        b1 &= s.coefficient(half(1)).map_err(err)?.is_zero();
    }

    let mut lambda2 = true;
    for g in [
        Geometry::with_plane(6, false).map_err(err)?,
        Geometry::with_powers_and_eta(8, &[1, 2, 5], true).map_err(err)?,
    ] {
        for n in g.generator_names().filter(|n| *n != "T") {
            if g.rank(n).map_err(err)? == 2 {
                lambda2 &=
                    BundleExpr::Lambda(2, n.into()).ch(&g).map_err(err)? == Form::one(g.ring());
            }
        }
    }
    outcome(
        anchor && b1 && lambda2,
        format!(
            "3.3 m0=0 sides {} / {}; B1 zero when a = b: {b1}; ch(Lambda^2) = 1: {lambda2}",
            r.lhs.display(),
            r.rhs.display()
        ),
    )
}

fn agw() -> Result<Outcome, String> {
    let r = verify_agw(&TheoremParams::none()).map_err(err)?;
    let verdict = r.notes.last().cloned().unwrap_or_default();
    outcome(
        r.derived_holds && r.printed_matches,
        format!(
            "exact multipliers {:?} against printed (1, -32); {verdict}",
            r.derived_multipliers
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
        ),
    )
}

fn properties() -> Result<Outcome, String> {
    let run = |cases: u32, f: &mut dyn FnMut(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new(Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        });
        f(&mut runner)
    };
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(TestCaseError::fail(what.to_string()))
        }
    };

    let ring = small_ring();
    let forms = (form(ring.clone()), form(ring.clone()), form(ring));
    run(128, &mut |r| {
        r.run(&forms, |(a, b, c)| {
            check(&a + &b == &b + &a, "additive commutativity")?;
            check(&a * &b == &b * &a, "multiplicative commutativity")?;
            check(&(&a * &b) * &c == &a * &(&b * &c), "associativity")?;
            check(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "distributivity")?;
            check(&a * &Form::one(a.ring()) == a, "unit")
        })
        .map_err(err)
    })?;

    let g = bundle_geometry();
    run(64, &mut |r| {
        r.run(&bundle_tree(), |e| {
            check(e.ch(&g).unwrap() == ch_by_parts(&e, &g), "ch homomorphism")
        })
        .map_err(err)
    })?;

    for g in [
        Geometry::tangent(8).map_err(err)?,
        Geometry::with_plane(10, true).map_err(err)?,
        Geometry::with_powers_and_eta(8, &[1, 2, 3], true).map_err(err)?,
    ] {
        for n in g.generator_names() {
            if !lambda_st_product_check(&BundleExpr::gen(n), &g, 4).map_err(err)? {
                return outcome(false, format!("S_t Lambda_-t != 1 for {n}"));
            }
        }
    }

    for args in [
        &[
            "modcancel",
            "--format",
            "json",
            "expand",
            "modform",
            "--id",
            "epsilon1",
        ][..],
        &["modcancel", "check", "lambda-s"],
        &[
            "modcancel",
            "--format",
            "json",
            "verify",
            "--theorem",
            "4.3",
            "--a",
            "2",
            "--b",
            "1",
        ],
    ] {
        let a = invoke(args).map_err(err)?.rendered();
        let b = invoke(args).map_err(err)?.rendered();
        if a != b {
            return outcome(false, format!("nondeterministic output for {args:?}"));
        }
        if args.contains(&"json") {
            let doc: ReportDocument = serde_json::from_str(&a).map_err(err)?;
            if doc.to_json() != a {
                return outcome(false, format!("JSON does not round-trip for {args:?}"));
            }
        }
    }
    outcome(
        true,
        "ring axioms 128 cases, ch homomorphism 64 trees, S_t Lambda_-t through t^4, CLI determinism",
    )
}

/// Criteria that cannot pass, with the reason and the failure they must show.
struct KnownFailure {
    criterion: usize,
    reason: &'static str,
    shape: fn(&Outcome) -> bool,
}

const KNOWN_FAILURES: &[KnownFailure] = &[
    KnownFailure {
        criterion: 5,
        reason: "printed A'3 constant and printed B2 lists are wrong; see the corrections",
        shape: |o| {
            expected_coefficient_mismatches()
                .iter()
                .all(|id| o.detail.contains(&format!("{id} (correction")))
                && o.detail.contains(&format!(
                    "{} differ",
                    expected_coefficient_mismatches().len()
                ))
        },
    },
    KnownFailure {
        criterion: 9,
        reason: "the exact multipliers are (8, -32) under every L-hat reading, never (1, -32)",
        shape: |o| o.detail.starts_with("exact multipliers [\"8\", \"-32\"]"),
    },
];

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("Fourier tables", fourier_tables),
        ("Jacobi identity to q^20", jacobi),
        ("E2 coefficients", e2),
        ("T-shift laws to q^10", t_shift),
        ("expansion cross-checks", expansion_cross_checks),
        ("basis residuals through q^2", residuals),
        (
            "theorem suite, tier 1 everywhere, tier 2 located",
            theorem_suite,
        ),
        ("sanity anchors", sanity_anchors),
        ("AGW identity at dimension 12", agw),
        ("property suites", properties),
    ];
    let mut healthy = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        let t = start.elapsed();
        println!(
            "criterion {n:>2} {}: {name} [{t:.2?}] {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        match KNOWN_FAILURES.iter().find(|k| k.criterion == n) {
            Some(k) if !o.pass && (k.shape)(&o) => {
                println!("             known failure: {}", k.reason)
            }
            Some(_) if o.pass => {
                println!("             listed as a known failure but passes; update the list");
                healthy = false;
            }
            Some(_) => {
                println!("             fails differently from the documented failure");
                healthy = false;
            }
            None => healthy &= o.pass,
        }
    }
    if healthy {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
