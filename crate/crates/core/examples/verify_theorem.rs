//! Verify one printed cancellation theorem and print the full report.
//!
//! `cargo run --example verify_theorem -- 3.6 2` checks the weight-6
//! twisted identity at `m0 = 2`.

use modcancel::verifier::{verify_theorem, TheoremId, TheoremParams, VerifyOptions};

fn main() -> modcancel::Result<()> {
    let mut args = std::env::args().skip(1);
    let theorem: TheoremId = args.next().as_deref().unwrap_or("3.1").parse()?;
    let params = match args.next() {
        Some(m0) => TheoremParams::m0(
            m0.parse()
                .map_err(|_| modcancel::Error::InvalidParameters(m0))?,
        ),
        None if theorem.tilde_m1().is_some() => TheoremParams::m0(0),
        None => TheoremParams::none(),
    };
    let r = verify_theorem(theorem, &params, VerifyOptions::default())?;
    println!("theorem {} {}: {}", r.theorem, r.params, r.status());
    println!(
        "derived holds: {}, multipliers {:?}",
        r.derived_holds,
        r.derived_multipliers
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
    );
    println!("printed matches: {}", r.printed_matches);
    for c in &r.coefficient_checks {
        println!("  {} matches: {}", c.id, c.matches);
    }
    println!("lhs terms {}, rhs terms {}", r.lhs.len(), r.rhs.len());
    Ok(())
}
