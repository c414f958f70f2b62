//! The 12-dimensional identity between the L-hat form and A-hat twisted by
//! the tangent bundle, fitted exactly under each L-hat normalization.

use modcancel::verifier::{verify_agw, TheoremParams};

fn main() -> modcancel::Result<()> {
    let r = verify_agw(&TheoremParams::none())?;
    println!("status: {}", r.status());
    for n in &r.notes {
        println!("{n}");
    }
    if let Some(d) = &r.discrepancy {
        println!(
            "printed statement first differs at {}: {} vs {}",
            d.monomial, d.computed, d.printed
        );
    }
    Ok(())
}
