//! Verify every theorem over the default parameter grid and print one line each.

use modcancel::verifier::{default_grid, verify_theorem, VerifyOptions};

fn main() {
    let opts = VerifyOptions::default();
    for (theorem, params) in default_grid() {
        match verify_theorem(theorem, &params, opts) {
            Ok(r) => {
                println!(
                    "{:<5} {:<22} dim {:>2}  {:<16} {:>8.2?}",
                    theorem.as_str(),
                    params.to_string(),
                    r.dimension,
                    r.status(),
                    r.elapsed
                );
                if let Some(d) = &r.discrepancy {
                    println!(
                        "      statement differs at {}: {} vs {}",
                        d.monomial, d.computed, d.printed
                    );
                }
                for c in r.coefficient_checks.iter().filter(|c| !c.matches) {
                    println!(
                        "      coefficient {} off; correction {}",
                        c.id,
                        c.correction.as_deref().unwrap_or("none")
                    );
                }
                for n in &r.notes {
                    println!("      {n}");
                }
            }
            Err(e) => println!(
                "{:<5} {:<22} error: {e}",
                theorem.as_str(),
                params.to_string()
            ),
        }
    }
}
