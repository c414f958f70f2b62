//! Theta constants as exact q-products and the Jacobi identity
//! `theta'/pi = theta_1 theta_2 theta_3`.

use modcancel::modforms::{theta_const, theta_prime_normalized};
use modcancel::qseries::{exponent_label, whole};

fn main() -> modcancel::Result<()> {
    let order = whole(4);
    for j in 1..=3 {
        let t = theta_const(j, order)?;
        let terms: Vec<String> = t
            .terms()
            .map(|(e, c)| format!("{c} {}", exponent_label(e)))
            .collect();
        println!("theta_{j} = {}", terms.join(" + "));
    }
    let order = whole(20);
    let lhs = theta_prime_normalized(order)?;
    let rhs = theta_const(1, order)?
        .mul(&theta_const(2, order)?)?
        .mul(&theta_const(3, order)?)?;
    println!(
        "Jacobi identity below {}: {}",
        exponent_label(order),
        lhs == rhs
    );
    Ok(())
}
