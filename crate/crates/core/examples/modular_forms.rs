//! The level-2 forms `delta_i`, `epsilon_i`, the Eisenstein series `E_2`,
//! the `tau -> tau + 1` action and the `Gamma^0(2)` monomial basis.

use modcancel::modforms::{eisenstein_e2, gamma0_basis, modform, ModFormId};
use modcancel::qseries::{exponent_label, whole};

fn main() -> modcancel::Result<()> {
    let order = whole(3);
    for id in ModFormId::all() {
        let s = modform(id, order)?;
        let terms: Vec<String> = s
            .terms()
            .map(|(e, c)| format!("{}: {c}", exponent_label(e)))
            .collect();
        println!("{id:<9} {}", terms.join(", "));
    }
    let e2 = eisenstein_e2(order);
    let terms: Vec<String> = e2
        .terms()
        .map(|(e, c)| format!("{}: {c}", exponent_label(e)))
        .collect();
    println!("E2        {}", terms.join(", "));

    let d2 = modform("delta2".parse()?, whole(10))?;
    println!(
        "t-shift(delta2) = delta3: {}",
        d2.t_shift()? == modform("delta3".parse()?, whole(10))?
    );

    for weight in [2, 4, 6, 8] {
        let names: Vec<String> = gamma0_basis(weight, order)?
            .iter()
            .map(|(m, _)| m.to_string())
            .collect();
        println!("weight {weight}: {}", names.join(", "));
    }
    Ok(())
}
