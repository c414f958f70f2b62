//! Solve a form-valued modular pipeline in the `(8 delta_2)^a epsilon_2^b`
//! basis and read off the cancellation identity at the first free order.

use modcancel::qseries::{exponent_label, whole};
use modcancel::verifier::{
    identity_from_series, pipeline, relation_multipliers, solve_basis, PipelineId,
};

fn main() -> modcancel::Result<()> {
    let id = PipelineId::P2 { k: 1 };
    let series = pipeline(&id, whole(3))?;
    let solve = solve_basis(&series, id.weight())?;
    println!("{id}: weight {}, dimension {}", id.weight(), id.dim());
    for (m, h) in &solve.coefficients {
        println!("h[{m}] has {} terms", h.len());
    }
    for (e, r) in &solve.residuals {
        println!(
            "residual at {}: {}",
            exponent_label(*e),
            if r.is_zero() { "0" } else { "nonzero" }
        );
    }
    let mu = relation_multipliers(id.weight(), whole(1))?;
    let identity = identity_from_series(&id, &series, whole(1))?;
    let mu: Vec<String> = mu.iter().map(ToString::to_string).collect();
    println!(
        "q^1 coefficient = ({}) . pivot coefficients: {}",
        mu.join(", "),
        identity.holds()
    );
    Ok(())
}
