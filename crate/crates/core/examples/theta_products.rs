//! Chern character of an infinite `S`/`Lambda` product as a form-valued
//! q-series, compared with printed q-coefficients.

use modcancel::bundles::printed::{printed_coefficient, PrintedId};
use modcancel::bundles::{theta_product_expand, Geometry, ThetaLabel, ThetaProductSpec};
use modcancel::qseries::{exponent_label, half};

fn main() -> modcancel::Result<()> {
    let g = Geometry::with_plane(10, false)?;
    let spec = ThetaProductSpec::new(ThetaLabel::Xi)?;
    for f in &spec.factors {
        println!("factor {f}");
    }
    let s = theta_product_expand(&spec, &g, half(3))?;
    for j in 0..=2u32 {
        let e = half(j as i64);
        let id = PrintedId::A { j, with_xi: true };
        let printed = printed_coefficient(&id)?;
        let agrees = s.coefficient(e)? == printed.ch(&g)?;
        println!(
            "{} = {printed}: ch matches the {} coefficient: {agrees}",
            id,
            exponent_label(e)
        );
    }
    Ok(())
}
