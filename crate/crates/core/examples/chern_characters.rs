//! Virtual bundles over explicit Chern roots: Chern characters of sums,
//! tensor products and exterior/symmetric powers, and `S_t Lambda_{-t} = 1`.

use modcancel::bundles::{lambda_st_product_check, BundleExpr, Geometry};

fn main() -> modcancel::Result<()> {
    let g = Geometry::with_plane(4, false)?;
    let t = BundleExpr::gen("T");
    let xi = BundleExpr::gen("xi");

    println!("ch(T)        = {}", t.ch(&g)?.display());
    println!(
        "ch(L2(xi))   = {}",
        BundleExpr::lambda(2, &xi)?.ch(&g)?.display()
    );
    let virt = t.clone() * xi.clone() - 2 * t.clone() + BundleExpr::trivial(3);
    println!("rank({virt}) = {}", virt.rank(&g)?);
    println!("ch({virt}) = {}", virt.ch(&g)?.display());
    let reduced = t.clone().reduced();
    println!("ch({reduced}) has rank {}", reduced.rank(&g)?);

    for name in g.generator_names() {
        let ok = lambda_st_product_check(&BundleExpr::gen(name), &g, 4)?;
        println!("S_t({name}) Lambda_-t({name}) = 1 through t^4: {ok}");
    }
    Ok(())
}
