//! Truncated graded form ring: exact products, analytic kernels, top-degree
//! components and inversion of a Laurent unit.

use modcancel::formring::{kernel_series, Form, Kernel, Ring, RingSpec, Variable};
use modcancel::rational::frac;

fn main() -> modcancel::Result<()> {
    let ring = Ring::new(RingSpec {
        variables: vec![
            Variable::polynomial("x1"),
            Variable::polynomial("x2"),
            Variable::laurent("c"),
        ],
        truncation: 8,
    })?;
    let x1 = Form::var(&ring, 0);
    let c = Form::var(&ring, 2);

    let one = Form::one(&ring);
    println!(
        "(1 + x1)(1 - x1) = {}",
        (&(&one + &x1) * &(&one - &x1)).display()
    );

    // A-hat of a 4-manifold: degree-4 part is -p1/24
    let ahat = kernel_series(Kernel::AhatFactor, &ring, 0)?.try_mul(&kernel_series(
        Kernel::AhatFactor,
        &ring,
        1,
    )?)?;
    println!("Ahat = {}", ahat.display());
    println!("{{Ahat}}^(4) = {}", ahat.component(4).display());

    // 1/(2 sinh(c/2)) has a simple pole; times 2 sinh(c/2) it is exactly 1
    let inv = kernel_series(Kernel::InvTwoSinhHalf, &ring, 2)?;
    let sinh = kernel_series(Kernel::SinhHalf, &ring, 2)?.scale_int(2);
    println!("1/(2 sinh(c/2)) = {}", inv.display());
    println!(
        "product through degree 6 = {}",
        inv.try_mul(&sinh)?.truncate(6).display()
    );

    let u = &one + &(&c * &c).scale(&frac(1, 3));
    let u_inv = u.invert_unit()?;
    println!("(1 + c^2/3)^-1 = {}", u_inv.display());
    println!("check: {}", u.try_mul(&u_inv)?.display());
    Ok(())
}
