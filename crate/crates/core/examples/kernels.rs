//! Parametrix and remainder kernels for a variable coefficient, and the defect
//! identity `𝒜_x P(x, y) = R(x, y)` checked by finite differences.

use bdie::coefficient::CoefficientField;
use bdie::geometry::Vec3;
use bdie::kernels::{remainder_x_divergence_fd, KernelContext};
use bdie::verification::defect_identity_error;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = CoefficientField::exponential([1.0, 0.5, -0.3], 0.1, 10.0)?;
    let ctx = KernelContext::new(&a, 2.0);
    let y = Vec3::new(0.1, 0.0, 0.2);

    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>14}", "r", "P^x", "P^y", "R^x", "R^y", "FD of 𝒜_x P^x");
    for r in [0.05, 0.1, 0.2, 0.4] {
        let x = y + Vec3::new(r, 0.0, 0.0);
        println!(
            "{r:>6} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            ctx.parametrix_x(&x, &y)?,
            ctx.parametrix_y(&x, &y)?,
            ctx.remainder_x(&x, &y)?,
            ctx.remainder_y(&x, &y)?,
            remainder_x_divergence_fd(&a, &x, &y, 1e-4 * r),
        );
    }

    // coincident points are a kernel error, not a number
    println!("x = y: {}", ctx.parametrix_x(&y, &y).unwrap_err());

    for (name, field) in [
        ("quadratic", CoefficientField::quadratic(1.0, [1.0, 1.0, 1.0], 1.0, 10.0)?),
        ("exponential", a),
    ] {
        println!("defect identity, {name}: worst error over 200 pairs {:.2e}", defect_identity_error(&field, 200, 7));
    }
    Ok(())
}
