//! The three coefficient families, their log-derivatives and the positivity check.

use bdie::coefficient::{check_positivity, require_positive, CoefficientField};
use bdie::geometry::{Aabb, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fields = [
        ("constant", CoefficientField::constant(2.0)?),
        ("quadratic", CoefficientField::quadratic(1.0, [1.0, 0.0, 0.0], 1.0, 2.0)?),
        ("exponential", CoefficientField::exponential([1.0, 0.5, -0.3], 0.1, 10.0)?),
    ];
    let x = Vec3::new(0.3, -0.2, 0.5);
    let bbox = Aabb::cube(Vec3::zeros(), 1.0);

    for (name, a) in &fields {
        let (value, grad, grad_log, lap_log) = a.derivatives(&x);
        let report = check_positivity(a, &bbox, 17);
        println!("{name:>11}: a = {value:.6}  |∇a| = {:.6}  |∇ln a| = {:.6}  Δln a = {lap_log:.6}", grad.norm(), grad_log.norm());
        println!("{:>11}  min on [-1,1]³ = {:.6} (declared {:.3}), ok = {}", "", report.min_found, a.a_min(), report.ok);
    }

    // a declared lower bound that the field violates is rejected
    let wrong = CoefficientField::quadratic(1.0, [1.0, 0.0, 0.0], 1.5, 2.0)?;
    match require_positive(&wrong, &bbox, 17) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
