//! The two parametrices `P^x` (coefficient at the source) and `P^y` (at the
//! target) side by side for a variable coefficient.

use bdie::coefficient::CoefficientField;
use bdie::mesh::DomainGeometry;
use bdie::quadrature::SingularPolicy;
use bdie::verification::compare_parametrices;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let field = CoefficientField::exponential([1.0, 0.5, -0.3], 0.1, 10.0)?;
    let report = compare_parametrices(&field, DomainGeometry::ball(1.0), 1, SingularPolicy::default())?;
    println!("{:<28} {:>13} {:>13} {:>11}", "quantity", "P^x", "P^y", "rel diff");
    for r in &report.rows {
        println!("{:<28} {:>13.5e} {:>13.5e} {:>11.3e}", r.quantity, r.parametrix_x, r.parametrix_y, r.rel_difference);
    }
    if let Some(ratio) = report.remainder_ratio() {
        println!("‖ℛ^x‖∞ / ‖ℛ^y‖∞ = {ratio:.4}");
    }
    Ok(())
}
