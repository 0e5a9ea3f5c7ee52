//! Jump relations, the Gauss identity, the parametrix defect and the path and
//! reduction checks, for the unit and for an exponential coefficient.

use bdie::coefficient::CoefficientField;
use bdie::mesh::DomainGeometry;
use bdie::quadrature::SingularPolicy;
use bdie::verification::identity_suite;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ball = DomainGeometry::ball(1.0);
    for (field, refinement) in [
        (CoefficientField::constant(1.0)?, 2),
        (CoefficientField::exponential([1.0, 0.0, 0.0], 0.3, 3.0)?, 1),
    ] {
        let report = identity_suite(ball, &field, refinement, SingularPolicy::default())?;
        println!("{}", report.label);
        for e in &report.entries {
            let tag = if e.passed() { "ok  " } else { "FAIL" };
            println!("  {tag} {:<30} {:>10.3e}  (≤ {:.0e})", e.name, e.measured, e.threshold);
        }
    }
    Ok(())
}
