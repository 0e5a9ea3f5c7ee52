//! Condition estimates of the dense system across refinements for a quadratic coefficient.

use bdie::coefficient::CoefficientField;
use bdie::mesh::{build_ball_mesh, DomainGeometry};
use bdie::potentials::{BoundaryDensity, DomainDensity};
use bdie::quadrature::SingularPolicy;
use bdie::system::{condition_report, DirichletProblem, RightHandSide};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = condition_report(&[0, 1, 2], |r| {
        let (s, v) = build_ball_mesh(1.0, r).expect("ball mesh");
        let rhs = RightHandSide::Density(DomainDensity::constant(&v, 1.0));
        let phi = BoundaryDensity::sample(&s, |x| x[0]);
        let a = CoefficientField::quadratic(1.0, [1.0, 1.0, 1.0], 1.0, 4.0)?;
        DirichletProblem::new(DomainGeometry::ball(1.0), s, v, a, rhs, phi, SingularPolicy::default())
    })?;
    println!("{:>4} {:>8} {:>12} {:>10}", "ref", "h", "cond", "residual");
    for row in &report.rows {
        let cond = row.cond_estimate.map_or("singular".into(), |c| format!("{c:.4e}"));
        let res = row.residual.map_or("-".into(), |r| format!("{r:.1e}"));
        println!("{:>4} {:>8.4} {cond:>12} {res:>10}", row.refinement, row.h);
    }
    let rates: Vec<String> = report.growth_rates().iter().map(|g| g.map_or("-".into(), |g| format!("{g:.2}"))).collect();
    println!("growth per level: {}", rates.join(", "));
    Ok(())
}
