//! A unit point source at the center of the unit ball with zero boundary data.
//! The Green function is `−1/(4π|y|) + 1/(4π)`.

use std::f64::consts::PI;

use bdie::coefficient::CoefficientField;
use bdie::geometry::Vec3;
use bdie::mesh::{build_ball_mesh, DomainGeometry};
use bdie::potentials::BoundaryDensity;
use bdie::quadrature::SingularPolicy;
use bdie::system::{
    assemble_auto, evaluate_representation, solve, DirichletProblem, PointSource, RightHandSide, SolverMethod,
    DEFAULT_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, v) = build_ball_mesh(1.0, 2)?;
    let phi = BoundaryDensity::constant(&s, 0.0);
    let source = PointSource {
        location: Vec3::zeros(),
        strength: 1.0,
    };
    let problem = DirichletProblem::new(
        DomainGeometry::ball(1.0),
        s,
        v,
        CoefficientField::constant(1.0)?,
        RightHandSide::PointSources(vec![source]),
        phi,
        SingularPolicy::default(),
    )?;
    let solution = solve(&assemble_auto(&problem)?, SolverMethod::DirectLu, DEFAULT_TOL)?;

    println!("{:>5} {:>12} {:>12} {:>10}", "|y|", "u", "exact", "rel err");
    let dir = Vec3::new(1.0, 2.0, 2.0).normalize();
    let points: Vec<Vec3> = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8].iter().map(|r| dir * *r).collect();
    for (y, u) in points.iter().zip(evaluate_representation(&solution, &problem, &points)?) {
        let exact = -1.0 / (4.0 * PI * y.norm()) + 1.0 / (4.0 * PI);
        println!("{:>5.2} {u:>12.6} {exact:>12.6} {:>10.2e}", y.norm(), ((u - exact) / exact).abs());
    }
    Ok(())
}
