//! Dirichlet problem for `∇·(a∇u) = f` with `a = 1 + x₁²`, `u = x₁`: assemble the
//! united boundary-domain system, solve it directly and iteratively, and
//! evaluate the representation formula inside.

use bdie::geometry::Vec3;
use bdie::mesh::DomainGeometry;
use bdie::quadrature::SingularPolicy;
use bdie::system::{assemble_system, evaluate_representation, solve, solve_from, SolverMethod, DEFAULT_TOL};
use bdie::verification::builtin_case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = builtin_case("C3", DomainGeometry::ball(1.0)).ok_or("missing case")?;
    let problem = case.problem(1, SingularPolicy::default())?;
    let system = assemble_system(&problem)?;
    println!("{} cells + {} panels = {} unknowns", system.n_cells(), system.n_panels(), system.dim());

    let direct = solve(&system, SolverMethod::DirectLu, DEFAULT_TOL)?;
    let d = &direct.diagnostics;
    println!("LU: residual {:.2e}, condition estimate {:.3e}", d.residual_norm, d.condition_estimate.unwrap_or(f64::NAN));

    let guess = vec![0.0; system.dim()];
    let iterative = solve_from(&system, SolverMethod::Iterative, 1e-12, Some(&guess))?;
    let gap = direct
        .u
        .values()
        .iter()
        .zip(iterative.u.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("GMRES: {} iterations, max |u_LU - u_GMRES| = {gap:.2e}", iterative.diagnostics.iterations);

    let err = problem
        .volume()
        .barycenters()
        .iter()
        .zip(direct.u.values())
        .map(|(x, u)| (u - (case.u_exact)(x)).abs())
        .fold(0.0, f64::max);
    println!("max error at barycenters {err:.3e}");

    let points = [Vec3::new(0.2, 0.1, -0.1), Vec3::new(-0.4, 0.3, 0.2)];
    for (y, u) in points.iter().zip(evaluate_representation(&direct, &problem, &points)?) {
        println!("u({:.1}, {:.1}, {:.1}) = {u:.5} (exact {:.5})", y[0], y[1], y[2], (case.u_exact)(y));
    }
    Ok(())
}
