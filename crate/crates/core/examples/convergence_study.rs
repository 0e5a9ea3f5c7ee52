//! Mesh convergence of the harmonic linear case `u = x₁` on the ball, written
//! as the convergence CSV.

use bdie::mesh::DomainGeometry;
use bdie::verification::{builtin_case, run_convergence, StudyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = builtin_case("C2", DomainGeometry::ball(1.0)).ok_or("missing case")?;
    let report = run_convergence(&case, &[0, 1, 2], &StudyConfig::default())?;
    report.write_csv(std::io::stdout().lock())?;
    let orders: Vec<String> = report.orders_u_l2().iter().map(|o| format!("{o:?}")).collect();
    eprintln!("L2 orders of u: {}", orders.join(", "));
    Ok(())
}
