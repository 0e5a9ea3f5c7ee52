//! Surface and volume potentials on the unit ball for `a ≡ 1`, checked against
//! closed forms, and the direct against the Laplace-relation assembly for a
//! variable coefficient.

use bdie::coefficient::CoefficientField;
use bdie::geometry::Vec3;
use bdie::mesh::build_ball_mesh;
use bdie::potentials::{Assembler, AssemblyPath, KernelFamily, OperatorId, Target};
use bdie::quadrature::SingularPolicy;
use bdie::verification::path_equivalence_error;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, v) = build_ball_mesh(1.0, 2)?;
    let unit = CoefficientField::constant(1.0)?;
    let asm = Assembler::new(&s, Some(&v), &unit, SingularPolicy::default())?;
    let apply = |op, targets: &[Target], density: &[f64]| {
        asm.apply_streaming(op, KernelFamily::ParametrixX, AssemblyPath::Direct, targets, density)
    };
    let origin = Target::points(&[Vec3::zeros()]);
    let inside = Target::points(&[Vec3::new(0.3, -0.2, 0.1)]);
    let ones_s = vec![1.0; s.len()];
    let ones_v = vec![1.0; v.len()];

    println!("V[1](0)   = {:.6} (exact 1)", apply(OperatorId::V, &origin, &ones_s)?[0]);
    println!("W[1](y)   = {:.6} (exact -1)", apply(OperatorId::W, &inside, &ones_s)?[0]);
    println!("P[1](0)   = {:.6} (exact -1/2)", apply(OperatorId::P, &origin, &ones_v)?[0]);
    let trace = apply(OperatorId::P, &asm.centroid_targets()[..1], &ones_v)?[0];
    println!("γ⁺P[1]    = {trace:.6} (exact -1/3)");

    let cal_v = asm.assemble_cal_v(AssemblyPath::Direct)?;
    println!("𝒱 is {}×{}, max entry {:.4e}", cal_v.rows(), cal_v.cols(), cal_v.matrix().max_abs());

    let (s1, v1) = build_ball_mesh(1.0, 1)?;
    let a = CoefficientField::exponential([1.0, 0.5, -0.3], 0.1, 10.0)?;
    let asm = Assembler::new(&s1, Some(&v1), &a, SingularPolicy::default())?;
    let gap = path_equivalence_error(&asm, &[Vec3::new(0.1, 0.2, -0.3), Vec3::new(-0.4, 0.1, 0.2)])?;
    println!("direct vs Laplace-relation assembly, largest relative gap {gap:.2e}");
    Ok(())
}
