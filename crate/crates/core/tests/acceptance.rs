//! Acceptance gate: every criterion at its stated tolerance, one line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bdie::coefficient::CoefficientField;
use bdie::geometry::Vec3;
use bdie::linalg::singular_values;
use bdie::mesh::{build_ball_mesh, build_cube_mesh, DomainGeometry};
use bdie::potentials::{Assembler, AssemblyPath, BoundaryDensity, DomainDensity};
use bdie::quadrature::SingularPolicy;
use bdie::system::{
    assemble_auto, assemble_system, evaluate_representation, solve, DirichletProblem, PointSource, RightHandSide,
    SolverMethod, DEFAULT_TOL,
};
use bdie::verification::{
    builtin_case, defect_identity_error, identity_suite, path_equivalence_error, run_convergence,
    unit_reduction_error, ConvergenceReport, IdentityReport, StudyConfig,
};

type Check = Result<String, String>;

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sci(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", items.join(", "))
}

fn fail(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

fn unit() -> CoefficientField {
    CoefficientField::constant(1.0).unwrap()
}

fn variable_fields() -> [CoefficientField; 2] {
    [
        CoefficientField::quadratic(1.0, [1.0, 1.0, 1.0], 1.0, 10.0).unwrap(),
        CoefficientField::exponential([1.0, 0.5, -0.3], 0.1, 10.0).unwrap(),
    ]
}

fn ball_problem(refinement: usize, field: CoefficientField, phi: f64) -> Result<DirichletProblem, String> {
    let (s, v) = build_ball_mesh(1.0, refinement).map_err(fail)?;
    let rhs = RightHandSide::zero(&v);
    let phi = BoundaryDensity::constant(&s, phi);
    DirichletProblem::new(DomainGeometry::ball(1.0), s, v, field, rhs, phi, SingularPolicy::default()).map_err(fail)
}

fn orders(report: &ConvergenceReport) -> Vec<f64> {
    report.orders_u_l2().into_iter().map(|o| o.value().unwrap_or(f64::NAN)).collect()
}

fn constant_solution() -> Check {
    let p = ball_problem(1, unit(), 1.0)?;
    let sol = solve(&assemble_system(&p).map_err(fail)?, SolverMethod::DirectLu, DEFAULT_TOL).map_err(fail)?;
    let eu = max_abs(sol.u.values().iter().map(|u| u - 1.0));
    let ep = max_abs(sol.psi.values().iter().copied());
    verdict(eu <= 1e-2 && ep <= 2e-2, format!("max|u-1| = {eu:.2e} (1e-2), max|psi| = {ep:.2e} (2e-2)"))
}

fn harmonic_linear(c2: &ConvergenceReport) -> Check {
    let o = orders(c2);
    let psi: Vec<f64> = c2.rows.iter().map(|r| r.err_psi_l2).collect();
    let finest = c2.rows.last().map_or(f64::NAN, |r| r.err_u_l2);
    let ok = c2.all_solved()
        && o.iter().all(|o| *o >= 1.0)
        && psi.windows(2).all(|w| w[1] < w[0])
        && finest <= 3e-2;
    verdict(ok, format!("orders {o:.2?} (>= 1), err_psi {} decreasing, finest err_u {finest:.2e} (3e-2)", sci(&psi)))
}

fn variable_coefficient(ball: &ConvergenceReport, cube: &ConvergenceReport) -> Check {
    let o = orders(ball);
    let finest = ball.rows.last().map_or(f64::NAN, |r| r.err_u_l2);
    let cube_err: Vec<f64> = cube.rows.iter().map(|r| r.err_u_l2).collect();
    let ok = ball.all_solved()
        && cube.all_solved()
        && o.iter().all(|o| *o >= 1.0)
        && finest <= 5e-2
        && cube_err.windows(2).all(|w| w[1] < w[0]);
    verdict(
        ok,
        format!("ball orders {o:.2?} (>= 1), finest {finest:.2e} (5e-2); cube err_u {} decreasing", sci(&cube_err)),
    )
}

fn point_source() -> Check {
    let base = ball_problem(2, unit(), 0.0)?;
    let delta = PointSource {
        location: Vec3::zeros(),
        strength: 1.0,
    };
    let p = base
        .with_data(RightHandSide::PointSources(vec![delta]), base.dirichlet().clone())
        .map_err(fail)?;
    let sol = solve(&assemble_auto(&p).map_err(fail)?, SolverMethod::DirectLu, DEFAULT_TOL).map_err(fail)?;
    let mut rng = StdRng::seed_from_u64(20);
    let probes: Vec<Vec3> = (0..20)
        .map(|_| {
            let d = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let d = if d.norm() < 1e-3 { Vec3::x() } else { d.normalize() };
            d * rng.random_range(0.3..0.8)
        })
        .collect();
    let u = evaluate_representation(&sol, &p, &probes).map_err(fail)?;
    let worst = max_abs(probes.iter().zip(&u).map(|(y, u)| {
        let exact = -1.0 / (4.0 * PI * y.norm()) + 1.0 / (4.0 * PI);
        (u - exact) / u
    }));
    verdict(worst <= 5e-2, format!("worst relative error over 20 probes {worst:.2e} (5e-2)"))
}

fn green_residual(c2: &ConvergenceReport, c3: &ConvergenceReport) -> Check {
    let r2 = c2.green_ratios();
    let r3 = c3.green_ratios();
    let ok = !r2.is_empty() && !r3.is_empty() && r2.iter().chain(&r3).all(|r| *r >= 1.5);
    let res = |r: &ConvergenceReport| sci(&r.rows.iter().map(|r| r.green_residual).collect::<Vec<_>>());
    verdict(
        ok,
        format!("C2 residuals {} ratios {r2:.2?}, C3 residuals {} ratios {r3:.2?} (>= 1.5; NaN: no cell h from the boundary)", res(c2), res(c3)),
    )
}

fn entries(report: &IdentityReport, names: &[&str]) -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in names {
        match report.get(name) {
            Some(e) => {
                ok &= e.passed();
                detail.push(format!("{name} {:.2e} ({:.0e})", e.measured, e.threshold));
            }
            None => {
                ok = false;
                detail.push(format!("{name} missing"));
            }
        }
    }
    verdict(ok, detail.join(", "))
}

fn defect() -> Check {
    let e: Vec<f64> = variable_fields().iter().map(|f| defect_identity_error(f, 200, 7)).collect();
    verdict(e.iter().all(|e| *e <= 1e-4), format!("quadratic {:.2e}, exponential {:.2e} (1e-4)", e[0], e[1]))
}

fn interior_points() -> [Vec3; 3] {
    [Vec3::new(0.1, 0.2, -0.3), Vec3::new(-0.4, 0.1, 0.2), Vec3::new(0.0, -0.5, 0.4)]
}

fn path_equivalence() -> Check {
    let (s, v) = build_ball_mesh(1.0, 1).map_err(fail)?;
    let mut worst = Vec::new();
    for f in variable_fields() {
        let asm = Assembler::new(&s, Some(&v), &f, SingularPolicy::default()).map_err(fail)?;
        worst.push(path_equivalence_error(&asm, &interior_points()).map_err(fail)?);
    }
    verdict(worst.iter().all(|e| *e <= 1e-12), format!("relative gap {} (1e-12)", sci(&worst)))
}

fn unit_reduction() -> Check {
    let (s, v) = build_ball_mesh(1.0, 1).map_err(fail)?;
    let f = unit();
    let asm = Assembler::new(&s, Some(&v), &f, SingularPolicy::default()).map_err(fail)?;
    let e = unit_reduction_error(&asm, &interior_points()).map_err(fail)?;
    verdict(e <= 1e-14, format!("largest entry gap {e:.2e} (1e-14), R exactly zero: {}", e.is_finite()))
}

fn injectivity(reports: &[&ConvergenceReport]) -> Check {
    let mut min_sv = f64::INFINITY;
    let meshes = [
        build_ball_mesh(1.0, 0),
        build_ball_mesh(1.0, 1),
        build_ball_mesh(1.0, 2),
        build_cube_mesh(1.0, 2),
        build_cube_mesh(1.0, 4),
    ];
    let fields = [unit(), variable_fields()[0].clone(), variable_fields()[1].clone()];
    for mesh in &meshes {
        let (s, v) = mesh.as_ref().map_err(fail)?;
        for f in &fields {
            let asm = Assembler::new(s, Some(v), f, SingularPolicy::default()).map_err(fail)?;
            let cal_v = asm.assemble_cal_v(AssemblyPath::Direct).map_err(fail)?;
            let sv = singular_values(cal_v.matrix()).map_err(fail)?;
            min_sv = min_sv.min(sv.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    let lu_ok = reports.iter().all(|r| r.all_solved());

    let base = ball_problem(1, variable_fields()[0].clone(), 0.0)?;
    let zero = base
        .with_data(
            RightHandSide::Density(DomainDensity::constant(base.volume(), 0.0)),
            BoundaryDensity::constant(base.surface(), 0.0),
        )
        .map_err(fail)?;
    let sys = assemble_system(&zero).map_err(fail)?;
    let mut zero_norm = 0.0f64;
    for method in [SolverMethod::DirectLu, SolverMethod::Iterative] {
        let sol = solve(&sys, method, DEFAULT_TOL).map_err(fail)?;
        let n = sol.u.values().iter().chain(sol.psi.values()).map(|x| x * x).sum::<f64>().sqrt();
        zero_norm = zero_norm.max(n);
    }
    verdict(
        min_sv > 0.0 && lu_ok && zero_norm <= 1e-10,
        format!("min singular value {min_sv:.2e} (> 0), LU never singular: {lu_ok}, zero-data norm {zero_norm:.1e} (1e-10)"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let study = StudyConfig::default();
    let ball = DomainGeometry::ball(1.0);
    let study_of = |label: &str, geometry, levels: &[usize]| {
        builtin_case(label, geometry)
            .ok_or_else(|| format!("unknown case {label}"))
            .and_then(|c| run_convergence(&c, levels, &study).map_err(fail))
    };
    let c2 = study_of("C2", ball, &[1, 2, 3]);
    let c3 = study_of("C3", ball, &[1, 2, 3]);
    let c3_cube = study_of("C3", DomainGeometry::cube(1.0), &[4, 8, 12]);
    let unit_suite = identity_suite(ball, &unit(), 2, SingularPolicy::default()).map_err(fail);

    let with2 = |f: &dyn Fn(&ConvergenceReport, &ConvergenceReport) -> Check,
                 a: &Result<ConvergenceReport, String>,
                 b: &Result<ConvergenceReport, String>| match (a, b) {
        (Ok(a), Ok(b)) => f(a, b),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    let suite = |names: &[&str]| unit_suite.as_ref().map_err(Clone::clone).and_then(|r| entries(r, names));

    let results: Vec<(&str, Check)> = vec![
        ("constant solution exactness", constant_solution()),
        ("harmonic linear case", c2.as_ref().map_err(Clone::clone).and_then(harmonic_linear)),
        ("variable coefficient case", with2(&variable_coefficient, &c3, &c3_cube)),
        ("point-source Green function", point_source()),
        ("third Green identity residual", with2(&green_residual, &c2, &c3)),
        (
            "jump relations",
            suite(&["jump_double_layer_unit", "jump_double_layer_linear", "single_layer_continuity"]),
        ),
        ("parametrix defect identity", defect()),
        ("path equivalence", path_equivalence()),
        ("unit coefficient reduction", unit_reduction()),
        (
            "single-layer injectivity",
            match (&c2, &c3, &c3_cube) {
                (Ok(a), Ok(b), Ok(c)) => injectivity(&[a, b, c]),
                _ => Err("a convergence study did not run".into()),
            },
        ),
        (
            "analytic potential oracles",
            suite(&[
                "oracle_single_layer_center",
                "oracle_double_layer_interior",
                "oracle_newton_center",
                "oracle_newton_boundary",
            ]),
        ),
    ];

    let mut failed = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed in {:.0} s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
