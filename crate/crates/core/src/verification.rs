//! Manufactured solutions, convergence studies, identity batteries and the
//! comparison of the two parametrices. Every report writes a deterministic CSV
//! whose first line is [`REPORT_HEADER`].

use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::coefficient::CoefficientField;
use crate::geometry::Vec3;
use crate::kernels::{apply_operator_fd, KernelContext};
use crate::linalg::DenseMatrix;
use crate::mesh::{build_ball_mesh, build_cube_mesh, DomainGeometry, DomainKind, MeshError, SurfaceMesh, VolumeMesh};
use crate::potentials::{
    Assembler, AssemblyPath, BoundaryDensity, DomainDensity, KernelFamily, OperatorId, PotentialError, Target,
};
use crate::quadrature::{QuadratureError, SingularPolicy};
use crate::system::{
    assemble_auto, solve, DirichletProblem, RightHandSide, SolverMethod, SystemError, DEFAULT_TOL,
};

pub const REPORT_HEADER: &str = "bdie-report-v1";

/// Interior points used by the consistency guard of each case.
const GUARD_POINTS: usize = 100;
const GUARD_STEP: f64 = 1e-4;
const GUARD_TOL: f64 = 1e-6;
const SEED: u64 = 0x5eed_bd1e;

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{case}: source term disagrees with the finite-difference operator by {max_error:e}")]
    GuardFailed { case: String, max_error: f64 },
    #[error("a convergence study needs at least two levels, got {0}")]
    TooFewLevels(usize),
    #[error("{0}")]
    Invalid(String),
}

/// Surface and volume meshes at `level`: icosphere refinement for the ball,
/// divisions per edge for the cube.
pub fn build_meshes(geometry: &DomainGeometry, level: usize) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    match geometry.kind {
        DomainKind::Ball { radius } => build_ball_mesh(radius, level),
        DomainKind::Cube { half_width } => build_cube_mesh(half_width, level),
    }
}

/// A closed-form solution `u` of `∇·(a∇u) = f` used to measure the solver error.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub geometry: DomainGeometry,
    pub field: CoefficientField,
    pub u_exact: fn(&Vec3) -> f64,
    pub grad_u: fn(&Vec3) -> Vec3,
    pub f: fn(&Vec3) -> f64,
    /// Constant solutions, for which the order column is reported as exact.
    pub constant_solution: bool,
}

impl ManufacturedCase {
    pub fn phi0(&self, surface: &SurfaceMesh) -> BoundaryDensity {
        BoundaryDensity::sample(surface, |x| (self.u_exact)(x))
    }

    /// `a·∂u/∂n` at the centroids.
    pub fn psi_exact(&self, surface: &SurfaceMesh) -> BoundaryDensity {
        let values = surface
            .centroids()
            .iter()
            .zip(surface.normals())
            .map(|(c, n)| self.field.eval(c) * (self.grad_u)(c).dot(n))
            .collect();
        BoundaryDensity(values)
    }

    pub fn source(&self, volume: &VolumeMesh) -> DomainDensity {
        DomainDensity::sample(volume, |x| (self.f)(x))
    }

    /// Largest `|f − 𝒜u|` over random interior points, with `𝒜` applied by
    /// central differences.
    pub fn guard_error(&self, n_points: usize) -> f64 {
        let mut rng = StdRng::seed_from_u64(SEED);
        let bbox = self.geometry.bounding_box();
        let mut worst = 0.0f64;
        let mut found = 0;
        while found < n_points {
            let x = Vec3::from_fn(|i, _| rng.random_range(bbox.min[i]..bbox.max[i]));
            if !self.geometry.contains(&x) {
                continue;
            }
            found += 1;
            let applied = apply_operator_fd(&self.field, self.u_exact, &x, GUARD_STEP);
            worst = worst.max((applied - (self.f)(&x)).abs());
        }
        worst
    }

    pub fn check_guard(&self) -> Result<f64, VerificationError> {
        let max_error = self.guard_error(GUARD_POINTS);
        if max_error <= GUARD_TOL {
            Ok(max_error)
        } else {
            Err(VerificationError::GuardFailed {
                case: self.name.clone(),
                max_error,
            })
        }
    }

    pub fn problem(&self, level: usize, policy: SingularPolicy) -> Result<DirichletProblem, VerificationError> {
        let (s, v) = build_meshes(&self.geometry, level)?;
        let rhs = RightHandSide::Density(self.source(&v));
        let phi = self.phi0(&s);
        Ok(DirichletProblem::new(self.geometry, s, v, self.field.clone(), rhs, phi, policy)?)
    }
}

fn c1_u(_: &Vec3) -> f64 {
    1.0
}
fn c1_grad(_: &Vec3) -> Vec3 {
    Vec3::zeros()
}
fn zero(_: &Vec3) -> f64 {
    0.0
}
fn linear_u(x: &Vec3) -> f64 {
    x[0]
}
fn linear_grad(_: &Vec3) -> Vec3 {
    Vec3::x()
}
fn c3_f(x: &Vec3) -> f64 {
    2.0 * x[0]
}
fn c4_u(x: &Vec3) -> f64 {
    x[0] * x[0]
}
fn c4_grad(x: &Vec3) -> Vec3 {
    Vec3::new(2.0 * x[0], 0.0, 0.0)
}
fn c4_f(x: &Vec3) -> f64 {
    x[0].exp() * (2.0 + 2.0 * x[0])
}

/// One builtin case on one domain, by label (`C1`..`C4`).
pub fn builtin_case(label: &str, geometry: DomainGeometry) -> Option<ManufacturedCase> {
    let unit = || CoefficientField::constant(1.0).expect("valid constant");
    let (field, u_exact, grad_u, f): (CoefficientField, fn(&Vec3) -> f64, fn(&Vec3) -> Vec3, fn(&Vec3) -> f64) =
        match label {
            "C1" => (unit(), c1_u, c1_grad, zero),
            "C2" => (unit(), linear_u, linear_grad, zero),
            "C3" => (
                CoefficientField::quadratic(1.0, [1.0, 0.0, 0.0], 1.0, 2.0).expect("valid quadratic"),
                linear_u,
                linear_grad,
                c3_f,
            ),
            "C4" => (
                CoefficientField::exponential([1.0, 0.0, 0.0], (-1.0f64).exp(), 1.0f64.exp())
                    .expect("valid exponential"),
                c4_u,
                c4_grad,
                c4_f,
            ),
            _ => return None,
        };
    let domain = match geometry.kind {
        DomainKind::Ball { .. } => "ball",
        DomainKind::Cube { .. } => "cube",
    };
    Some(ManufacturedCase {
        name: format!("{label}-{domain}"),
        geometry,
        field,
        u_exact,
        grad_u,
        f,
        constant_solution: label == "C1",
    })
}

/// `C1`..`C4` on the unit ball and on the cube `[−1, 1]³`.
pub fn builtin_cases() -> Vec<ManufacturedCase> {
    [DomainGeometry::ball(1.0), DomainGeometry::cube(1.0)]
        .into_iter()
        .flat_map(|g| ["C1", "C2", "C3", "C4"].map(|l| builtin_case(l, g).expect("builtin label")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub policy: SingularPolicy,
    pub method: SolverMethod,
    pub tol: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            policy: SingularPolicy::default(),
            method: SolverMethod::DirectLu,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub refinement: usize,
    pub h: f64,
    pub err_u_l2: f64,
    pub err_u_max: f64,
    pub err_psi_l2: f64,
    pub green_residual: f64,
    /// Wall-clock seconds; kept out of the CSV so reports stay reproducible.
    pub runtime: f64,
    /// The failure message when this level could not be solved.
    pub failure: Option<String>,
}

impl ConvergenceRow {
    pub fn solved(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// The exact solution is constant; only quadrature error remains.
    Exact,
    Estimated(f64),
    Undefined,
}

impl Order {
    pub fn value(self) -> Option<f64> {
        match self {
            Order::Estimated(v) => Some(v),
            _ => None,
        }
    }

    fn csv(self) -> String {
        match self {
            Order::Exact => "exact".into(),
            Order::Estimated(v) => format!("{v:.6}"),
            Order::Undefined => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub rows: Vec<ConvergenceRow>,
    constant_solution: bool,
}

impl ConvergenceReport {
    /// `log₂(e_k / e_{k+1})` between consecutive levels (the ball halves `h` per level).
    fn orders(&self, metric: impl Fn(&ConvergenceRow) -> f64) -> Vec<Order> {
        self.rows
            .windows(2)
            .map(|w| {
                if self.constant_solution {
                    return Order::Exact;
                }
                let (a, b) = (metric(&w[0]), metric(&w[1]));
                if w[0].solved() && w[1].solved() && a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Order::Estimated((a / b).log2())
                } else {
                    Order::Undefined
                }
            })
            .collect()
    }

    pub fn orders_u_l2(&self) -> Vec<Order> {
        self.orders(|r| r.err_u_l2)
    }

    pub fn orders_u_max(&self) -> Vec<Order> {
        self.orders(|r| r.err_u_max)
    }

    pub fn orders_psi_l2(&self) -> Vec<Order> {
        self.orders(|r| r.err_psi_l2)
    }

    /// Ratio `r_k / r_{k+1}` of successive Green residuals, skipping pairs where
    /// either level has no probe cells.
    pub fn green_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[0].green_residual / w[1].green_residual)
            .filter(|r| !r.is_nan())
            .collect()
    }

    pub fn all_solved(&self) -> bool {
        self.rows.iter().all(ConvergenceRow::solved)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "{REPORT_HEADER},convergence,{}", self.case)?;
        writeln!(
            w,
            "refinement,h,err_u_l2,err_u_max,err_psi_l2,green_residual,order_u_l2,order_u_max,order_psi_l2,status"
        )?;
        let (o1, o2, o3) = (self.orders_u_l2(), self.orders_u_max(), self.orders_psi_l2());
        for (k, r) in self.rows.iter().enumerate() {
            let order = |o: &[Order]| k.checked_sub(1).map(|i| o[i].csv()).unwrap_or_default();
            writeln!(
                w,
                "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{},{},{},{}",
                r.refinement,
                r.h,
                r.err_u_l2,
                r.err_u_max,
                r.err_psi_l2,
                r.green_residual,
                order(&o1),
                order(&o2),
                order(&o3),
                r.failure.as_deref().map(csv_text).unwrap_or_else(|| "ok".into()),
            )?;
        }
        Ok(())
    }
}

fn csv_text(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "'"))
}

/// Barycenters at least `h` away from the boundary.
fn probe_cells(problem: &DirichletProblem) -> Vec<usize> {
    let h = problem.h();
    let surface = problem.surface();
    let bary = problem.volume().barycenters();
    (0..bary.len()).filter(|&c| surface.distance_to(&bary[c]) >= h).collect()
}

struct LevelErrors {
    err_u_l2: f64,
    err_u_max: f64,
    err_psi_l2: f64,
    green_residual: f64,
}

fn solve_level(case: &ManufacturedCase, level: usize, config: &StudyConfig) -> Result<(f64, LevelErrors), VerificationError> {
    let problem = case.problem(level, config.policy)?;
    let system = assemble_auto(&problem)?;
    let volume = problem.volume();
    let surface = problem.surface();
    let u_exact: Vec<f64> = volume.barycenters().iter().map(case.u_exact).collect();
    let psi_exact = case.psi_exact(surface);

    // top block row of the system with the exact data inserted
    let residual = system.residual(&u_exact, psi_exact.values())?;
    let green_residual = sup_over(probe_cells(&problem).into_iter().map(|c| residual[c]));

    let solution = solve(&system, config.method, config.tol)?;
    let total_volume = volume.total_volume();
    let (mut l2, mut max) = (0.0, 0.0f64);
    for ((u, e), vol) in solution.u.values().iter().zip(&u_exact).zip(volume.volumes()) {
        l2 += (u - e).powi(2) * vol;
        max = max.max((u - e).abs());
    }
    let psi_l2 = solution
        .psi
        .values()
        .iter()
        .zip(psi_exact.values())
        .zip(surface.areas())
        .map(|((p, e), a)| (p - e).powi(2) * a)
        .sum::<f64>();
    Ok((
        problem.h(),
        LevelErrors {
            err_u_l2: (l2 / total_volume).sqrt(),
            err_u_max: max,
            err_psi_l2: (psi_l2 / surface.total_area()).sqrt(),
            green_residual,
        },
    ))
}

/// Solves `case` at each level and measures the errors. A level that fails is
/// recorded in its row; the report is still produced.
pub fn run_convergence(
    case: &ManufacturedCase,
    levels: &[usize],
    config: &StudyConfig,
) -> Result<ConvergenceReport, VerificationError> {
    if levels.len() < 2 {
        return Err(VerificationError::TooFewLevels(levels.len()));
    }
    run_levels(case, levels, config)
}

/// As [`run_convergence`] but accepts a single level (no orders are estimated).
pub fn run_levels(
    case: &ManufacturedCase,
    levels: &[usize],
    config: &StudyConfig,
) -> Result<ConvergenceReport, VerificationError> {
    case.check_guard()?;
    let rows = levels
        .iter()
        .map(|&level| {
            let start = Instant::now();
            let out = solve_level(case, level, config);
            let runtime = start.elapsed().as_secs_f64();
            Ok(match out {
                Ok((h, e)) => ConvergenceRow {
                    refinement: level,
                    h,
                    err_u_l2: e.err_u_l2,
                    err_u_max: e.err_u_max,
                    err_psi_l2: e.err_psi_l2,
                    green_residual: e.green_residual,
                    runtime,
                    failure: None,
                },
                Err(VerificationError::System(e)) => ConvergenceRow {
                    refinement: level,
                    h: build_meshes(&case.geometry, level)?.0.max_diameter(),
                    err_u_l2: f64::NAN,
                    err_u_max: f64::NAN,
                    err_psi_l2: f64::NAN,
                    green_residual: f64::NAN,
                    runtime,
                    failure: Some(e.to_string()),
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>, VerificationError>>()?;
    Ok(ConvergenceReport {
        case: case.name.clone(),
        rows,
        constant_solution: case.constant_solution,
    })
}

/// `sup |u + ℛu − Vψ + Wφ₀ − 𝒫f|` over barycenters at least `h` from the boundary,
/// with the exact `u`, `ψ` and freshly streamed rows. NaN on meshes too coarse to
/// have such barycenters.
pub fn green_identity_residual(
    case: &ManufacturedCase,
    level: usize,
    policy: SingularPolicy,
) -> Result<f64, VerificationError> {
    let problem = case.problem(level, policy)?;
    let asm = problem.assembler()?;
    let cells = probe_cells(&problem);
    let bary = problem.volume().barycenters();
    let points: Vec<Vec3> = cells.iter().map(|&c| bary[c]).collect();
    // tagged with their cells so the own-cell entry uses the same self term as the system
    let all = Target::barycenters(problem.volume());
    let targets: Vec<Target> = cells.iter().map(|&c| all[c]).collect();
    let u_exact = DomainDensity::sample(problem.volume(), |x| (case.u_exact)(x));
    let psi = case.psi_exact(problem.surface());
    let f = case.source(problem.volume());
    let apply = |op, density: &[f64]| {
        asm.apply_streaming(op, KernelFamily::ParametrixX, AssemblyPath::Direct, &targets, density)
    };
    let r = apply(OperatorId::R, u_exact.values())?;
    let v = apply(OperatorId::V, psi.values())?;
    let w = apply(OperatorId::W, problem.dirichlet().values())?;
    let p = apply(OperatorId::P, f.values())?;
    Ok(sup_over(
        points.iter().enumerate().map(|(i, x)| (case.u_exact)(x) + r[i] - v[i] + w[i] - p[i]),
    ))
}

/// `sup |v|`, or NaN when there is nothing to measure.
fn sup_over(values: impl Iterator<Item = f64>) -> f64 {
    values.map(f64::abs).fold(f64::NAN, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityEntry {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
}

impl IdentityEntry {
    pub fn passed(&self) -> bool {
        self.measured <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub label: String,
    pub entries: Vec<IdentityEntry>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(IdentityEntry::passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "{REPORT_HEADER},identities,{}", self.label)?;
        writeln!(w, "identity,measured,threshold,status")?;
        for e in &self.entries {
            let status = if e.passed() { "pass" } else { "fail" };
            writeln!(w, "{},{:.6e},{:.3e},{status}", e.name, e.measured, e.threshold)?;
        }
        Ok(())
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Offsets (in local panel diameters) used for the one-sided limits.
const NEAR_OFFSETS: [f64; 2] = [0.1, 0.2];

/// One-sided limit at each centroid of `op` applied to `density`, from points
/// `c + side·ε·n` with `ε ∈ {0.1, 0.2}·diameter` and linear Richardson extrapolation.
fn one_sided_limit(
    asm: &Assembler<'_>,
    op: OperatorId,
    density: &[f64],
    side: f64,
) -> Result<Vec<f64>, PotentialError> {
    let s = asm.surface();
    let at = |k: usize| -> Result<Vec<f64>, PotentialError> {
        let targets: Vec<Target> = (0..s.len())
            .map(|j| {
                let n = s.normal(j);
                Target::free_with_normal(s.centroid(j) + side * NEAR_OFFSETS[k] * s.diameter(j) * n, n)
            })
            .collect();
        asm.apply_streaming(op, KernelFamily::ParametrixX, AssemblyPath::Direct, &targets, density)
    };
    let (near, far) = (at(0)?, at(1)?);
    Ok(near.iter().zip(&far).map(|(a, b)| 2.0 * a - b).collect())
}

fn random_interior_points(geometry: &DomainGeometry, surface: &SurfaceMesh, n: usize, margin: f64) -> Vec<Vec3> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0x1d);
    let bbox = geometry.bounding_box();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = Vec3::from_fn(|i, _| rng.random_range(bbox.min[i]..bbox.max[i]));
        if geometry.contains(&x) && surface.distance_to(&x) > margin {
            out.push(x);
        }
    }
    out
}

/// At most `max_rows` evenly spaced entries of `v`.
fn subsample<T: Copy>(v: &[T], max_rows: usize) -> Vec<T> {
    let step = v.len().div_ceil(max_rows.max(1)).max(1);
    v.iter().step_by(step).copied().collect()
}

/// Largest `|𝒜_x P^x(·,y) − R^x|` over random pairs, relative to `max(|R|, scale)`
/// where `scale` is the size of the two terms of `R` that may cancel.
pub fn defect_identity_error(field: &CoefficientField, pairs: usize, seed: u64) -> f64 {
    let ctx = KernelContext::new(field, 4.0);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < pairs {
        let x = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let d = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        if d.norm() < 1e-3 {
            continue;
        }
        let r = rng.random_range(0.1..2.0);
        let y = x + d.normalize() * r;
        done += 1;
        let (Ok(rem), Ok(_)) = (ctx.remainder_x(&x, &y), ctx.parametrix_x(&x, &y)) else {
            return f64::INFINITY;
        };
        let applied = apply_operator_fd(field, |z| ctx.parametrix_x(z, &y).unwrap_or(f64::NAN), &x, 1e-4);
        let scale = (field.laplacian_log(&x).abs() / r + field.grad_log(&x).norm() / (r * r))
            / (4.0 * std::f64::consts::PI);
        worst = worst.max((applied - rem).abs() / rem.abs().max(scale).max(f64::MIN_POSITIVE));
    }
    worst
}

/// Runs the jump, defect, path, reduction and analytic oracle identities.
/// Entries that do not apply to the given field or domain are omitted.
pub fn identity_suite(
    geometry: DomainGeometry,
    field: &CoefficientField,
    refinement: usize,
    policy: SingularPolicy,
) -> Result<IdentityReport, VerificationError> {
    let (s, v) = build_meshes(&geometry, refinement)?;
    let asm = Assembler::new(&s, Some(&v), field, policy)?;
    let constant = field.is_constant();
    let unit = constant && field.eval(&Vec3::zeros()) == 1.0;
    let ball = matches!(geometry.kind, DomainKind::Ball { .. });
    let mut entries = Vec::new();
    let mut push = |name, measured: f64, threshold| {
        entries.push(IdentityEntry {
            name,
            measured: if measured.is_nan() { f64::INFINITY } else { measured },
            threshold,
        })
    };

    let ones = vec![1.0; s.len()];
    let x1: Vec<f64> = s.centroids().iter().map(|c| c[0]).collect();
    let half = |cal: &[f64], phi: &[f64]| cal.iter().zip(phi).map(|(w, p)| w - 0.5 * p).collect::<Vec<_>>();
    let cal_w = asm.assemble_cal_w(AssemblyPath::Direct)?;

    // jumps of the double layer
    let inside_w1 = one_sided_limit(&asm, OperatorId::W, &ones, -1.0)?;
    if constant {
        push("jump_double_layer_unit", max_abs(inside_w1.iter().map(|w| w + 1.0)), 2e-2);
    } else {
        let trace = half(&cal_w.apply(&ones)?, &ones);
        push("jump_double_layer_unit", max_abs(inside_w1.iter().zip(&trace).map(|(a, b)| a - b)), 2e-2);
    }
    let inside_wx = one_sided_limit(&asm, OperatorId::W, &x1, -1.0)?;
    let trace_wx = half(&cal_w.apply(&x1)?, &x1);
    push("jump_double_layer_linear", max_abs(inside_wx.iter().zip(&trace_wx).map(|(a, b)| a - b)), 5e-2);

    // continuity of the single layer
    let v_in = one_sided_limit(&asm, OperatorId::V, &ones, -1.0)?;
    let v_out = one_sided_limit(&asm, OperatorId::V, &ones, 1.0)?;
    push("single_layer_continuity", max_abs(v_in.iter().zip(&v_out).map(|(a, b)| a - b)), 5e-2);

    if unit {
        // conormal jump of the single layer
        let t_in = one_sided_limit(&asm, OperatorId::CalWPrime, &ones, -1.0)?;
        let cal_wp = asm.assemble_cal_w_prime(AssemblyPath::Direct)?.apply(&ones)?;
        push(
            "single_layer_conormal_jump",
            max_abs(t_in.iter().zip(&cal_wp).map(|(t, w)| t - (0.5 + w))),
            1e-1,
        );
    }

    // Gauss solid-angle identity for the harmonic double layer
    let inner = random_interior_points(&geometry, &s, 10, 0.1 * s.max_diameter());
    let targets = Target::points(&inner);
    let gauss = asm.apply_streaming(OperatorId::W, KernelFamily::Harmonic, AssemblyPath::Direct, &targets, &ones)?;
    push("gauss_solid_angle", max_abs(gauss.iter().map(|w| w + 1.0)), 1e-3);

    if !constant {
        push("parametrix_defect", defect_identity_error(field, 200, SEED), 1e-4);
        push("path_equivalence", path_equivalence_error(&asm, &inner)?, 1e-12);
    }
    if unit {
        push("unit_coefficient_reduction", unit_reduction_error(&asm, &inner)?, 1e-14);
    }
    if unit && ball {
        let radius = match geometry.kind {
            DomainKind::Ball { radius } => radius,
            DomainKind::Cube { .. } => unreachable!(),
        };
        if radius == 1.0 {
            for (name, value) in analytic_oracles(&asm)? {
                push(name, value, 2e-2);
            }
        }
    }
    Ok(IdentityReport {
        label: format!("{}-{}-r{refinement}", domain_name(&geometry), field_label(field)),
        entries,
    })
}

fn domain_name(g: &DomainGeometry) -> &'static str {
    match g.kind {
        DomainKind::Ball { .. } => "ball",
        DomainKind::Cube { .. } => "cube",
    }
}

fn field_label(field: &CoefficientField) -> String {
    let mut s = format!("{:?}", field.family()).to_lowercase();
    for p in field.params() {
        let _ = write!(s, "_{p}");
    }
    s
}

/// Every operator assembled both directly and through the Laplace relations,
/// on a subsample of at most 48 rows per target set.
pub fn path_equivalence_error(asm: &Assembler<'_>, interior: &[Vec3]) -> Result<f64, VerificationError> {
    const ROWS: usize = 48;
    let free = Target::points(interior);
    let cent = subsample(&asm.centroid_targets(), ROWS);
    let bary = subsample(&asm.barycenter_targets()?, ROWS);
    let sets: [(OperatorId, &[Target]); 9] = [
        (OperatorId::V, &free),
        (OperatorId::W, &free),
        (OperatorId::CalV, &cent),
        (OperatorId::CalW, &cent),
        (OperatorId::CalWPrime, &cent),
        (OperatorId::P, &bary),
        (OperatorId::P, &cent),
        (OperatorId::R, &bary),
        (OperatorId::R, &cent),
    ];
    let mut worst = 0.0f64;
    for (op, targets) in sets {
        let direct = asm.assemble_with(op, KernelFamily::ParametrixX, AssemblyPath::Direct, targets)?;
        let relation = asm.assemble_with(op, KernelFamily::ParametrixX, AssemblyPath::Relation, targets)?;
        worst = worst.max(relative_difference(direct.matrix(), relation.matrix()));
    }
    Ok(worst)
}

/// `max|A − B| / max|A|` (zero when both vanish).
fn relative_difference(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        a.max_abs_difference(b) / scale
    }
}

/// For `a ≡ 1`, the largest entrywise gap between parametrix and harmonic
/// operators, or infinity if `ℛ` is not exactly zero.
pub fn unit_reduction_error(asm: &Assembler<'_>, interior: &[Vec3]) -> Result<f64, VerificationError> {
    const ROWS: usize = 48;
    let free = Target::points(interior);
    let cent = subsample(&asm.centroid_targets(), ROWS);
    let bary = subsample(&asm.barycenter_targets()?, ROWS);
    let sets: [(OperatorId, &[Target]); 6] = [
        (OperatorId::V, &free),
        (OperatorId::W, &free),
        (OperatorId::CalV, &cent),
        (OperatorId::CalW, &cent),
        (OperatorId::CalWPrime, &cent),
        (OperatorId::P, &bary),
    ];
    let mut worst = 0.0f64;
    for (op, targets) in sets {
        let p = asm.assemble(op, targets, AssemblyPath::Direct)?;
        let h = asm.assemble_harmonic(op, targets)?;
        worst = worst.max(p.matrix().max_abs_difference(h.matrix()));
    }
    let r = asm.assemble(OperatorId::R, &bary, AssemblyPath::Direct)?;
    if r.matrix().max_abs() != 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(worst)
}

/// Closed-form values on the unit ball for `a ≡ 1`: `V[1](0) = 1`,
/// `W[1] = −1` inside, `𝒫[1](0) = −½` and `𝒫[1] = −⅓` on the sphere.
fn analytic_oracles(asm: &Assembler<'_>) -> Result<Vec<(&'static str, f64)>, VerificationError> {
    let s = asm.surface();
    let v = asm.volume().ok_or_else(|| VerificationError::Invalid("volume mesh required".into()))?;
    let origin = Target::points(&[Vec3::zeros()]);
    let ones_s = vec![1.0; s.len()];
    let ones_v = vec![1.0; v.len()];
    let apply = |op, t: &[Target], d: &[f64]| {
        asm.apply_streaming(op, KernelFamily::ParametrixX, AssemblyPath::Direct, t, d)
    };
    let v0 = apply(OperatorId::V, &origin, &ones_s)?[0];
    let inner = Target::points(&[Vec3::new(0.2, -0.1, 0.3), Vec3::new(-0.5, 0.2, 0.0)]);
    let w = apply(OperatorId::W, &inner, &ones_s)?;
    let p0 = apply(OperatorId::P, &origin, &ones_v)?[0];
    let pb = apply(OperatorId::P, &subsample(&asm.centroid_targets(), 16), &ones_v)?;
    Ok(vec![
        ("oracle_single_layer_center", (v0 - 1.0).abs()),
        ("oracle_double_layer_interior", max_abs(w.iter().map(|w| w + 1.0))),
        ("oracle_newton_center", (p0 + 0.5).abs()),
        ("oracle_newton_boundary", max_abs(pb.iter().map(|p| p + 1.0 / 3.0))),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub quantity: &'static str,
    pub parametrix_x: f64,
    pub parametrix_y: f64,
    pub abs_difference: f64,
    pub rel_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub label: String,
    /// The field is constant, so both parametrices coincide.
    pub identical: bool,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    /// `‖ℛ^x‖_∞ / ‖ℛ^y‖_∞`, when both are nonzero.
    pub fn remainder_ratio(&self) -> Option<f64> {
        let r = self.row("remainder_norm_inf")?;
        (r.parametrix_y > 0.0).then(|| r.parametrix_x / r.parametrix_y)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "{REPORT_HEADER},compare,{}", self.label)?;
        writeln!(w, "quantity,parametrix_x,parametrix_y,abs_difference,rel_difference")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.quantity, r.parametrix_x, r.parametrix_y, r.abs_difference, r.rel_difference
            )?;
        }
        writeln!(w, "identical,{}", self.identical)?;
        Ok(())
    }
}

fn diagonal_max(m: &DenseMatrix) -> f64 {
    max_abs((0..m.rows().min(m.cols())).map(|i| m.get(i, i)))
}

fn comparison_row(quantity: &'static str, x: f64, y: f64, abs_difference: f64) -> ComparisonRow {
    let scale = x.abs().max(y.abs());
    ComparisonRow {
        quantity,
        parametrix_x: x,
        parametrix_y: y,
        abs_difference,
        rel_difference: if scale > 0.0 { abs_difference / scale } else { 0.0 },
    }
}

/// Single-layer, volume-potential and remainder matrices built with `P^x` and `P^y`.
pub fn compare_parametrices(
    field: &CoefficientField,
    geometry: DomainGeometry,
    refinement: usize,
    policy: SingularPolicy,
) -> Result<ComparisonReport, VerificationError> {
    let (s, v) = build_meshes(&geometry, refinement)?;
    let asm = Assembler::new(&s, Some(&v), field, policy)?;
    let cent = asm.centroid_targets();
    let bary = asm.barycenter_targets()?;
    let both = |op, t: &[Target]| -> Result<(DenseMatrix, DenseMatrix), PotentialError> {
        let x = asm.assemble_with(op, KernelFamily::ParametrixX, AssemblyPath::Direct, t)?;
        let y = asm.assemble_with(op, KernelFamily::ParametrixY, AssemblyPath::Direct, t)?;
        Ok((x.into_matrix(), y.into_matrix()))
    };
    let (vx, vy) = both(OperatorId::CalV, &cent)?;
    let (px, py) = both(OperatorId::P, &bary)?;
    let (rx, ry) = both(OperatorId::R, &bary)?;
    let rows = vec![
        comparison_row("single_layer_max_entry", vx.max_abs(), vy.max_abs(), vx.max_abs_difference(&vy)),
        comparison_row("single_layer_self_term", diagonal_max(&vx), diagonal_max(&vy), {
            max_abs((0..vx.rows()).map(|i| vx.get(i, i) - vy.get(i, i)))
        }),
        comparison_row("single_layer_norm_inf", vx.norm_inf(), vy.norm_inf(), (vx.norm_inf() - vy.norm_inf()).abs()),
        comparison_row("newton_max_entry", px.max_abs(), py.max_abs(), px.max_abs_difference(&py)),
        comparison_row("newton_self_term", diagonal_max(&px), diagonal_max(&py), {
            max_abs((0..px.rows()).map(|i| px.get(i, i) - py.get(i, i)))
        }),
        comparison_row("newton_norm_inf", px.norm_inf(), py.norm_inf(), (px.norm_inf() - py.norm_inf()).abs()),
        comparison_row("remainder_norm_inf", rx.norm_inf(), ry.norm_inf(), (rx.norm_inf() - ry.norm_inf()).abs()),
        comparison_row("remainder_max_entry", rx.max_abs(), ry.max_abs(), rx.max_abs_difference(&ry)),
    ];
    Ok(ComparisonReport {
        label: format!("{}-{}-r{refinement}", domain_name(&geometry), field_label(field)),
        identical: field.is_constant(),
        rows,
    })
}
