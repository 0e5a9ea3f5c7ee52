//! The discrete boundary-domain system for the interior Dirichlet problem.
//!
//! Unknowns are the cell values `u` and the panel values `ψ` (the conormal
//! derivative, kept as an independent unknown). Rows are collocated at cell
//! barycenters for the domain equation and at panel centroids for the boundary
//! equation:
//!
//! ```text
//! [ I + ℛ    −V ] [u]   [ F₀           ]
//! [ γ⁺ℛ      −𝒱 ] [ψ] = [ γ⁺F₀ − φ₀    ]
//! ```
//!
//! with `F₀ = 𝒫f̃ − Wφ₀` and `γ⁺W = 𝒲 − ½I`.

use std::borrow::Cow;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::{require_positive, CoefficientError, CoefficientField};
use crate::geometry::Vec3;
use crate::linalg::{gmres, lu_factor, norm2, DenseMatrix, GmresOptions, LinalgError};
use crate::mesh::{DomainGeometry, SurfaceMesh, VolumeMesh};
use crate::potentials::{
    Assembler, AssemblyPath, BoundaryDensity, DomainDensity, KernelFamily, OperatorId, PotentialError, Target,
    TargetKind,
};
use crate::quadrature::{QuadratureError, SingularPolicy};

/// Lattice resolution of the positivity check run when a problem is built.
const POSITIVITY_SAMPLES: usize = 17;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{what} has {got} values, the mesh has {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("point source at ({}, {}, {}) is {distance:e} from the boundary; it must be farther than h = {h:e}", .location[0], .location[1], .location[2])]
    SourceNearBoundary { location: [f64; 3], distance: f64, h: f64 },
    #[error("point source at ({}, {}, {}) coincides with target {target}", .location[0], .location[1], .location[2])]
    SourceOnTarget { location: [f64; 3], target: usize },
    #[error("point ({}, {}, {}) is not strictly inside the domain", .point[0], .point[1], .point[2])]
    ExteriorPoint { point: [f64; 3] },
    #[error("centroid targets need the trace form of the right-hand side")]
    BoundaryTargets,
    #[error("the reduced system needs a constant coefficient")]
    NotConstant,
    #[error("relative residual {residual:e} exceeds the tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub location: Vec3,
    pub strength: f64,
}

/// The source term `f̃`: the zero extension of a sampled density, or a sum of Dirac masses.
#[derive(Debug, Clone, PartialEq)]
pub enum RightHandSide {
    Density(DomainDensity),
    PointSources(Vec<PointSource>),
}

impl RightHandSide {
    pub fn zero(volume: &VolumeMesh) -> Self {
        Self::Density(DomainDensity::constant(volume, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Density(f) => f.values().iter().all(|v| *v == 0.0),
            Self::PointSources(s) => s.iter().all(|p| p.strength == 0.0),
        }
    }
}

/// A target that lies closer than `h` to a point source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldWarning {
    pub target: usize,
    pub distance: f64,
}

impl fmt::Display for NearFieldWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "target {} is {:.3e} from a point source", self.target, self.distance)
    }
}

/// Values at a set of targets together with any near-field warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub values: Vec<f64>,
    pub warnings: Vec<NearFieldWarning>,
}

/// `𝒜u = f` in Ω with `γ⁺u = φ₀`, discretized on a surface and volume mesh.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    geometry: DomainGeometry,
    surface: SurfaceMesh,
    volume: VolumeMesh,
    field: CoefficientField,
    rhs: RightHandSide,
    dirichlet: BoundaryDensity,
    policy: SingularPolicy,
}

impl DirichletProblem {
    pub fn new(
        geometry: DomainGeometry,
        surface: SurfaceMesh,
        volume: VolumeMesh,
        field: CoefficientField,
        rhs: RightHandSide,
        dirichlet: BoundaryDensity,
        policy: SingularPolicy,
    ) -> Result<Self, SystemError> {
        policy.validate()?;
        require_positive(&field, &geometry.bounding_box(), POSITIVITY_SAMPLES)?;
        if dirichlet.len() != surface.len() {
            return Err(SystemError::DimensionMismatch {
                what: "dirichlet data",
                expected: surface.len(),
                got: dirichlet.len(),
            });
        }
        let h = surface.max_diameter();
        match &rhs {
            RightHandSide::Density(f) if f.len() != volume.len() => {
                return Err(SystemError::DimensionMismatch {
                    what: "source density",
                    expected: volume.len(),
                    got: f.len(),
                })
            }
            RightHandSide::PointSources(sources) => {
                for s in sources {
                    let distance = surface.distance_to(&s.location);
                    if !geometry.contains(&s.location) || distance <= h {
                        return Err(SystemError::SourceNearBoundary {
                            location: s.location.into(),
                            distance,
                            h,
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(Self {
            geometry,
            surface,
            volume,
            field,
            rhs,
            dirichlet,
            policy,
        })
    }

    pub fn geometry(&self) -> &DomainGeometry {
        &self.geometry
    }

    pub fn surface(&self) -> &SurfaceMesh {
        &self.surface
    }

    pub fn volume(&self) -> &VolumeMesh {
        &self.volume
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn rhs(&self) -> &RightHandSide {
        &self.rhs
    }

    pub fn dirichlet(&self) -> &BoundaryDensity {
        &self.dirichlet
    }

    pub fn policy(&self) -> &SingularPolicy {
        &self.policy
    }

    /// Largest panel diameter.
    pub fn h(&self) -> f64 {
        self.surface.max_diameter()
    }

    pub fn assembler(&self) -> Result<Assembler<'_>, SystemError> {
        Ok(Assembler::new(&self.surface, Some(&self.volume), &self.field, self.policy)?)
    }

    /// The same problem with other data `(f̃, φ₀)` on the same meshes.
    pub fn with_data(&self, rhs: RightHandSide, dirichlet: BoundaryDensity) -> Result<Self, SystemError> {
        Self::new(
            self.geometry,
            self.surface.clone(),
            self.volume.clone(),
            self.field.clone(),
            rhs,
            dirichlet,
            self.policy,
        )
    }
}

fn streaming(
    asm: &Assembler<'_>,
    op: OperatorId,
    targets: &[Target],
    density: &[f64],
) -> Result<Vec<f64>, SystemError> {
    if density.iter().all(|v| *v == 0.0) {
        return Ok(vec![0.0; targets.len()]);
    }
    Ok(asm.apply_streaming(op, KernelFamily::ParametrixX, AssemblyPath::Direct, targets, density)?)
}

/// `𝒫f̃` at the targets; Dirac masses are summed directly as `P^x(x₀, y)`.
fn newton_term(problem: &DirichletProblem, asm: &Assembler<'_>, targets: &[Target]) -> Result<Evaluated, SystemError> {
    match &problem.rhs {
        RightHandSide::Density(f) => Ok(Evaluated {
            values: streaming(asm, OperatorId::P, targets, f.values())?,
            warnings: Vec::new(),
        }),
        RightHandSide::PointSources(sources) => {
            let ctx = asm.context();
            let h = problem.h();
            let mut warnings = Vec::new();
            let values = targets
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    sources.iter().try_fold(0.0, |acc, s| {
                        let distance = (s.location - t.x).norm();
                        if distance < h {
                            warnings.push(NearFieldWarning { target: i, distance });
                        }
                        let p = ctx.parametrix_x(&s.location, &t.x).map_err(|_| SystemError::SourceOnTarget {
                            location: s.location.into(),
                            target: i,
                        })?;
                        Ok(acc + s.strength * p)
                    })
                })
                .collect::<Result<Vec<_>, SystemError>>()?;
            Ok(Evaluated { values, warnings })
        }
    }
}

fn f0_with(problem: &DirichletProblem, asm: &Assembler<'_>, targets: &[Target]) -> Result<Evaluated, SystemError> {
    if targets.iter().any(|t| matches!(t.kind, TargetKind::Centroid(_))) {
        return Err(SystemError::BoundaryTargets);
    }
    let mut out = newton_term(problem, asm, targets)?;
    let w = streaming(asm, OperatorId::W, targets, problem.dirichlet.values())?;
    out.values.iter_mut().zip(&w).for_each(|(v, w)| *v -= w);
    Ok(out)
}

fn trace_f0_with(problem: &DirichletProblem, asm: &Assembler<'_>) -> Result<Evaluated, SystemError> {
    let targets = asm.centroid_targets();
    let mut out = newton_term(problem, asm, &targets)?;
    let phi = problem.dirichlet.values();
    let w = streaming(asm, OperatorId::CalW, &targets, phi)?;
    for ((v, w), p) in out.values.iter_mut().zip(&w).zip(phi) {
        *v -= w - 0.5 * p;
    }
    Ok(out)
}

/// `F₀ = 𝒫f̃ − Wφ₀` at barycenters or free interior points.
pub fn assemble_f0(problem: &DirichletProblem, targets: &[Target]) -> Result<Evaluated, SystemError> {
    f0_with(problem, &problem.assembler()?, targets)
}

/// `γ⁺F₀ = γ⁺𝒫f̃ − (𝒲φ₀ − ½φ₀)` at the panel centroids.
pub fn assemble_trace_f0(problem: &DirichletProblem) -> Result<Evaluated, SystemError> {
    trace_f0_with(problem, &problem.assembler()?)
}

#[derive(Debug, Clone)]
enum Blocks {
    /// The whole `(N_cells + N_panels)²` matrix, row-major.
    Full(DenseMatrix),
    /// For constant `a`, `ℛ = 0` and only `V` (barycenters) and `𝒱` are kept.
    Reduced { v: DenseMatrix, cal_v: DenseMatrix },
}

#[derive(Debug, Clone)]
pub struct BdieSystem {
    blocks: Blocks,
    rhs: Vec<f64>,
    n_cells: usize,
    n_panels: usize,
    warnings: Vec<NearFieldWarning>,
}

fn system_rhs(problem: &DirichletProblem, asm: &Assembler<'_>) -> Result<(Vec<f64>, Vec<NearFieldWarning>), SystemError> {
    let bary = asm.barycenter_targets()?;
    let top = f0_with(problem, asm, &bary)?;
    let bottom = trace_f0_with(problem, asm)?;
    let mut rhs = top.values;
    rhs.extend(bottom.values.iter().zip(problem.dirichlet.values()).map(|(g, p)| g - p));
    let mut warnings = top.warnings;
    warnings.extend(bottom.warnings.into_iter().map(|w| NearFieldWarning {
        target: w.target + bary.len(),
        ..w
    }));
    Ok((rhs, warnings))
}

/// Builds the full block matrix and right-hand side.
pub fn assemble_system(problem: &DirichletProblem) -> Result<BdieSystem, SystemError> {
    let asm = problem.assembler()?;
    let bary = asm.barycenter_targets()?;
    let cent = asm.centroid_targets();
    let (nc, np) = (bary.len(), cent.len());
    let n = nc + np;
    let mut m = DenseMatrix::zeros(n, n);
    {
        let (top, bottom) = m.as_mut_slice().split_at_mut(nc * n);
        let fill = |op, targets: &[Target], scale, out: &mut [f64], offset| {
            asm.fill_block(op, KernelFamily::ParametrixX, AssemblyPath::Direct, targets, scale, out, n, offset)
        };
        fill(OperatorId::R, &bary, 1.0, top, 0)?;
        fill(OperatorId::V, &bary, -1.0, top, nc)?;
        fill(OperatorId::R, &cent, 1.0, bottom, 0)?;
        fill(OperatorId::CalV, &cent, -1.0, bottom, nc)?;
    }
    for i in 0..nc {
        m.set(i, i, m.get(i, i) + 1.0);
    }
    if !m.is_finite() {
        return Err(PotentialError::NonFinite.into());
    }
    let (rhs, warnings) = system_rhs(problem, &asm)?;
    Ok(BdieSystem {
        blocks: Blocks::Full(m),
        rhs,
        n_cells: nc,
        n_panels: np,
        warnings,
    })
}

/// For constant `a` the remainder vanishes, so `u = F₀ + Vψ` and `−𝒱ψ = γ⁺F₀ − φ₀`.
/// Only the `V` and `𝒱` blocks are stored.
pub fn assemble_reduced_system(problem: &DirichletProblem) -> Result<BdieSystem, SystemError> {
    if !problem.field.is_constant() {
        return Err(SystemError::NotConstant);
    }
    let asm = problem.assembler()?;
    let bary = asm.barycenter_targets()?;
    let v = asm.assemble_v(&bary, AssemblyPath::Direct)?.into_matrix();
    let cal_v = asm.assemble_cal_v(AssemblyPath::Direct)?.into_matrix();
    let (rhs, warnings) = system_rhs(problem, &asm)?;
    Ok(BdieSystem {
        n_cells: v.rows(),
        n_panels: cal_v.rows(),
        blocks: Blocks::Reduced { v, cal_v },
        rhs,
        warnings,
    })
}

/// The reduced form for constant coefficients, the full matrix otherwise.
pub fn assemble_auto(problem: &DirichletProblem) -> Result<BdieSystem, SystemError> {
    if problem.field.is_constant() {
        assemble_reduced_system(problem)
    } else {
        assemble_system(problem)
    }
}

impl BdieSystem {
    pub fn dim(&self) -> usize {
        self.n_cells + self.n_panels
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_panels(&self) -> usize {
        self.n_panels
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn warnings(&self) -> &[NearFieldWarning] {
        &self.warnings
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self.blocks, Blocks::Reduced { .. })
    }

    /// The full block matrix; built on demand for a reduced system.
    pub fn matrix(&self) -> Cow<'_, DenseMatrix> {
        match &self.blocks {
            Blocks::Full(m) => Cow::Borrowed(m),
            Blocks::Reduced { v, cal_v } => {
                let (nc, n) = (self.n_cells, self.dim());
                Cow::Owned(DenseMatrix::from_fn(n, n, |i, j| match (i < nc, j < nc) {
                    (true, true) => f64::from(u8::from(i == j)),
                    (true, false) => -v.get(i, j - nc),
                    (false, true) => 0.0,
                    (false, false) => -cal_v.get(i - nc, j - nc),
                }))
            }
        }
    }

    /// The discrete `𝒱` block (with its sign restored).
    pub fn single_layer_block(&self) -> DenseMatrix {
        match &self.blocks {
            Blocks::Reduced { cal_v, .. } => cal_v.clone(),
            Blocks::Full(m) => {
                let nc = self.n_cells;
                DenseMatrix::from_fn(self.n_panels, self.n_panels, |i, j| -m.get(nc + i, nc + j))
            }
        }
    }

    /// `𝒜¹x − ℱ¹` for `x = [u; ψ]`.
    pub fn residual(&self, u: &[f64], psi: &[f64]) -> Result<Vec<f64>, SystemError> {
        self.check_lengths(u, psi)?;
        let ax = match &self.blocks {
            Blocks::Full(m) => m.matvec(&[u, psi].concat())?,
            Blocks::Reduced { v, cal_v } => {
                let vpsi = v.matvec(psi)?;
                let mut out: Vec<f64> = u.iter().zip(&vpsi).map(|(u, v)| u - v).collect();
                out.extend(cal_v.matvec(psi)?.into_iter().map(|v| -v));
                out
            }
        };
        Ok(ax.iter().zip(&self.rhs).map(|(a, b)| a - b).collect())
    }

    fn check_lengths(&self, u: &[f64], psi: &[f64]) -> Result<(), SystemError> {
        for (what, expected, got) in [("u", self.n_cells, u.len()), ("psi", self.n_panels, psi.len())] {
            if expected != got {
                return Err(SystemError::DimensionMismatch { what, expected, got });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    #[default]
    DirectLu,
    Iterative,
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DirectLu => "direct_lu",
            Self::Iterative => "iterative",
        })
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverDiagnostics {
    pub method: SolverMethod,
    /// `‖𝒜¹x − ℱ¹‖₂ / ‖ℱ¹‖₂` (absolute when `ℱ¹ = 0`).
    pub residual_norm: f64,
    /// 1-norm condition estimate of the factored matrix: the whole system, or the
    /// `𝒱` block when the system is reduced. `None` for the iterative solver.
    pub condition_estimate: Option<f64>,
    pub iterations: usize,
    pub warnings: Vec<NearFieldWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: DomainDensity,
    pub psi: BoundaryDensity,
    pub diagnostics: SolverDiagnostics,
}

fn relative_residual(system: &BdieSystem, u: &[f64], psi: &[f64]) -> Result<f64, SystemError> {
    let r = norm2(&system.residual(u, psi)?);
    let b = norm2(&system.rhs);
    Ok(if b > 0.0 { r / b } else { r })
}

/// Solves with dense LU or unpreconditioned restarted GMRES.
pub fn solve(system: &BdieSystem, method: SolverMethod, tol: f64) -> Result<Solution, SystemError> {
    solve_from(system, method, tol, None)
}

/// As [`solve`], with an initial guess `[u; ψ]` for the iterative method.
pub fn solve_from(
    system: &BdieSystem,
    method: SolverMethod,
    tol: f64,
    initial_guess: Option<&[f64]>,
) -> Result<Solution, SystemError> {
    let nc = system.n_cells;
    let opts = GmresOptions {
        tol,
        ..GmresOptions::default()
    };
    let (u, psi, condition_estimate, iterations) = match (&system.blocks, method) {
        (Blocks::Full(m), SolverMethod::DirectLu) => {
            let lu = lu_factor(m.clone())?;
            let x = lu.solve(&system.rhs)?;
            let cond = lu.condition_estimate()?;
            (x[..nc].to_vec(), x[nc..].to_vec(), Some(cond), 0)
        }
        (Blocks::Full(m), SolverMethod::Iterative) => {
            let out = gmres(m, &system.rhs, initial_guess, &opts)?;
            (out.x[..nc].to_vec(), out.x[nc..].to_vec(), None, out.iterations)
        }
        (Blocks::Reduced { v, cal_v }, method) => {
            let b: Vec<f64> = system.rhs[nc..].iter().map(|r| -r).collect();
            let (psi, cond, iterations) = match method {
                SolverMethod::DirectLu => {
                    let lu = lu_factor(cal_v.clone())?;
                    (lu.solve(&b)?, Some(lu.condition_estimate()?), 0)
                }
                SolverMethod::Iterative => {
                    let out = gmres(cal_v, &b, initial_guess.map(|g| &g[nc..]), &opts)?;
                    (out.x, None, out.iterations)
                }
            };
            let vpsi = v.matvec(&psi)?;
            let u = system.rhs[..nc].iter().zip(&vpsi).map(|(f, v)| f + v).collect();
            (u, psi, cond, iterations)
        }
    };
    let residual_norm = relative_residual(system, &u, &psi)?;
    if !(residual_norm <= tol) {
        return Err(SystemError::ResidualTooLarge { residual: residual_norm, tol });
    }
    Ok(Solution {
        u: DomainDensity(u),
        psi: BoundaryDensity(psi),
        diagnostics: SolverDiagnostics {
            method,
            residual_norm,
            condition_estimate,
            iterations,
            warnings: system.warnings.clone(),
        },
    })
}

/// `u(y) = 𝒫f̃(y) − ℛu(y) + Vψ(y) − Wφ₀(y)` at interior points.
pub fn evaluate_representation(
    solution: &Solution,
    problem: &DirichletProblem,
    points: &[Vec3],
) -> Result<Vec<f64>, SystemError> {
    let asm = problem.assembler()?;
    let eps = asm.context().eps_sing();
    if let Some(p) = points
        .iter()
        .find(|p| !problem.geometry.contains(p) || problem.surface.distance_to(p) <= eps)
    {
        return Err(SystemError::ExteriorPoint { point: (*p).into() });
    }
    let targets = Target::points(points);
    let mut out = newton_term(problem, &asm, &targets)?.values;
    let r = if problem.field.is_constant() {
        vec![0.0; targets.len()]
    } else {
        streaming(&asm, OperatorId::R, &targets, solution.u.values())?
    };
    let v = streaming(&asm, OperatorId::V, &targets, solution.psi.values())?;
    let w = streaming(&asm, OperatorId::W, &targets, problem.dirichlet.values())?;
    for (i, o) in out.iter_mut().enumerate() {
        *o += v[i] - r[i] - w[i];
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub refinement: usize,
    pub h: f64,
    /// `None` when the LU factorization reports a singular matrix.
    pub cond_estimate: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub rows: Vec<ConditionRow>,
}

impl ConditionReport {
    /// `log(κ_{k+1}/κ_k) / log(h_k/h_{k+1})` between consecutive rows.
    pub fn growth_rates(&self) -> Vec<Option<f64>> {
        self.rows
            .windows(2)
            .map(|w| match (w[0].cond_estimate, w[1].cond_estimate) {
                (Some(a), Some(b)) => Some((b / a).ln() / (w[0].h / w[1].h).ln()),
                _ => None,
            })
            .collect()
    }
}

/// 1-norm condition estimates of the full system over a range of refinements.
pub fn condition_report(
    refinements: &[usize],
    build: impl Fn(usize) -> Result<DirichletProblem, SystemError>,
) -> Result<ConditionReport, SystemError> {
    let rows = refinements
        .iter()
        .map(|&refinement| {
            let problem = build(refinement)?;
            let system = assemble_system(&problem)?;
            let (cond_estimate, residual) = match solve(&system, SolverMethod::DirectLu, f64::INFINITY) {
                Ok(s) => (s.diagnostics.condition_estimate, Some(s.diagnostics.residual_norm)),
                Err(SystemError::Linalg(LinalgError::Singular { .. })) => (None, None),
                Err(e) => return Err(e),
            };
            Ok(ConditionRow {
                refinement,
                h: problem.h(),
                cond_estimate,
                residual,
            })
        })
        .collect::<Result<_, SystemError>>()?;
    Ok(ConditionReport { rows })
}

impl Solution {
    /// Both tables: `cell_id,x,y,z,u` then, after a blank line, `panel_id,x,y,z,psi`.
    pub fn write_csv(&self, problem: &DirichletProblem, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "cell_id,x,y,z,u")?;
        for (c, (b, u)) in problem.volume.barycenters().iter().zip(self.u.values()).enumerate() {
            writeln!(w, "{c},{:.12e},{:.12e},{:.12e},{u:.12e}", b[0], b[1], b[2])?;
        }
        writeln!(w)?;
        writeln!(w, "panel_id,x,y,z,psi")?;
        for (j, (c, p)) in problem.surface.centroids().iter().zip(self.psi.values()).enumerate() {
            writeln!(w, "{j},{:.12e},{:.12e},{:.12e},{p:.12e}", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}
