//! Discrete potential operators with piecewise-constant densities and point
//! collocation.
//!
//! Each operator can be assembled on two paths: [`AssemblyPath::Direct`] integrates
//! the parametrix kernels, [`AssemblyPath::Relation`] integrates the harmonic
//! kernels reweighted by the coefficient, on the same quadrature points.

use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::CoefficientField;
use crate::geometry::Vec3;
use crate::kernels::{eval_unchecked, KernelContext, KernelId, KernelPoint, FOUR_PI};
use crate::linalg::DenseMatrix;
use crate::mesh::{SurfaceMesh, VolumeMesh};
use crate::quadrature::{
    integrate_cell, integrate_cell_self, integrate_panel, integrate_panel_self, split, CellSource, Element,
    Integrand, PanelSource, QuadratureError, SingularPolicy,
};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("{operator}: row {row}, column {col}: {source}")]
    Quadrature {
        operator: OperatorId,
        row: usize,
        col: usize,
        #[source]
        source: QuadratureError,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} needs a volume mesh")]
    MissingVolume(OperatorId),
    #[error("{operator} needs targets with unit normals (row {row} has none)")]
    MissingNormal { operator: OperatorId, row: usize },
    #[error("{operator} is not available for the {family} kernels")]
    Unsupported { operator: OperatorId, family: KernelFamily },
    #[error("matrix entries are not finite")]
    NonFinite,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorId {
    /// Single layer, `Vρ = −∫P ρ dS`.
    V,
    /// Double layer, `Wρ = −∫T_x P ρ dS`.
    W,
    /// Direct value of the single layer at centroids.
    CalV,
    /// Direct value of the double layer at centroids.
    CalW,
    /// Direct value of the conormal derivative of V at centroids.
    CalWPrime,
    /// Volume potential, `𝒫ρ = ∫P ρ dx`.
    P,
    /// Remainder potential, `ℛρ = ∫R ρ dx`.
    R,
}

impl OperatorId {
    pub fn name(self) -> &'static str {
        match self {
            OperatorId::V => "V",
            OperatorId::W => "W",
            OperatorId::CalV => "calV",
            OperatorId::CalW => "calW",
            OperatorId::CalWPrime => "calWprime",
            OperatorId::P => "P",
            OperatorId::R => "R",
        }
    }

    fn kind(self) -> Kind {
        match self {
            OperatorId::V | OperatorId::CalV => Kind::Single,
            OperatorId::W | OperatorId::CalW => Kind::Double,
            OperatorId::CalWPrime => Kind::AdjointDouble,
            OperatorId::P => Kind::Newton,
            OperatorId::R => Kind::Remainder,
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Single,
    Double,
    AdjointDouble,
    Newton,
    Remainder,
}

impl Kind {
    fn element(self) -> Element {
        match self {
            Kind::Newton | Kind::Remainder => Element::Cell,
            _ => Element::Panel,
        }
    }

    /// Sign in front of the integral in the operator definition.
    fn sign(self) -> f64 {
        match self.element() {
            Element::Panel => -1.0,
            Element::Cell => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyPath {
    #[default]
    Direct,
    Relation,
}

impl fmt::Display for AssemblyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssemblyPath::Direct => "direct",
            AssemblyPath::Relation => "relation",
        })
    }
}

/// Which fundamental object the kernels are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `P^x = P_Δ/a(x)`
    ParametrixX,
    /// `P^y = P_Δ/a(y)`
    ParametrixY,
    /// `P_Δ`, i.e. the operators for `a ≡ 1`.
    Harmonic,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::ParametrixX => "parametrix_x",
            KernelFamily::ParametrixY => "parametrix_y",
            KernelFamily::Harmonic => "harmonic",
        })
    }
}

/// Relation-path integrands: harmonic kernels combined with coefficient factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relation(Kind);

impl Relation {
    /// `∇_y P_Δ(x − y)`
    fn laplace_gradient_y(x: &Vec3, y: &Vec3) -> Vec3 {
        let d = x - y;
        let r = d.norm();
        -d / (FOUR_PI * r * r * r)
    }
}

impl Integrand for Relation {
    fn name(&self) -> String {
        format!("relation:{:?}", self.0).to_lowercase()
    }

    fn supports(&self, element: Element) -> bool {
        self.0.element() == element
    }

    fn value(&self, x: &KernelPoint, y: &KernelPoint) -> f64 {
        let lap = || eval_unchecked(KernelId::Laplace, x, y);
        match self.0 {
            // V ρ = V_Δ(ρ/a), 𝒫ρ = 𝒫_Δ(ρ/a)
            Kind::Single | Kind::Newton => lap() / x.field.a,
            // W ρ = W_Δ ρ − V_Δ(ρ ∂_n ln a)
            Kind::Double => {
                eval_unchecked(KernelId::LaplaceConormal, x, y) - lap() * x.normal.dot(&x.field.grad_log)
            }
            // 𝒲′ρ = a 𝒲′_Δ(ρ/a)
            Kind::AdjointDouble => y.field.a * eval_unchecked(KernelId::LaplaceConormalY, x, y) / x.field.a,
            // ℛρ = ∇_y·𝒫_Δ(ρ∇ln a) − 𝒫_Δ(ρ Δln a)
            Kind::Remainder => {
                x.field.grad_log.dot(&Self::laplace_gradient_y(&x.x, &y.x)) - x.field.lap_log * lap()
            }
        }
    }

    fn split(&self, x: &KernelPoint, y: &KernelPoint) -> (f64, Vec3) {
        let (ls, lv) = split(KernelId::Laplace, x, y);
        match self.0 {
            Kind::Single | Kind::Newton => (ls / x.field.a, lv / x.field.a),
            Kind::Double => {
                let (cs, cv) = split(KernelId::LaplaceConormal, x, y);
                let w = x.normal.dot(&x.field.grad_log);
                (cs - w * ls, cv - w * lv)
            }
            Kind::AdjointDouble => {
                let (cs, cv) = split(KernelId::LaplaceConormalY, x, y);
                let w = y.field.a / x.field.a;
                (w * cs, w * cv)
            }
            // ∇_y P_Δ = −∇_x P_Δ
            Kind::Remainder => (-x.field.lap_log * ls, -x.field.grad_log),
        }
    }
}

/// The integrand of one matrix row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKernel {
    Kernel(KernelId),
    Relation(Relation),
    Zero,
}

impl Integrand for RowKernel {
    fn name(&self) -> String {
        match self {
            RowKernel::Kernel(k) => Integrand::name(k),
            RowKernel::Relation(r) => r.name(),
            RowKernel::Zero => "zero".into(),
        }
    }

    fn supports(&self, element: Element) -> bool {
        match self {
            RowKernel::Kernel(k) => k.supports(element),
            RowKernel::Relation(r) => r.supports(element),
            RowKernel::Zero => true,
        }
    }

    #[inline]
    fn value(&self, x: &KernelPoint, y: &KernelPoint) -> f64 {
        match self {
            RowKernel::Kernel(k) => eval_unchecked(*k, x, y),
            RowKernel::Relation(r) => r.value(x, y),
            RowKernel::Zero => 0.0,
        }
    }

    fn split(&self, x: &KernelPoint, y: &KernelPoint) -> (f64, Vec3) {
        match self {
            RowKernel::Kernel(k) => split(*k, x, y),
            RowKernel::Relation(r) => r.split(x, y),
            RowKernel::Zero => (0.0, Vec3::zeros()),
        }
    }
}

fn row_kernel(op: OperatorId, family: KernelFamily, path: AssemblyPath) -> Result<RowKernel, PotentialError> {
    let kind = op.kind();
    let unsupported = Err(PotentialError::Unsupported { operator: op, family });
    Ok(match (family, path) {
        (KernelFamily::ParametrixX, AssemblyPath::Relation) => RowKernel::Relation(Relation(kind)),
        (KernelFamily::ParametrixX, AssemblyPath::Direct) => RowKernel::Kernel(match kind {
            Kind::Single | Kind::Newton => KernelId::ParametrixX,
            Kind::Double => KernelId::ConormalX,
            Kind::AdjointDouble => KernelId::ConormalY,
            Kind::Remainder => KernelId::RemainderX,
        }),
        (KernelFamily::ParametrixY, AssemblyPath::Direct) => RowKernel::Kernel(match kind {
            Kind::Single | Kind::Newton => KernelId::ParametrixY,
            Kind::Remainder => KernelId::RemainderY,
            Kind::Double | Kind::AdjointDouble => return unsupported,
        }),
        (KernelFamily::Harmonic, AssemblyPath::Direct) => match kind {
            Kind::Single | Kind::Newton => RowKernel::Kernel(KernelId::Laplace),
            Kind::Double => RowKernel::Kernel(KernelId::LaplaceConormal),
            Kind::AdjointDouble => RowKernel::Kernel(KernelId::LaplaceConormalY),
            Kind::Remainder => RowKernel::Zero,
        },
        (_, AssemblyPath::Relation) => return unsupported,
    })
}

/// Where a collocation point comes from; decides when the self-term path is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Free,
    Barycenter(usize),
    Centroid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub x: Vec3,
    /// Unit normal for centroid targets, zero otherwise.
    pub normal: Vec3,
    pub kind: TargetKind,
}

impl Target {
    pub fn free(x: Vec3) -> Self {
        Self {
            x,
            normal: Vec3::zeros(),
            kind: TargetKind::Free,
        }
    }

    /// A free point carrying a direction; used for one-sided conormal limits.
    pub fn free_with_normal(x: Vec3, normal: Vec3) -> Self {
        Self {
            x,
            normal,
            kind: TargetKind::Free,
        }
    }

    pub fn points(xs: &[Vec3]) -> Vec<Self> {
        xs.iter().copied().map(Self::free).collect()
    }

    pub fn barycenters(volume: &VolumeMesh) -> Vec<Self> {
        volume
            .barycenters()
            .iter()
            .enumerate()
            .map(|(c, &x)| Self {
                x,
                normal: Vec3::zeros(),
                kind: TargetKind::Barycenter(c),
            })
            .collect()
    }

    pub fn centroids(surface: &SurfaceMesh) -> Vec<Self> {
        surface
            .centroids()
            .iter()
            .zip(surface.normals())
            .enumerate()
            .map(|(j, (&x, &normal))| Self {
                x,
                normal,
                kind: TargetKind::Centroid(j),
            })
            .collect()
    }
}

/// Piecewise-constant density on the boundary panels.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensity(pub Vec<f64>);

/// Piecewise-constant density on the volume cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDensity(pub Vec<f64>);

macro_rules! density {
    ($t:ident, $mesh:ty, $pts:ident) => {
        impl $t {
            pub fn new(mesh: &$mesh, values: Vec<f64>) -> Result<Self, PotentialError> {
                if values.len() != mesh.len() {
                    return Err(PotentialError::DimensionMismatch {
                        expected: mesh.len(),
                        got: values.len(),
                    });
                }
                Ok(Self(values))
            }

            pub fn constant(mesh: &$mesh, c: f64) -> Self {
                Self(vec![c; mesh.len()])
            }

            /// Samples `f` at the collocation points.
            pub fn sample(mesh: &$mesh, f: impl Fn(&Vec3) -> f64) -> Self {
                Self(mesh.$pts().iter().map(f).collect())
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn values(&self) -> &[f64] {
                &self.0
            }
        }

        impl AsRef<[f64]> for $t {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

density!(BoundaryDensity, SurfaceMesh, centroids);
density!(DomainDensity, VolumeMesh, barycenters);

/// A dense operator matrix: rows are targets, columns source elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrix {
    pub operator: OperatorId,
    pub path: AssemblyPath,
    pub family: KernelFamily,
    matrix: DenseMatrix,
}

impl PotentialMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn apply(&self, density: impl AsRef<[f64]>) -> Result<Vec<f64>, PotentialError> {
        let rho = density.as_ref();
        if rho.len() != self.cols() {
            return Err(PotentialError::DimensionMismatch {
                expected: self.cols(),
                got: rho.len(),
            });
        }
        Ok(self.matrix.matvec(rho).expect("dimension checked"))
    }

    /// Writes the dims as two little-endian `u64`, then the entries row-major as `f64`.
    pub fn write_binary(&self, mut w: impl Write) -> Result<(), PotentialError> {
        w.write_all(&(self.rows() as u64).to_le_bytes())?;
        w.write_all(&(self.cols() as u64).to_le_bytes())?;
        for v in self.matrix.as_slice() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Reads a matrix written by [`PotentialMatrix::write_binary`].
pub fn read_binary_matrix(mut r: impl Read) -> Result<DenseMatrix, PotentialError> {
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let rows = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let cols = u64::from_le_bytes(b8) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        r.read_exact(&mut b8)?;
        data.push(f64::from_le_bytes(b8));
    }
    DenseMatrix::from_row_major(rows, cols, data).map_err(|_| PotentialError::NonFinite)
}

/// Assembles potential matrices over fixed meshes and coefficient.
///
/// Source elements (with their far-field coefficient samples) are prepared once;
/// rows are computed independently and in parallel.
#[derive(Debug)]
pub struct Assembler<'a> {
    surface: &'a SurfaceMesh,
    volume: Option<&'a VolumeMesh>,
    policy: SingularPolicy,
    ctx: KernelContext<'a>,
    panels: Vec<PanelSource>,
    cells: Vec<CellSource>,
}

impl<'a> Assembler<'a> {
    pub fn new(
        surface: &'a SurfaceMesh,
        volume: Option<&'a VolumeMesh>,
        field: &'a CoefficientField,
        policy: SingularPolicy,
    ) -> Result<Self, QuadratureError> {
        policy.validate()?;
        let bbox = surface.bounding_box();
        let ctx = KernelContext::new(field, (bbox.max - bbox.min).norm());
        let panels = (0..surface.len())
            .into_par_iter()
            .map(|j| PanelSource::new(field, surface.corners(j), surface.normal(j)))
            .collect();
        let cells = volume
            .map(|v| {
                (0..v.len())
                    .into_par_iter()
                    .map(|c| CellSource::new(field, v.corners(c)))
                    .collect()
            })
            .unwrap_or_default();
        Ok(Self {
            surface,
            volume,
            policy,
            ctx,
            panels,
            cells,
        })
    }

    pub fn surface(&self) -> &'a SurfaceMesh {
        self.surface
    }

    pub fn volume(&self) -> Option<&'a VolumeMesh> {
        self.volume
    }

    pub fn field(&self) -> &'a CoefficientField {
        self.ctx.field()
    }

    pub fn policy(&self) -> &SingularPolicy {
        &self.policy
    }

    pub fn context(&self) -> &KernelContext<'a> {
        &self.ctx
    }

    pub fn centroid_targets(&self) -> Vec<Target> {
        Target::centroids(self.surface)
    }

    pub fn barycenter_targets(&self) -> Result<Vec<Target>, PotentialError> {
        Ok(Target::barycenters(self.volume.ok_or(PotentialError::MissingVolume(OperatorId::P))?))
    }

    /// Number of source elements of `op`.
    pub fn source_count(&self, op: OperatorId) -> usize {
        match op.kind().element() {
            Element::Panel => self.panels.len(),
            Element::Cell => self.cells.len(),
        }
    }

    fn check(&self, op: OperatorId, targets: &[Target]) -> Result<(), PotentialError> {
        if op.kind().element() == Element::Cell && self.volume.is_none() {
            return Err(PotentialError::MissingVolume(op));
        }
        if op.kind() == Kind::AdjointDouble {
            if let Some(row) = targets.iter().position(|t| (t.normal.norm() - 1.0).abs() > 1e-8) {
                return Err(PotentialError::MissingNormal { operator: op, row });
            }
        }
        Ok(())
    }

    /// Writes `scale ×` row `row` (target `t`) of `op` into `out`.
    fn fill_row(
        &self,
        op: OperatorId,
        kernel: RowKernel,
        row: usize,
        t: &Target,
        scale: f64,
        out: &mut [f64],
    ) -> Result<(), PotentialError> {
        let kind = op.kind();
        let factor = scale * kind.sign();
        let target = KernelPoint::with_normal(self.ctx.field(), t.x, t.normal);
        let wrap = |col: usize| move |source| PotentialError::Quadrature { operator: op, row, col, source };
        if kernel == RowKernel::Zero {
            out.iter_mut().for_each(|v| *v = 0.0);
            return Ok(());
        }
        match kind.element() {
            Element::Panel => {
                for (j, (src, o)) in self.panels.iter().zip(out.iter_mut()).enumerate() {
                    let v = if t.kind == TargetKind::Centroid(j) {
                        integrate_panel_self(kernel, &self.ctx, src, &target, &self.policy)
                    } else {
                        integrate_panel(kernel, &self.ctx, src, &target, &self.policy)
                    }
                    .map_err(wrap(j))?;
                    *o = factor * v;
                }
            }
            Element::Cell => {
                for (c, (src, o)) in self.cells.iter().zip(out.iter_mut()).enumerate() {
                    let v = if t.kind == TargetKind::Barycenter(c) {
                        integrate_cell_self(kernel, &self.ctx, src, &target, &self.policy)
                    } else {
                        integrate_cell(kernel, &self.ctx, src, &target, &self.policy)
                    }
                    .map_err(wrap(c))?;
                    *o = factor * v;
                }
            }
        }
        Ok(())
    }

    /// Fills `out` (row-major, `targets.len() × source_count(op)`) with `scale ×`
    /// the matrix of `op`. Lets callers place a block inside a larger matrix via
    /// `stride` and `offset`.
    pub fn fill_block(
        &self,
        op: OperatorId,
        family: KernelFamily,
        path: AssemblyPath,
        targets: &[Target],
        scale: f64,
        out: &mut [f64],
        stride: usize,
        offset: usize,
    ) -> Result<(), PotentialError> {
        self.check(op, targets)?;
        let kernel = row_kernel(op, family, path)?;
        let cols = self.source_count(op);
        if out.len() < targets.len() * stride || offset + cols > stride {
            return Err(PotentialError::DimensionMismatch {
                expected: targets.len() * stride,
                got: out.len(),
            });
        }
        out.par_chunks_mut(stride)
            .zip(targets.par_iter())
            .enumerate()
            .try_for_each(|(i, (row, t))| self.fill_row(op, kernel, i, t, scale, &mut row[offset..offset + cols]))
    }

    /// Full matrix of `op` for the given kernel family and path.
    pub fn assemble_with(
        &self,
        op: OperatorId,
        family: KernelFamily,
        path: AssemblyPath,
        targets: &[Target],
    ) -> Result<PotentialMatrix, PotentialError> {
        self.check(op, targets)?;
        let cols = self.source_count(op);
        let mut m = DenseMatrix::zeros(targets.len(), cols);
        if cols > 0 {
            self.fill_block(op, family, path, targets, 1.0, m.as_mut_slice(), cols, 0)?;
        }
        if !m.is_finite() {
            return Err(PotentialError::NonFinite);
        }
        Ok(PotentialMatrix {
            operator: op,
            path,
            family,
            matrix: m,
        })
    }

    /// Matrix of `op` with the `P^x` kernels.
    pub fn assemble(&self, op: OperatorId, targets: &[Target], path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble_with(op, KernelFamily::ParametrixX, path, targets)
    }

    /// The `a ≡ 1` counterpart of `op`.
    pub fn assemble_harmonic(&self, op: OperatorId, targets: &[Target]) -> Result<PotentialMatrix, PotentialError> {
        self.assemble_with(op, KernelFamily::Harmonic, AssemblyPath::Direct, targets)
    }

    pub fn assemble_v(&self, targets: &[Target], path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::V, targets, path)
    }

    pub fn assemble_w(&self, targets: &[Target], path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::W, targets, path)
    }

    pub fn assemble_cal_v(&self, path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::CalV, &self.centroid_targets(), path)
    }

    pub fn assemble_cal_w(&self, path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::CalW, &self.centroid_targets(), path)
    }

    pub fn assemble_cal_w_prime(&self, path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::CalWPrime, &self.centroid_targets(), path)
    }

    pub fn assemble_p(&self, targets: &[Target], path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::P, targets, path)
    }

    pub fn assemble_r(&self, targets: &[Target], path: AssemblyPath) -> Result<PotentialMatrix, PotentialError> {
        self.assemble(OperatorId::R, targets, path)
    }

    /// `op` applied to `density` at `targets` without storing the matrix.
    pub fn apply_streaming(
        &self,
        op: OperatorId,
        family: KernelFamily,
        path: AssemblyPath,
        targets: &[Target],
        density: impl AsRef<[f64]>,
    ) -> Result<Vec<f64>, PotentialError> {
        self.check(op, targets)?;
        let kernel = row_kernel(op, family, path)?;
        let rho = density.as_ref();
        let cols = self.source_count(op);
        if rho.len() != cols {
            return Err(PotentialError::DimensionMismatch {
                expected: cols,
                got: rho.len(),
            });
        }
        targets
            .par_iter()
            .enumerate()
            .map_init(
                || vec![0.0; cols],
                |row, (i, t)| {
                    self.fill_row(op, kernel, i, t, 1.0, row)?;
                    Ok(crate::linalg::dot(row, rho))
                },
            )
            .collect()
    }
}

/// With `W = 𝒲 − ½I` on the trace, the interior trace of the double layer.
pub fn interior_trace_of_double_layer(cal_w: &PotentialMatrix) -> DenseMatrix {
    let mut m = cal_w.matrix().clone();
    for i in 0..m.rows().min(m.cols()) {
        m.set(i, i, m.get(i, i) - 0.5);
    }
    m
}
