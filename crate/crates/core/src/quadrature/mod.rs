//! Integration of kernels over flat panels and tetrahedral cells.
//!
//! Every kernel is written as `K = s(x)·P_Δ + v(x)·∇_x P_Δ` with smooth `s`, `v`
//! (see [`split`]). Far sources use a fixed rule, near sources are subdivided
//! adaptively, and coincident targets go through the self-term paths.

pub mod rules;
mod singular;

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::CoefficientField;
use crate::geometry::{
    point_tet_distance, point_triangle_distance, tet_diameter, tet_signed_volume, triangle_area,
    triangle_diameter, triangle_quality, Vec3,
};
use crate::kernels::{eval_unchecked, KernelContext, KernelError, KernelId, KernelPoint, FOUR_PI};

pub use rules::{gauss_legendre, split_tet, split_triangle, TetRule, TriangleRule};
pub use singular::{
    conical_duffy, flat_triangle_inverse_distance, panel_duffy, solid_angle, tet_inverse_distance,
    tet_inverse_distance_gradient, tet_inverse_distance_moments, triangle_inverse_distance, triangle_inverse_distance_gradient, CONICAL_POINTS,
    DUFFY_POINTS,
};

static DUNAVANT4: LazyLock<TriangleRule> = LazyLock::new(TriangleRule::dunavant4);
static KEAST2: LazyLock<TetRule> = LazyLock::new(TetRule::keast2);

/// Panels below this quality are rejected by the self-term path.
pub const MIN_SELF_QUALITY: f64 = 1e-6;

/// Uniform subdivision depth used for the bounded remainder of a self term.
pub const SELF_REMAINDER_DEPTH: u32 = 2;

pub const MAX_DEPTH: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("target lies on the source element (distance {distance:e}); use the self-term path")]
    SingularTarget { distance: f64 },
    #[error("kernel {kernel} is not supported on {element}")]
    UnsupportedKernel { kernel: String, element: Element },
    #[error("panel quality {quality:e} is below {MIN_SELF_QUALITY:e}; self term is not computable")]
    DegeneratePanel { quality: f64 },
    #[error("cell has non-positive volume {volume:e}")]
    DegenerateCell { volume: f64 },
    #[error("invalid quadrature policy: {0}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelfTermStrategy {
    /// Singularity subtraction with the exact flat-triangle integral on panels and
    /// the equal-volume ball on cells.
    #[default]
    AnalyticBall,
    /// Duffy-type collapse onto the singular point.
    Duffy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SingularPolicy {
    /// Sources closer than this many element diameters are subdivided.
    pub near_threshold: f64,
    #[serde(rename = "depth")]
    pub max_subdivision_depth: u32,
    pub self_term: SelfTermStrategy,
}

impl Default for SingularPolicy {
    fn default() -> Self {
        Self {
            near_threshold: 2.0,
            max_subdivision_depth: 4,
            self_term: SelfTermStrategy::AnalyticBall,
        }
    }
}

impl SingularPolicy {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.near_threshold >= 1.0) || !self.near_threshold.is_finite() {
            return Err(QuadratureError::InvalidPolicy(format!(
                "near_threshold must be a finite number >= 1, got {}",
                self.near_threshold
            )));
        }
        if self.max_subdivision_depth > MAX_DEPTH {
            return Err(QuadratureError::InvalidPolicy(format!(
                "depth must be at most {MAX_DEPTH}, got {}",
                self.max_subdivision_depth
            )));
        }
        Ok(())
    }
}

/// `(s, v)` with `K = s·P_Δ + v·∇_x P_Δ` at source `x` for target `y`.
pub fn split(id: KernelId, x: &KernelPoint, y: &KernelPoint) -> (f64, Vec3) {
    let (fx, fy) = (&x.field, &y.field);
    match id {
        KernelId::Laplace => (1.0, Vec3::zeros()),
        KernelId::ParametrixX => (1.0 / fx.a, Vec3::zeros()),
        KernelId::ParametrixY => (1.0 / fy.a, Vec3::zeros()),
        KernelId::RemainderX => (-fx.lap_log, -fx.grad_log),
        KernelId::RemainderY => (0.0, fx.grad_a / fy.a),
        KernelId::ConormalX => (-x.normal.dot(&fx.grad_log), x.normal),
        KernelId::LaplaceConormal => (0.0, x.normal),
        KernelId::ConormalY => (0.0, -(fy.a / fx.a) * y.normal),
        KernelId::LaplaceConormalY => (0.0, -y.normal),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Panel,
    Cell,
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Element::Panel => "surface panels",
            Element::Cell => "volume cells",
        })
    }
}

/// Something integrable against a source element: a pointwise value for regular
/// points and its [`split`] for the self-term paths.
pub trait Integrand {
    fn name(&self) -> String;
    fn supports(&self, element: Element) -> bool;
    fn value(&self, x: &KernelPoint, y: &KernelPoint) -> f64;
    fn split(&self, x: &KernelPoint, y: &KernelPoint) -> (f64, Vec3);
}

impl Integrand for KernelId {
    fn name(&self) -> String {
        KernelId::name(*self).to_owned()
    }

    fn supports(&self, element: Element) -> bool {
        match element {
            Element::Panel => !self.is_remainder(),
            Element::Cell => matches!(
                self,
                KernelId::Laplace
                    | KernelId::ParametrixX
                    | KernelId::ParametrixY
                    | KernelId::RemainderX
                    | KernelId::RemainderY
            ),
        }
    }

    fn value(&self, x: &KernelPoint, y: &KernelPoint) -> f64 {
        eval_unchecked(*self, x, y)
    }

    fn split(&self, x: &KernelPoint, y: &KernelPoint) -> (f64, Vec3) {
        split(*self, x, y)
    }
}

impl<T: Integrand + ?Sized> Integrand for &T {
    fn name(&self) -> String {
        (**self).name()
    }

    fn supports(&self, element: Element) -> bool {
        (**self).supports(element)
    }

    fn value(&self, x: &KernelPoint, y: &KernelPoint) -> f64 {
        (**self).value(x, y)
    }

    fn split(&self, x: &KernelPoint, y: &KernelPoint) -> (f64, Vec3) {
        (**self).split(x, y)
    }
}

fn require(k: &impl Integrand, element: Element) -> Result<(), QuadratureError> {
    if k.supports(element) {
        Ok(())
    } else {
        Err(QuadratureError::UnsupportedKernel {
            kernel: k.name(),
            element,
        })
    }
}

/// `dist(target, t) < threshold·diam(t)`, with a bounding-sphere shortcut.
fn is_near_triangle(t: &[Vec3; 3], target: &Vec3, threshold: f64) -> bool {
    let diam = triangle_diameter(&t[0], &t[1], &t[2]);
    let c = (t[0] + t[1] + t[2]) / 3.0;
    let radius = t.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
    let bound = threshold * diam;
    (target - c).norm() - radius < bound && point_triangle_distance(target, &t[0], &t[1], &t[2]) < bound
}

fn is_near_tet(t: &[Vec3; 4], target: &Vec3, threshold: f64) -> bool {
    let diam = tet_diameter(t);
    let c = (t[0] + t[1] + t[2] + t[3]) / 4.0;
    let radius = t.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
    let bound = threshold * diam;
    (target - c).norm() - radius < bound && point_tet_distance(target, t) < bound
}

/// Adaptive integration of `f` over a triangle: sub-triangles closer to `target`
/// than `near_threshold` diameters are split 4-way until `depth` is exhausted.
pub fn integrate_triangle_adaptive(
    t: &[Vec3; 3],
    target: &Vec3,
    policy: &SingularPolicy,
    rule: &TriangleRule,
    f: &impl Fn(&Vec3) -> f64,
) -> f64 {
    fn go(
        t: &[Vec3; 3],
        target: &Vec3,
        policy: &SingularPolicy,
        rule: &TriangleRule,
        f: &impl Fn(&Vec3) -> f64,
        depth: u32,
    ) -> f64 {
        if depth < policy.max_subdivision_depth && is_near_triangle(t, target, policy.near_threshold) {
            return split_triangle(t)
                .iter()
                .map(|c| go(c, target, policy, rule, f, depth + 1))
                .sum();
        }
        let area = triangle_area(&t[0], &t[1], &t[2]);
        rule.map(t, area).map(|(x, w)| w * f(&x)).sum()
    }
    go(t, target, policy, rule, f, 0)
}

/// Cell analogue of [`integrate_triangle_adaptive`] with octasection.
pub fn integrate_tet_adaptive(
    t: &[Vec3; 4],
    target: &Vec3,
    policy: &SingularPolicy,
    rule: &TetRule,
    f: &impl Fn(&Vec3) -> f64,
) -> f64 {
    fn go(
        t: &[Vec3; 4],
        target: &Vec3,
        policy: &SingularPolicy,
        rule: &TetRule,
        f: &impl Fn(&Vec3) -> f64,
        depth: u32,
    ) -> f64 {
        if depth < policy.max_subdivision_depth && is_near_tet(t, target, policy.near_threshold) {
            return split_tet(t)
                .iter()
                .map(|c| go(c, target, policy, rule, f, depth + 1))
                .sum();
        }
        let vol = tet_signed_volume(&t[0], &t[1], &t[2], &t[3]).abs();
        rule.map(t, vol).map(|(x, w)| w * f(&x)).sum()
    }
    go(t, target, policy, rule, f, 0)
}

/// Uniform `depth`-fold midpoint refinement of a triangle.
pub fn integrate_triangle_uniform(t: &[Vec3; 3], depth: u32, rule: &TriangleRule, f: &impl Fn(&Vec3) -> f64) -> f64 {
    if depth == 0 {
        let area = triangle_area(&t[0], &t[1], &t[2]);
        return rule.map(t, area).map(|(x, w)| w * f(&x)).sum();
    }
    split_triangle(t)
        .iter()
        .map(|c| integrate_triangle_uniform(c, depth - 1, rule, f))
        .sum()
}

pub fn integrate_tet_uniform(t: &[Vec3; 4], depth: u32, rule: &TetRule, f: &impl Fn(&Vec3) -> f64) -> f64 {
    if depth == 0 {
        let vol = tet_signed_volume(&t[0], &t[1], &t[2], &t[3]).abs();
        return rule.map(t, vol).map(|(x, w)| w * f(&x)).sum();
    }
    split_tet(t)
        .iter()
        .map(|c| integrate_tet_uniform(c, depth - 1, rule, f))
        .sum()
}

/// A surface panel with its far-field samples precomputed.
#[derive(Debug, Clone)]
pub struct PanelSource {
    pub corners: [Vec3; 3],
    pub normal: Vec3,
    pub centroid: Vec3,
    pub area: f64,
    pub diameter: f64,
    /// Largest corner distance from the centroid.
    pub radius: f64,
    pub quality: f64,
    far: Vec<(KernelPoint, f64)>,
}

impl PanelSource {
    pub fn new(field: &CoefficientField, corners: [Vec3; 3], normal: Vec3) -> Self {
        let centroid = (corners[0] + corners[1] + corners[2]) / 3.0;
        let area = triangle_area(&corners[0], &corners[1], &corners[2]);
        let far = DUNAVANT4
            .map(&corners, area)
            .map(|(x, w)| (KernelPoint::with_normal(field, x, normal), w))
            .collect();
        Self {
            corners,
            normal,
            centroid,
            area,
            diameter: triangle_diameter(&corners[0], &corners[1], &corners[2]),
            radius: corners.iter().map(|c| (c - centroid).norm()).fold(0.0, f64::max),
            quality: triangle_quality(&corners[0], &corners[1], &corners[2]),
            far,
        }
    }

    fn is_far(&self, target: &Vec3, policy: &SingularPolicy) -> bool {
        (target - self.centroid).norm() - self.radius > policy.near_threshold * self.diameter
    }
}

/// A volume cell with its far-field samples precomputed.
#[derive(Debug, Clone)]
pub struct CellSource {
    pub corners: [Vec3; 4],
    pub barycenter: Vec3,
    pub volume: f64,
    pub diameter: f64,
    pub radius: f64,
    far: Vec<(KernelPoint, f64)>,
}

impl CellSource {
    pub fn new(field: &CoefficientField, corners: [Vec3; 4]) -> Self {
        let barycenter = (corners[0] + corners[1] + corners[2] + corners[3]) / 4.0;
        let volume = tet_signed_volume(&corners[0], &corners[1], &corners[2], &corners[3]).abs();
        let far = KEAST2
            .map(&corners, volume)
            .map(|(x, w)| (KernelPoint::new(field, x), w))
            .collect();
        Self {
            corners,
            barycenter,
            volume,
            diameter: tet_diameter(&corners),
            radius: corners.iter().map(|c| (c - barycenter).norm()).fold(0.0, f64::max),
            far,
        }
    }

    fn is_far(&self, target: &Vec3, policy: &SingularPolicy) -> bool {
        (target - self.barycenter).norm() - self.radius > policy.near_threshold * self.diameter
    }
}

fn pointwise<'a>(
    k: &'a impl Integrand,
    ctx: &'a KernelContext<'a>,
    normal: Vec3,
    target: &'a KernelPoint,
) -> impl Fn(&Vec3) -> f64 + 'a {
    move |x: &Vec3| k.value(&KernelPoint::with_normal(ctx.field(), *x, normal), target)
}

/// `∫_panel K(x, y) dS(x)` for a target off the panel.
pub fn integrate_panel(
    k: impl Integrand,
    ctx: &KernelContext,
    src: &PanelSource,
    target: &KernelPoint,
    policy: &SingularPolicy,
) -> Result<f64, QuadratureError> {
    require(&k, Element::Panel)?;
    if src.is_far(&target.x, policy) {
        return Ok(src.far.iter().map(|(x, w)| w * k.value(x, target)).sum());
    }
    let c = &src.corners;
    let distance = point_triangle_distance(&target.x, &c[0], &c[1], &c[2]);
    if distance <= ctx.eps_sing() {
        return Err(QuadratureError::SingularTarget { distance });
    }
    let f = pointwise(&k, ctx, src.normal, target);
    Ok(integrate_triangle_adaptive(c, &target.x, policy, &*DUNAVANT4, &f))
}

/// [`integrate_panel`] together with an error estimate: the difference to the same
/// subdivision tree evaluated with a degree-8 rule.
pub fn integrate_panel_estimate(
    k: impl Integrand,
    ctx: &KernelContext,
    src: &PanelSource,
    target: &KernelPoint,
    policy: &SingularPolicy,
) -> Result<(f64, f64), QuadratureError> {
    let value = integrate_panel(&k, ctx, src, target, policy)?;
    let f = pointwise(&k, ctx, src.normal, target);
    let fine = integrate_triangle_adaptive(&src.corners, &target.x, policy, &TriangleRule::collapsed_gauss(5), &f);
    Ok((value, (value - fine).abs()))
}

/// Self term `∫_panel K(x, c) dS(x)` at the panel centroid `c`.
///
/// On a flat panel `n·∇_x P_Δ` vanishes, so only the `s·P_Δ` part of [`split`]
/// survives; `s(c)` multiplies the exact integral of `1/r` and the bounded
/// difference `(s(x) − s(c))·P_Δ` is integrated numerically.
pub fn integrate_panel_self(
    k: impl Integrand,
    ctx: &KernelContext,
    src: &PanelSource,
    target: &KernelPoint,
    policy: &SingularPolicy,
) -> Result<f64, QuadratureError> {
    require(&k, Element::Panel)?;
    if !(src.quality >= MIN_SELF_QUALITY) {
        return Err(QuadratureError::DegeneratePanel { quality: src.quality });
    }
    let c = target.x;
    let point = |x: &Vec3| KernelPoint::with_normal(ctx.field(), *x, src.normal);
    let (s_c, v_c) = k.split(&point(&c), target);
    let smooth = |x: &Vec3| {
        let (s, v) = k.split(&point(x), target);
        (s, v - v_c)
    };
    match policy.self_term {
        SelfTermStrategy::AnalyticBall => {
            let singular = -s_c * flat_triangle_inverse_distance(&src.corners, &c) / FOUR_PI;
            let rest = integrate_triangle_uniform(&src.corners, SELF_REMAINDER_DEPTH, &*DUNAVANT4, &|x| {
                let d = x - c;
                let r = d.norm();
                let (s, dv) = smooth(x);
                -(s - s_c) / (FOUR_PI * r) + dv.dot(&d) / (FOUR_PI * r * r * r)
            });
            Ok(singular + rest)
        }
        SelfTermStrategy::Duffy => Ok(panel_duffy(&src.corners, &c, DUFFY_POINTS, &|x| {
            let d = x - c;
            let r = d.norm();
            let (s, v) = k.split(&point(x), target);
            -s / (FOUR_PI * r) + v.dot(&d) / (FOUR_PI * r * r * r)
        })),
    }
}

/// `∫_cell K(x, y) dx` for any target other than the cell's own barycenter.
///
/// Near cells use singularity subtraction (see `integrate_cell_near`).
/// Targets on the cell boundary (face centroids of linked panels) or inside
/// the cell are integrated with a conical Duffy rule whose apex is the target.
pub fn integrate_cell(
    k: impl Integrand,
    ctx: &KernelContext,
    src: &CellSource,
    target: &KernelPoint,
    policy: &SingularPolicy,
) -> Result<f64, QuadratureError> {
    require(&k, Element::Cell)?;
    if src.is_far(&target.x, policy) {
        return Ok(src.far.iter().map(|(x, w)| w * k.value(x, target)).sum());
    }
    let distance = point_tet_distance(&target.x, &src.corners);
    if distance > policy.near_threshold * src.diameter {
        return Ok(src.far.iter().map(|(x, w)| w * k.value(x, target)).sum());
    }
    if distance <= ctx.eps_sing() {
        let f = pointwise(&k, ctx, Vec3::zeros(), target);
        return Ok(conical_duffy(&src.corners, &target.x, CONICAL_POINTS, &f));
    }
    Ok(integrate_cell_near(&k, ctx, src, target, policy))
}

/// Near cells: the split frozen at the target is integrated in closed form and
/// the bounded rest adaptively, subdividing sub-cells closer than one diameter.
fn integrate_cell_near(
    k: &impl Integrand,
    ctx: &KernelContext,
    src: &CellSource,
    target: &KernelPoint,
    policy: &SingularPolicy,
) -> f64 {
    let y = target.x;
    let (s_y, v_y) = k.split(&KernelPoint::new(ctx.field(), y), target);
    let (inv, inv_grad) = tet_inverse_distance_moments(&src.corners, &y);
    let frozen = -(s_y * inv + v_y.dot(&inv_grad)) / FOUR_PI;
    let inner = SingularPolicy {
        near_threshold: 1.0,
        ..*policy
    };
    let rest = integrate_tet_adaptive(&src.corners, &y, &inner, &*KEAST2, &|x| {
        let d = x - y;
        let r = d.norm();
        let kx = k.value(&KernelPoint::new(ctx.field(), *x), target);
        kx + s_y / (FOUR_PI * r) - v_y.dot(&d) / (FOUR_PI * r * r * r)
    });
    frozen + rest
}

/// Self term `∫_cell K(x, b) dx` at the cell barycenter `b`.
///
/// With the ball strategy the frozen `s(b)·P_Δ` part is replaced by its integral
/// over the ball of equal volume, `−s(b)·R²/2`, the frozen `v(b)·∇P_Δ` part is
/// dropped (it is odd, so it vanishes on the ball), and the differences are
/// integrated numerically over the cell.
pub fn integrate_cell_self(
    k: impl Integrand,
    ctx: &KernelContext,
    src: &CellSource,
    target: &KernelPoint,
    policy: &SingularPolicy,
) -> Result<f64, QuadratureError> {
    require(&k, Element::Cell)?;
    if !(src.volume > 0.0) {
        return Err(QuadratureError::DegenerateCell { volume: src.volume });
    }
    let b = target.x;
    let point = |x: &Vec3| KernelPoint::new(ctx.field(), *x);
    match policy.self_term {
        SelfTermStrategy::AnalyticBall => {
            let (s_b, v_b) = k.split(&point(&b), target);
            let radius = (3.0 * src.volume / (4.0 * std::f64::consts::PI)).cbrt();
            let ball = -s_b * radius * radius / 2.0;
            let rest = integrate_tet_uniform(&src.corners, SELF_REMAINDER_DEPTH, &*KEAST2, &|x| {
                let d = x - b;
                let r = d.norm();
                let (s, v) = k.split(&point(x), target);
                -(s - s_b) / (FOUR_PI * r) + (v - v_b).dot(&d) / (FOUR_PI * r * r * r)
            });
            Ok(ball + rest)
        }
        SelfTermStrategy::Duffy => {
            let f = pointwise(&k, ctx, Vec3::zeros(), target);
            Ok(conical_duffy(&src.corners, &b, CONICAL_POINTS, &f))
        }
    }
}

#[cfg(test)]
mod tests;
