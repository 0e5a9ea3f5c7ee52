//! Pointwise kernels of the parametrix formulation.
//!
//! Throughout, `x` is the integration (source) variable and `y` the target. The
//! parametrix `P^x(x,y) = P_Δ(x−y)/a(x)` satisfies `𝒜_x P^x = δ + R^x` with
//! `R^x = −Σᵢ ∂ᵢ(∂ᵢ ln a · P_Δ)`, evaluated here in the expanded form
//! `−Δln a(x)·P_Δ − ∇ln a(x)·∇_x P_Δ`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::CoefficientField;
use crate::geometry::Vec3;

pub const FOUR_PI: f64 = 4.0 * PI;

/// Relative separation (times the domain diameter) below which kernels refuse to evaluate.
pub const SINGULAR_RELATIVE_SEPARATION: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel evaluated at separation {distance:e} below the singular threshold {threshold:e}; use the self-term quadrature")]
    Singular { distance: f64, threshold: f64 },
    #[error("unknown kernel id {0:?}")]
    UnknownId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelId {
    /// `P_Δ(x−y) = −1/(4π|x−y|)`
    Laplace,
    /// `P_Δ/a(x)`
    ParametrixX,
    /// `P_Δ/a(y)`
    ParametrixY,
    /// `𝒜_x P^x − δ`
    RemainderX,
    /// `𝒜_x P^y − δ = ∇a(x)·∇_x P_Δ / a(y)`
    RemainderY,
    /// `a(x) n_x·∇_x P^x`
    ConormalX,
    /// `n_x·∇_x P_Δ`
    LaplaceConormal,
    /// `a(y) n_y·∇_y P^x`, the kernel of the adjoint double layer
    ConormalY,
    /// `n_y·∇_y P_Δ`
    LaplaceConormalY,
}

impl KernelId {
    pub const ALL: [KernelId; 9] = [
        KernelId::Laplace,
        KernelId::ParametrixX,
        KernelId::ParametrixY,
        KernelId::RemainderX,
        KernelId::RemainderY,
        KernelId::ConormalX,
        KernelId::LaplaceConormal,
        KernelId::ConormalY,
        KernelId::LaplaceConormalY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Laplace => "laplace",
            KernelId::ParametrixX => "parametrix_x",
            KernelId::ParametrixY => "parametrix_y",
            KernelId::RemainderX => "remainder_x",
            KernelId::RemainderY => "remainder_y",
            KernelId::ConormalX => "conormal_x",
            KernelId::LaplaceConormal => "laplace_conormal",
            KernelId::ConormalY => "conormal_y",
            KernelId::LaplaceConormalY => "laplace_conormal_y",
        }
    }

    /// Exponent `k` of the leading `|x−y|^{-k}` behaviour.
    pub fn singularity_order(self) -> u32 {
        match self {
            KernelId::Laplace | KernelId::ParametrixX | KernelId::ParametrixY => 1,
            _ => 2,
        }
    }

    /// Whether the kernel has the form `s(x)·(−1/(4π|x−y|))` with `s` smooth.
    pub fn is_single_layer_type(self) -> bool {
        self.singularity_order() == 1
    }

    /// True for kernels that vanish identically when `a` is constant.
    pub fn is_remainder(self) -> bool {
        matches!(self, KernelId::RemainderX | KernelId::RemainderY)
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| KernelError::UnknownId(s.to_owned()))
    }
}

/// Coefficient data at one point, computed once and reused by every kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub a: f64,
    pub grad_a: Vec3,
    pub grad_log: Vec3,
    pub lap_log: f64,
}

impl FieldSample {
    pub fn of(field: &CoefficientField, x: &Vec3) -> Self {
        let (a, grad_a, grad_log, lap_log) = field.derivatives(x);
        Self {
            a,
            grad_a,
            grad_log,
            lap_log,
        }
    }

    /// The sample of `a ≡ 1`.
    pub fn unit() -> Self {
        Self {
            a: 1.0,
            grad_a: Vec3::zeros(),
            grad_log: Vec3::zeros(),
            lap_log: 0.0,
        }
    }
}

/// A point with its coefficient sample and (for boundary points) unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: Vec3,
    pub normal: Vec3,
    pub field: FieldSample,
}

impl KernelPoint {
    pub fn new(field: &CoefficientField, x: Vec3) -> Self {
        Self {
            x,
            normal: Vec3::zeros(),
            field: FieldSample::of(field, &x),
        }
    }

    pub fn with_normal(field: &CoefficientField, x: Vec3, normal: Vec3) -> Self {
        Self {
            normal,
            ..Self::new(field, x)
        }
    }
}

/// `−1/(4πr)` and `∇_x` of it, for `d = x − y`.
#[inline]
fn laplace_parts(d: &Vec3) -> (f64, f64, Vec3) {
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    let inv_r = 1.0 / r;
    let p = -inv_r / FOUR_PI;
    let g = d * (inv_r * inv_r * inv_r / FOUR_PI);
    (r, p, g)
}

/// Evaluates kernel `id` between source `x` and target `y` without the singularity guard.
#[inline]
pub fn eval_unchecked(id: KernelId, x: &KernelPoint, y: &KernelPoint) -> f64 {
    let d = x.x - y.x;
    let (_, p, g) = laplace_parts(&d);
    let (fx, fy) = (&x.field, &y.field);
    match id {
        KernelId::Laplace => p,
        KernelId::ParametrixX => p / fx.a,
        KernelId::ParametrixY => p / fy.a,
        KernelId::RemainderX => -fx.lap_log * p - fx.grad_log.dot(&g),
        KernelId::RemainderY => fx.grad_a.dot(&g) / fy.a,
        KernelId::ConormalX => x.normal.dot(&g) - p * x.normal.dot(&fx.grad_log),
        KernelId::LaplaceConormal => x.normal.dot(&g),
        // ∇_y P_Δ = −∇_x P_Δ
        KernelId::ConormalY => -(fy.a / fx.a) * y.normal.dot(&g),
        KernelId::LaplaceConormalY => -y.normal.dot(&g),
    }
}

/// Kernel evaluation with the minimum-separation guard.
#[derive(Debug, Clone, Copy)]
pub struct KernelContext<'a> {
    field: &'a CoefficientField,
    eps_sing: f64,
}

impl<'a> KernelContext<'a> {
    /// The guard is `1e−14 · domain_diameter`.
    pub fn new(field: &'a CoefficientField, domain_diameter: f64) -> Self {
        Self {
            field,
            eps_sing: SINGULAR_RELATIVE_SEPARATION * domain_diameter,
        }
    }

    pub fn field(&self) -> &'a CoefficientField {
        self.field
    }

    pub fn eps_sing(&self) -> f64 {
        self.eps_sing
    }

    pub fn point(&self, x: Vec3) -> KernelPoint {
        KernelPoint::new(self.field, x)
    }

    pub fn boundary_point(&self, x: Vec3, normal: Vec3) -> KernelPoint {
        KernelPoint::with_normal(self.field, x, normal)
    }

    pub fn check_separation(&self, x: &Vec3, y: &Vec3) -> Result<(), KernelError> {
        let distance = (x - y).norm();
        if distance <= self.eps_sing || !distance.is_finite() {
            return Err(KernelError::Singular {
                distance,
                threshold: self.eps_sing,
            });
        }
        Ok(())
    }

    pub fn eval(&self, id: KernelId, x: &KernelPoint, y: &KernelPoint) -> Result<f64, KernelError> {
        self.check_separation(&x.x, &y.x)?;
        Ok(eval_unchecked(id, x, y))
    }

    pub fn laplace_fundamental(&self, x: &Vec3, y: &Vec3) -> Result<f64, KernelError> {
        self.check_separation(x, y)?;
        Ok(laplace_parts(&(x - y)).1)
    }

    pub fn laplace_gradient_x(&self, x: &Vec3, y: &Vec3) -> Result<Vec3, KernelError> {
        self.check_separation(x, y)?;
        Ok(laplace_parts(&(x - y)).2)
    }

    pub fn parametrix_x(&self, x: &Vec3, y: &Vec3) -> Result<f64, KernelError> {
        self.eval(KernelId::ParametrixX, &self.point(*x), &self.point(*y))
    }

    pub fn parametrix_y(&self, x: &Vec3, y: &Vec3) -> Result<f64, KernelError> {
        self.eval(KernelId::ParametrixY, &self.point(*x), &self.point(*y))
    }

    pub fn remainder_x(&self, x: &Vec3, y: &Vec3) -> Result<f64, KernelError> {
        self.eval(KernelId::RemainderX, &self.point(*x), &self.point(*y))
    }

    pub fn remainder_y(&self, x: &Vec3, y: &Vec3) -> Result<f64, KernelError> {
        self.eval(KernelId::RemainderY, &self.point(*x), &self.point(*y))
    }

    pub fn conormal_x_kernel(&self, x: &Vec3, n_x: &Vec3, y: &Vec3) -> Result<f64, KernelError> {
        self.eval(KernelId::ConormalX, &self.boundary_point(*x, *n_x), &self.point(*y))
    }

    pub fn conormal_y_kernel(&self, x: &Vec3, y: &Vec3, n_y: &Vec3) -> Result<f64, KernelError> {
        self.eval(KernelId::ConormalY, &self.point(*x), &self.boundary_point(*y, *n_y))
    }
}

/// `R^x` from the divergence form `−Σᵢ ∂ᵢ(∂ᵢ ln a · P_Δ)` by central differences of step `h`.
pub fn remainder_x_divergence_fd(field: &CoefficientField, x: &Vec3, y: &Vec3, h: f64) -> f64 {
    let flux = |z: &Vec3, i: usize| field.grad_log(z)[i] * (-1.0 / (FOUR_PI * (z - y).norm()));
    (0..3)
        .map(|i| {
            let mut e = Vec3::zeros();
            e[i] = h;
            -(flux(&(x + e), i) - flux(&(x - e), i)) / (2.0 * h)
        })
        .sum()
}

/// `𝒜_x u = ∇·(a∇u)` by the conservative seven-point stencil of step `h`.
pub fn apply_operator_fd(field: &CoefficientField, u: impl Fn(&Vec3) -> f64, x: &Vec3, h: f64) -> f64 {
    let u0 = u(x);
    (0..3)
        .map(|i| {
            let mut e = Vec3::zeros();
            e[i] = h;
            let ap = field.eval(&(x + 0.5 * e));
            let am = field.eval(&(x - 0.5 * e));
            (ap * (u(&(x + e)) - u0) - am * (u0 - u(&(x - e)))) / (h * h)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use super::*;
    use crate::coefficient::Family;
    use proptest::prelude::*;

    fn unit() -> CoefficientField {
        CoefficientField::constant(1.0).unwrap()
    }

    fn expo() -> CoefficientField {
        CoefficientField::exponential([1.0, 0.0, 0.0], 0.1, 10.0).unwrap()
    }

    fn quad() -> CoefficientField {
        CoefficientField::new(Family::Quadratic, &[1.0, 1.0], 1.0, 5.0).unwrap()
    }

    fn e1(t: f64) -> Vec3 {
        Vec3::new(t, 0.0, 0.0)
    }

    #[test]
    fn laplace_values() {
        let f = unit();
        let k = KernelContext::new(&f, 2.0);
        let o = Vec3::zeros();
        assert_abs_diff_eq!(k.laplace_fundamental(&o, &e1(1.0)).unwrap(), -0.079_577_471_545_947_67, epsilon = 1e-15);
        assert_abs_diff_eq!(k.laplace_fundamental(&o, &e1(2.0)).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-16);
        let mut prev = f64::NEG_INFINITY;
        for t in [1.0, 2.0, 5.0, 10.0, 1e3, 1e6] {
            let v = k.laplace_fundamental(&o, &e1(t)).unwrap();
            assert!(v < 0.0 && v > prev);
            prev = v;
        }
        assert!(prev.abs() < 1e-7);
    }

    #[test]
    fn coincident_points_are_rejected() {
        let f = unit();
        let k = KernelContext::new(&f, 2.0);
        let x = Vec3::new(0.3, 0.1, 0.2);
        for id in KernelId::ALL {
            let p = k.boundary_point(x, Vec3::z());
            assert!(matches!(k.eval(id, &p, &p), Err(KernelError::Singular { .. })));
        }
        assert!(k.laplace_gradient_x(&x, &(x + Vec3::repeat(1e-15))).is_err());
        assert!(k.laplace_gradient_x(&x, &(x + Vec3::repeat(1e-12))).is_ok());
    }

    fn fd_gradient(g: impl Fn(&Vec3) -> f64, x: &Vec3, h: f64) -> Vec3 {
        Vec3::from_fn(|i, _| {
            let mut e = Vec3::zeros();
            e[i] = h;
            (g(&(x + e)) - g(&(x - e))) / (2.0 * h)
        })
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = unit();
        let k = KernelContext::new(&f, 2.0);
        let y = Vec3::zeros();
        for x in [e1(1.0), e1(2.0), Vec3::new(0.3, -0.4, 0.7)] {
            let g = k.laplace_gradient_x(&x, &y).unwrap();
            let fd = fd_gradient(|z| k.laplace_fundamental(z, &y).unwrap(), &x, 1e-6);
            assert!((g - fd).norm() < 1e-8, "{g} vs {fd}");
        }
        assert!((k.laplace_gradient_x(&e1(1.0), &y).unwrap() - e1(1.0 / FOUR_PI)).norm() < 1e-16);
        assert_abs_diff_eq!(k.laplace_gradient_x(&e1(2.0), &y).unwrap().norm(), 1.0 / (16.0 * PI), epsilon = 1e-16);
    }

    #[test]
    fn parametrix_examples() {
        let two = CoefficientField::constant(2.0).unwrap();
        let k2 = KernelContext::new(&two, 2.0);
        assert_abs_diff_eq!(k2.parametrix_x(&Vec3::zeros(), &e1(1.0)).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-16);

        let q = quad();
        let kq = KernelContext::new(&q, 2.0);
        assert_abs_diff_eq!(kq.parametrix_x(&e1(1.0), &Vec3::zeros()).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-16);
        assert_abs_diff_eq!(kq.parametrix_y(&Vec3::zeros(), &e1(1.0)).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-16);

        let x = Vec3::new(0.2, -0.5, 0.1);
        let y = Vec3::new(-0.3, 0.4, 0.6);
        let px = kq.parametrix_x(&x, &y).unwrap() * q.eval(&x);
        let py = kq.parametrix_y(&x, &y).unwrap() * q.eval(&y);
        assert_abs_diff_eq!(px, py, epsilon = 1e-16);
    }

    #[test]
    fn unit_coefficient_collapses_exactly() {
        let f = unit();
        let k = KernelContext::new(&f, 2.0);
        let x = k.boundary_point(Vec3::new(0.2, -0.5, 0.1), Vec3::new(0.0, 0.6, 0.8));
        let y = k.boundary_point(Vec3::new(-0.3, 0.4, 0.6), Vec3::new(0.8, 0.0, -0.6));
        let p = k.eval(KernelId::Laplace, &x, &y).unwrap();
        assert_eq!(k.eval(KernelId::ParametrixX, &x, &y).unwrap(), p);
        assert_eq!(k.eval(KernelId::ParametrixY, &x, &y).unwrap(), p);
        assert_eq!(k.eval(KernelId::RemainderX, &x, &y).unwrap(), 0.0);
        assert_eq!(k.eval(KernelId::RemainderY, &x, &y).unwrap(), 0.0);
        assert_eq!(
            k.eval(KernelId::ConormalX, &x, &y).unwrap(),
            k.eval(KernelId::LaplaceConormal, &x, &y).unwrap()
        );
        assert_eq!(
            k.eval(KernelId::ConormalY, &x, &y).unwrap(),
            k.eval(KernelId::LaplaceConormalY, &x, &y).unwrap()
        );
    }

    #[test]
    fn remainder_examples() {
        let c = CoefficientField::constant(3.0).unwrap();
        let kc = KernelContext::new(&c, 2.0);
        assert_eq!(kc.remainder_x(&Vec3::zeros(), &e1(1.0)).unwrap(), 0.0);
        assert_eq!(kc.remainder_y(&Vec3::zeros(), &e1(1.0)).unwrap(), 0.0);

        let f = expo();
        let k = KernelContext::new(&f, 2.0);
        let (x, y) = (Vec3::zeros(), e1(1.0));
        let rx = k.remainder_x(&x, &y).unwrap();
        assert_abs_diff_eq!(rx, 1.0 / FOUR_PI, epsilon = 1e-15);
        assert_abs_diff_eq!(remainder_x_divergence_fd(&f, &x, &y, 1e-5), rx, epsilon = 1e-8);

        let ry = k.remainder_y(&x, &y).unwrap();
        assert_abs_diff_eq!(ry, -1.0 / (FOUR_PI * std::f64::consts::E), epsilon = 1e-15);
        let dp = fd_gradient(|z| k.laplace_fundamental(z, &y).unwrap(), &x, 1e-6)[0];
        assert_abs_diff_eq!(ry, dp / f.eval(&y), epsilon = 1e-9);
    }

    #[test]
    fn conormal_example_matches_fd_oracle() {
        let f = expo();
        let k = KernelContext::new(&f, 2.0);
        let (x, n, y) = (e1(1.0), e1(1.0), Vec3::zeros());
        let v = k.conormal_x_kernel(&x, &n, &y).unwrap();
        assert_abs_diff_eq!(v, 1.0 / (2.0 * PI), epsilon = 1e-15);
        let fd = f.eval(&x) * n.dot(&fd_gradient(|z| k.parametrix_x(z, &y).unwrap(), &x, 1e-6));
        assert_abs_diff_eq!(v, fd, epsilon = 1e-8);

        let id = unit();
        let ku = KernelContext::new(&id, 2.0);
        let harmonic = n.dot(&ku.laplace_gradient_x(&x, &y).unwrap());
        assert_eq!(ku.conormal_x_kernel(&x, &n, &y).unwrap(), harmonic);
    }

    #[test]
    fn conormal_y_matches_fd_oracle() {
        let f = quad();
        let k = KernelContext::new(&f, 2.0);
        let x = Vec3::new(0.1, 0.7, -0.2);
        let y = Vec3::new(0.5, -0.1, 0.3);
        let n = Vec3::new(2.0, -1.0, 2.0) / 3.0;
        let v = k.conormal_y_kernel(&x, &y, &n).unwrap();
        let fd = f.eval(&y) * n.dot(&fd_gradient(|z| k.parametrix_x(&x, z).unwrap(), &y, 1e-6));
        assert!((v - fd).abs() < 1e-8, "{v} vs {fd}");
    }

    #[test]
    fn singularity_orders_along_approach_directions() {
        for f in [expo(), quad()] {
            let k = KernelContext::new(&f, 2.0);
            let y = Vec3::new(0.1, -0.2, 0.15);
            for j in 0..20 {
                // points of a Fibonacci sphere for the approach directions
                let z = 1.0 - (2.0 * j as f64 + 1.0) / 20.0;
                let phi = j as f64 * PI * (3.0 - 5f64.sqrt());
                let s = (1.0 - z * z).sqrt();
                let dir = Vec3::new(s * phi.cos(), s * phi.sin(), z);
                let mut max_p: f64 = 0.0;
                let mut max_r: f64 = 0.0;
                for e in 1..=12 {
                    let t = 10f64.powi(-e);
                    let x = y + dir * t;
                    max_p = max_p.max(k.parametrix_x(&x, &y).unwrap().abs() * t);
                    max_r = max_r.max(k.remainder_x(&x, &y).unwrap().abs() * t * t);
                    let ry = k.remainder_y(&x, &y).unwrap().abs() * t * t;
                    assert!(ry < 1.0);
                }
                assert!(max_p < 1.0 / FOUR_PI / f.a_min() + 1e-12);
                assert!(max_r < 1.0);
            }
        }
    }

    #[test]
    fn kernel_ids_round_trip_through_names() {
        for id in KernelId::ALL {
            assert_eq!(id.name().parse::<KernelId>().unwrap(), id);
        }
        assert!("bogus".parse::<KernelId>().is_err());
    }

    fn field_strategy() -> impl Strategy<Value = CoefficientField> {
        prop_oneof![
            (0.5f64..2.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
                .prop_map(|(c0, a, b, c)| CoefficientField::quadratic(c0, [a, b, c], c0, c0 + 12.0).unwrap()),
            (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
                .prop_map(|(a, b, c)| CoefficientField::exponential([a, b, c], 1e-3, 1e3).unwrap()),
        ]
    }

    fn pair_strategy() -> impl Strategy<Value = (Vec3, Vec3)> {
        (
            prop::array::uniform3(-1.0f64..1.0),
            prop::array::uniform3(-1.0f64..1.0),
            0.1f64..2.0,
        )
            .prop_filter_map("degenerate direction", |(x, d, r)| {
                let d = Vec3::from(d);
                (d.norm() > 1e-3).then(|| {
                    let x = Vec3::from(x);
                    (x, x + d.normalize() * r)
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

        #[test]
        fn expanded_remainder_matches_divergence_form(field in field_strategy(), (x, y) in pair_strategy()) {
            let k = KernelContext::new(&field, 4.0);
            let expanded = k.remainder_x(&x, &y).unwrap();
            let oracle = remainder_x_divergence_fd(&field, &x, &y, 1e-5);
            prop_assert!((expanded - oracle).abs() <= 1e-6, "{expanded} vs {oracle}");
        }

        #[test]
        fn parametrix_defect_is_the_remainder(field in field_strategy(), (x, y) in pair_strategy()) {
            let k = KernelContext::new(&field, 4.0);
            let r = k.remainder_x(&x, &y).unwrap();
            let applied = apply_operator_fd(&field, |z| k.parametrix_x(z, &y).unwrap(), &x, 1e-4);
            let s = field.grad_log(&x);
            let d = (x - y).norm();
            // magnitude of the two terms of R, the natural scale when they cancel
            let scale = (field.laplacian_log(&x).abs() / d + s.norm() / (d * d)) / FOUR_PI;
            prop_assert!((applied - r).abs() <= 1e-4 * r.abs().max(scale), "{applied} vs {r}");
        }

        #[test]
        fn gradient_is_antisymmetric((x, y) in pair_strategy()) {
            let f = unit();
            let k = KernelContext::new(&f, 4.0);
            let a = k.laplace_gradient_x(&x, &y).unwrap();
            let b = k.laplace_gradient_x(&y, &x).unwrap();
            prop_assert!((a + b).norm() <= 1e-15 * a.norm());
        }
    }
}
