//! The scalar diffusion coefficient `a(x)` and the derived fields the kernels need.
//!
//! Three closed-form families are supported, each with hand-coded derivatives so that
//! `∇ln a` and `Δln a` are exact at every quadrature point:
//!
//! * `constant`:    `a(x) = c`
//! * `quadratic`:   `a(x) = c₀ + c₁|x|²`, or with four parameters `c₀ + Σᵢ qᵢxᵢ²`
//! * `exponential`: `a(x) = exp(k·x)`

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Constant,
    Quadratic,
    Exponential,
}

#[derive(Debug, Error, PartialEq)]
pub enum CoefficientError {
    #[error("{family:?} family expects {expected} parameters, got {got}")]
    ParamCount {
        family: Family,
        expected: &'static str,
        got: usize,
    },
    #[error("coefficient parameters must be finite")]
    NonFinite,
    #[error("declared bounds must satisfy 0 < a_min <= a_max (got a_min={a_min}, a_max={a_max})")]
    InvalidBounds { a_min: f64, a_max: f64 },
    #[error("coefficient is not positive on the domain: min a = {min_found:e} at ({}, {}, {})", .point[0], .point[1], .point[2])]
    NotPositive { min_found: f64, point: [f64; 3] },
    #[error("coefficient falls below the declared a_min={a_min}: min a = {min_found:e} at ({}, {}, {})", .point[0], .point[1], .point[2])]
    BelowDeclaredMinimum {
        a_min: f64,
        min_found: f64,
        point: [f64; 3],
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    Constant(f64),
    Quadratic { c0: f64, q: Vec3 },
    Exponential { k: Vec3 },
}

/// A smooth positive coefficient with declared bounds `a_min ≤ a ≤ a_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    family: Family,
    params: Vec<f64>,
    law: Law,
    a_min: f64,
    a_max: f64,
}

/// Outcome of [`check_positivity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub ok: bool,
    pub min_found: f64,
    pub min_point: Vec3,
    pub max_found: f64,
}

impl CoefficientField {
    /// Builds a field from its family parameters and declared bounds.
    pub fn new(
        family: Family,
        params: &[f64],
        a_min: f64,
        a_max: f64,
    ) -> Result<Self, CoefficientError> {
        if params.iter().any(|p| !p.is_finite()) {
            return Err(CoefficientError::NonFinite);
        }
        if !(a_min > 0.0 && a_min <= a_max && a_max.is_finite()) {
            return Err(CoefficientError::InvalidBounds { a_min, a_max });
        }
        let law = Self::law_from(family, params)?;
        Ok(Self {
            family,
            params: params.to_vec(),
            law,
            a_min,
            a_max,
        })
    }

    /// Builds a field whose bounds are measured on a lattice over `bbox`.
    ///
    /// Fails if any lattice sample is non-positive.
    pub fn fitted(
        family: Family,
        params: &[f64],
        bbox: &Aabb,
        n_samples: usize,
    ) -> Result<Self, CoefficientError> {
        let law = Self::law_from(family, params)?;
        let probe = Self {
            family,
            params: params.to_vec(),
            law,
            a_min: 1.0,
            a_max: 1.0,
        };
        let (min_found, min_point, max_found) = lattice_extrema(&probe, bbox, n_samples);
        if min_found <= 0.0 || !min_found.is_finite() {
            return Err(CoefficientError::NotPositive {
                min_found,
                point: min_point.into(),
            });
        }
        Self::new(family, params, min_found, max_found)
    }

    /// `a ≡ c`.
    pub fn constant(c: f64) -> Result<Self, CoefficientError> {
        Self::new(Family::Constant, &[c], c, c)
    }

    /// `a = c₀ + Σ qᵢxᵢ²` with bounds declared by the caller.
    pub fn quadratic(c0: f64, q: [f64; 3], a_min: f64, a_max: f64) -> Result<Self, CoefficientError> {
        Self::new(Family::Quadratic, &[c0, q[0], q[1], q[2]], a_min, a_max)
    }

    /// `a = exp(k·x)` with bounds declared by the caller.
    pub fn exponential(k: [f64; 3], a_min: f64, a_max: f64) -> Result<Self, CoefficientError> {
        Self::new(Family::Exponential, &k, a_min, a_max)
    }

    fn law_from(family: Family, params: &[f64]) -> Result<Law, CoefficientError> {
        match (family, params.len()) {
            (Family::Constant, 1) => Ok(Law::Constant(params[0])),
            (Family::Constant, got) => Err(CoefficientError::ParamCount {
                family,
                expected: "1",
                got,
            }),
            (Family::Quadratic, 2) => Ok(Law::Quadratic {
                c0: params[0],
                q: Vec3::repeat(params[1]),
            }),
            (Family::Quadratic, 4) => Ok(Law::Quadratic {
                c0: params[0],
                q: Vec3::new(params[1], params[2], params[3]),
            }),
            (Family::Quadratic, got) => Err(CoefficientError::ParamCount {
                family,
                expected: "2 or 4",
                got,
            }),
            (Family::Exponential, 3) => Ok(Law::Exponential {
                k: Vec3::new(params[0], params[1], params[2]),
            }),
            (Family::Exponential, got) => Err(CoefficientError::ParamCount {
                family,
                expected: "3",
                got,
            }),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    /// True when every derivative of `a` vanishes identically.
    pub fn is_constant(&self) -> bool {
        match self.law {
            Law::Constant(_) => true,
            Law::Quadratic { q, .. } => q == Vec3::zeros(),
            Law::Exponential { k } => k == Vec3::zeros(),
        }
    }

    pub fn eval(&self, x: &Vec3) -> f64 {
        match self.law {
            Law::Constant(c) => c,
            Law::Quadratic { c0, q } => c0 + q.dot(&x.component_mul(x)),
            Law::Exponential { k } => k.dot(x).exp(),
        }
    }

    pub fn grad(&self, x: &Vec3) -> Vec3 {
        match self.law {
            Law::Constant(_) => Vec3::zeros(),
            Law::Quadratic { q, .. } => 2.0 * q.component_mul(x),
            Law::Exponential { k } => k * k.dot(x).exp(),
        }
    }

    /// `∇ln a(x)`.
    pub fn grad_log(&self, x: &Vec3) -> Vec3 {
        match self.law {
            Law::Constant(_) => Vec3::zeros(),
            Law::Quadratic { .. } => self.grad(x) / self.eval(x),
            Law::Exponential { k } => k,
        }
    }

    /// `Δln a(x)`.
    pub fn laplacian_log(&self, x: &Vec3) -> f64 {
        match self.law {
            Law::Constant(_) | Law::Exponential { .. } => 0.0,
            Law::Quadratic { q, .. } => {
                let a = self.eval(x);
                let g = self.grad(x);
                2.0 * q.sum() / a - g.norm_squared() / (a * a)
            }
        }
    }

    /// `(a, ∇a, ∇ln a, Δln a)` at `x` in one pass.
    pub fn derivatives(&self, x: &Vec3) -> (f64, Vec3, Vec3, f64) {
        match self.law {
            Law::Constant(c) => (c, Vec3::zeros(), Vec3::zeros(), 0.0),
            Law::Quadratic { c0, q } => {
                let a = c0 + q.dot(&x.component_mul(x));
                let g = 2.0 * q.component_mul(x);
                (a, g, g / a, 2.0 * q.sum() / a - g.norm_squared() / (a * a))
            }
            Law::Exponential { k } => {
                let a = k.dot(x).exp();
                (a, k * a, k, 0.0)
            }
        }
    }

    /// `∂ln a/∂n = n·∇ln a(x)`.
    pub fn normal_log_derivative(&self, x: &Vec3, n: &Vec3) -> f64 {
        n.dot(&self.grad_log(x))
    }
}

fn lattice_extrema(field: &CoefficientField, bbox: &Aabb, n: usize) -> (f64, Vec3, f64) {
    let n = n.max(1);
    let step = |lo: f64, hi: f64, i: usize| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut min_found = f64::INFINITY;
    let mut max_found = f64::NEG_INFINITY;
    let mut min_point = bbox.center();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = Vec3::new(
                    step(bbox.min.x, bbox.max.x, i),
                    step(bbox.min.y, bbox.max.y, j),
                    step(bbox.min.z, bbox.max.z, k),
                );
                let a = field.eval(&x);
                if a < min_found || a.is_nan() {
                    min_found = a;
                    min_point = x;
                }
                max_found = max_found.max(a);
            }
        }
    }
    (min_found, min_point, max_found)
}

/// Samples `a` on an `n_samples³` lattice over `bbox`.
///
/// `ok` holds iff the smallest sample is at least `a_min·(1 − 1e−12)` and positive.
pub fn check_positivity(field: &CoefficientField, bbox: &Aabb, n_samples: usize) -> PositivityReport {
    let (min_found, min_point, max_found) = lattice_extrema(field, bbox, n_samples);
    let ok = min_found > 0.0 && min_found >= field.a_min * (1.0 - 1e-12);
    PositivityReport {
        ok,
        min_found,
        min_point,
        max_found,
    }
}

/// Turns a failed [`PositivityReport`] into the matching error.
pub fn require_positive(
    field: &CoefficientField,
    bbox: &Aabb,
    n_samples: usize,
) -> Result<PositivityReport, CoefficientError> {
    let report = check_positivity(field, bbox, n_samples);
    if report.ok {
        Ok(report)
    } else if report.min_found <= 0.0 || report.min_found.is_nan() {
        Err(CoefficientError::NotPositive {
            min_found: report.min_found,
            point: report.min_point.into(),
        })
    } else {
        Err(CoefficientError::BelowDeclaredMinimum {
            a_min: field.a_min,
            min_found: report.min_found,
            point: report.min_point.into(),
        })
    }
}
