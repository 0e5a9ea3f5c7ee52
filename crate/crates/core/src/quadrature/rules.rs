//! Reference-element quadrature rules.
//!
//! Triangle points are barycentric triples and tetrahedron points barycentric
//! quadruples; weights are normalised to sum to one, so the physical integral is
//! `measure · Σ wᵢ f(xᵢ)`.

use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub order: u32,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetRule {
    pub order: u32,
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

impl TriangleRule {
    /// Three-vertex-free six-point rule, exact to degree 4 with positive weights.
    pub fn dunavant4() -> Self {
        let (a1, w1) = (0.445_948_490_915_964_9, 0.223_381_589_678_011_47);
        let (a2, w2) = (0.091_576_213_509_770_74, 0.109_951_743_655_321_87);
        let (b1, b2) = (1.0 - 2.0 * a1, 1.0 - 2.0 * a2);
        Self {
            order: 4,
            points: vec![
                [a1, a1, b1],
                [a1, b1, a1],
                [b1, a1, a1],
                [a2, a2, b2],
                [a2, b2, a2],
                [b2, a2, a2],
            ],
            weights: vec![w1, w1, w1, w2, w2, w2],
        }
    }

    pub fn centroid() -> Self {
        Self {
            order: 1,
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
        }
    }

    /// Conical product of `n`-point Gauss rules, exact to degree `2n − 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (&u, &wu) in x.iter().zip(&w) {
            for (&v, &wv) in x.iter().zip(&w) {
                // (u, v) ∈ [0,1]² ↦ (λ₁, λ₂) = (u, v(1−u)), Jacobian 1−u
                let l1 = u;
                let l2 = v * (1.0 - u);
                points.push([1.0 - l1 - l2, l1, l2]);
                weights.push(2.0 * wu * wv * (1.0 - u));
            }
        }
        Self {
            order: (2 * n - 2) as u32,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points and weights (already multiplied by the area) on a triangle.
    pub fn map<'a>(&'a self, t: &'a [Vec3; 3], area: f64) -> impl Iterator<Item = (Vec3, f64)> + 'a {
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(l, w)| (t[0] * l[0] + t[1] * l[1] + t[2] * l[2], w * area))
    }
}

impl TetRule {
    /// Four-point rule exact to degree 2.
    pub fn keast2() -> Self {
        let a = 0.585_410_196_624_968_5;
        let b = 0.138_196_601_125_010_5;
        Self {
            order: 2,
            points: vec![[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]],
            weights: vec![0.25; 4],
        }
    }

    pub fn centroid() -> Self {
        Self {
            order: 1,
            points: vec![[0.25; 4]],
            weights: vec![1.0],
        }
    }

    /// Collapsed product of `n`-point Gauss rules, exact to degree `2n − 3`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n * n);
        let mut weights = Vec::with_capacity(n * n * n);
        for (&u, &wu) in x.iter().zip(&w) {
            for (&v, &wv) in x.iter().zip(&w) {
                for (&s, &ws) in x.iter().zip(&w) {
                    let l1 = u;
                    let l2 = v * (1.0 - u);
                    let l3 = s * (1.0 - u) * (1.0 - v);
                    points.push([1.0 - l1 - l2 - l3, l1, l2, l3]);
                    weights.push(6.0 * wu * wv * ws * (1.0 - u) * (1.0 - u) * (1.0 - v));
                }
            }
        }
        Self {
            order: (2 * n - 3) as u32,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn map<'a>(&'a self, t: &'a [Vec3; 4], volume: f64) -> impl Iterator<Item = (Vec3, f64)> + 'a {
        self.points.iter().zip(&self.weights).map(move |(l, w)| {
            (
                t[0] * l[0] + t[1] * l[1] + t[2] * l[2] + t[3] * l[3],
                w * volume,
            )
        })
    }
}

/// Children of the 4-way midpoint split; orientation is preserved.
pub fn split_triangle(t: &[Vec3; 3]) -> [[Vec3; 3]; 4] {
    let m01 = 0.5 * (t[0] + t[1]);
    let m12 = 0.5 * (t[1] + t[2]);
    let m20 = 0.5 * (t[2] + t[0]);
    [
        [t[0], m01, m20],
        [m01, t[1], m12],
        [m20, m12, t[2]],
        [m01, m12, m20],
    ]
}

/// Bey's octasection: eight children of equal volume.
pub fn split_tet(t: &[Vec3; 4]) -> [[Vec3; 4]; 8] {
    let m = |i: usize, j: usize| 0.5 * (t[i] + t[j]);
    let (x01, x02, x03, x12, x13, x23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
    [
        [t[0], x01, x02, x03],
        [x01, t[1], x12, x13],
        [x02, x12, t[2], x23],
        [x03, x13, x23, t[3]],
        [x01, x02, x03, x13],
        [x01, x02, x12, x13],
        [x02, x03, x13, x23],
        [x02, x12, x13, x23],
    ]
}
