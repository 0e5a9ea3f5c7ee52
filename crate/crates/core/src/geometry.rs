//! Small geometric primitives shared by the mesh, quadrature and potential code.

use nalgebra::Vector3;

/// Points and vectors in R³.
pub type Vec3 = Vector3<f64>;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    /// The cube `[-h, h]³` shifted to `center`.
    pub fn cube(center: Vec3, half_width: f64) -> Self {
        let d = Vec3::repeat(half_width);
        Self::new(center - d, center + d)
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut min = Vec3::repeat(f64::INFINITY);
        let mut max = Vec3::repeat(f64::NEG_INFINITY);
        for p in points {
            min = min.inf(p);
            max = max.sup(p);
        }
        Self { min, max }
    }

    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn center(&self) -> Vec3 {
        0.5 * (self.min + self.max)
    }
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Unit normal following the right-hand rule on `(a, b, c)`.
pub fn triangle_normal(a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    (b - a).cross(&(c - a)).normalize()
}

pub fn triangle_diameter(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    (b - a).norm().max((c - b).norm()).max((a - c).norm())
}

/// Ratio `2·inradius / circumradius`-style quality in `[0, 1]`, 1 for equilateral.
pub fn triangle_quality(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let (la, lb, lc) = ((c - b).norm(), (a - c).norm(), (b - a).norm());
    let s = 0.5 * (la + lb + lc);
    let area = triangle_area(a, b, c);
    if area <= 0.0 || s <= 0.0 {
        return 0.0;
    }
    let inradius = area / s;
    let circumradius = la * lb * lc / (4.0 * area);
    (2.0 * inradius / circumradius).clamp(0.0, 1.0)
}

/// Euclidean distance from `p` to the closed triangle `(a, b, c)`.
pub fn point_triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    (p - closest_point_on_triangle(p, a, b, c)).norm()
}

/// Closest point on a triangle (region-based method from Ericson's "Real-Time Collision Detection").
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Signed volume, positive when `(b-a, c-a, d-a)` is right-handed.
pub fn tet_signed_volume(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

pub fn tet_diameter(v: &[Vec3; 4]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            d = d.max((v[i] - v[j]).norm());
        }
    }
    d
}

/// The four faces of a tetrahedron as local vertex triples; face `k` is opposite vertex `k`.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// `3·inradius / circumradius`, which is 1 for the regular tetrahedron and 0 for flat ones.
pub fn tet_quality(v: &[Vec3; 4]) -> f64 {
    let vol = tet_signed_volume(&v[0], &v[1], &v[2], &v[3]).abs();
    if vol <= 0.0 {
        return 0.0;
    }
    let surface: f64 = TET_FACES
        .iter()
        .map(|f| triangle_area(&v[f[0]], &v[f[1]], &v[f[2]]))
        .sum();
    let inradius = 3.0 * vol / surface;
    // circumcenter solves 2(v_i - v_0)·c = |v_i|² - |v_0|²
    let m = nalgebra::Matrix3::from_rows(&[
        (v[1] - v[0]).transpose(),
        (v[2] - v[0]).transpose(),
        (v[3] - v[0]).transpose(),
    ]);
    let rhs = Vec3::new(
        0.5 * (v[1] - v[0]).norm_squared(),
        0.5 * (v[2] - v[0]).norm_squared(),
        0.5 * (v[3] - v[0]).norm_squared(),
    );
    let Some(inv) = m.try_inverse() else {
        return 0.0;
    };
    let circumradius = (inv * rhs).norm();
    if !circumradius.is_finite() || circumradius <= 0.0 {
        return 0.0;
    }
    (3.0 * inradius / circumradius).clamp(0.0, 1.0)
}

/// Distance from `p` to the closed tetrahedron (zero inside).
pub fn point_tet_distance(p: &Vec3, v: &[Vec3; 4]) -> f64 {
    let total = tet_signed_volume(&v[0], &v[1], &v[2], &v[3]);
    let inside = (0..4).all(|k| {
        let mut w = *v;
        w[k] = *p;
        tet_signed_volume(&w[0], &w[1], &w[2], &w[3]) * total.signum() >= 0.0
    });
    if inside {
        return 0.0;
    }
    TET_FACES
        .iter()
        .map(|f| point_triangle_distance(p, &v[f[0]], &v[f[1]], &v[f[2]]))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_distance_regions() {
        let a = Vec3::new(0.0, 0.0, 0.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        let c = Vec3::new(0.0, 1.0, 0.0);
        assert!((point_triangle_distance(&Vec3::new(0.2, 0.2, 0.5), &a, &b, &c) - 0.5).abs() < 1e-15);
        assert!((point_triangle_distance(&Vec3::new(-1.0, 0.0, 0.0), &a, &b, &c) - 1.0).abs() < 1e-15);
        let d = point_triangle_distance(&Vec3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regular_tet_quality_is_one() {
        let v = [
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ];
        assert!((tet_quality(&v) - 1.0).abs() < 1e-12);
        let mut flat = v;
        flat[3] = flat[0];
        assert_eq!(tet_quality(&flat), 0.0);
    }

    #[test]
    fn tet_distance_inside_and_outside() {
        let v = [
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        assert_eq!(point_tet_distance(&Vec3::new(0.1, 0.1, 0.1), &v), 0.0);
        assert!((point_tet_distance(&Vec3::new(0.1, 0.1, -0.3), &v) - 0.3).abs() < 1e-15);
    }
}
