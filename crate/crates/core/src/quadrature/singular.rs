use crate::geometry::{tet_signed_volume, triangle_area, Vec3, TET_FACES};

use super::rules::gauss_legendre;

/// Gauss points per direction in the Duffy rules.
pub const DUFFY_POINTS: usize = 20;

/// Gauss points per direction in the cell Duffy rule.
pub const CONICAL_POINTS: usize = 10;

/// `∫_T 1/|x − c| dS(x)` for `c` in the plane of the flat triangle `T`.
///
/// Sum over edges of `dᵢ·(asinh(s₊/|dᵢ|) − asinh(s₋/|dᵢ|))`, where `dᵢ` is the signed
/// in-plane distance from `c` to edge `i` and `s±` are the edge-tangential
/// coordinates of its endpoints.
pub fn flat_triangle_inverse_distance(t: &[Vec3; 3], c: &Vec3) -> f64 {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0])).normalize();
    (0..3)
        .map(|i| {
            let p = t[i];
            let q = t[(i + 1) % 3];
            let len = (q - p).norm();
            let tan = (q - p) / len;
            let out = tan.cross(&n);
            let d = (p - c).dot(&out);
            if d.abs() <= 1e-15 * len {
                return 0.0;
            }
            let sm = (p - c).dot(&tan);
            let sp = (q - c).dot(&tan);
            d * ((sp / d.abs()).asinh() - (sm / d.abs()).asinh())
        })
        .sum()
}

/// `∫_T f dS` for `f` singular at `c ∈ T`: the triangle is split at `c` and each
/// piece collapsed onto `c`, so the Jacobian carries a factor `u` that cancels `1/r`.
/// Along each edge the parameter is stretched by a sinh map centred at the foot of
/// the perpendicular from `c`, which removes the near-singularity of `1/|x − c|` there.
pub fn panel_duffy(t: &[Vec3; 3], c: &Vec3, n: usize, f: &impl Fn(&Vec3) -> f64) -> f64 {
    let (x, w) = gauss_legendre(n);
    let mut total = 0.0;
    for i in 0..3 {
        let p = t[i];
        let q = t[(i + 1) % 3];
        let jac = 2.0 * triangle_area(c, &p, &q);
        if jac <= 0.0 {
            continue;
        }
        let a = p - c;
        let b = q - p;
        let v0 = -a.dot(&b) / b.norm_squared();
        let delta = (a + v0 * b).norm() / b.norm();
        let (t0, t1) = ((-v0 / delta).asinh(), ((1.0 - v0) / delta).asinh());
        for (&s, &ws) in x.iter().zip(&w) {
            let tt = t0 + s * (t1 - t0);
            let v = v0 + delta * tt.sinh();
            let dv = delta * tt.cosh() * (t1 - t0);
            for (&u, &wu) in x.iter().zip(&w) {
                let y = c + u * (a + v * b);
                total += wu * ws * dv * u * jac * f(&y);
            }
        }
    }
    total
}

/// `∫_K f dx` for `f` singular at `apex ∈ K`.
///
/// The cell is split into the cones over its faces with vertex `apex`, and each
/// cone is collapsed radially so the Jacobian carries `u²`. The base of each cone
/// is split at the foot of the perpendicular from `apex` into three signed
/// triangles; in each of them a sinh map in the radial and in the edge direction
/// absorbs the near-singularity of `|x − apex|⁻ᵏ` when the apex is close to the base.
pub fn conical_duffy(t: &[Vec3; 4], apex: &Vec3, n: usize, f: &impl Fn(&Vec3) -> f64) -> f64 {
    let (x, w) = gauss_legendre(n);
    let scale = tet_signed_volume(&t[0], &t[1], &t[2], &t[3]).abs();
    let mut total = 0.0;
    for face in TET_FACES {
        let q = [t[face[0]], t[face[1]], t[face[2]]];
        let cone = tet_signed_volume(apex, &q[0], &q[1], &q[2]).abs();
        if cone <= 1e-14 * scale {
            continue;
        }
        let m = (q[1] - q[0]).cross(&(q[2] - q[0])).normalize();
        let height = (apex - q[0]).dot(&m);
        let foot = apex - height * m;
        let height = height.abs();
        for i in 0..3 {
            let e0 = q[i];
            let e1 = q[(i + 1) % 3];
            let a = e0 - foot;
            let b = e1 - e0;
            // signed area of (foot, e0, e1) relative to the base orientation
            let area = 0.5 * a.cross(&(e1 - foot)).dot(&m);
            if area.abs() <= 1e-14 * b.norm_squared() {
                continue;
            }
            let v0 = -a.dot(&b) / b.norm_squared();
            let delta = (a + v0 * b).norm() / b.norm();
            let (t0, t1) = ((-v0 / delta).asinh(), ((1.0 - v0) / delta).asinh());
            for (&sv, &wv) in x.iter().zip(&w) {
                let tv = t0 + sv * (t1 - t0);
                let v = v0 + delta * tv.sinh();
                let dv = delta * tv.cosh() * (t1 - t0);
                let ray = a + v * b;
                let eps = height / ray.norm();
                let tau_max = (1.0 / eps).asinh();
                for (&sr, &wr) in x.iter().zip(&w) {
                    let tau = sr * tau_max;
                    let s_rad = eps * tau.sinh();
                    let ds = eps * tau.cosh() * tau_max;
                    let base = foot + s_rad * ray;
                    let weight = 2.0 * area * s_rad * ds * dv * height * wv * wr;
                    for (&u, &wu) in x.iter().zip(&w) {
                        let y = apex + u * (base - apex);
                        total += weight * wu * u * u * f(&y);
                    }
                }
            }
        }
    }
    total
}

/// `∫_e 1/|x − y| dl` over the segment `p → q`.
fn segment_inverse_distance(p: &Vec3, q: &Vec3, y: &Vec3) -> f64 {
    let len = (q - p).norm();
    let tan = (q - p) / len;
    let (mut sm, mut sp) = ((p - y).dot(&tan), (q - y).dot(&tan));
    let (mut rm, mut rp) = ((p - y).norm(), (q - y).norm());
    if sp < 0.0 {
        // mirror so that the logarithm never sees cancellation
        (sm, sp) = (-sp, -sm);
        (rm, rp) = (rp, rm);
    }
    if rm + sm <= 0.0 {
        return f64::INFINITY;
    }
    ((rp + sp) / (rm + sm)).ln()
}

/// `∫_T 1/|x − y| dS(x)` for any `y`, with the normal taken from the winding.
pub fn triangle_inverse_distance(t: &[Vec3; 3], y: &Vec3) -> f64 {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0])).normalize();
    let w = (y - t[0]).dot(&n);
    let aw = w.abs();
    (0..3)
        .map(|i| {
            let p = t[i];
            let q = t[(i + 1) % 3];
            let len = (q - p).norm();
            let tan = (q - p) / len;
            let out = tan.cross(&n);
            let d = (p - y).dot(&out);
            if d.abs() <= 1e-15 * len {
                return 0.0;
            }
            let mut total = d * segment_inverse_distance(&p, &q, y);
            if aw > 0.0 {
                let r0 = d * d + w * w;
                let (sm, sp) = ((p - y).dot(&tan), (q - y).dot(&tan));
                let (rm, rp) = ((p - y).norm(), (q - y).norm());
                total -= aw * ((d * sp / (r0 + aw * rp)).atan() - (d * sm / (r0 + aw * rm)).atan());
            }
            total
        })
        .sum()
}

/// `∫_T ∇_x(1/|x − y|) dS(x)` for `y` off the closed triangle.
///
/// The tangential part is the boundary integral `∮ (1/r) m dl` with `m` the
/// outward in-plane edge normal; the normal part is the signed solid angle.
pub fn triangle_inverse_distance_gradient(t: &[Vec3; 3], y: &Vec3) -> Vec3 {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0])).normalize();
    let mut tangential = Vec3::zeros();
    for i in 0..3 {
        let p = t[i];
        let q = t[(i + 1) % 3];
        let out = (q - p).normalize().cross(&n);
        tangential += out * segment_inverse_distance(&p, &q, y);
    }
    // ∇_x(1/r) = −(x−y)/r³, and ∫ n·(x−y)/r³ dS = −Ω(y) for the solid angle Ω
    // subtended by T as seen from y with the winding orientation.
    n * solid_angle(t, y) + tangential
}

/// Signed solid angle of `T` seen from `y` (Van Oosterom–Strackee), positive
/// when `y` lies on the side the normal points to.
pub fn solid_angle(t: &[Vec3; 3], y: &Vec3) -> f64 {
    let (a, b, c) = (t[0] - y, t[1] - y, t[2] - y);
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(&b.cross(&c));
    let den = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
    -2.0 * num.atan2(den)
}

/// `(∫_K 1/r dx, ∫_K ∇_x(1/r) dx)` with `r = |x − y|`, from the face integrals of
/// `1/r`: `∇_x·((x−y)/r) = 2/r` gives the first, the divergence theorem the second.
pub fn tet_inverse_distance_moments(t: &[Vec3; 4], y: &Vec3) -> (f64, Vec3) {
    let sign = tet_signed_volume(&t[0], &t[1], &t[2], &t[3]).signum();
    let mut value = 0.0;
    let mut gradient = Vec3::zeros();
    for f in TET_FACES {
        let q = [t[f[0]], t[f[1]], t[f[2]]];
        let n = sign * (q[1] - q[0]).cross(&(q[2] - q[0])).normalize();
        let face = triangle_inverse_distance(&q, y);
        let h = (q[0] - y).dot(&n);
        if h.abs() > 1e-15 * (q[1] - q[0]).norm() {
            value += 0.5 * h * face;
        }
        gradient += n * face;
    }
    (value, gradient)
}

/// `∫_K 1/|x − y| dx`.
pub fn tet_inverse_distance(t: &[Vec3; 4], y: &Vec3) -> f64 {
    tet_inverse_distance_moments(t, y).0
}

/// `∫_K ∇_x(1/|x − y|) dx`.
pub fn tet_inverse_distance_gradient(t: &[Vec3; 4], y: &Vec3) -> Vec3 {
    tet_inverse_distance_moments(t, y).1
}
