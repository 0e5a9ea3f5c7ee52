use std::collections::HashMap;

use super::{
    boundary_faces, BoundaryLink, MeshError, SurfaceMesh, VolumeMesh, MAX_BALL_REFINEMENT,
    MAX_CUBE_DIVISIONS,
};
use crate::geometry::{tet_signed_volume, Vec3, TET_FACES};

/// Radial layering of the ball volume mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallOptions {
    /// Number of concentric layers; the innermost one is a fan of tetrahedra to the center.
    pub layers: usize,
}

/// Default number of radial layers for a given surface refinement.
///
/// One layer per refinement step keeps the cell count at `20·4^r·(3r + 1)`, which
/// keeps the dense system at refinement 3 within a few gigabytes.
pub fn ball_layers(refinement: usize) -> usize {
    refinement + 1
}

impl BallOptions {
    pub fn for_refinement(refinement: usize) -> Self {
        Self {
            layers: ball_layers(refinement),
        }
    }
}

/// Icosphere surface (`20·4^refinement` panels) and a layered tetrahedral ball.
pub fn build_ball_mesh(radius: f64, refinement: usize) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    build_ball_mesh_with(radius, refinement, BallOptions::for_refinement(refinement))
}

pub fn build_ball_mesh_with(
    radius: f64,
    refinement: usize,
    options: BallOptions,
) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(MeshError::BadSize(radius));
    }
    if refinement > MAX_BALL_REFINEMENT {
        return Err(MeshError::RefinementTooLarge(refinement));
    }
    let layers = options.layers.max(1);
    let (sphere, triangles) = icosphere(radius, refinement);
    let nv = sphere.len();
    let shell_node = |k: usize, v: usize| 1 + (k - 1) * nv + v;

    let mut nodes = Vec::with_capacity(1 + layers * nv);
    nodes.push(Vec3::zeros());
    for k in 1..=layers {
        if k == layers {
            nodes.extend_from_slice(&sphere);
        } else {
            let s = k as f64 / layers as f64;
            nodes.extend(sphere.iter().map(|p| p * s));
        }
    }

    let mut cells = Vec::with_capacity(triangles.len() * (1 + 3 * (layers - 1)));
    for t in &triangles {
        cells.push([0, shell_node(1, t[0]), shell_node(1, t[1]), shell_node(1, t[2])]);
    }
    for k in 1..layers {
        for t in &triangles {
            let mut v = *t;
            v.sort_unstable();
            let b = v.map(|i| shell_node(k, i));
            let u = v.map(|i| shell_node(k + 1, i));
            // each quad side is cut from its lower-index bottom vertex to the higher-index
            // top vertex, so neighbouring prisms agree on the shared diagonal
            cells.push([b[0], b[1], b[2], u[2]]);
            cells.push([b[0], b[1], u[1], u[2]]);
            cells.push([b[0], u[0], u[1], u[2]]);
        }
    }
    finish(nodes, cells)
}

/// `n³` hexahedra split into `6n³` tetrahedra; the surface consists of the `12n²` boundary triangles.
pub fn build_cube_mesh(half_width: f64, n: usize) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(MeshError::BadSize(half_width));
    }
    if n == 0 || n > MAX_CUBE_DIVISIONS {
        return Err(MeshError::DivisionsOutOfRange(n));
    }
    let m = n + 1;
    let coord = |i: usize| {
        if i == 0 {
            -half_width
        } else if i == n {
            half_width
        } else {
            -half_width + 2.0 * half_width * i as f64 / n as f64
        }
    };
    let mut nodes = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                nodes.push(Vec3::new(coord(i), coord(j), coord(k)));
            }
        }
    }
    let id = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for p in PERMS {
                    let mut corner = [i, j, k];
                    let mut tet = [id(i, j, k); 4];
                    for (step, axis) in p.iter().enumerate() {
                        corner[*axis] += 1;
                        tet[step + 1] = id(corner[0], corner[1], corner[2]);
                    }
                    cells.push(tet);
                }
            }
        }
    }
    finish(nodes, cells)
}

/// Orients cells, extracts the boundary and links it to a freshly built surface.
fn finish(nodes: Vec<Vec3>, mut cells: Vec<[usize; 4]>) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    for c in cells.iter_mut() {
        let v = c.map(|i| nodes[i]);
        if tet_signed_volume(&v[0], &v[1], &v[2], &v[3]) < 0.0 {
            c.swap(1, 2);
        }
    }
    let faces = boundary_faces(&cells);
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut used: Vec<usize> = faces
        .iter()
        .flat_map(|&(c, f)| TET_FACES[f].map(|i| cells[c][i]))
        .collect();
    used.sort_unstable();
    used.dedup();
    let vertices: Vec<Vec3> = used
        .iter()
        .enumerate()
        .map(|(k, &node)| {
            remap.insert(node, k);
            nodes[node]
        })
        .collect();
    let panels: Vec<[usize; 3]> = faces
        .iter()
        .map(|&(c, f)| TET_FACES[f].map(|i| remap[&cells[c][i]]))
        .collect();
    let links: Vec<BoundaryLink> = faces
        .iter()
        .enumerate()
        .map(|(panel, &(cell, face))| BoundaryLink { cell, face, panel })
        .collect();
    let surface = SurfaceMesh::new(vertices, panels)?;
    let volume = VolumeMesh::new(nodes, cells, links, &surface)?;
    Ok((surface, volume))
}

/// Subdivided icosahedron projected to the sphere; triangles wound outward.
fn icosphere(radius: f64, refinement: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut base = Vec::with_capacity(12);
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            base.push(Vec3::new(0.0, s1, s2 * phi));
            base.push(Vec3::new(s1, s2 * phi, 0.0));
            base.push(Vec3::new(s2 * phi, 0.0, s1));
        }
    }
    // faces are the triples of mutually adjacent vertices (edge length 2)
    let adjacent = |a: &Vec3, b: &Vec3| ((a - b).norm() - 2.0).abs() < 1e-9;
    let mut triangles = Vec::with_capacity(20);
    for i in 0..12 {
        for j in (i + 1)..12 {
            if !adjacent(&base[i], &base[j]) {
                continue;
            }
            for k in (j + 1)..12 {
                if adjacent(&base[i], &base[k]) && adjacent(&base[j], &base[k]) {
                    let n = (base[j] - base[i]).cross(&(base[k] - base[i]));
                    let c = base[i] + base[j] + base[k];
                    triangles.push(if n.dot(&c) > 0.0 { [i, j, k] } else { [i, k, j] });
                }
            }
        }
    }
    let mut vertices: Vec<Vec3> = base.iter().map(|v| v.normalize() * radius).collect();
    for _ in 0..refinement {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push((vertices[a] + vertices[b]).normalize() * radius);
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * triangles.len());
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        triangles = next;
    }
    (vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_statistics;
    use std::f64::consts::PI;

    #[test]
    fn icosahedron_area_matches_closed_form() {
        let (s, _) = build_ball_mesh(1.0, 0).unwrap();
        assert_eq!(s.len(), 20);
        let edge = 1.0 / (2.0 * PI / 5.0).sin();
        let oracle = 5.0 * 3f64.sqrt() * edge * edge;
        assert!((s.total_area() - oracle).abs() < 1e-12, "{} vs {oracle}", s.total_area());
        assert!((oracle - 9.574).abs() < 1e-3);
    }

    #[test]
    fn refined_sphere_area_approaches_four_pi() {
        let (s, _) = build_ball_mesh(1.0, 2).unwrap();
        assert_eq!(s.len(), 320);
        assert!((s.total_area() - 4.0 * PI).abs() / (4.0 * PI) < 0.02);
    }

    #[test]
    fn surfaces_are_closed_and_outward() {
        for r in 0..=3 {
            let (s, _) = build_ball_mesh(1.0, r).unwrap();
            assert!(s.area_weighted_normal_sum().norm() <= 1e-10 * s.total_area());
            for j in 0..s.len() {
                assert!(s.normal(j).dot(&s.centroid(j)) > 0.0);
                assert!((s.normal(j).norm() - 1.0).abs() < 1e-12);
            }
        }
        for n in [1, 2, 3] {
            let (s, _) = build_cube_mesh(1.0, n).unwrap();
            assert_eq!(s.len(), 12 * n * n);
            assert!(s.area_weighted_normal_sum().norm() <= 1e-10 * s.total_area());
            for j in 0..s.len() {
                assert!(s.normal(j).dot(&s.centroid(j)) > 0.0);
            }
        }
    }

    #[test]
    fn cube_volumes_are_exact() {
        let (_, v) = build_cube_mesh(1.0, 1).unwrap();
        assert_eq!(v.len(), 6);
        assert!((v.total_volume() - 8.0).abs() < 1e-14);
        let (s, _) = build_cube_mesh(1.0, 2).unwrap();
        assert!((s.total_area() - 24.0).abs() < 1e-13);
        let (_, v) = build_cube_mesh(0.5, 2).unwrap();
        assert!((v.total_volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ball_volume_converges() {
        let exact = 4.0 * PI / 3.0;
        let errs: Vec<f64> = (0..=3)
            .map(|r| (build_ball_mesh(1.0, r).unwrap().1.total_volume() - exact).abs())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0]);
            assert!((w[0] / w[1]).log2() >= 1.5, "{errs:?}");
        }
        assert!(errs[2] / exact < 0.04, "{errs:?}");
    }

    #[test]
    fn ball_cell_counts() {
        let (s, v) = build_ball_mesh(1.0, 1).unwrap();
        assert_eq!(s.len(), 80);
        let layers = ball_layers(1);
        assert_eq!(v.len(), 80 * (1 + 3 * (layers - 1)));
        assert_eq!(v.links().len(), 80);
    }

    #[test]
    fn rejects_out_of_range_sizes() {
        assert!(matches!(build_ball_mesh(1.0, 7), Err(MeshError::RefinementTooLarge(7))));
        assert!(matches!(build_cube_mesh(1.0, 25), Err(MeshError::DivisionsOutOfRange(25))));
        assert!(build_ball_mesh(-1.0, 1).is_err());
    }

    #[test]
    fn statistics_of_generated_meshes() {
        let (s, v) = build_cube_mesh(1.0, 2).unwrap();
        let st = mesh_statistics(&s, &v);
        assert!((st.h_volume - 3f64.sqrt()).abs() < 1e-14);
        assert!(st.min_quality > 0.0);
        let (s0, v0) = build_ball_mesh(1.0, 0).unwrap();
        let (s1, v1) = build_ball_mesh(1.0, 1).unwrap();
        let ratio = mesh_statistics(&s0, &v0).h_surface / mesh_statistics(&s1, &v1).h_surface;
        assert!((ratio - 2.0).abs() < 0.4, "h ratio {ratio}");
    }

    #[test]
    fn link_faces_coincide_with_panels() {
        let (s, v) = build_ball_mesh(1.0, 2).unwrap();
        for j in 0..s.len() {
            let l = v.link_for_panel(j);
            let f = v.face_corners(l.cell, l.face);
            let p = s.corners(j);
            for (a, b) in f.iter().zip(&p) {
                assert_eq!(a, b);
            }
        }
    }
}
