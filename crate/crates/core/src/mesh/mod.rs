//! Surface triangulations of ∂Ω and matching tetrahedral decompositions of Ω.

mod build;
mod io;

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{
    tet_diameter, tet_quality, tet_signed_volume, triangle_area, triangle_diameter, triangle_normal,
    triangle_quality, Aabb, Vec3, TET_FACES,
};

pub use build::{build_ball_mesh, build_ball_mesh_with, build_cube_mesh, ball_layers, BallOptions};
pub use io::{export_mesh, import_mesh, read_mesh, write_mesh};

pub const MAX_BALL_REFINEMENT: usize = 6;
pub const MAX_CUBE_DIVISIONS: usize = 24;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("ball refinement {0} exceeds the supported maximum {MAX_BALL_REFINEMENT}")]
    RefinementTooLarge(usize),
    #[error("cube subdivision n={0} outside 1..={MAX_CUBE_DIVISIONS}")]
    DivisionsOutOfRange(usize),
    #[error("geometry size must be positive and finite, got {0}")]
    BadSize(f64),
    #[error("panel {0} is degenerate (zero area)")]
    DegeneratePanel(usize),
    #[error("panel {index} normal has length {length}, expected 1")]
    NonUnitNormal { index: usize, length: f64 },
    #[error("vertex index {index} out of range in element {element}")]
    IndexOutOfRange { element: usize, index: usize },
    #[error("boundary link is not a bijection between boundary faces and panels: {0}")]
    BadLink(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh file is missing section {0}")]
    MissingSection(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The two supported domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Ball { radius: f64 },
    Cube { half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGeometry {
    pub kind: DomainKind,
    pub center: Vec3,
}

impl DomainGeometry {
    pub fn ball(radius: f64) -> Self {
        Self {
            kind: DomainKind::Ball { radius },
            center: Vec3::zeros(),
        }
    }

    pub fn cube(half_width: f64) -> Self {
        Self {
            kind: DomainKind::Cube { half_width },
            center: Vec3::zeros(),
        }
    }

    pub fn bounding_box(&self) -> Aabb {
        match self.kind {
            DomainKind::Ball { radius } => Aabb::cube(self.center, radius),
            DomainKind::Cube { half_width } => Aabb::cube(self.center, half_width),
        }
    }

    /// Whether `p` lies in the open continuous domain.
    pub fn contains(&self, p: &Vec3) -> bool {
        let d = p - self.center;
        match self.kind {
            DomainKind::Ball { radius } => d.norm() < radius,
            DomainKind::Cube { half_width } => d.amax() < half_width,
        }
    }
}

/// Closed triangulated surface with per-panel centroid, area, diameter and outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    panels: Vec<[usize; 3]>,
    centroids: Vec<Vec3>,
    areas: Vec<f64>,
    normals: Vec<Vec3>,
    diameters: Vec<f64>,
}

impl SurfaceMesh {
    /// Builds the mesh; normals follow the vertex winding.
    pub fn new(vertices: Vec<Vec3>, panels: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        check_indices(&panels, vertices.len())?;
        let normals = panels
            .iter()
            .map(|p| triangle_normal(&vertices[p[0]], &vertices[p[1]], &vertices[p[2]]))
            .collect();
        Self::with_normals(vertices, panels, normals)
    }

    /// Builds the mesh from explicit normals, which must have unit length.
    pub fn with_normals(
        vertices: Vec<Vec3>,
        panels: Vec<[usize; 3]>,
        normals: Vec<Vec3>,
    ) -> Result<Self, MeshError> {
        check_indices(&panels, vertices.len())?;
        let mut centroids = Vec::with_capacity(panels.len());
        let mut areas = Vec::with_capacity(panels.len());
        let mut diameters = Vec::with_capacity(panels.len());
        for (j, p) in panels.iter().enumerate() {
            let [a, b, c] = [vertices[p[0]], vertices[p[1]], vertices[p[2]]];
            let area = triangle_area(&a, &b, &c);
            if !(area > 0.0) {
                return Err(MeshError::DegeneratePanel(j));
            }
            let length = normals[j].norm();
            if (length - 1.0).abs() > 1e-12 || !length.is_finite() {
                return Err(MeshError::NonUnitNormal { index: j, length });
            }
            centroids.push((a + b + c) / 3.0);
            areas.push(area);
            diameters.push(triangle_diameter(&a, &b, &c));
        }
        Ok(Self {
            vertices,
            panels,
            centroids,
            areas,
            normals,
            diameters,
        })
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn panels(&self) -> &[[usize; 3]] {
        &self.panels
    }

    pub fn centroid(&self, j: usize) -> Vec3 {
        self.centroids[j]
    }

    pub fn centroids(&self) -> &[Vec3] {
        &self.centroids
    }

    pub fn area(&self, j: usize) -> f64 {
        self.areas[j]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn normal(&self, j: usize) -> Vec3 {
        self.normals[j]
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn diameter(&self, j: usize) -> f64 {
        self.diameters[j]
    }

    pub fn corners(&self, j: usize) -> [Vec3; 3] {
        let p = self.panels[j];
        [self.vertices[p[0]], self.vertices[p[1]], self.vertices[p[2]]]
    }

    pub fn quality(&self, j: usize) -> f64 {
        let [a, b, c] = self.corners(j);
        triangle_quality(&a, &b, &c)
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// `Σ area·n`, which vanishes for a closed surface.
    pub fn area_weighted_normal_sum(&self) -> Vec3 {
        self.areas
            .iter()
            .zip(&self.normals)
            .fold(Vec3::zeros(), |acc, (a, n)| acc + *a * n)
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Distance from `p` to the nearest panel.
    pub fn distance_to(&self, p: &Vec3) -> f64 {
        (0..self.len())
            .map(|j| {
                let [a, b, c] = self.corners(j);
                crate::geometry::point_triangle_distance(p, &a, &b, &c)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }
}

/// Boundary face `face` (local index, opposite vertex `face`) of `cell` coincides with `panel`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryLink {
    pub cell: usize,
    pub face: usize,
    pub panel: usize,
}

/// Tetrahedral decomposition of Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeMesh {
    nodes: Vec<Vec3>,
    cells: Vec<[usize; 4]>,
    barycenters: Vec<Vec3>,
    volumes: Vec<f64>,
    diameters: Vec<f64>,
    links: Vec<BoundaryLink>,
    panel_to_link: Vec<usize>,
}

impl VolumeMesh {
    /// Builds the mesh and validates the boundary link against `surface`.
    pub fn new(
        nodes: Vec<Vec3>,
        cells: Vec<[usize; 4]>,
        links: Vec<BoundaryLink>,
        surface: &SurfaceMesh,
    ) -> Result<Self, MeshError> {
        let mesh = Self::unchecked(nodes, cells, links, surface.len())?;
        mesh.check_link(surface)?;
        Ok(mesh)
    }

    /// Builds derived quantities without cross-checking the surface.
    pub(crate) fn unchecked(
        nodes: Vec<Vec3>,
        cells: Vec<[usize; 4]>,
        links: Vec<BoundaryLink>,
        n_panels: usize,
    ) -> Result<Self, MeshError> {
        for (e, c) in cells.iter().enumerate() {
            for &i in c {
                if i >= nodes.len() {
                    return Err(MeshError::IndexOutOfRange { element: e, index: i });
                }
            }
        }
        let mut barycenters = Vec::with_capacity(cells.len());
        let mut volumes = Vec::with_capacity(cells.len());
        let mut diameters = Vec::with_capacity(cells.len());
        for c in &cells {
            let v = c.map(|i| nodes[i]);
            barycenters.push((v[0] + v[1] + v[2] + v[3]) / 4.0);
            volumes.push(tet_signed_volume(&v[0], &v[1], &v[2], &v[3]).abs());
            diameters.push(tet_diameter(&v));
        }
        let mut panel_to_link = vec![usize::MAX; n_panels];
        for (k, l) in links.iter().enumerate() {
            if l.panel >= n_panels || l.cell >= cells.len() || l.face > 3 {
                return Err(MeshError::BadLink(format!("entry {k} out of range")));
            }
            if panel_to_link[l.panel] != usize::MAX {
                return Err(MeshError::BadLink(format!("panel {} linked twice", l.panel)));
            }
            panel_to_link[l.panel] = k;
        }
        if let Some(j) = panel_to_link.iter().position(|&k| k == usize::MAX) {
            return Err(MeshError::BadLink(format!("panel {j} has no boundary face")));
        }
        Ok(Self {
            nodes,
            cells,
            barycenters,
            volumes,
            diameters,
            links,
            panel_to_link,
        })
    }

    fn check_link(&self, surface: &SurfaceMesh) -> Result<(), MeshError> {
        let boundary = boundary_faces(&self.cells);
        if boundary.len() != surface.len() || self.links.len() != surface.len() {
            return Err(MeshError::BadLink(format!(
                "{} boundary faces, {} links, {} panels",
                boundary.len(),
                self.links.len(),
                surface.len()
            )));
        }
        let scale = surface.bounding_box().diameter().max(1.0);
        for l in &self.links {
            if !boundary.contains(&(l.cell, l.face)) {
                return Err(MeshError::BadLink(format!(
                    "cell {} face {} is interior",
                    l.cell, l.face
                )));
            }
            let face = self.face_corners(l.cell, l.face);
            let panel = surface.corners(l.panel);
            for p in &panel {
                let d = face.iter().map(|f| (f - p).norm()).fold(f64::INFINITY, f64::min);
                if d > 1e-12 * scale {
                    return Err(MeshError::BadLink(format!(
                        "panel {} does not coincide with cell {} face {} (gap {d:e})",
                        l.panel, l.cell, l.face
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    pub fn barycenter(&self, c: usize) -> Vec3 {
        self.barycenters[c]
    }

    pub fn barycenters(&self) -> &[Vec3] {
        &self.barycenters
    }

    pub fn volume(&self, c: usize) -> f64 {
        self.volumes[c]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn diameter(&self, c: usize) -> f64 {
        self.diameters[c]
    }

    pub fn corners(&self, c: usize) -> [Vec3; 4] {
        self.cells[c].map(|i| self.nodes[i])
    }

    pub fn face_corners(&self, cell: usize, face: usize) -> [Vec3; 3] {
        let f = TET_FACES[face];
        let c = self.corners(cell);
        [c[f[0]], c[f[1]], c[f[2]]]
    }

    pub fn links(&self) -> &[BoundaryLink] {
        &self.links
    }

    /// The boundary face coinciding with `panel`.
    pub fn link_for_panel(&self, panel: usize) -> BoundaryLink {
        self.links[self.panel_to_link[panel]]
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }
}

fn check_indices(panels: &[[usize; 3]], n: usize) -> Result<(), MeshError> {
    for (e, p) in panels.iter().enumerate() {
        for &i in p {
            if i >= n {
                return Err(MeshError::IndexOutOfRange { element: e, index: i });
            }
        }
    }
    Ok(())
}

/// `(cell, local face)` pairs whose face is not shared with another cell.
pub(crate) fn boundary_faces(cells: &[[usize; 4]]) -> Vec<(usize, usize)> {
    let mut count: HashMap<[usize; 3], (usize, usize, usize)> = HashMap::new();
    for (c, cell) in cells.iter().enumerate() {
        for (f, local) in TET_FACES.iter().enumerate() {
            let mut key = local.map(|i| cell[i]);
            key.sort_unstable();
            let e = count.entry(key).or_insert((0, c, f));
            e.0 += 1;
        }
    }
    let mut out: Vec<(usize, usize)> = count
        .into_values()
        .filter(|(n, _, _)| *n == 1)
        .map(|(_, c, f)| (c, f))
        .collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshCounts {
    pub vertices: usize,
    pub panels: usize,
    pub nodes: usize,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshStatistics {
    pub h_surface: f64,
    pub h_volume: f64,
    pub counts: MeshCounts,
    /// Minimum of `3·inradius/circumradius` over all cells.
    pub min_quality: f64,
    pub degenerate: bool,
}

pub fn mesh_statistics(surface: &SurfaceMesh, volume: &VolumeMesh) -> MeshStatistics {
    let min_quality = (0..volume.len())
        .map(|c| tet_quality(&volume.corners(c)))
        .fold(f64::INFINITY, f64::min);
    let min_quality = if min_quality.is_finite() { min_quality } else { 0.0 };
    MeshStatistics {
        h_surface: surface.max_diameter(),
        h_volume: volume.max_diameter(),
        counts: MeshCounts {
            vertices: surface.vertices().len(),
            panels: surface.len(),
            nodes: volume.nodes().len(),
            cells: volume.len(),
        },
        min_quality,
        degenerate: min_quality <= 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_vertex_flags_zero_quality() {
        let (surface, volume) = build_cube_mesh(1.0, 1).unwrap();
        let mut cells = volume.cells().to_vec();
        cells[0][3] = cells[0][0];
        let degenerate =
            VolumeMesh::unchecked(volume.nodes().to_vec(), cells, volume.links().to_vec(), surface.len())
                .unwrap();
        let stats = mesh_statistics(&surface, &degenerate);
        assert_eq!(stats.min_quality, 0.0);
        assert!(stats.degenerate);
    }

    #[test]
    fn contains_respects_kind() {
        let b = DomainGeometry::ball(1.0);
        assert!(b.contains(&Vec3::new(0.5, 0.5, 0.5)));
        assert!(!b.contains(&Vec3::new(0.8, 0.8, 0.0)));
        let c = DomainGeometry::cube(1.0);
        assert!(c.contains(&Vec3::new(0.9, -0.9, 0.9)));
        assert!(!c.contains(&Vec3::new(1.1, 0.0, 0.0)));
    }
}
