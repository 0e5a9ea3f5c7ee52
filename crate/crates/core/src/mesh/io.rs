//! Plain-text mesh files.
//!
//! ```text
//! VERTICES n        then n lines "x y z"
//! PANELS m          then m lines "i j k nx ny nz"
//! NODES p           then p lines "x y z"
//! CELLS q           then q lines "a b c d"
//! LINK q_b          then q_b lines "cell face panel"
//! ```
//! Reals are written with 17 significant digits so a round trip is bitwise exact.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{BoundaryLink, MeshError, SurfaceMesh, VolumeMesh};
use crate::geometry::Vec3;

pub fn export_mesh(surface: &SurfaceMesh, volume: &VolumeMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    write_mesh(surface, volume, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn import_mesh(path: impl AsRef<Path>) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    let file = fs::File::open(path)?;
    read_mesh(std::io::BufReader::new(file))
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_mesh(surface: &SurfaceMesh, volume: &VolumeMesh, out: &mut impl Write) -> Result<(), MeshError> {
    writeln!(out, "VERTICES {}", surface.vertices().len())?;
    for v in surface.vertices() {
        writeln!(out, "{} {} {}", real(v.x), real(v.y), real(v.z))?;
    }
    writeln!(out, "PANELS {}", surface.len())?;
    for (p, n) in surface.panels().iter().zip(surface.normals()) {
        writeln!(out, "{} {} {} {} {} {}", p[0], p[1], p[2], real(n.x), real(n.y), real(n.z))?;
    }
    writeln!(out, "NODES {}", volume.nodes().len())?;
    for v in volume.nodes() {
        writeln!(out, "{} {} {}", real(v.x), real(v.y), real(v.z))?;
    }
    writeln!(out, "CELLS {}", volume.len())?;
    for c in volume.cells() {
        writeln!(out, "{} {} {} {}", c[0], c[1], c[2], c[3])?;
    }
    writeln!(out, "LINK {}", volume.links().len())?;
    for l in volume.links() {
        writeln!(out, "{} {} {}", l.cell, l.face, l.panel)?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self, section: &'static str) -> Result<String, MeshError> {
        loop {
            match self.inner.next() {
                None => return Err(MeshError::MissingSection(section)),
                Some(l) => {
                    self.line += 1;
                    let l = l?;
                    if !l.trim().is_empty() {
                        return Ok(l);
                    }
                }
            }
        }
    }

    fn header(&mut self, section: &'static str) -> Result<usize, MeshError> {
        let l = self.next_line(section)?;
        let mut it = l.split_whitespace();
        if it.next() != Some(section) {
            return Err(self.err(format!("expected section {section}, found {l:?}")));
        }
        let n = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err(format!("section {section} needs an element count")))?;
        Ok(n)
    }

    fn fields<T: std::str::FromStr>(&mut self, section: &'static str, n: usize) -> Result<Vec<T>, MeshError> {
        let l = self.next_line(section)?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != n {
            if parts.first().is_some_and(|p| p.chars().all(|c| c.is_ascii_uppercase())) {
                return Err(MeshError::MissingSection(section));
            }
            return Err(self.err(format!("expected {n} fields, found {}", parts.len())));
        }
        parts
            .iter()
            .map(|p| p.parse::<T>().map_err(|_| self.err(format!("cannot parse {p:?}"))))
            .collect()
    }

    fn err(&self, message: String) -> MeshError {
        MeshError::Parse {
            line: self.line,
            message,
        }
    }
}

pub fn read_mesh(reader: impl BufRead) -> Result<(SurfaceMesh, VolumeMesh), MeshError> {
    let mut lines = Lines {
        inner: reader.lines(),
        line: 0,
    };
    let n = lines.header("VERTICES")?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let f: Vec<f64> = lines.fields("VERTICES", 3)?;
        vertices.push(Vec3::new(f[0], f[1], f[2]));
    }
    let m = lines.header("PANELS")?;
    let mut panels = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    for _ in 0..m {
        let l = lines.next_line("PANELS")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 6 {
            return Err(lines.err(format!("expected 6 fields, found {}", parts.len())));
        }
        let idx: Result<Vec<usize>, _> = parts[..3].iter().map(|p| p.parse()).collect();
        let nrm: Result<Vec<f64>, _> = parts[3..].iter().map(|p| p.parse()).collect();
        match (idx, nrm) {
            (Ok(i), Ok(n)) => {
                panels.push([i[0], i[1], i[2]]);
                normals.push(Vec3::new(n[0], n[1], n[2]));
            }
            _ => return Err(lines.err("malformed panel".into())),
        }
    }
    let p = lines.header("NODES")?;
    let mut nodes = Vec::with_capacity(p);
    for _ in 0..p {
        let f: Vec<f64> = lines.fields("NODES", 3)?;
        nodes.push(Vec3::new(f[0], f[1], f[2]));
    }
    let q = lines.header("CELLS")?;
    let mut cells = Vec::with_capacity(q);
    for _ in 0..q {
        let f: Vec<usize> = lines.fields("CELLS", 4)?;
        cells.push([f[0], f[1], f[2], f[3]]);
    }
    let qb = lines.header("LINK")?;
    let mut links = Vec::with_capacity(qb);
    for _ in 0..qb {
        let f: Vec<usize> = lines.fields("LINK", 3)?;
        links.push(BoundaryLink {
            cell: f[0],
            face: f[1],
            panel: f[2],
        });
    }
    let surface = SurfaceMesh::with_normals(vertices, panels, normals)?;
    let volume = VolumeMesh::new(nodes, cells, links, &surface)?;
    Ok((surface, volume))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_ball_mesh, build_cube_mesh};

    fn to_string(s: &SurfaceMesh, v: &VolumeMesh) -> String {
        let mut buf = Vec::new();
        write_mesh(s, v, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let (s, v) = build_ball_mesh(1.0, 1).unwrap();
        let text = to_string(&s, &v);
        let (s2, v2) = read_mesh(text.as_bytes()).unwrap();
        assert_eq!(s, s2);
        assert_eq!(v, v2);
        for (a, b) in s.vertices().iter().zip(s2.vertices()) {
            for k in 0..3 {
                assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let (s, v) = build_cube_mesh(1.0, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.mesh");
        export_mesh(&s, &v, &path).unwrap();
        let (s2, v2) = import_mesh(&path).unwrap();
        assert_eq!(s, s2);
        assert_eq!(v, v2);
    }

    #[test]
    fn non_unit_normal_rejected() {
        let (s, v) = build_cube_mesh(1.0, 1).unwrap();
        let text = to_string(&s, &v);
        let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
        let panel_line = lines.iter().position(|l| l.starts_with("PANELS")).unwrap() + 1;
        let mut parts: Vec<String> = lines[panel_line].split_whitespace().map(str::to_owned).collect();
        parts[3] = "2.0".into();
        lines[panel_line] = parts.join(" ");
        let err = read_mesh(lines.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::NonUnitNormal { index: 0, .. }), "{err}");
    }

    #[test]
    fn truncated_file_names_missing_section() {
        let (s, v) = build_cube_mesh(1.0, 1).unwrap();
        let text = to_string(&s, &v);
        let cut = text.find("CELLS").unwrap();
        let err = read_mesh(text[..cut].as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::MissingSection("CELLS")), "{err}");
        // truncated in the middle of a section
        let cut = text.find("NODES").unwrap() + 40;
        let err = read_mesh(text[..cut].as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::MissingSection("NODES") | MeshError::Parse { .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let (s, v) = build_cube_mesh(1.0, 1).unwrap();
        let text = to_string(&s, &v).replacen("VERTICES 8\n", "VERTICES 8\n1.0 abc 2.0\n", 1);
        match read_mesh(text.as_bytes()).unwrap_err() {
            MeshError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }
}
