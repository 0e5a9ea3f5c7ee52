//! Icosphere ball and structured cube meshes: counts, sizes, quality, round trip.

use bdie::mesh::{build_ball_mesh, build_cube_mesh, mesh_statistics, read_mesh, write_mesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>7} {:>7} {:>9} {:>9} {:>8}", "mesh", "panels", "cells", "h_surf", "h_vol", "quality");
    for r in 0..3 {
        let (s, v) = build_ball_mesh(1.0, r)?;
        let st = mesh_statistics(&s, &v);
        println!(
            "{:>6} {:>7} {:>7} {:>9.4} {:>9.4} {:>8.4}",
            format!("ball{r}"),
            st.counts.panels,
            st.counts.cells,
            st.h_surface,
            st.h_volume,
            st.min_quality
        );
        // the area-weighted normals of a closed surface sum to zero
        assert!(s.area_weighted_normal_sum().norm() < 1e-12);
    }
    for n in [2, 4, 8] {
        let (s, v) = build_cube_mesh(1.0, n)?;
        let st = mesh_statistics(&s, &v);
        println!(
            "{:>6} {:>7} {:>7} {:>9.4} {:>9.4} {:>8.4}",
            format!("cube{n}"),
            st.counts.panels,
            st.counts.cells,
            st.h_surface,
            st.h_volume,
            st.min_quality
        );
    }

    let (s, v) = build_ball_mesh(1.0, 1)?;
    let mut buf = Vec::new();
    write_mesh(&s, &v, &mut buf)?;
    let (s2, v2) = read_mesh(&buf[..])?;
    println!("round trip: {} bytes, {} panels, {} cells", buf.len(), s2.len(), v2.len());
    Ok(())
}
