//! Weakly singular integrals over one panel and one tetrahedron: Duffy rules
//! against the closed forms for `1/r`.

use bdie::geometry::Vec3;
use bdie::quadrature::{conical_duffy, flat_triangle_inverse_distance, panel_duffy, tet_inverse_distance};

fn main() {
    let tri = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.2, 0.8, 0.0)];
    let c = (tri[0] + tri[1] + tri[2]) / 3.0;
    let exact = flat_triangle_inverse_distance(&tri, &c);
    println!("panel ∫1/r at the centroid, closed form {exact:.12}");
    for n in [2, 5, 10, 20] {
        let v = panel_duffy(&tri, &c, n, &|x| 1.0 / (x - c).norm());
        println!("  Duffy n = {n:>2}: {v:.12}  error {:.2e}", (v - exact).abs());
    }

    let tet = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.1, 0.2, 0.9),
    ];
    for (label, y) in [("barycenter", tet.iter().sum::<Vec3>() / 4.0), ("face point", (tet[0] + tet[1] + tet[2]) / 3.0)] {
        let exact = tet_inverse_distance(&tet, &y);
        println!("tet ∫1/r at the {label}, closed form {exact:.12}");
        for n in [4, 8, 16] {
            let v = conical_duffy(&tet, &y, n, &|x| 1.0 / (x - y).norm());
            println!("  conical n = {n:>2}: {v:.12}  error {:.2e}", (v - exact).abs());
        }
    }
}
