use super::*;
use crate::coefficient::CoefficientField;
use crate::geometry::TET_FACES;
use crate::mesh::build_ball_mesh;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};

fn unit() -> CoefficientField {
    CoefficientField::constant(1.0).unwrap()
}

fn expo() -> CoefficientField {
    CoefficientField::exponential([0.7, -0.4, 0.2], 0.1, 10.0).unwrap()
}

fn equilateral(side: f64) -> [Vec3; 3] {
    [
        Vec3::zeros(),
        Vec3::new(side, 0.0, 0.0),
        Vec3::new(0.5 * side, 0.5 * 3f64.sqrt() * side, 0.0),
    ]
}

fn source_panel(field: &CoefficientField, t: [Vec3; 3]) -> PanelSource {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0])).normalize();
    PanelSource::new(field, t, n)
}

/// Uniformly refined degree-18 rule.
fn panel_oracle(id: KernelId, ctx: &KernelContext, src: &PanelSource, target: &KernelPoint, levels: u32) -> f64 {
    let rule = TriangleRule::collapsed_gauss(10);
    integrate_triangle_uniform(&src.corners, levels, &rule, &|x| {
        eval_unchecked(id, &KernelPoint::with_normal(ctx.field(), *x, src.normal), target)
    })
}

#[test]
fn constant_integrands_give_measures() {
    let t = [
        Vec3::new(0.1, 0.2, 0.3),
        Vec3::new(1.2, -0.1, 0.4),
        Vec3::new(0.3, 0.8, -0.2),
    ];
    let area = triangle_area(&t[0], &t[1], &t[2]);
    let policy = SingularPolicy::default();
    let near = integrate_triangle_adaptive(&t, &t[0], &policy, &TriangleRule::dunavant4(), &|_| 1.0);
    assert!((near - area).abs() < 1e-14);
    let k = [t[0], t[1], t[2], Vec3::new(0.4, 0.3, 1.1)];
    let vol = tet_signed_volume(&k[0], &k[1], &k[2], &k[3]).abs();
    let near = integrate_tet_adaptive(&k, &k[3], &policy, &TetRule::keast2(), &|_| 1.0);
    assert!((near - vol).abs() < 1e-14);
}

#[test]
fn far_and_near_panels_match_the_oracle() {
    let (surface, _) = build_ball_mesh(1.0, 2).unwrap();
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    let policy = SingularPolicy::default();
    let j = 17;
    let src = PanelSource::new(&field, surface.corners(j), surface.normal(j));
    let n = surface.normal(j);

    let far = ctx.point(src.centroid + n * (10.0 * src.diameter));
    let value = integrate_panel(KernelId::Laplace, &ctx, &src, &far, &policy).unwrap();
    let oracle = panel_oracle(KernelId::Laplace, &ctx, &src, &far, 2);
    assert!((value - oracle).abs() < 1e-8, "{value} vs {oracle}");

    for dir in [n, -n, (src.corners[0] - src.centroid).normalize()] {
        let near = ctx.point(src.centroid + dir * (0.5 * src.diameter));
        for id in [KernelId::Laplace, KernelId::LaplaceConormal] {
            let value = integrate_panel(id, &ctx, &src, &near, &policy).unwrap();
            let oracle = panel_oracle(id, &ctx, &src, &near, 6);
            assert!((value - oracle).abs() < 1e-4 * oracle.abs().max(1e-3), "{id}: {value} vs {oracle}");
        }
    }
}

#[test]
fn equilateral_self_term_has_closed_form() {
    let side = 0.7;
    let t = equilateral(side);
    let c = (t[0] + t[1] + t[2]) / 3.0;
    // ∫ 1/r from the centroid of an equilateral triangle is √3·L·ln(2+√3)
    let exact = 3f64.sqrt() * side * (2.0 + 3f64.sqrt()).ln();
    assert!((flat_triangle_inverse_distance(&t, &c) - exact).abs() < 1e-14);
    let duffy = panel_duffy(&t, &c, DUFFY_POINTS, &|x| 1.0 / (x - c).norm());
    assert!((duffy - exact).abs() < 1e-6 * exact, "{duffy} vs {exact}");
}

#[test]
fn analytic_formula_matches_duffy_off_centroid() {
    let t = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.2, 0.1),
        Vec3::new(0.3, 0.9, -0.2),
    ];
    for l in [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2], [0.1, 0.1, 0.8]] {
        let c = t[0] * l[0] + t[1] * l[1] + t[2] * l[2];
        let a = flat_triangle_inverse_distance(&t, &c);
        let d = panel_duffy(&t, &c, 16, &|x| 1.0 / (x - c).norm());
        assert!((a - d).abs() < 1e-8 * a, "{a} vs {d}");
    }
}

#[test]
fn self_terms_of_single_layer_kernels() {
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    let src = source_panel(&field, equilateral(0.5));
    let target = ctx.boundary_point(src.centroid, src.normal);
    let analytic = flat_triangle_inverse_distance(&src.corners, &src.centroid) / FOUR_PI;
    let policy = SingularPolicy::default();
    let px = integrate_panel_self(KernelId::ParametrixX, &ctx, &src, &target, &policy).unwrap();
    assert!((px + analytic).abs() < 1e-15);
    for id in [KernelId::LaplaceConormal, KernelId::ConormalX, KernelId::ConormalY] {
        assert_eq!(integrate_panel_self(id, &ctx, &src, &target, &policy).unwrap(), 0.0);
    }
    assert!(matches!(
        integrate_panel_self(KernelId::RemainderX, &ctx, &src, &target, &policy),
        Err(QuadratureError::UnsupportedKernel { .. })
    ));
}

#[test]
fn self_term_strategies_agree_for_variable_coefficients() {
    let field = expo();
    let ctx = KernelContext::new(&field, 2.0);
    let t = [
        Vec3::new(0.2, 0.1, 0.3),
        Vec3::new(0.6, 0.2, 0.25),
        Vec3::new(0.3, 0.5, 0.45),
    ];
    let src = source_panel(&field, t);
    let target = ctx.boundary_point(src.centroid, src.normal);
    let ball = SingularPolicy::default();
    let duffy = SingularPolicy {
        self_term: SelfTermStrategy::Duffy,
        ..ball
    };
    for id in [KernelId::ParametrixX, KernelId::ParametrixY, KernelId::ConormalX] {
        let a = integrate_panel_self(id, &ctx, &src, &target, &ball).unwrap();
        let b = integrate_panel_self(id, &ctx, &src, &target, &duffy).unwrap();
        // the subtraction remainder is integrated by a fixed rule across the kink at c
        assert!((a - b).abs() < 1e-4 * a.abs(), "{id}: {a} vs {b}");
    }
}

#[test]
fn sliver_panel_is_rejected() {
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    let t = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.5, 1e-8, 0.0)];
    let src = PanelSource::new(&field, t, Vec3::z());
    let target = ctx.boundary_point(src.centroid, src.normal);
    let err = integrate_panel_self(KernelId::Laplace, &ctx, &src, &target, &SingularPolicy::default());
    assert!(matches!(err, Err(QuadratureError::DegeneratePanel { .. })), "{err:?}");
}

#[test]
fn target_on_panel_requires_self_path() {
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    let src = source_panel(&field, equilateral(1.0));
    let target = ctx.point(src.centroid);
    let err = integrate_panel(KernelId::Laplace, &ctx, &src, &target, &SingularPolicy::default());
    assert!(matches!(err, Err(QuadratureError::SingularTarget { .. })));
}

#[test]
fn gauss_solid_angle_on_refined_ball() {
    let (surface, _) = build_ball_mesh(1.0, 2).unwrap();
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    let policy = SingularPolicy::default();
    let sources: Vec<PanelSource> = (0..surface.len())
        .map(|j| PanelSource::new(&field, surface.corners(j), surface.normal(j)))
        .collect();
    let mut runner = TestRunner::new(Config::default());
    let targets = prop::array::uniform3(-0.55f64..0.55);
    for _ in 0..10 {
        let y = Vec3::from(targets.new_tree(&mut runner).unwrap().current());
        let target = ctx.point(y);
        let total: f64 = sources
            .iter()
            .map(|s| integrate_panel(KernelId::LaplaceConormal, &ctx, s, &target, &policy).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-3, "{y}: {total}");
    }
}

#[test]
fn ball_newton_potential_at_center() {
    let (_, volume) = build_ball_mesh(1.0, 2).unwrap();
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    let policy = SingularPolicy::default();
    let target = ctx.point(Vec3::zeros());
    let total: f64 = (0..volume.len())
        .map(|c| {
            let src = CellSource::new(&field, volume.corners(c));
            integrate_cell(KernelId::Laplace, &ctx, &src, &target, &policy).unwrap()
        })
        .sum();
    assert!((total + 0.5).abs() < 2e-2, "{total}");
}

fn sample_tet() -> [Vec3; 4] {
    [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(0.4, 0.05, 0.0),
        Vec3::new(0.1, 0.35, 0.05),
        Vec3::new(0.05, 0.1, 0.45),
    ]
}

#[test]
fn remainders_vanish_for_constant_coefficients() {
    let field = CoefficientField::constant(2.5).unwrap();
    let ctx = KernelContext::new(&field, 2.0);
    let src = CellSource::new(&field, sample_tet());
    let policy = SingularPolicy::default();
    for id in [KernelId::RemainderX, KernelId::RemainderY] {
        let near = ctx.point(Vec3::new(0.5, 0.5, 0.5));
        assert_eq!(integrate_cell(id, &ctx, &src, &near, &policy).unwrap(), 0.0);
        let b = ctx.point(src.barycenter);
        assert_eq!(integrate_cell_self(id, &ctx, &src, &b, &policy).unwrap(), 0.0);
    }
}

#[test]
fn ball_self_term_of_unit_ball_volume_cell() {
    let field = unit();
    let ctx = KernelContext::new(&field, 2.0);
    // regular tetrahedron scaled to the volume of the unit ball
    let mut t = [
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ];
    let scale = (4.0 * std::f64::consts::PI / 3.0 / (8.0 / 3.0)).cbrt();
    for v in &mut t {
        *v *= scale;
    }
    let src = CellSource::new(&field, t);
    assert!((src.volume - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    let target = ctx.point(src.barycenter);
    let ball = integrate_cell_self(KernelId::Laplace, &ctx, &src, &target, &SingularPolicy::default()).unwrap();
    assert!((ball + 0.5).abs() < 1e-14);
    let duffy = SingularPolicy {
        self_term: SelfTermStrategy::Duffy,
        ..SingularPolicy::default()
    };
    let exact_tet = integrate_cell_self(KernelId::Laplace, &ctx, &src, &target, &duffy).unwrap();
    // the ball maximises the potential at its centre among bodies of equal volume
    assert!(exact_tet > -0.5 && exact_tet < -0.4, "{exact_tet}");
}

/// `∫_K |x−p|^{-k} dx` through the divergence theorem, using
/// `∇·((x−p)|x−p|^{-k}) = (3−k)|x−p|^{-k}`; the surface integrand is bounded.
fn inverse_power_oracle(t: &[Vec3; 4], p: &Vec3, k: i32) -> f64 {
    let rule = TriangleRule::collapsed_gauss(10);
    let orient = tet_signed_volume(&t[0], &t[1], &t[2], &t[3]).signum();
    TET_FACES
        .iter()
        .map(|f| {
            let tri = [t[f[0]], t[f[1]], t[f[2]]];
            let n = orient * (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).normalize();
            integrate_triangle_uniform(&tri, 4, &rule, &|x| {
                let d = x - p;
                let r = d.norm();
                if r < 1e-300 {
                    0.0
                } else {
                    d.dot(&n) * r.powi(-k)
                }
            })
        })
        .sum::<f64>()
        / f64::from(3 - k)
}

#[test]
fn conical_duffy_on_faces_and_interior() {
    let t = sample_tet();
    let apexes = [
        (t[1] + t[2] + t[3]) / 3.0,
        (t[0] + t[1] + t[2] + t[3]) / 4.0,
        t[0] * 0.1 + t[1] * 0.2 + t[2] * 0.3 + t[3] * 0.4,
    ];
    for p in apexes {
        for k in [1, 2] {
            let exact = inverse_power_oracle(&t, &p, k);
            let duffy = conical_duffy(&t, &p, CONICAL_POINTS, &|x| (x - p).norm().powi(-k));
            assert!((duffy - exact).abs() < 1e-6 * exact, "k={k}: {duffy} vs {exact}");
        }
    }
}

#[test]
fn face_and_interior_targets_use_the_conical_rule() {
    let field = expo();
    let ctx = KernelContext::new(&field, 2.0);
    let t = sample_tet();
    let src = CellSource::new(&field, t);
    let policy = SingularPolicy::default();
    let p = (t[1] + t[2] + t[3]) / 3.0;
    let target = ctx.point(p);
    let value = integrate_cell(KernelId::ParametrixX, &ctx, &src, &target, &policy).unwrap();
    let fine = conical_duffy(&t, &p, 20, &|x| {
        eval_unchecked(KernelId::ParametrixX, &ctx.point(*x), &target)
    });
    assert!((value - fine).abs() < 1e-7 * fine.abs());
    let q = t[0] * 0.1 + t[1] * 0.2 + t[2] * 0.3 + t[3] * 0.4;
    let inside = ctx.point(q);
    let value = integrate_cell(KernelId::RemainderX, &ctx, &src, &inside, &policy).unwrap();
    let fine = conical_duffy(&t, &q, 20, &|x| eval_unchecked(KernelId::RemainderX, &ctx.point(*x), &inside));
    assert!((value - fine).abs() < 1e-6 * fine.abs(), "{value} vs {fine}");
}

#[test]
fn cell_self_strategies_are_close() {
    let field = expo();
    let ctx = KernelContext::new(&field, 2.0);
    let src = CellSource::new(&field, sample_tet());
    let target = ctx.point(src.barycenter);
    let ball = SingularPolicy::default();
    let duffy = SingularPolicy {
        self_term: SelfTermStrategy::Duffy,
        ..ball
    };
    for id in [KernelId::ParametrixX, KernelId::ParametrixY, KernelId::RemainderX, KernelId::RemainderY] {
        let a = integrate_cell_self(id, &ctx, &src, &target, &ball).unwrap();
        let b = integrate_cell_self(id, &ctx, &src, &target, &duffy).unwrap();
        // the ball substitution is first order in the cell size
        let scale = src.diameter * src.diameter * (1.0 + field.grad_log(&src.barycenter).norm());
        assert!((a - b).abs() < 0.2 * scale, "{id}: {a} vs {b}");
    }
}

#[test]
fn near_cells_match_uniform_oracle() {
    let field = expo();
    let ctx = KernelContext::new(&field, 2.0);
    let t = sample_tet();
    let src = CellSource::new(&field, t);
    let policy = SingularPolicy::default();
    let rule = TetRule::collapsed_gauss(6);
    for y in [Vec3::new(0.5, 0.5, 0.5), Vec3::new(-0.1, 0.1, 0.1), Vec3::new(0.15, 0.15, -0.05)] {
        let target = ctx.point(y);
        for id in [KernelId::ParametrixX, KernelId::RemainderX, KernelId::RemainderY] {
            let value = integrate_cell(id, &ctx, &src, &target, &policy).unwrap();
            let oracle = integrate_tet_uniform(&t, 4, &rule, &|x| eval_unchecked(id, &ctx.point(*x), &target));
            assert!((value - oracle).abs() < 2e-3 * oracle.abs().max(1e-3), "{id} at {y}: {value} vs {oracle}");
        }
    }
}

#[test]
fn policy_validation() {
    assert!(SingularPolicy::default().validate().is_ok());
    let bad = SingularPolicy {
        near_threshold: 0.5,
        ..SingularPolicy::default()
    };
    assert!(bad.validate().is_err());
    let deep = SingularPolicy {
        max_subdivision_depth: 9,
        ..SingularPolicy::default()
    };
    assert!(deep.validate().is_err());
    let parsed: SingularPolicy = serde_json::from_str(r#"{"near_threshold": 3.0, "depth": 2, "self_term": "duffy"}"#).unwrap();
    assert_eq!(parsed.max_subdivision_depth, 2);
    assert_eq!(parsed.self_term, SelfTermStrategy::Duffy);
    assert!(serde_json::from_str::<SingularPolicy>(r#"{"depth": 2, "bogus": 1}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn adaptive_result_is_within_its_error_estimate(
        which in 0usize..320,
        dir in prop::array::uniform3(-1.0f64..1.0),
        dist in 0.2f64..5.0,
        use_double_layer in any::<bool>(),
    ) {
        let (surface, _) = build_ball_mesh(1.0, 2).unwrap();
        let field = expo();
        let ctx = KernelContext::new(&field, 2.0);
        let src = PanelSource::new(&field, surface.corners(which), surface.normal(which));
        let d = Vec3::from(dir);
        prop_assume!(d.norm() > 1e-2);
        let target = ctx.point(src.centroid + d.normalize() * (dist * src.diameter));
        let c = &src.corners;
        prop_assume!(point_triangle_distance(&target.x, &c[0], &c[1], &c[2]) > 0.1 * src.diameter);
        let id = if use_double_layer { KernelId::ConormalX } else { KernelId::ParametrixX };
        let policy = SingularPolicy::default();
        let (value, estimate) = integrate_panel_estimate(id, &ctx, &src, &target, &policy).unwrap();
        let oracle = panel_oracle(id, &ctx, &src, &target, 5);
        prop_assert!((value - oracle).abs() <= 10.0 * estimate + 1e-14 * oracle.abs(),
            "{value} vs {oracle}, estimate {estimate}");
    }
}

fn skew_triangle() -> [Vec3; 3] {
    [Vec3::new(0.1, -0.2, 0.3), Vec3::new(1.2, 0.1, 0.0), Vec3::new(0.3, 0.9, 0.4)]
}

fn skew_tet() -> [Vec3; 4] {
    [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.1, -0.1),
        Vec3::new(0.2, 0.9, 0.1),
        Vec3::new(0.1, 0.2, 0.8),
    ]
}

#[test]
fn closed_form_panel_integrals_match_quadrature() {
    let t = skew_triangle();
    let n = (t[1] - t[0]).cross(&(t[2] - t[0])).normalize();
    let c = (t[0] + t[1] + t[2]) / 3.0;
    let rule = TriangleRule::collapsed_gauss(8);
    let targets = [
        c + 0.3 * n,
        c - 0.05 * n,
        t[1] + 0.2 * (t[1] - c) + 0.01 * n,
        t[0] + 0.5 * (t[0] - t[2]),
        c + 2.0 * n + Vec3::new(0.5, 0.0, 0.0),
    ];
    for y in targets {
        let s = integrate_triangle_adaptive(&t, &y, &SingularPolicy { near_threshold: 4.0, max_subdivision_depth: 8, ..Default::default() }, &rule, &|x| 1.0 / (x - y).norm());
        let g = [0, 1, 2].map(|k| {
            integrate_triangle_adaptive(&t, &y, &SingularPolicy { near_threshold: 4.0, max_subdivision_depth: 8, ..Default::default() }, &rule, &|x| {
                let d = x - y;
                -d[k] / d.norm().powi(3)
            })
        });
        let ga = triangle_inverse_distance_gradient(&t, &y);
        assert!((triangle_inverse_distance(&t, &y) - s).abs() < 1e-7 * s.abs(), "{y:?}");
        for k in 0..3 {
            assert!((ga[k] - g[k]).abs() < 1e-6 * ga.norm(), "{y:?} {k}: {} vs {}", ga[k], g[k]);
        }
    }
    // in-plane targets reduce to the flat formula
    assert!((triangle_inverse_distance(&t, &c) - flat_triangle_inverse_distance(&t, &c)).abs() < 1e-14);
}

#[test]
fn solid_angles_of_closed_surface() {
    let (s, _) = build_ball_mesh(1.0, 1).unwrap();
    for y in [Vec3::zeros(), Vec3::new(0.3, -0.5, 0.2)] {
        let total: f64 = (0..s.len()).map(|j| solid_angle(&s.corners(j), &y)).sum();
        // the outward normals point away from interior points
        assert!((total + FOUR_PI).abs() < 1e-12, "{total}");
    }
    let outside: f64 = (0..s.len()).map(|j| solid_angle(&s.corners(j), &Vec3::new(2.0, 0.0, 0.0))).sum();
    assert!(outside.abs() < 1e-12);
}

#[test]
fn closed_form_cell_integrals_match_quadrature() {
    let t = skew_tet();
    let b = (t[0] + t[1] + t[2] + t[3]) / 4.0;
    let rule = TetRule::collapsed_gauss(6);
    let policy = SingularPolicy {
        near_threshold: 4.0,
        max_subdivision_depth: 6,
        ..Default::default()
    };
    for y in [
        b + Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(-0.1, 0.3, 0.3),
        t[1] + Vec3::new(0.05, 0.0, 0.0),
    ] {
        let s = integrate_tet_adaptive(&t, &y, &policy, &rule, &|x| 1.0 / (x - y).norm());
        let g = [0, 1, 2].map(|k| {
            integrate_tet_adaptive(&t, &y, &policy, &rule, &|x| {
                let d = x - y;
                -d[k] / d.norm().powi(3)
            })
        });
        let ga = tet_inverse_distance_gradient(&t, &y);
        assert!((tet_inverse_distance(&t, &y) - s).abs() < 1e-6 * s, "{y:?}: {} vs {s}", tet_inverse_distance(&t, &y));
        for k in 0..3 {
            assert!((ga[k] - g[k]).abs() < 1e-5 * ga.norm(), "{y:?} {k}: {} vs {}", ga[k], g[k]);
        }
    }
    // a target at a vertex and one inside: compare with the conical rule
    for y in [t[2], b] {
        let s = conical_duffy(&t, &y, 16, &|x| 1.0 / (x - y).norm());
        assert!((tet_inverse_distance(&t, &y) - s).abs() < 1e-10 * s, "{y:?}");
    }
}
