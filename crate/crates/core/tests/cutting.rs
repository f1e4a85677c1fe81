mod common;

use common::{boundary_field, brute_type, cylinder, height};
use pantscut::field::Level;
use pantscut::mesh::{cut_along_iso_curves, cut_along_path_loop, CutCurve, Side};
use pantscut::morse::{critical_points, extract_level_set, regular_midvalues};
use pantscut::synth::{plate, torus};
use pantscut::SurfaceType;

#[test]
fn cylinder_cut_across_gives_two_cylinders() {
    let m = cylinder(16, 9);
    let f = height(&m);
    let level = Level::above_rank(&f, m.num_vertices() / 2).unwrap();
    let curves = extract_level_set(&m, &f, level).unwrap();
    assert_eq!(curves.len(), 1);
    let pieces = cut_along_iso_curves(&m, &f, &curves).unwrap();
    assert_eq!(pieces.len(), 2);
    for p in &pieces {
        assert_eq!(p.surface_type().unwrap(), SurfaceType::new(0, 2));
        assert_eq!(brute_type(&p.mesh), (0, 2, 1));
    }
    let sides: Vec<Side> = pieces
        .iter()
        .flat_map(|p| p.curve_sides.iter().map(|s| s.1))
        .collect();
    assert!(sides.contains(&Side::Below) && sides.contains(&Side::Above));
}

#[test]
fn torus_cut_along_meridian_gives_cylinder() {
    let (n, m) = (20, 10);
    let t = torus(n, m, 2.0, 0.7).unwrap();
    let f = height(&t);
    let meridian: Vec<usize> = (0..m).collect();
    let curve = CutCurve::path(&t, meridian);
    let pieces = cut_along_path_loop(&t, &f, &curve).unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces[0].surface_type().unwrap(), SurfaceType::new(0, 2));
    assert_eq!(pieces[0].mesh.num_vertices(), t.num_vertices() + m);
}

#[test]
fn regular_cuts_preserve_euler_characteristic() {
    for (g, b) in [(2, 0), (1, 1), (0, 3)] {
        let m = plate(g, b, 18).unwrap();
        let f = boundary_field(&m);
        let report = critical_points(&m, &f).unwrap();
        for level in regular_midvalues(&f, &report).unwrap() {
            let curves = extract_level_set(&m, &f, level).unwrap();
            let pieces = cut_along_iso_curves(&m, &f, &curves).unwrap();
            let chi: i64 = pieces.iter().map(|p| p.mesh.euler_characteristic()).sum();
            assert_eq!(chi, m.euler_characteristic(), "({g},{b})");
            let loops: usize = pieces.iter().map(|p| brute_type(&p.mesh).1).sum();
            assert_eq!(loops, b + 2 * curves.len(), "({g},{b})");
        }
    }
}

#[test]
fn mixed_curve_kinds_are_rejected() {
    let t = torus(12, 6, 2.0, 0.7).unwrap();
    let f = height(&t);
    let path = CutCurve::path(&t, (0..6).collect());
    assert!(cut_along_iso_curves(&t, &f, &[path]).is_err());
}
