use pantscut::field::{load_field, save_field, ScalarField};
use pantscut::mesh::io::{load_mesh, parse_obj, parse_off, save_mesh, MeshFormat};
use pantscut::synth::plate;
use pantscut::Error;

#[test]
fn off_and_obj_round_trip() {
    let m = plate(1, 1, 12).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for name in ["m.off", "m.obj"] {
        let path = dir.path().join(name);
        save_mesh(&m, &path, None).unwrap();
        let back = load_mesh(&path, None).unwrap();
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.positions(), m.positions());
    }
}

#[test]
fn field_round_trip() {
    let m = plate(2, 0, 12).unwrap();
    let f = ScalarField::coordinate(&m, 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    save_field(&f, &path).unwrap();
    assert_eq!(load_field(&path, &m).unwrap().values(), f.values());
}

#[test]
fn obj_polygons_with_slashes() {
    let text =
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1/1/1 3/3/3 2/2/2\nf 1 2 4\nf 2 3 4\nf 1 4 3\n";
    let m = parse_obj(text).unwrap();
    assert_eq!(m.num_faces(), 4);
    assert_eq!(m.validate().unwrap().genus, 0);
}

#[test]
fn malformed_inputs_are_invalid() {
    let cases = [
        parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n"),
        parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 2 3\n"),
        parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"),
        parse_obj("v 0 0 0\nv 1 0 x\n"),
    ];
    for r in cases {
        let e = r.unwrap_err();
        assert!(e.is_invalid_input(), "{e}");
    }
    let m = plate(2, 0, 6).unwrap();
    let short = ScalarField::for_mesh(&m, vec![0.0; 3]).unwrap_err();
    assert!(matches!(short, Error::FieldLength { .. }));
    assert!("ply".parse::<MeshFormat>().is_err());
}

#[test]
fn non_manifold_mesh_is_rejected() {
    // Three triangles sharing one edge.
    let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
    let m = parse_off(text);
    let err = m.and_then(|m| m.validate().map(|_| ())).unwrap_err();
    assert!(matches!(err, Error::NonManifoldEdge { .. }), "{err}");
}
