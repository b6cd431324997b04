use trapmode::formats::{read_spectra_csv, write_spectra_csv, SpectrumRow};
use trapmode::meshio::{read_mesh, write_mesh};
use trapmode_core::geometry::{CavitySpec, DomainSpec};
use trapmode_core::lab::{lab_mesh, MeshPolicy};
use trapmode_core::C64;

#[test]
fn mesh_round_trip_is_exact() {
    let d = DomainSpec::cavity(CavitySpec::small(), 1.5).unwrap();
    let mesh = lab_mesh(&d, MeshPolicy::Uniform(0.1)).unwrap();
    let text = write_mesh(&mesh);
    let back = read_mesh(&text).unwrap();
    assert_eq!(back.nodes, mesh.nodes);
    assert_eq!(back.triangles, mesh.triangles);
    assert_eq!(back.boundary_edges, mesh.boundary_edges);
    assert_eq!(write_mesh(&back), text);
}

#[test]
fn malformed_meshes_are_rejected() {
    assert!(read_mesh("HTMESH 2\n").is_err());
    assert!(read_mesh("HTMESH 1\nNODES 1\n0 0\nTRIS 1\n0 1 2\nBEDGES 0\n").is_err());
    assert!(read_mesh("HTMESH 1\nNODES 2\n0 0\n").is_err());
}

#[test]
fn spectra_round_trip() {
    let rows = vec![
        SpectrumRow { k: 9.977120156613617, mu: C64::new(2.1e-2, -3.6e-5), residual: 8.9e-19, track_id: 0 },
        SpectrumRow { k: 9.977120156613617, mu: C64::new(-15.45, -7.4e-4), residual: 4.1e-18, track_id: 3 },
    ];
    let mut buf = Vec::new();
    write_spectra_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# format: 1\nk,re_mu,im_mu,residual,track_id\n"));
    assert_eq!(read_spectra_csv(&text).unwrap(), rows);
}
