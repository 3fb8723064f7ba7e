#![no_main]

use std::sync::OnceLock;

use bandfold::banding::{banded_tetrahedron, BandParams};
use bandfold::mesh::PolyMesh;
use bandfold::trees::{ConnectionTree, CutTree};
use bandfold::unfold::{detect_overlap, unfold};
use libfuzzer_sys::fuzz_target;

fn mesh() -> &'static PolyMesh {
    static MESH: OnceLock<PolyMesh> = OnceLock::new();
    MESH.get_or_init(|| banded_tetrahedron(BandParams::default()).unwrap().0)
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mesh = mesh();
    let cut = CutTree::from_json(mesh, text);
    let conn = ConnectionTree::from_json(mesh, text);
    assert_eq!(cut.is_ok(), conn.is_ok());
    if let (Ok(cut), Ok(conn)) = (cut, conn) {
        assert_eq!(cut.complement(), conn);
        assert_eq!(CutTree::from_json(mesh, &cut.to_json()).unwrap(), cut);
        let layout = unfold(mesh, &conn, 0).expect("valid tree unfolds");
        let _ = detect_overlap(&layout);
    }
});
