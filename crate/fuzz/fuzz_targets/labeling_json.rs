#![no_main]

use std::sync::OnceLock;

use bandfold::banding::{banded_tetrahedron, BandParams};
use bandfold::io::{labeling_to_json, parse_labeling};
use bandfold::mesh::PolyMesh;
use bandfold::trees::{detect_band_unit, detect_overlap_pattern, sample_cut_tree};
use libfuzzer_sys::fuzz_target;

fn mesh() -> &'static PolyMesh {
    static MESH: OnceLock<PolyMesh> = OnceLock::new();
    MESH.get_or_init(|| banded_tetrahedron(BandParams::default()).unwrap().0)
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mesh = mesh();
    if let Ok(labeling) = parse_labeling(text, mesh) {
        assert_eq!(parse_labeling(&labeling_to_json(&labeling), mesh).unwrap(), labeling);
        let tree = sample_cut_tree(mesh, data.len() as u64).complement();
        for unit in 0..labeling.num_units() {
            let _ = detect_band_unit(&tree, &labeling, unit);
            let _ = detect_overlap_pattern(&tree, &labeling, unit);
        }
    }
});
