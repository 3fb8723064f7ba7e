#![no_main]

use bandfold::banding::{band_mesh, BandParams};
use bandfold::mesh::build_tetrahedron;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(params) = text.parse::<BandParams>() {
        assert_eq!(params.to_string().parse::<BandParams>().unwrap(), params);
        let _ = band_mesh(&build_tetrahedron(), params);
    }
});
