#![no_main]

use bandfold::io::{parse_off, write_off};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mesh) = parse_off(text) {
        let again = parse_off(&write_off(&mesh)).expect("written OFF parses");
        assert_eq!(again.faces(), mesh.faces());
        assert_eq!(again.vertices(), mesh.vertices());
    }
});
