#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use retinex_core::eval::parse_manifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(pairs) = parse_manifest(text, Path::new("/base")) {
            assert!(!pairs.is_empty());
            assert!(pairs.windows(2).all(|w| w[0].id < w[1].id));
        }
    }
});
