#![no_main]

use libfuzzer_sys::fuzz_target;
use retinex_core::{decode_image, enhance, EnhancementConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(img) = decode_image(data) else { return };
    assert!(img.data().iter().all(|v| (0.0..=1.0).contains(v)));
    // keep decompression bombs from dominating the run
    if img.pixel_count() > 1 << 20 {
        return;
    }
    let out = enhance(&img, &EnhancementConfig::default()).expect("decoded images are valid input");
    assert_eq!(out.shape(), img.shape());
    assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
});
