#![no_main]

//! Raw 8-bit RGB buffers: first two bytes give the width and the cascade
//! override, the rest is pixel data.

use libfuzzer_sys::fuzz_target;
use retinex_core::{compute_mean_v, enhance, ChannelOrder, EnhancementConfig, ImageBuffer, LevelCount};

fuzz_target!(|data: &[u8]| {
    if data.len() < 5 {
        return;
    }
    let width = usize::from(data[0]).max(1);
    let levels = u32::from(data[1] % 9);
    let pixels = &data[2..];
    let height = pixels.len() / 3 / width;
    if height == 0 {
        return;
    }
    let img = ImageBuffer::from_u8(width, height, ChannelOrder::Rgb, &pixels[..width * height * 3]).unwrap();
    let cfg = EnhancementConfig {
        levels_override: LevelCount::new(levels).ok(),
        ..EnhancementConfig::default()
    };
    let out = enhance(&img, &cfg).unwrap();
    for (a, b) in img.value_plane().iter().zip(out.value_plane()) {
        assert!(b >= *a);
    }
    assert!(compute_mean_v(&out).unwrap().mean_v >= compute_mean_v(&img).unwrap().mean_v);
});
