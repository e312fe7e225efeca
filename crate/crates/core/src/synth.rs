//! Deterministic test imagery: uniform noise, smooth synthetic scenes and
//! gamma darkening for building low/reference pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::buffer::{ChannelOrder, ImageBuffer};

/// Independent uniform samples in `[0, 1)` per channel.
pub fn random_image(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..width * height * 3).map(|_| rng.gen::<f64>()).collect();
    ImageBuffer::from_parts(width, height, ChannelOrder::Rgb, data)
}

struct Blob {
    cx: f64,
    cy: f64,
    radius: f64,
    color: [f64; 3],
}

/// A smooth, structured RGB scene with every channel in `[floor, 1]`.
///
/// Background gradient, a handful of soft-edged colored blobs and a faint
/// sinusoidal texture: enough edges and structure for SSIM to be meaningful.
pub fn scene(width: usize, height: usize, seed: u64, floor: f64) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = floor.clamp(0.0, 1.0);
    let corner: Vec<[f64; 3]> = (0..4)
        .map(|_| [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()])
        .collect();
    let blobs: Vec<Blob> = (0..rng.gen_range(3..8))
        .map(|_| Blob {
            cx: rng.gen::<f64>() * width as f64,
            cy: rng.gen::<f64>() * height as f64,
            radius: (0.08 + 0.25 * rng.gen::<f64>()) * width.min(height) as f64,
            color: [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()],
        })
        .collect();
    let freq = [
        0.05 + 0.3 * rng.gen::<f64>(),
        0.05 + 0.3 * rng.gen::<f64>(),
    ];
    let phase = rng.gen::<f64>() * std::f64::consts::TAU;

    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        let fy = y as f64 / (height.max(2) - 1) as f64;
        for x in 0..width {
            let fx = x as f64 / (width.max(2) - 1) as f64;
            let mut px = [0.0; 3];
            for (c, out) in px.iter_mut().enumerate() {
                let top = corner[0][c] * (1.0 - fx) + corner[1][c] * fx;
                let bottom = corner[2][c] * (1.0 - fx) + corner[3][c] * fx;
                *out = top * (1.0 - fy) + bottom * fy;
            }
            for blob in &blobs {
                let d = ((x as f64 - blob.cx).powi(2) + (y as f64 - blob.cy).powi(2)).sqrt();
                // smoothstep edge about 3 px wide
                let t = ((blob.radius - d) / 3.0 + 0.5).clamp(0.0, 1.0);
                let a = t * t * (3.0 - 2.0 * t);
                for (v, c) in px.iter_mut().zip(blob.color) {
                    *v = *v * (1.0 - a) + c * a;
                }
            }
            let texture = 0.06 * (freq[0] * x as f64 + freq[1] * y as f64 + phase).sin();
            for v in &mut px {
                *v = floor + (1.0 - floor) * (*v + texture).clamp(0.0, 1.0);
            }
            data.extend_from_slice(&px);
        }
    }
    ImageBuffer::from_parts(width, height, ChannelOrder::Rgb, data)
}

/// Per-channel power law `v^exponent`; `exponent > 1` darkens.
pub fn darken(img: &ImageBuffer, exponent: f64) -> ImageBuffer {
    img.map(|v| v.powf(exponent))
}
