//! Reference implementations used only by tests. Nothing here calls into the
//! library's own per-pixel or windowed code paths.

#![allow(dead_code)]

use retinex_core::ImageBuffer;

/// Direct windowed SSIM: every 11x11 window is visited and weighted with a
/// 2-D Gaussian, statistics use the two-pass (centered) variance.
pub fn brute_force_ssim(a: &ImageBuffer, b: &ImageBuffer, peak: f64) -> f64 {
    let (w, h) = (a.width(), a.height());
    let la = luma_oracle(a);
    let lb = luma_oracle(b);
    let n = 11usize;
    let sigma = 1.5f64;
    let mut weights = vec![0.0; n * n];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dy = i as f64 - 5.0;
            let dx = j as f64 - 5.0;
            let g = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            weights[i * n + j] = g;
            total += g;
        }
    }
    for g in &mut weights {
        *g /= total;
    }
    let c1 = (0.01 * peak) * (0.01 * peak);
    let c2 = (0.03 * peak) * (0.03 * peak);
    let mut sum = 0.0;
    let mut count = 0usize;
    for y0 in 0..=h - n {
        for x0 in 0..=w - n {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let g = weights[i * n + j];
                    let idx = (y0 + i) * w + x0 + j;
                    mx += g * la[idx];
                    my += g * lb[idx];
                }
            }
            let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let g = weights[i * n + j];
                    let idx = (y0 + i) * w + x0 + j;
                    let dx = la[idx] - mx;
                    let dy = lb[idx] - my;
                    vx += g * dx * dx;
                    vy += g * dy * dy;
                    cov += g * dx * dy;
                }
            }
            sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    sum / count as f64
}

pub fn luma_oracle(img: &ImageBuffer) -> Vec<f64> {
    if img.channels() == 1 {
        return img.data().to_vec();
    }
    img.data()
        .chunks_exact(3)
        .map(|p| {
            if p[0] == p[1] && p[1] == p[2] {
                p[0]
            } else {
                0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]
            }
        })
        .collect()
}

/// Direct MSE-based PSNR in dB; `None` for identical inputs.
pub fn psnr_oracle(a: &ImageBuffer, b: &ImageBuffer) -> Option<f64> {
    let n = a.data().len() as f64;
    let mse: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n;
    (mse > 0.0).then(|| 10.0 * (1.0 / mse).log10())
}

/// `x^2 / (x - 1)` written out independently of the library.
pub fn closed_form(x: f64) -> f64 {
    x * x / (x - 1.0)
}

/// Hue in turns from the hexcone definition, by angle comparison.
pub fn hue_oracle(r: f64, g: f64, b: f64) -> Option<f64> {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    if d <= 0.0 {
        return None;
    }
    let deg = if max == r {
        60.0 * ((g - b) / d)
    } else if max == g {
        60.0 * ((b - r) / d) + 120.0
    } else {
        60.0 * ((r - g) / d) + 240.0
    };
    Some(deg.rem_euclid(360.0) / 360.0)
}
