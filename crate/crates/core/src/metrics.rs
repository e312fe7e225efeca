//! Full-reference quality metrics: PSNR over all channels, SSIM on luma.
//!
//! SSIM uses the usual 11x11 Gaussian window (sigma 1.5) with
//! `C1 = (0.01 peak)^2`, `C2 = (0.03 peak)^2`, evaluated at every window
//! position that fits entirely inside the image, then averaged.

use std::fmt;

use crate::buffer::ImageBuffer;
use crate::error::{Error, Result};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// PSNR in decibels. Identical inputs have no finite PSNR; that case is kept
/// as its own variant instead of an `f64::INFINITY` flowing into averages.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn finite(self) -> Option<f64> {
        match self {
            Psnr::Finite(db) => Some(db),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// Lossy view for comparisons; `Infinite` becomes `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(db) => match f.precision() {
                Some(p) => write!(f, "{db:.p$}"),
                None => write!(f, "{db}"),
            },
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsResult {
    pub psnr_db: Psnr,
    pub ssim: f64,
}

fn check_shapes(a: &ImageBuffer, b: &ImageBuffer) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            a: a.shape(),
            b: b.shape(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyImage);
    }
    Ok(())
}

fn check_peak(peak: f64) -> Result<()> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::InvalidConfig(format!("peak must be > 0, got {peak}")));
    }
    Ok(())
}

pub fn mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    check_shapes(a, b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.data().len() as f64)
}

/// `10 log10(peak^2 / MSE)`; `peak` is 1 for normalized data.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer, peak: f64) -> Result<Psnr> {
    check_peak(peak)?;
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(Psnr::Infinite);
    }
    Ok(Psnr::Finite(10.0 * (peak * peak / mse).log10()))
}

/// Normalized 1-D Gaussian taps. The 2-D window is their outer product.
pub fn gaussian_taps(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - c;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|t| t / total).collect()
}

/// Mean SSIM between the luma planes of `a` and `b`.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer, peak: f64) -> Result<f64> {
    check_peak(peak)?;
    check_shapes(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            window: SSIM_WINDOW,
        });
    }
    Ok(ssim_plane(&a.luma_plane(), &b.luma_plane(), w, h, peak))
}

fn ssim_plane(x: &[f64], y: &[f64], w: usize, h: usize, peak: f64) -> f64 {
    let taps = gaussian_taps(SSIM_WINDOW, SSIM_SIGMA);
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;

    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();

    let mu_x = filter_valid(x, w, h, &taps);
    let mu_y = filter_valid(y, w, h, &taps);
    let e_xx = filter_valid(&xx, w, h, &taps);
    let e_yy = filter_valid(&yy, w, h, &taps);
    let e_xy = filter_valid(&xy, w, h, &taps);

    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);

    let mut total = 0.0;
    for i in 0..ow * oh {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = e_xx[i] - mx * mx;
        let vy = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        let den = (mx * mx + my * my + c1) * (vx + vy + c2);
        total += num / den;
    }
    total / (ow * oh) as f64
}

/// Separable correlation keeping only fully-covered positions.
fn filter_valid(src: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    let n = taps.len();
    let ow = w - n + 1;
    let oh = h - n + 1;
    let mut horiz = vec![0.0; ow * h];
    for row in 0..h {
        let s = &src[row * w..(row + 1) * w];
        let d = &mut horiz[row * ow..(row + 1) * ow];
        for (col, out) in d.iter_mut().enumerate() {
            *out = taps.iter().zip(&s[col..col + n]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for row in 0..oh {
        for col in 0..ow {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                acc += t * horiz[(row + k) * ow + col];
            }
            out[row * ow + col] = acc;
        }
    }
    out
}

pub fn compare(a: &ImageBuffer, b: &ImageBuffer, peak: f64) -> Result<MetricsResult> {
    Ok(MetricsResult {
        psnr_db: psnr(a, b, peak)?,
        ssim: ssim(a, b, peak)?,
    })
}
