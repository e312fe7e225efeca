//! Whole-image enhancement.
//!
//! The input is moved to HSV; V is pushed through the cascaded closed-form
//! transfer, S through `s^(1 + gamma)`, H is left alone, and the result is
//! converted back to RGB. The cascade depth comes from the mean of the input
//! V plane unless overridden. Grayscale inputs are treated as a bare V plane.

use rayon::prelude::*;

use crate::buffer::{ChannelOrder, ImageBuffer};
use crate::color::{hsv_to_rgb_raw, rgb_to_hsv_raw};
use crate::error::{Error, Result};
use crate::tone::{
    ln_clamped, select_levels_with, transfer_n, LevelCount, NormalizedValue, DEFAULT_EPS,
    DEFAULT_THRESHOLD_HIGH, DEFAULT_THRESHOLD_LOW,
};

/// Default saturation exponent.
pub const DEFAULT_GAMMA: f64 = 0.7;

/// Pixels per partial sum when reducing the V plane. Fixed so the mean does
/// not depend on the thread count.
const MEAN_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhancementConfig {
    pub threshold_low: f64,
    pub threshold_high: f64,
    pub gamma: f64,
    pub eps: f64,
    /// Bypasses level selection when set.
    pub levels_override: Option<LevelCount>,
    /// When false the S channel is passed through untouched.
    pub adjust_saturation: bool,
}

impl Default for EnhancementConfig {
    fn default() -> Self {
        EnhancementConfig {
            threshold_low: DEFAULT_THRESHOLD_LOW,
            threshold_high: DEFAULT_THRESHOLD_HIGH,
            gamma: DEFAULT_GAMMA,
            eps: DEFAULT_EPS,
            levels_override: None,
            adjust_saturation: true,
        }
    }
}

impl EnhancementConfig {
    pub fn with_levels(mut self, k: LevelCount) -> Self {
        self.levels_override = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.threshold_low, self.threshold_high);
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "thresholds must satisfy 0 < low < high < 1, got low={lo} high={hi}"
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidConfig(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.eps > 0.0 && self.eps < 1e-3) {
            return Err(Error::InvalidConfig(format!("eps must be in (0, 1e-3), got {}", self.eps)));
        }
        Ok(())
    }

    pub fn levels_for(&self, stats: &ImageStats) -> LevelCount {
        self.levels_override
            .unwrap_or_else(|| select_levels_with(stats.mean_v, self.threshold_low, self.threshold_high))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageStats {
    pub mean_v: NormalizedValue,
}

/// What [`enhance_with_info`] decided along the way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhanceInfo {
    pub stats: ImageStats,
    pub levels: LevelCount,
}

/// Mean of the V plane (max channel per pixel) of the input.
pub fn compute_mean_v(img: &ImageBuffer) -> Result<ImageStats> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let c = img.channels();
    let partials: Vec<f64> = img
        .data()
        .par_chunks(MEAN_BLOCK * c)
        .map(|block| match c {
            1 => block.iter().sum::<f64>(),
            _ => block
                .chunks_exact(3)
                .map(|p| p[0].max(p[1]).max(p[2]))
                .sum::<f64>(),
        })
        .collect();
    let mean = partials.iter().sum::<f64>() / img.pixel_count() as f64;
    Ok(ImageStats {
        mean_v: NormalizedValue::new(mean.clamp(0.0, 1.0))?,
    })
}

/// `s * s^gamma`.
pub fn saturation_gamma(s: NormalizedValue, gamma: f64) -> NormalizedValue {
    NormalizedValue::new(saturation_gamma_raw(s.get(), gamma).clamp(0.0, 1.0))
        .expect("s^(1+gamma) of a value in [0, 1]")
}

#[inline(always)]
fn saturation_gamma_raw(s: f64, gamma: f64) -> f64 {
    s * s.powf(gamma)
}

#[inline(always)]
fn enhance_value(v: f64, k: u32, eps: f64) -> f64 {
    if v >= 1.0 {
        1.0
    } else {
        transfer_n(ln_clamped(v, eps), k).exp()
    }
}

/// Elementwise `exp(cascade(ln max(v, eps), k))`, with `v = 1` mapped to 1.
pub fn enhance_v_plane(v: &[f64], k: LevelCount, eps: f64) -> Result<Vec<f64>> {
    for &x in v {
        NormalizedValue::new(x)?;
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("eps must be in (0, 1), got {eps}")));
    }
    let k = k.get();
    Ok(v
        .par_iter()
        .with_min_len(4096)
        .map(|&x| enhance_value(x, k, eps).min(1.0))
        .collect())
}

pub fn enhance(img: &ImageBuffer, cfg: &EnhancementConfig) -> Result<ImageBuffer> {
    enhance_with_info(img, cfg).map(|(out, _)| out)
}

pub fn enhance_with_info(img: &ImageBuffer, cfg: &EnhancementConfig) -> Result<(ImageBuffer, EnhanceInfo)> {
    cfg.validate()?;
    let stats = compute_mean_v(img)?;
    let levels = cfg.levels_for(&stats);
    let out = enhance_at_level(img, cfg, levels)?;
    Ok((out, EnhanceInfo { stats, levels }))
}

/// Enhancement with the cascade depth fixed by the caller.
pub fn enhance_at_level(img: &ImageBuffer, cfg: &EnhancementConfig, levels: LevelCount) -> Result<ImageBuffer> {
    cfg.validate()?;
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let k = levels.get();
    let eps = cfg.eps;
    let gamma = cfg.gamma;
    let adjust = cfg.adjust_saturation;
    let row = img.width() * img.channels();
    let mut out = vec![0.0; img.data().len()];

    match img.order() {
        ChannelOrder::Gray => {
            out.par_chunks_mut(row)
                .zip(img.data().par_chunks(row))
                .for_each(|(dst, src)| {
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d = enhance_value(s, k, eps).min(1.0);
                    }
                });
        }
        ChannelOrder::Rgb => {
            out.par_chunks_mut(row)
                .zip(img.data().par_chunks(row))
                .for_each(|(dst, src)| {
                    for (d, s) in dst.chunks_exact_mut(3).zip(src.chunks_exact(3)) {
                        let (h, sat, v) = rgb_to_hsv_raw(s[0], s[1], s[2]);
                        let v = enhance_value(v, k, eps);
                        let sat = if adjust { saturation_gamma_raw(sat, gamma) } else { sat };
                        let rgb = hsv_to_rgb_raw(h, sat, v);
                        d[0] = rgb[0].clamp(0.0, 1.0);
                        d[1] = rgb[1].clamp(0.0, 1.0);
                        d[2] = rgb[2].clamp(0.0, 1.0);
                    }
                });
        }
    }
    Ok(ImageBuffer::from_parts(img.width(), img.height(), img.order(), out))
}
