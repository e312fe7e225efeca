//! RGB / HSV hexcone conversion and Rec. 601 luma.
//!
//! Hue is stored in turns, `[0, 1)`, not degrees. Achromatic pixels get hue 0.

use crate::error::{Error, Result};
use crate::tone::NormalizedValue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgbPixel {
    pub r: NormalizedValue,
    pub g: NormalizedValue,
    pub b: NormalizedValue,
}

impl RgbPixel {
    pub fn new(r: f64, g: f64, b: f64) -> Result<Self> {
        Ok(RgbPixel {
            r: NormalizedValue::new(r)?,
            g: NormalizedValue::new(g)?,
            b: NormalizedValue::new(b)?,
        })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r.get(), self.g.get(), self.b.get()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    /// Hue in turns, `[0, 1)`.
    pub h: f64,
    pub s: NormalizedValue,
    pub v: NormalizedValue,
}

impl HsvPixel {
    pub fn new(h: f64, s: f64, v: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::NonFinite(h));
        }
        if !(0.0..1.0).contains(&h) {
            return Err(Error::OutOfRange {
                value: h,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(HsvPixel {
            h,
            s: NormalizedValue::new(s)?,
            v: NormalizedValue::new(v)?,
        })
    }

    /// Index of the 60-degree sextant the hue falls in, `0..6`.
    pub fn sextant(&self) -> u8 {
        hue_sextant(self.h)
    }
}

pub fn rgb_to_hsv(p: RgbPixel) -> HsvPixel {
    let (h, s, v) = rgb_to_hsv_raw(p.r.get(), p.g.get(), p.b.get());
    HsvPixel {
        h,
        s: NormalizedValue::new(s).expect("saturation of an in-range pixel is in [0, 1]"),
        v: NormalizedValue::new(v).expect("max of in-range channels"),
    }
}

pub fn hsv_to_rgb(p: HsvPixel) -> RgbPixel {
    let [r, g, b] = hsv_to_rgb_raw(p.h, p.s.get(), p.v.get());
    RgbPixel {
        r: NormalizedValue::new(r).expect("hexcone output stays in [0, 1]"),
        g: NormalizedValue::new(g).expect("hexcone output stays in [0, 1]"),
        b: NormalizedValue::new(b).expect("hexcone output stays in [0, 1]"),
    }
}

/// `0.299 r + 0.587 g + 0.114 b`.
pub fn luma(p: RgbPixel) -> NormalizedValue {
    let y = luma_raw(p.r.get(), p.g.get(), p.b.get());
    NormalizedValue::new(y.min(1.0)).expect("convex combination of [0, 1] values")
}

#[inline(always)]
pub(crate) fn luma_raw(r: f64, g: f64, b: f64) -> f64 {
    // exact for gray pixels; the weighted sum can land one ulp off
    if r == g && g == b {
        return r;
    }
    0.299 * r + 0.587 * g + 0.114 * b
}

#[inline(always)]
pub(crate) fn hue_sextant(h: f64) -> u8 {
    ((h * 6.0) as u8).min(5)
}

/// Unchecked hexcone forward transform. Returns `(h, s, v)`.
#[inline(always)]
pub(crate) fn rgb_to_hsv_raw(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if max <= 0.0 {
        return (0.0, 0.0, max);
    }
    let s = delta / max;
    if delta <= 0.0 {
        return (0.0, s, max);
    }
    let h6 = if max == r {
        let t = (g - b) / delta;
        if t < 0.0 {
            t + 6.0
        } else {
            t
        }
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = h6 / 6.0;
    if h >= 1.0 {
        h -= 1.0;
    }
    (h, s, max)
}

/// Unchecked hexcone inverse transform.
#[inline(always)]
pub(crate) fn hsv_to_rgb_raw(h: f64, s: f64, v: f64) -> [f64; 3] {
    if s <= 0.0 {
        return [v, v, v];
    }
    let h6 = h * 6.0;
    let i = h6.floor();
    let f = h6 - i;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match i as i32 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// Quantizes to 8 bits: round half away from zero, then clamp to `[0, 255]`.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}
