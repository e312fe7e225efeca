//! Level sweep: the same input enhanced with a forced cascade depth of
//! `1..=max_levels`, for ablation plots.

use std::fmt::Write as _;

use crate::buffer::ImageBuffer;
use crate::error::{Error, Result};
use crate::metrics::{psnr, Psnr};
use crate::pipeline::{compute_mean_v, enhance_at_level, EnhancementConfig};
use crate::tone::LevelCount;

pub const MAX_TRACE_LEVELS: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceLevel {
    pub levels: LevelCount,
    pub image: ImageBuffer,
    /// Mean V of the enhanced image, before 8-bit quantization.
    pub mean_v: f64,
    pub psnr_db: Option<Psnr>,
}

pub fn trace_levels(
    img: &ImageBuffer,
    max_levels: u32,
    cfg: &EnhancementConfig,
    reference: Option<&ImageBuffer>,
) -> Result<Vec<TraceLevel>> {
    if !(1..=MAX_TRACE_LEVELS).contains(&max_levels) {
        return Err(Error::InvalidConfig(format!(
            "max levels must be in [1, {MAX_TRACE_LEVELS}], got {max_levels}"
        )));
    }
    (1..=max_levels)
        .map(|k| {
            let levels = LevelCount::new(k)?;
            let image = enhance_at_level(img, cfg, levels)?;
            let mean_v = compute_mean_v(&image)?.mean_v.get();
            let psnr_db = reference.map(|r| psnr(&image, r, 1.0)).transpose()?;
            Ok(TraceLevel {
                levels,
                image,
                mean_v,
                psnr_db,
            })
        })
        .collect()
}

/// `k,mean_v,psnr_db` header plus one line per level; PSNR left empty
/// without a reference.
pub fn render_trace_csv(levels: &[TraceLevel]) -> String {
    let mut out = String::from("k,mean_v,psnr_db\n");
    for l in levels {
        let psnr = l.psnr_db.map(|p| p.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{}", l.levels, l.mean_v, psnr).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buffer::ChannelOrder;
    use crate::synth::scene;

    #[test]
    fn mean_v_increases_with_depth() {
        let img = crate::synth::darken(&scene(32, 32, 5, 0.2), 3.0);
        let sweep = trace_levels(&img, 5, &EnhancementConfig::default(), None).unwrap();
        assert_eq!(sweep.len(), 5);
        for w in sweep.windows(2) {
            assert!(w[1].mean_v > w[0].mean_v);
        }
        let csv = render_trace_csv(&sweep);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn white_is_unchanged_at_every_level() {
        let img = ImageBuffer::filled(12, 12, ChannelOrder::Rgb, 1.0).unwrap();
        let sweep = trace_levels(&img, 4, &EnhancementConfig::default(), Some(&img)).unwrap();
        for l in &sweep {
            assert_eq!(l.image, img);
            assert_eq!(l.psnr_db, Some(Psnr::Infinite));
        }
    }

    #[test]
    fn level_bounds() {
        let img = ImageBuffer::filled(12, 12, ChannelOrder::Rgb, 0.5).unwrap();
        let cfg = EnhancementConfig::default();
        assert!(trace_levels(&img, 0, &cfg, None).is_err());
        assert!(trace_levels(&img, 9, &cfg, None).is_err());
    }
}
