//! Throughput measurement for the enhancement kernel.

use std::time::Instant;

use crate::buffer::{decode_image, encode_png};
use crate::error::{Error, Result};
use crate::pipeline::{enhance, enhance_v_plane, EnhancementConfig};
use crate::synth::random_image;
use crate::tone::LevelCount;

/// What gets timed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKernel {
    /// RGB -> HSV, V cascade, S gamma, HSV -> RGB.
    Full,
    /// Only the V-plane tone curve.
    VPlane,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub width: usize,
    pub height: usize,
    pub repeats: usize,
    pub seed: u64,
    pub with_io: bool,
    pub kernel: BenchKernel,
    pub enhancement: EnhancementConfig,
}

impl BenchConfig {
    pub fn new(width: usize, height: usize, repeats: usize) -> Self {
        BenchConfig {
            width,
            height,
            repeats,
            seed: 42,
            with_io: false,
            kernel: BenchKernel::Full,
            enhancement: EnhancementConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub width: usize,
    pub height: usize,
    pub repeats: usize,
    /// Rayon threads available while the benchmark ran.
    pub threads: usize,
    pub mean_seconds: f64,
    pub stddev_seconds: f64,
    pub ns_per_pixel: f64,
    /// Mean of PNG encode + decode + enhance + encode, when requested.
    pub io_mean_seconds: Option<f64>,
}

impl std::fmt::Display for BenchRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "size={}x{} repeats={} threads={} mean_s={:.6} stddev_s={:.6} ns_per_pixel={:.3}",
            self.width, self.height, self.repeats, self.threads, self.mean_seconds, self.stddev_seconds, self.ns_per_pixel
        )?;
        if let Some(io) = self.io_mean_seconds {
            write!(f, " with_io_mean_s={io:.6}")?;
        }
        Ok(())
    }
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Times `repeats` enhancements of seeded random images. One extra warm-up
/// run precedes them and is discarded. Image generation is not timed.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchRecord> {
    if cfg.repeats < 3 {
        return Err(Error::TooFewRepeats(cfg.repeats));
    }
    if cfg.width < 16 || cfg.height < 16 {
        return Err(Error::BenchTooSmall {
            width: cfg.width,
            height: cfg.height,
        });
    }
    cfg.enhancement.validate()?;
    let levels = cfg.enhancement.levels_override.unwrap_or(LevelCount::ONE);

    let mut times = Vec::with_capacity(cfg.repeats);
    let mut io_times = Vec::new();
    for i in 0..=cfg.repeats {
        let img = random_image(cfg.width, cfg.height, cfg.seed.wrapping_add(i as u64));
        let elapsed = match cfg.kernel {
            BenchKernel::Full => {
                let start = Instant::now();
                let out = enhance(&img, &cfg.enhancement)?;
                let t = start.elapsed().as_secs_f64();
                std::hint::black_box(out);
                t
            }
            BenchKernel::VPlane => {
                let plane = img.value_plane();
                let start = Instant::now();
                let out = enhance_v_plane(&plane, levels, cfg.enhancement.eps)?;
                let t = start.elapsed().as_secs_f64();
                std::hint::black_box(out);
                t
            }
        };
        if cfg.with_io {
            let png = encode_png(&img)?;
            let start = Instant::now();
            let decoded = decode_image(&png)?;
            let out = enhance(&decoded, &cfg.enhancement)?;
            let bytes = encode_png(&out)?;
            let t = start.elapsed().as_secs_f64();
            std::hint::black_box(bytes);
            if i > 0 {
                io_times.push(t);
            }
        }
        if i > 0 {
            times.push(elapsed);
        }
    }

    let (mean_seconds, stddev_seconds) = mean_std(&times);
    Ok(BenchRecord {
        width: cfg.width,
        height: cfg.height,
        repeats: cfg.repeats,
        threads: rayon::current_num_threads(),
        mean_seconds,
        stddev_seconds,
        ns_per_pixel: mean_seconds * 1e9 / (cfg.width * cfg.height) as f64,
        io_mean_seconds: cfg.with_io.then(|| mean_std(&io_times).0),
    })
}

/// Worker threads available to data-parallel stages on this thread.
pub fn current_threads() -> usize {
    rayon::current_num_threads()
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
