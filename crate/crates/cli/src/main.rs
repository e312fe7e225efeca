use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use retinex_core::bench::{current_threads, run_bench, with_threads, BenchConfig, BenchKernel};
use retinex_core::eval::{discover_pairs, evaluate, read_manifest, render_csv, write_report, ReportFormat};
use retinex_core::trace::{render_trace_csv, trace_levels, MAX_TRACE_LEVELS};
use retinex_core::{enhance_with_info, read_image, write_png, EnhancementConfig, LevelCount};

/// Low-light image enhancement by closed-form Retinex illumination refinement.
#[derive(Debug, Parser)]
#[command(name = "retinex", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enhance one PNG/JPEG image and write a PNG.
    Enhance {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        tone: ToneArgs,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Enhance paired low-light images and score them against references.
    Eval {
        /// Directory of low-light images.
        #[arg(required_unless_present = "manifest", requires = "ref_dir")]
        low_dir: Option<PathBuf>,
        /// Directory of reference images, matched by file stem.
        ref_dir: Option<PathBuf>,
        /// File of `low_path,ref_path` lines; replaces directory matching.
        #[arg(long, conflicts_with_all = ["low_dir", "ref_dir"])]
        manifest: Option<PathBuf>,
        /// Report destination.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        tone: ToneArgs,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Time enhancement of seeded random images.
    Bench {
        #[arg(long, default_value_t = 625, value_parser = clap::value_parser!(u32).range(16..))]
        width: u32,
        #[arg(long, default_value_t = 625, value_parser = clap::value_parser!(u32).range(16..))]
        height: u32,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(3..))]
        repeats: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also time PNG decode + enhance + PNG encode.
        #[arg(long)]
        with_io: bool,
        #[arg(long, value_enum, default_value_t = Kernel::Full)]
        kernel: Kernel,
        #[command(flatten)]
        tone: ToneArgs,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Write one enhanced image per cascade depth plus a summary CSV.
    Trace {
        input: PathBuf,
        #[arg(long, default_value_t = 3,
              value_parser = clap::value_parser!(u32).range(1..=i64::from(MAX_TRACE_LEVELS)))]
        max_levels: u32,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Reference image for a PSNR column.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[command(flatten)]
        tone: ToneArgs,
        #[command(flatten)]
        threads: ThreadArgs,
    },
}

#[derive(Debug, Args)]
struct ToneArgs {
    /// Force the cascade depth instead of choosing it from mean V.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    levels: Option<u32>,
    /// Mean-V bound below which three levels are used.
    #[arg(long, default_value_t = 0.08)]
    threshold_low: f64,
    /// Mean-V bound above which one level is used.
    #[arg(long, default_value_t = 0.16)]
    threshold_high: f64,
    /// Saturation exponent: S becomes S^(1 + gamma).
    #[arg(long, default_value_t = 0.7)]
    gamma: f64,
    /// Leave saturation untouched.
    #[arg(long)]
    no_saturation: bool,
    /// Floor applied to zero values before the logarithm.
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
}

/// Flag values that parse but are rejected by validation; exits with 2.
#[derive(Debug)]
struct UsageError(retinex_core::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

impl ToneArgs {
    fn config(&self) -> Result<EnhancementConfig, UsageError> {
        let cfg = EnhancementConfig {
            threshold_low: self.threshold_low,
            threshold_high: self.threshold_high,
            gamma: self.gamma,
            eps: self.eps,
            levels_override: self.levels.map(LevelCount::new).transpose().map_err(UsageError)?,
            adjust_saturation: !self.no_saturation,
        };
        cfg.validate().map_err(UsageError)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct ThreadArgs {
    /// Worker threads (default: all cores).
    #[arg(long, env = "RETINEX_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Md => ReportFormat::Markdown,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kernel {
    Full,
    VPlane,
}

fn in_pool<T: Send>(threads: &ThreadArgs, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads.threads {
        Some(n) => with_threads(n as usize, f)?,
        None => f(),
    }
}

fn cmd_enhance(input: &Path, output: &Path, cfg: &EnhancementConfig) -> Result<()> {
    let img = read_image(input).with_context(|| format!("reading {}", input.display()))?;
    let start = Instant::now();
    let (out, info) = enhance_with_info(&img, cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    write_png(&out, output).with_context(|| format!("writing {}", output.display()))?;
    println!(
        "mean_v={:.6} levels={} seconds={:.6} threads={}",
        info.stats.mean_v.get(),
        info.levels,
        seconds,
        current_threads()
    );
    Ok(())
}

fn cmd_eval(
    dirs: Option<(&Path, &Path)>,
    manifest: Option<&Path>,
    out: &Path,
    format: Format,
    cfg: &EnhancementConfig,
) -> Result<()> {
    let pairs = match (manifest, dirs) {
        (Some(m), _) => read_manifest(m)?,
        (None, Some((low, rf))) => {
            let found = discover_pairs(low, rf)?;
            for p in &found.unmatched_low {
                eprintln!("warning: no reference for {}", p.display());
            }
            for p in &found.unmatched_ref {
                eprintln!("warning: no low-light image for {}", p.display());
            }
            found.pairs
        }
        (None, None) => unreachable!("clap requires dirs or a manifest"),
    };
    let report = evaluate(&pairs, cfg)?;
    for f in &report.failures {
        eprintln!("error: {}: {}", f.id, f.message);
    }
    write_report(&report, out, format.into())?;
    let a = &report.aggregate;
    if a.infinite_psnr_rows > 0 {
        eprintln!("note: {} rows with infinite PSNR left out of the mean", a.infinite_psnr_rows);
    }
    let csv = render_csv(&report);
    println!("{}", csv.lines().last().unwrap_or_default());
    println!("BASELINE,{},{}", a.baseline_psnr_db, a.baseline_ssim);
    println!("pairs={} failed={} threads={}", report.rows.len(), report.failures.len(), current_threads());
    Ok(())
}

fn cmd_trace(input: &Path, max_levels: u32, out: &Path, reference: Option<&Path>, cfg: &EnhancementConfig) -> Result<()> {
    let img = read_image(input).with_context(|| format!("reading {}", input.display()))?;
    let reference = reference
        .map(|p| read_image(p).with_context(|| format!("reading {}", p.display())))
        .transpose()?;
    let sweep = trace_levels(&img, max_levels, cfg, reference.as_ref())?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
    for level in &sweep {
        let path = out.join(format!("{stem}_k{}.png", level.levels));
        write_png(&level.image, &path)?;
    }
    let csv_path = out.join("trace.csv");
    std::fs::write(&csv_path, render_trace_csv(&sweep)).with_context(|| format!("writing {}", csv_path.display()))?;
    println!("wrote {} levels to {}", sweep.len(), out.display());
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Enhance { input, output, tone, threads } => {
            let cfg = tone.config()?;
            in_pool(&threads, || cmd_enhance(&input, &output, &cfg))
        }
        Command::Eval { low_dir, ref_dir, manifest, out, format, tone, threads } => {
            let cfg = tone.config()?;
            let dirs = low_dir.as_deref().zip(ref_dir.as_deref());
            in_pool(&threads, || cmd_eval(dirs, manifest.as_deref(), &out, format, &cfg))
        }
        Command::Bench { width, height, repeats, seed, with_io, kernel, tone, threads } => {
            let cfg = BenchConfig {
                width: width as usize,
                height: height as usize,
                repeats: repeats as usize,
                seed,
                with_io,
                kernel: match kernel {
                    Kernel::Full => BenchKernel::Full,
                    Kernel::VPlane => BenchKernel::VPlane,
                },
                enhancement: tone.config()?,
            };
            let record = in_pool(&threads, || Ok(run_bench(&cfg)?))?;
            println!("{record}");
            Ok(())
        }
        Command::Trace { input, max_levels, out, reference, tone, threads } => {
            let cfg = tone.config()?;
            in_pool(&threads, || cmd_trace(&input, max_levels, &out, reference.as_deref(), &cfg))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}
