//! Paired low-light / reference evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::buffer::{read_image, ImageBuffer};
use crate::error::{Error, Result};
use crate::metrics::{psnr, ssim, Psnr};
use crate::pipeline::{enhance, EnhancementConfig};

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedSample {
    pub id: String,
    pub low_path: PathBuf,
    pub ref_path: PathBuf,
}

/// Result of directory matching. Files present on only one side are kept so
/// the caller can report them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Discovery {
    pub pairs: Vec<PairedSample>,
    pub unmatched_low: Vec<PathBuf>,
    pub unmatched_ref: Vec<PathBuf>,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
        .unwrap_or(false)
}

fn stem(path: &Path) -> Option<String> {
    path.file_stem().and_then(|s| s.to_str()).map(str::to_owned)
}

fn index_dir(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() || !is_image(&path) {
            continue;
        }
        let Some(id) = stem(&path) else { continue };
        if out.insert(id.clone(), path).is_some() {
            return Err(Error::DuplicateId(id));
        }
    }
    Ok(out)
}

/// Matches image files in the two directories by file stem.
pub fn discover_pairs(low_dir: impl AsRef<Path>, ref_dir: impl AsRef<Path>) -> Result<Discovery> {
    let low = index_dir(low_dir.as_ref())?;
    let refs = index_dir(ref_dir.as_ref())?;
    let mut found = Discovery::default();
    for (id, low_path) in &low {
        match refs.get(id) {
            Some(ref_path) => found.pairs.push(PairedSample {
                id: id.clone(),
                low_path: low_path.clone(),
                ref_path: ref_path.clone(),
            }),
            None => found.unmatched_low.push(low_path.clone()),
        }
    }
    found.unmatched_ref = refs
        .iter()
        .filter(|(id, _)| !low.contains_key(*id))
        .map(|(_, p)| p.clone())
        .collect();
    if found.pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    Ok(found)
}

/// Parses a manifest of `low_path,ref_path` lines. Blank lines and lines
/// starting with `#` are skipped; relative paths resolve against `base`.
/// Sample ids are low-image file stems and must be unique.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<PairedSample>> {
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: &str| Error::Manifest {
            line: i + 1,
            message: message.to_owned(),
        };
        let (low, rf) = line.split_once(',').ok_or_else(|| bad("expected `low_path,ref_path`"))?;
        let (low, rf) = (low.trim(), rf.trim());
        if low.is_empty() || rf.is_empty() {
            return Err(bad("empty path"));
        }
        if rf.contains(',') {
            return Err(bad("too many fields"));
        }
        let low_path = base.join(low);
        let ref_path = base.join(rf);
        let id = stem(&low_path).ok_or_else(|| bad("low path has no file name"))?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        pairs.push(PairedSample { id, low_path, ref_path });
    }
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    pairs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(pairs)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<PairedSample>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new(".")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub id: String,
    pub psnr_db: Psnr,
    pub ssim: f64,
    /// Wall time of the enhancement call alone.
    pub seconds: f64,
    /// Metrics of the unprocessed low image against the reference.
    pub baseline_psnr_db: Psnr,
    pub baseline_ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalFailure {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    /// Mean over rows with finite PSNR; `Infinite` only if every row was.
    pub psnr_db: Psnr,
    pub ssim: f64,
    pub seconds: f64,
    pub baseline_psnr_db: Psnr,
    pub baseline_ssim: f64,
    /// Rows left out of the PSNR mean because their PSNR was infinite.
    pub infinite_psnr_rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub failures: Vec<EvalFailure>,
    pub aggregate: Aggregate,
}

fn mean_psnr(values: impl Iterator<Item = Psnr>) -> (Psnr, usize) {
    let (mut sum, mut n, mut inf) = (0.0, 0usize, 0usize);
    for v in values {
        match v {
            Psnr::Finite(db) => {
                sum += db;
                n += 1;
            }
            Psnr::Infinite => inf += 1,
        }
    }
    if n == 0 {
        (Psnr::Infinite, inf)
    } else {
        (Psnr::Finite(sum / n as f64), inf)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    sum / n as f64
}

impl Aggregate {
    pub fn from_rows(rows: &[EvalRow]) -> Self {
        let (psnr_db, infinite_psnr_rows) = mean_psnr(rows.iter().map(|r| r.psnr_db));
        let (baseline_psnr_db, _) = mean_psnr(rows.iter().map(|r| r.baseline_psnr_db));
        Aggregate {
            psnr_db,
            ssim: mean(rows.iter().map(|r| r.ssim)),
            seconds: mean(rows.iter().map(|r| r.seconds)),
            baseline_psnr_db,
            baseline_ssim: mean(rows.iter().map(|r| r.baseline_ssim)),
            infinite_psnr_rows,
        }
    }
}

/// Enhances and scores one decoded pair.
pub fn evaluate_images(id: &str, low: &ImageBuffer, reference: &ImageBuffer, cfg: &EnhancementConfig) -> Result<EvalRow> {
    let baseline_psnr_db = psnr(low, reference, 1.0)?;
    let baseline_ssim = ssim(low, reference, 1.0)?;
    let start = Instant::now();
    let enhanced = enhance(low, cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(EvalRow {
        id: id.to_owned(),
        psnr_db: psnr(&enhanced, reference, 1.0)?,
        ssim: ssim(&enhanced, reference, 1.0)?,
        seconds,
        baseline_psnr_db,
        baseline_ssim,
    })
}

fn evaluate_one(pair: &PairedSample, cfg: &EnhancementConfig) -> Result<EvalRow> {
    let low = read_image(&pair.low_path)?;
    let reference = read_image(&pair.ref_path)?;
    evaluate_images(&pair.id, &low, &reference, cfg)
}

/// Evaluates every pair. Pairs that fail to decode or compare become
/// failures; the aggregate covers the rest. Rows come back sorted by id.
pub fn evaluate(pairs: &[PairedSample], cfg: &EnhancementConfig) -> Result<EvalReport> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let results: Vec<(String, Result<EvalRow>)> = pairs
        .par_iter()
        .map(|p| (p.id.clone(), evaluate_one(p, cfg)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (id, res) in results {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(EvalFailure { id, message: e.to_string() }),
        }
    }
    if rows.is_empty() {
        return Err(Error::AllPairsFailed(failures.len()));
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    failures.sort_by(|a, b| a.id.cmp(&b.id));
    let aggregate = Aggregate::from_rows(&rows);
    Ok(EvalReport { rows, failures, aggregate })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

/// CSV: one `id,psnr_db,ssim,seconds` line per row, then a `MEAN` line.
/// Infinite PSNR is written as `inf`.
pub fn render_csv(r: &EvalReport) -> String {
    let mut out = String::new();
    for row in &r.rows {
        writeln!(out, "{},{},{},{}", row.id, row.psnr_db, row.ssim, row.seconds).unwrap();
    }
    let a = &r.aggregate;
    writeln!(out, "MEAN,{},{},{}", a.psnr_db, a.ssim, a.seconds).unwrap();
    out
}

pub fn render_markdown(r: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str("| id | PSNR (dB) | SSIM | seconds |\n");
    out.push_str("|---|---:|---:|---:|\n");
    for row in &r.rows {
        writeln!(out, "| {} | {:.3} | {:.3} | {:.4} |", row.id, row.psnr_db, row.ssim, row.seconds).unwrap();
    }
    let a = &r.aggregate;
    writeln!(out, "| **MEAN** | {:.3} | {:.3} | {:.4} |", a.psnr_db, a.ssim, a.seconds).unwrap();
    out
}

pub fn render_report(r: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(r),
        ReportFormat::Markdown => render_markdown(r),
    }
}

pub fn write_report(r: &EvalReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_report(r, format)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, psnr_db: Psnr, ssim: f64) -> EvalRow {
        EvalRow {
            id: id.into(),
            psnr_db,
            ssim,
            seconds: 0.5,
            baseline_psnr_db: Psnr::Finite(10.0),
            baseline_ssim: 0.5,
        }
    }

    fn report(rows: Vec<EvalRow>) -> EvalReport {
        let aggregate = Aggregate::from_rows(&rows);
        EvalReport {
            rows,
            failures: vec![],
            aggregate,
        }
    }

    #[test]
    fn csv_one_row() {
        let csv = render_csv(&report(vec![row("a", Psnr::Finite(20.0), 0.75)]));
        assert_eq!(csv, "a,20,0.75,0.5\nMEAN,20,0.75,0.5\n");
    }

    #[test]
    fn csv_infinite_token() {
        let csv = render_csv(&report(vec![row("a", Psnr::Infinite, 1.0)]));
        assert_eq!(csv.lines().next().unwrap(), "a,inf,1,0.5");
        assert!(csv.lines().nth(1).unwrap().starts_with("MEAN,inf,"));
    }

    #[test]
    fn aggregate_skips_infinite() {
        let r = report(vec![
            row("a", Psnr::Infinite, 1.0),
            row("b", Psnr::Finite(20.0), 0.5),
            row("c", Psnr::Finite(30.0), 0.6),
        ]);
        assert_eq!(r.aggregate.psnr_db, Psnr::Finite(25.0));
        assert_eq!(r.aggregate.infinite_psnr_rows, 1);
        assert!((r.aggregate.ssim - 0.7).abs() < 1e-12);
    }

    #[test]
    fn markdown_two_rows() {
        let md = render_markdown(&report(vec![
            row("a", Psnr::Finite(20.0), 0.5),
            row("b", Psnr::Infinite, 1.0),
        ]));
        assert_eq!(md.lines().count(), 5);
        assert!(md.contains("| b | inf |"));
    }

    #[test]
    fn manifest_parsing() {
        let text = "# comment\n\nlow/a.png, ref/a.png\nlow/b.jpg,ref/b.png\n";
        let pairs = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].id, "a");
        assert_eq!(pairs[0].low_path, PathBuf::from("/data/low/a.png"));
        assert_eq!(pairs[1].ref_path, PathBuf::from("/data/ref/b.png"));
        let abs = parse_manifest("/x/a.png,/y/a.png", Path::new("/data")).unwrap();
        assert_eq!(abs[0].low_path, PathBuf::from("/x/a.png"));
    }

    #[test]
    fn manifest_errors() {
        let base = Path::new(".");
        assert!(matches!(parse_manifest("just-one-field", base), Err(Error::Manifest { line: 1, .. })));
        assert!(matches!(parse_manifest("a.png,", base), Err(Error::Manifest { .. })));
        assert!(matches!(parse_manifest("a,b,c", base), Err(Error::Manifest { .. })));
        assert!(matches!(parse_manifest("x/a.png,r1.png\ny/a.png,r2.png", base), Err(Error::DuplicateId(_))));
        assert!(matches!(parse_manifest("# nothing\n", base), Err(Error::NoPairs)));
    }
}
