use std::path::Path;

use retinex_core::eval::{
    discover_pairs, evaluate, read_manifest, render_csv, render_markdown, write_report, ReportFormat,
};
use retinex_core::synth::{darken, scene};
use retinex_core::{write_png, ChannelOrder, EnhancementConfig, Error, ImageBuffer, Psnr};

fn white() -> ImageBuffer {
    ImageBuffer::filled(16, 16, ChannelOrder::Rgb, 1.0).unwrap()
}

fn write(dir: &Path, name: &str, img: &ImageBuffer) {
    write_png(img, dir.join(name)).unwrap();
}

fn synthetic_set(n: u64) -> (tempfile::TempDir, tempfile::TempDir) {
    let low = tempfile::tempdir().unwrap();
    let rf = tempfile::tempdir().unwrap();
    for seed in 0..n {
        let reference = scene(48, 40, seed, 0.2);
        write(rf.path(), &format!("img{seed}.png"), &reference);
        write(low.path(), &format!("img{seed}.png"), &darken(&reference, 3.0));
    }
    (low, rf)
}

#[test]
fn discovery_matches_by_stem() {
    let low = tempfile::tempdir().unwrap();
    let rf = tempfile::tempdir().unwrap();
    for name in ["b.png", "a.png"] {
        write(low.path(), name, &white());
        write(rf.path(), name, &white());
    }
    std::fs::write(low.path().join("notes.txt"), "ignored").unwrap();
    let found = discover_pairs(low.path(), rf.path()).unwrap();
    let ids: Vec<_> = found.pairs.iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, ["a", "b"]);
    assert!(found.unmatched_low.is_empty() && found.unmatched_ref.is_empty());
}

#[test]
fn discovery_without_overlap_fails() {
    let low = tempfile::tempdir().unwrap();
    let rf = tempfile::tempdir().unwrap();
    write(low.path(), "a.png", &white());
    write(rf.path(), "b.png", &white());
    assert!(matches!(discover_pairs(low.path(), rf.path()), Err(Error::NoPairs)));
}

#[test]
fn discovery_reports_unmatched() {
    let low = tempfile::tempdir().unwrap();
    let rf = tempfile::tempdir().unwrap();
    write(low.path(), "a.png", &white());
    write(low.path(), "c.png", &white());
    write(rf.path(), "a.png", &white());
    let found = discover_pairs(low.path(), rf.path()).unwrap();
    assert_eq!(found.pairs.len(), 1);
    assert_eq!(found.unmatched_low, vec![low.path().join("c.png")]);
}

#[test]
fn white_pair_scores_perfectly() {
    let low = tempfile::tempdir().unwrap();
    let rf = tempfile::tempdir().unwrap();
    write(low.path(), "w.png", &white());
    write(rf.path(), "w.png", &white());
    let pairs = discover_pairs(low.path(), rf.path()).unwrap().pairs;
    let report = evaluate(&pairs, &EnhancementConfig::default()).unwrap();
    assert_eq!(report.rows[0].psnr_db, Psnr::Infinite);
    assert_eq!(report.rows[0].ssim, 1.0);
    assert!(render_csv(&report).starts_with("w,inf,1,"));
}

#[test]
fn darkened_pairs_improve_over_baseline() {
    let (low, rf) = synthetic_set(3);
    let pairs = discover_pairs(low.path(), rf.path()).unwrap().pairs;
    let report = evaluate(&pairs, &EnhancementConfig::default()).unwrap();
    assert_eq!(report.rows.len(), 3);
    for row in &report.rows {
        assert!(row.psnr_db > row.baseline_psnr_db, "{row:?}");
    }
    let a = &report.aggregate;
    let mean_psnr = report.rows.iter().map(|r| r.psnr_db.as_f64()).sum::<f64>() / 3.0;
    let mean_ssim = report.rows.iter().map(|r| r.ssim).sum::<f64>() / 3.0;
    assert!((a.psnr_db.as_f64() - mean_psnr).abs() <= 1e-12);
    assert!((a.ssim - mean_ssim).abs() <= 1e-12);
}

#[test]
fn undecodable_pair_becomes_a_failure_row() {
    let (low, rf) = synthetic_set(2);
    std::fs::write(low.path().join("broken.png"), b"definitely not a png").unwrap();
    std::fs::write(rf.path().join("broken.png"), b"nor this").unwrap();
    let pairs = discover_pairs(low.path(), rf.path()).unwrap().pairs;
    assert_eq!(pairs.len(), 3);
    let report = evaluate(&pairs, &EnhancementConfig::default()).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].id, "broken");
}

#[test]
fn all_failed_is_an_error() {
    let low = tempfile::tempdir().unwrap();
    let rf = tempfile::tempdir().unwrap();
    std::fs::write(low.path().join("x.png"), b"junk").unwrap();
    std::fs::write(rf.path().join("x.png"), b"junk").unwrap();
    let pairs = discover_pairs(low.path(), rf.path()).unwrap().pairs;
    assert!(matches!(evaluate(&pairs, &EnhancementConfig::default()), Err(Error::AllPairsFailed(1))));
}

fn strip_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_owned())
        .collect()
}

#[test]
fn order_independent_and_reproducible() {
    let (low, rf) = synthetic_set(4);
    let pairs = discover_pairs(low.path(), rf.path()).unwrap().pairs;
    let cfg = EnhancementConfig::default();
    let forward = evaluate(&pairs, &cfg).unwrap();
    let mut reversed_pairs = pairs.clone();
    reversed_pairs.reverse();
    let reversed = evaluate(&reversed_pairs, &cfg).unwrap();
    assert_eq!(strip_timing(&render_csv(&forward)), strip_timing(&render_csv(&reversed)));
    let again = evaluate(&pairs, &cfg).unwrap();
    assert_eq!(strip_timing(&render_csv(&forward)), strip_timing(&render_csv(&again)));
}

#[test]
fn report_files() {
    let (low, rf) = synthetic_set(2);
    let pairs = discover_pairs(low.path(), rf.path()).unwrap().pairs;
    let report = evaluate(&pairs, &EnhancementConfig::default()).unwrap();
    let out = tempfile::tempdir().unwrap();
    let csv = out.path().join("r.csv");
    write_report(&report, &csv, ReportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().last().unwrap().starts_with("MEAN,"));
    assert_eq!(render_markdown(&report).lines().count(), 5);

    let missing = out.path().join("no/such/dir/r.csv");
    let err = write_report(&report, &missing, ReportFormat::Csv).unwrap_err();
    assert!(err.to_string().contains("no/such/dir"));
}

#[test]
fn manifest_overrides_discovery() {
    let (low, rf) = synthetic_set(2);
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("pairs.txt");
    let text = format!(
        "# low,ref\n{},{}\n",
        low.path().join("img1.png").display(),
        rf.path().join("img1.png").display()
    );
    std::fs::write(&manifest, text).unwrap();
    let pairs = read_manifest(&manifest).unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0].id, "img1");
    let report = evaluate(&pairs, &EnhancementConfig::default()).unwrap();
    assert_eq!(report.rows.len(), 1);
}
