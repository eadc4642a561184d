use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use innercore::classify::Verdict;
use innercore::graph::write_edge_stream;
use innercore::pipeline::{run, PipelineConfig};
use innercore::synth::{generate_stream, GenSpec, Profile};

fn write_stream(dir: &Path, profile: Profile, seed: u64) -> PathBuf {
    let generated = generate_stream(&GenSpec::for_profile(profile, 300, 30, seed)).unwrap();
    let path = dir.join(format!("{profile:?}-{seed}.txt"));
    let mut bytes = Vec::new();
    write_edge_stream(&mut bytes, &generated.edges).unwrap();
    fs::write(&path, bytes).unwrap();
    path
}

fn assert_same_files(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>) {
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (name, bytes) in a {
        assert!(&b[name] == bytes, "{name} differs");
    }
}

fn stage_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn conforming_stream_gets_predictions_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_stream(tmp.path(), Profile::Conforming, 5);
    let config = PipelineConfig::new(&input, tmp.path().join("a"));
    let first = run(&config).unwrap();
    assert_eq!(first.report.verdict, Verdict::Good);
    assert_eq!(first.report.snapshots, 30);
    let section = first.report.prediction.as_ref().expect("prediction section");
    assert!(!section.forced);
    assert_eq!(section.f1.len(), 2);
    for s in &section.f1 {
        assert!(s.mean > 0.7, "{s:?}");
    }
    assert_eq!(section.latest.members.len(), 10);

    let files = stage_files(&first.dir);
    for name in ["config.json", "snapshots.json", "params.json", "classification.json", "predictions.json", "report.json"] {
        assert!(files.contains_key(name), "{name} missing");
    }

    // resumed run reads the cached stages
    let resumed = run(&config).unwrap();
    assert_eq!(resumed.report, first.report);
    assert_same_files(&stage_files(&resumed.dir), &files);

    // a fresh directory recomputes everything to the same bytes
    let fresh = run(&PipelineConfig::new(&input, tmp.path().join("b"))).unwrap();
    assert_same_files(&stage_files(&fresh.dir), &files);
}

#[test]
fn non_conforming_stream_is_skipped_unless_forced() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_stream(tmp.path(), Profile::NonConforming, 6);
    let mut config = PipelineConfig::new(&input, tmp.path().join("out"));
    let skipped = run(&config).unwrap();
    assert_eq!(skipped.report.verdict, Verdict::Bad);
    assert!(skipped.report.prediction.is_none());
    assert!(skipped.report.skip_reason.as_deref().unwrap().contains("Bad"));
    assert!(!skipped.dir.join("predictions.json").exists());

    config.force_predict = true;
    let forced = run(&config).unwrap();
    assert_ne!(forced.dir, skipped.dir);
    let section = forced.report.prediction.unwrap();
    assert!(section.forced);
    assert!(forced.report.skip_reason.is_none());
}

#[test]
fn config_hash_tracks_settings_and_input() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("edges.txt");
    fs::write(&input, "1 2 0\n2 3 0\n").unwrap();
    let base = PipelineConfig::new(&input, tmp.path().join("x"));
    let h = base.hash().unwrap();
    assert_eq!(h, PipelineConfig::new(&input, tmp.path().join("y")).hash().unwrap());
    let mut other = base.clone();
    other.m = 5;
    assert_ne!(h, other.hash().unwrap());
    fs::write(&input, "1 2 0\n2 4 0\n").unwrap();
    assert_ne!(h, base.hash().unwrap());
}
