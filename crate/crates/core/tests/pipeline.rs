mod common;

use rhgvec::pipeline::{run_all, run_stage, Manifest, Stage, MANIFEST_FILE};
use rhgvec::Error;

#[test]
fn full_run_is_reproducible_and_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = common::write_fixture(dir.path());

    cfg.outdir = dir.path().join("first");
    let first = run_all(&cfg, false).unwrap();
    assert_eq!(first.len(), Stage::ALL.len());
    assert!(first.iter().all(|r| !r.skipped && r.manifest.deterministic));

    let table = std::fs::read_to_string(cfg.outdir.join("table1/table1.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "method,WS353,MEN,MTurk,CoNLL-2000,Brown");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert!(!cells[1].is_empty(), "WS353 missing: {row}");
        assert!(cells[2].is_empty() && cells[3].is_empty() && cells[5].is_empty(), "{row}");
        let acc: f64 = cells[4].parse().unwrap();
        assert!((0.0..=100.0).contains(&acc));
    }

    let again = run_all(&cfg, false).unwrap();
    assert!(again.iter().all(|r| r.skipped));
    for (a, b) in first.iter().zip(&again) {
        assert_eq!(a.manifest.hash, b.manifest.hash);
    }

    cfg.outdir = dir.path().join("second");
    let second = run_all(&cfg, false).unwrap();
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.manifest.hash, b.manifest.hash, "{}", a.stage);
    }
    let strip = |files: Vec<(String, Vec<u8>)>| -> Vec<(String, Vec<u8>)> {
        files.into_iter().filter(|(p, _)| !p.ends_with(MANIFEST_FILE)).collect()
    };
    let a = strip(common::snapshot(&dir.path().join("first")));
    let b = strip(common::snapshot(&dir.path().join("second")));
    assert_eq!(a.len(), b.len());
    for ((pa, da), (pb, db)) in a.iter().zip(&b) {
        assert_eq!(pa, pb);
        assert!(da == db, "{pa} differs between runs");
    }
}

#[test]
fn changed_parameter_reruns_stage_and_force_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = common::write_fixture(dir.path());
    let v1 = run_stage(Stage::Vocab, &cfg, false).unwrap();
    assert!(!v1.skipped);
    assert!(run_stage(Stage::Vocab, &cfg, false).unwrap().skipped);
    let forced = run_stage(Stage::Vocab, &cfg, true).unwrap();
    assert!(!forced.skipped);
    assert_eq!(forced.manifest.hash, v1.manifest.hash);

    cfg.min_count = 50;
    let v2 = run_stage(Stage::Vocab, &cfg, false).unwrap();
    assert!(!v2.skipped);
    assert_ne!(v2.manifest.hash, v1.manifest.hash);
    assert_eq!(Manifest::read(&cfg.outdir.join("vocab")).unwrap().hash, v2.manifest.hash);
}

#[test]
fn tampered_output_triggers_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_fixture(dir.path());
    let first = run_stage(Stage::Vocab, &cfg, false).unwrap();
    let path = cfg.outdir.join("vocab/vocab.tsv");
    let original = std::fs::read(&path).unwrap();
    std::fs::write(&path, b"junk\t1\n").unwrap();
    let rerun = run_stage(Stage::Vocab, &cfg, false).unwrap();
    assert!(!rerun.skipped);
    assert_eq!(rerun.manifest.hash, first.manifest.hash);
    assert_eq!(std::fs::read(&path).unwrap(), original);
}

#[test]
fn downstream_stage_without_upstream_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_fixture(dir.path());
    for stage in [Stage::Pmi, Stage::SvdB, Stage::Align, Stage::Table1] {
        match run_stage(stage, &cfg, false) {
            Err(e @ Error::MissingArtifact(_)) => assert_eq!(e.exit_code(), 3),
            other => panic!("{stage}: expected missing artifact, got {other:?}"),
        }
    }
}

#[test]
fn missing_corpus_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = common::write_fixture(dir.path());
    cfg.corpus = dir.path().join("absent.txt");
    let err = run_stage(Stage::Vocab, &cfg, false).unwrap_err();
    assert!(err.to_string().contains("absent.txt"), "{err}");
}
