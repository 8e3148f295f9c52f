use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nftsquat"));
    c.env_remove("NFTSQUAT_CONFIG").env_remove("RUST_LOG");
    c
}

fn demo_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/config.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_lists_every_subcommand() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in [
        "gen-corpus",
        "match",
        "ingest-events",
        "ingest-trades",
        "hash-images",
        "theft-scan",
        "filter",
        "cluster",
        "report",
        "pipeline",
    ] {
        assert!(text.contains(sub), "{sub} missing from --help");
    }
}

#[test]
fn missing_seed_file_exits_1_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = dir.path().join("nope.jsonl");
    let o = run(&["gen-corpus", "--seeds", seeds.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.jsonl"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": "x"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "gen-corpus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_log_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("logs.jsonl");
    let zero = format!("0x{}", "0".repeat(64));
    std::fs::write(
        &logs,
        format!(
            r#"{{"tx_hash":"{zero}","log_index":0,"contract":"0x{}","topics":[],"data":"0x","block":1,"timestamp":1}}"#,
            "a".repeat(40)
        ) + "\n",
    )
    .unwrap();
    let o = run(&["ingest-events", "--logs", logs.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn empty_corpus_matches_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = dir.path().join("seeds.jsonl");
    let cands = dir.path().join("candidates.jsonl");
    std::fs::write(&seeds, "").unwrap();
    std::fs::write(
        &cands,
        format!(
            r#"{{"contract_address":"0x{}","name":"Azuki NFT","standard":"ERC721","creator":"0x{}"}}"#,
            "1".repeat(40),
            "2".repeat(40)
        ) + "\n",
    )
    .unwrap();
    let out = dir.path().to_str().unwrap();
    let common = ["--seeds", seeds.to_str().unwrap(), "--candidates", cands.to_str().unwrap(), "--out-dir", out];
    for stage in ["gen-corpus", "match"] {
        let mut args = vec![stage];
        args.extend(common);
        let o = run(&args);
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    assert_eq!(std::fs::read_to_string(dir.path().join("matches.jsonl")).unwrap(), "");
}

#[test]
fn stage_before_its_input_exists_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--config", demo_config().to_str().unwrap(), "--out-dir", out, "filter"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("matches.jsonl"), "{}", stderr(&o));
}

#[test]
fn stage_by_stage_equals_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (whole, staged) = (dir.path().join("whole"), dir.path().join("staged"));
    let cfg = demo_config();
    let o = run(&["-q", "--config", cfg.to_str().unwrap(), "--out-dir", whole.to_str().unwrap(), "pipeline"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for stage in [
        "gen-corpus",
        "match",
        "ingest-events",
        "ingest-trades",
        "hash-images",
        "theft-scan",
        "filter",
        "cluster",
        "report",
        // A repeated stage rewrites the same bytes.
        "filter",
    ] {
        let o = run(&["-q", "--config", cfg.to_str().unwrap(), "--out-dir", staged.to_str().unwrap(), stage]);
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(&whole).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 14);
    for n in names {
        assert_eq!(std::fs::read(whole.join(&n)).unwrap(), std::fs::read(staged.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn flags_override_config_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config();
    // Requiring every month of the snapshot to be low leaves no transfer collapse.
    let o = run(&[
        "-q",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--transfer-low-months",
        "12",
        "pipeline",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let verdicts = std::fs::read_to_string(dir.path().join("verdicts.jsonl")).unwrap();
    assert!(!verdicts.contains(r#""transfer_collapse":true"#));
}
