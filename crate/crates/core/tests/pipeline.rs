use std::collections::BTreeSet;
use std::path::Path;

use nftsquat::cluster::Campaign;
use nftsquat::fpfilter::SuspicionVerdict;
use nftsquat::jsonl;
use nftsquat::pipeline::{Pipeline, PipelineConfig};
use nftsquat::types::Address;

fn demo(out: &Path) -> Pipeline {
    let mut cfg = PipelineConfig::from_file(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/config.json")).unwrap();
    cfg.out_dir = out.to_path_buf();
    Pipeline::new(cfg).unwrap()
}

#[test]
fn prefiltered_and_benign_collections_never_reach_campaigns() {
    let dir = tempfile::tempdir().unwrap();
    let p = demo(dir.path());
    let summary = p.run_all().unwrap();
    let verdicts: Vec<SuspicionVerdict> = jsonl::read(dir.path().join("verdicts.jsonl")).unwrap();
    let campaigns: Vec<Campaign> = jsonl::read(dir.path().join("campaigns.jsonl")).unwrap();
    let clustered: BTreeSet<Address> = campaigns.iter().flat_map(|c| c.members.iter().copied()).collect();
    for v in &verdicts {
        if v.prefilter_exclusion.is_some() {
            assert!(!v.suspicious);
            assert_eq!(v.satisfied_count, 0);
        }
        if !v.suspicious {
            assert!(!clustered.contains(&v.contract), "{} clustered", v.contract);
            assert!(!summary.squat_contracts.contains(&v.contract));
        }
    }
    assert!(summary.prefiltered.values().sum::<usize>() > 0);
}

#[test]
fn summary_totals_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let s = demo(dir.path()).run_all().unwrap();
    assert_eq!(s.total_profit_wei, s.mint_fee_wei + s.creator_earnings_wei);
    assert!(s.victims_distinct <= s.victims_total);
    assert_eq!(s.squats_by_tactic.values().sum::<usize>(), s.squat_collections);
    assert_eq!(s.campaign_archetypes.values().sum::<usize>(), s.campaigns);
    assert!(s.clustered_collections <= s.squat_collections);
    assert_eq!(s.channel_classes.values().sum::<usize>(), s.squat_collections);
    assert!(s.total_profit_usd.is_some());
}

#[test]
fn without_exchanges_deposit_phase_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::from_file(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/config.json")).unwrap();
    cfg.out_dir = dir.path().to_path_buf();
    cfg.exchanges = None;
    let s = Pipeline::new(cfg).unwrap().run_all().unwrap();
    // The deposit-linked pair falls apart into two singletons.
    assert_eq!(s.campaigns, 2);
    assert_eq!(std::fs::read_to_string(dir.path().join("deposits.jsonl")).unwrap(), "");
}
