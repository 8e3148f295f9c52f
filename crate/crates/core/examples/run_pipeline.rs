//! Runs every stage over a config file and prints the headline numbers.
//!
//! ```text
//! cargo run --example run_pipeline -- demo/config.json
//! ```

use std::path::PathBuf;

use nftsquat::pipeline::{Pipeline, PipelineConfig};

fn main() -> nftsquat::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo/config.json"));
    let s = Pipeline::new(PipelineConfig::from_file(&path)?)?.run_all()?;
    println!("{} candidates matched, {} squat collections over {} targets", s.matched_candidates, s.squat_collections, s.targets);
    println!("{} campaigns {:?}", s.campaigns, s.campaign_archetypes);
    println!("{} victims ({} distinct)", s.victims_total, s.victims_distinct);
    println!("profit {} ETH ({} collections profitable)", s.total_profit_eth, s.profitable_collections);
    for row in &s.top_targets {
        println!("  {:<24} {}", row.seed, row.squats);
    }
    Ok(())
}
