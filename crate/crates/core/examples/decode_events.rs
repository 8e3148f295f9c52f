//! Decodes the demo snapshot's raw logs into NFT transfers and marketplace
//! sales and prints a per-kind tally.
//!
//! ```text
//! cargo run --example build_demo
//! cargo run --example decode_events
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use nftsquat::ingest::{decode_trades, decode_transfers, MarketMap, RawLogRecord};
use nftsquat::jsonl;

fn main() -> nftsquat::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo");
    let logs: Vec<RawLogRecord> = jsonl::read(demo.join("logs.jsonl"))?;
    let (transfers, stats) = decode_transfers(&logs)?;
    let (trades, trade_stats) = decode_trades(&logs, &MarketMap::load(demo.join("market_map.json"))?)?;

    let mut kinds = BTreeMap::new();
    for t in &transfers {
        *kinds.entry((t.standard, t.kind)).or_insert(0) += 1;
    }
    println!("{} logs", logs.len());
    for ((standard, kind), n) in kinds {
        println!("  {standard:?} {kind:?}: {n}");
    }
    println!("  skipped: {} unrelated, {} fungible", stats.skipped_unknown_topic, stats.skipped_fungible);
    println!("{} sales ({} self-trades dropped)", trade_stats.trades, trade_stats.rejected_self_trades);
    if let Some(t) = trades.iter().max_by_key(|t| t.price_wei) {
        println!("  top sale: token {} of {} for {} wei", t.token_id, t.contract, t.price_wei);
    }
    Ok(())
}
