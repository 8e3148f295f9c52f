//! Hashes every image under a `<contract>/<token>.<ext>` directory and lists
//! near-duplicate pairs across collections.
//!
//! ```text
//! cargo run --example dhash_images -- demo/images
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use nftsquat::imagehash::{hamming, hash_directory, DistanceThreshold};

fn main() -> nftsquat::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo/images"));
    let records = hash_directory(&dir)?;
    println!("{} images hashed", records.len());
    let threshold = DistanceThreshold::strict(5);

    let mut by_hash: BTreeMap<u64, usize> = BTreeMap::new();
    for (i, a) in records.iter().enumerate() {
        *by_hash.entry(a.dhash.0).or_default() += 1;
        for b in &records[i + 1..] {
            if a.contract == b.contract {
                continue;
            }
            let d = hamming(a.dhash, b.dhash);
            if threshold.admits(d) {
                println!("  d={d} {}#{} ~ {}#{}", a.contract, a.token_id, b.contract, b.token_id);
            }
        }
    }
    println!("{} distinct hashes", by_hash.len());
    Ok(())
}
