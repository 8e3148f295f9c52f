use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DHash64;
use crate::error::{Error, Result};
use crate::jsonl;
use crate::types::{Address, TokenId};

/// One line of the hash cache file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HashRecord {
    pub contract: Address,
    pub token_id: TokenId,
    pub dhash: DHash64,
}

pub type HashCache = BTreeMap<Address, BTreeMap<TokenId, DHash64>>;

/// Loads a hash cache. A token listed twice with different hashes is an error.
pub fn load_hash_cache(path: impl AsRef<Path>) -> Result<HashCache> {
    let path = path.as_ref();
    let mut out = HashCache::new();
    for (line, rec) in jsonl::read_numbered::<HashRecord>(path)? {
        let slot = out.entry(rec.contract).or_default();
        if let Some(prev) = slot.insert(rec.token_id, rec.dhash) {
            if prev != rec.dhash {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("conflicting hashes for {} token {}", rec.contract, rec.token_id),
                });
            }
        }
    }
    Ok(out)
}

/// Writes records sorted by (contract, token).
pub fn write_hash_cache(path: impl AsRef<Path>, cache: &HashCache) -> Result<usize> {
    let records: Vec<HashRecord> = cache
        .iter()
        .flat_map(|(&contract, tokens)| {
            tokens.iter().map(move |(&token_id, &dhash)| HashRecord { contract, token_id, dhash })
        })
        .collect();
    jsonl::write(path, &records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_conflict() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.jsonl");
        let mut cache = HashCache::new();
        cache.entry(Address::from_low_u64(2)).or_default().insert(TokenId::new(5), DHash64(9));
        cache.entry(Address::from_low_u64(1)).or_default().insert(TokenId::new(1), DHash64(u64::MAX));
        assert_eq!(write_hash_cache(&p, &cache).unwrap(), 2);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"contract":"0x0000000000000000000000000000000000000001","token_id":"1","dhash":"ffffffffffffffff"}"#));
        assert_eq!(load_hash_cache(&p).unwrap(), cache);

        let extra = format!("{text}{}\n", text.lines().next().unwrap().replace("ffffffffffffffff", "0000000000000000"));
        std::fs::write(&p, extra).unwrap();
        assert!(matches!(load_hash_cache(&p), Err(Error::Parse { line: 3, .. })));
    }
}
