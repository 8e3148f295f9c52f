use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl;
use crate::types::{Address, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabelKind {
    Spam,
    Phishing,
    Malicious,
    #[serde(rename = "None")]
    Clean,
}

impl LabelKind {
    pub fn is_malicious(self) -> bool {
        !matches!(self, LabelKind::Clean)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalLabel {
    pub source: String,
    pub label: LabelKind,
}

/// Marketplace-listed metadata for one collection. URIs are kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionMetadata {
    pub contract: Address,
    pub name: String,
    pub creator: Address,
    #[serde(default)]
    pub royalty_bps: u32,
    #[serde(default)]
    pub twitter_handle: Option<String>,
    #[serde(default)]
    pub external_link: Option<String>,
    #[serde(default)]
    pub token_uris: BTreeMap<TokenId, String>,
    #[serde(default)]
    pub official_flag: bool,
    #[serde(default)]
    pub external_labels: Vec<ExternalLabel>,
}

impl CollectionMetadata {
    pub fn validate(&self) -> Result<()> {
        if self.royalty_bps > 10_000 {
            return Err(Error::invalid(
                "metadata",
                format!("{}: royalty_bps {} exceeds 10000", self.contract, self.royalty_bps),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct MetadataLoad {
    pub records: BTreeMap<Address, CollectionMetadata>,
    pub warnings: Vec<String>,
}

/// Loads line-delimited metadata keyed by contract; on duplicate contracts the
/// last record wins and a warning is recorded.
pub fn load_metadata(path: impl AsRef<Path>) -> Result<MetadataLoad> {
    let path = path.as_ref();
    let raw: Vec<(usize, CollectionMetadata)> = jsonl::read_numbered(path)?;
    let mut out = MetadataLoad::default();
    for (line, rec) in raw {
        rec.validate().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
        if out.records.contains_key(&rec.contract) {
            let w = format!("{}: duplicate metadata for {}; keeping the later record", path.display(), rec.contract);
            log::warn!("{w}");
            out.warnings.push(w);
        }
        out.records.insert(rec.contract, rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(contract: u64, bps: u32, name: &str) -> String {
        format!(
            r#"{{"contract":"{}","name":"{name}","creator":"{}","royalty_bps":{bps},"token_uris":{{"1":"ipfs://a"}},"external_labels":[{{"source":"etherscan","label":"Phishing"}}]}}"#,
            Address::from_low_u64(contract),
            Address::from_low_u64(99)
        )
    }

    #[test]
    fn loads_records() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        std::fs::write(&p, format!("{}\n{}\n", line(1, 500, "A"), line(2, 0, "B"))).unwrap();
        let m = load_metadata(&p).unwrap();
        assert_eq!(m.records.len(), 2);
        let a = &m.records[&Address::from_low_u64(1)];
        assert_eq!(a.token_uris[&TokenId::new(1)], "ipfs://a");
        assert!(a.external_labels[0].label.is_malicious());
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn duplicate_keeps_last_and_warns() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        std::fs::write(&p, format!("{}\n{}\n", line(1, 500, "A"), line(1, 0, "B"))).unwrap();
        let m = load_metadata(&p).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[&Address::from_low_u64(1)].name, "B");
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn royalty_bound_is_enforced_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        std::fs::write(&p, format!("{}\n{}\n", line(1, 500, "A"), line(2, 10_001, "B"))).unwrap();
        match load_metadata(&p).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        std::fs::write(&p, format!("{}\n{{oops\n", line(1, 500, "A"))).unwrap();
        assert!(matches!(load_metadata(&p), Err(Error::Parse { line: 2, .. })));
    }
}
