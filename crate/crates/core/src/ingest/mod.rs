//! Snapshot ingestion: raw event logs into typed transfers and trades, plus
//! collection metadata and plain ETH transactions.

pub mod abi;
mod metadata;
mod trades;
mod transfers;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{dec_u256, Address, Hash32, HexBytes, U256};

pub use metadata::{load_metadata, CollectionMetadata, ExternalLabel, LabelKind, MetadataLoad};
pub use trades::{
    decode_trades, FieldSource, MarketLayout, MarketMap, Marketplace, TradeDecoder, TradeFields, TradeRecord,
    TradeStats,
};
pub use transfers::{
    decode_transfers, TransferDecoder, TransferEvent, TransferKind, TransferStats, ERC1155_TRANSFER_BATCH,
    ERC1155_TRANSFER_SINGLE, ERC721_TRANSFER,
};

/// One exported event log together with its transaction context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLogRecord {
    pub tx_hash: Hash32,
    pub log_index: u64,
    pub contract: Address,
    pub topics: Vec<Hash32>,
    pub data: HexBytes,
    pub block: u64,
    pub timestamp: u64,
    /// ETH sent with the enclosing transaction.
    #[serde(with = "dec_u256", default)]
    pub tx_value_wei: U256,
}

impl RawLogRecord {
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::Decode {
            tx_hash: self.tx_hash.to_string(),
            log_index: self.log_index,
            message,
        };
        if self.topics.is_empty() || self.topics.len() > 4 {
            return Err(bad(format!("{} topics; expected 1 to 4", self.topics.len())));
        }
        abi::check_aligned(&self.data.0).map_err(|e| bad(e.to_string()))
    }
}

/// A plain value transfer between accounts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlainTransaction {
    pub tx_hash: Hash32,
    pub from: Address,
    pub to: Address,
    #[serde(with = "dec_u256")]
    pub value_wei: U256,
    pub block: u64,
}
