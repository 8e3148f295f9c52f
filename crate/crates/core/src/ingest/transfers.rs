use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::abi::{self, AbiError};
use super::RawLogRecord;
use crate::error::{Error, Result};
use crate::types::{dec_u256, Address, Hash32, TokenId, TokenStandard, U256};

pub const ERC721_TRANSFER: &str = "Transfer(address,address,uint256)";
pub const ERC1155_TRANSFER_SINGLE: &str = "TransferSingle(address,address,address,uint256,uint256)";
pub const ERC1155_TRANSFER_BATCH: &str = "TransferBatch(address,address,address,uint256[],uint256[])";

struct Topics {
    transfer: Hash32,
    single: Hash32,
    batch: Hash32,
}

fn topics() -> &'static Topics {
    static TOPICS: OnceLock<Topics> = OnceLock::new();
    TOPICS.get_or_init(|| Topics {
        transfer: abi::event_topic(ERC721_TRANSFER),
        single: abi::event_topic(ERC1155_TRANSFER_SINGLE),
        batch: abi::event_topic(ERC1155_TRANSFER_BATCH),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransferKind {
    Mint,
    Burn,
    Swap,
}

impl TransferKind {
    /// Mint iff `from` is the null address; burn iff `to` is a dead address
    /// (null or `0x…dEaD`) and `from` is not null; swap otherwise.
    pub fn classify(from: Address, to: Address) -> Self {
        if from.is_zero() {
            TransferKind::Mint
        } else if to.is_zero() || to == Address::DEAD {
            TransferKind::Burn
        } else {
            TransferKind::Swap
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferEvent {
    pub standard: TokenStandard,
    pub contract: Address,
    pub from: Address,
    pub to: Address,
    pub token_id: TokenId,
    #[serde(with = "dec_u256")]
    pub amount: U256,
    pub kind: TransferKind,
    pub block: u64,
    pub timestamp: u64,
    pub tx_hash: Hash32,
    pub log_index: u64,
    /// Position within a batch transfer; absent for single transfers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_index: Option<u32>,
    #[serde(with = "dec_u256")]
    pub tx_value_wei: U256,
}

impl TransferEvent {
    pub fn order_key(&self) -> (u64, u64, u32) {
        (self.block, self.log_index, self.batch_index.unwrap_or(0))
    }
}

/// Counters kept while decoding a log stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TransferStats {
    pub logs_decoded: usize,
    pub events: usize,
    /// Topic-0 is none of the three transfer signatures.
    pub skipped_unknown_topic: usize,
    /// ERC-20 `Transfer` (three topics): same signature, not an NFT.
    pub skipped_fungible: usize,
}

/// Stateless per record apart from its counters.
#[derive(Debug, Default)]
pub struct TransferDecoder {
    pub stats: TransferStats,
}

fn decode_err(log: &RawLogRecord, e: impl std::fmt::Display) -> Error {
    Error::Decode {
        tx_hash: log.tx_hash.to_string(),
        log_index: log.log_index,
        message: e.to_string(),
    }
}

impl TransferDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Decodes one log into zero or more transfer events.
    pub fn decode(&mut self, log: &RawLogRecord) -> Result<Vec<TransferEvent>> {
        log.validate()?;
        let t = topics();
        let topic0 = log.topics[0];
        let event = |standard, from, to, id: U256, amount, batch_index| TransferEvent {
            standard,
            contract: log.contract,
            from,
            to,
            token_id: TokenId(id),
            amount,
            kind: TransferKind::classify(from, to),
            block: log.block,
            timestamp: log.timestamp,
            tx_hash: log.tx_hash,
            log_index: log.log_index,
            batch_index,
            tx_value_wei: log.tx_value_wei,
        };

        let out = if topic0 == t.transfer {
            if log.topics.len() != 4 {
                self.stats.skipped_fungible += 1;
                return Ok(Vec::new());
            }
            let from = Address::from_word(&log.topics[1].0);
            let to = Address::from_word(&log.topics[2].0);
            vec![event(TokenStandard::Erc721, from, to, log.topics[3].to_u256(), U256::one(), None)]
        } else if topic0 == t.single || topic0 == t.batch {
            if log.topics.len() != 4 {
                return Err(decode_err(log, format!("expected 4 topics, found {}", log.topics.len())));
            }
            let from = Address::from_word(&log.topics[2].0);
            let to = Address::from_word(&log.topics[3].0);
            if topic0 == t.single {
                if log.data.0.len() != 64 {
                    return Err(decode_err(
                        log,
                        format!("TransferSingle data must be 64 bytes, found {}", log.data.0.len()),
                    ));
                }
                let id = abi::uint(&log.data.0, 0).map_err(|e| decode_err(log, e))?;
                let value = abi::uint(&log.data.0, 1).map_err(|e| decode_err(log, e))?;
                vec![event(TokenStandard::Erc1155, from, to, id, value, None)]
            } else {
                let pairs = abi::id_value_arrays(&log.data.0).map_err(|e: AbiError| decode_err(log, e))?;
                pairs
                    .into_iter()
                    .enumerate()
                    .map(|(i, (id, value))| event(TokenStandard::Erc1155, from, to, id, value, Some(i as u32)))
                    .collect()
            }
        } else {
            self.stats.skipped_unknown_topic += 1;
            return Ok(Vec::new());
        };
        self.stats.logs_decoded += 1;
        self.stats.events += out.len();
        Ok(out)
    }
}

/// Decodes a whole log set into transfers ordered by (block, log index, batch index).
pub fn decode_transfers<'a>(
    logs: impl IntoIterator<Item = &'a RawLogRecord>,
) -> Result<(Vec<TransferEvent>, TransferStats)> {
    let mut decoder = TransferDecoder::new();
    let mut events = Vec::new();
    for log in logs {
        events.extend(decoder.decode(log)?);
    }
    events.sort_by_key(TransferEvent::order_key);
    Ok((events, decoder.stats))
}
