//! Mint-fee and royalty accounting for one squat collection: who paid, how
//! much the creator took, and which addresses count as victims.

use std::collections::{BTreeMap, BTreeSet};

use nftsquat::analytics::{profits, victims};
use nftsquat::ingest::{CollectionMetadata, Marketplace, TradeRecord, TransferEvent, TransferKind};
use nftsquat::types::{format_ether, milli_ether, Address, Hash32, TokenId, TokenStandard, U256};

fn main() {
    let squat = Address::from_low_u64(0x5917);
    let creator = Address::from_low_u64(0xc0);
    let mint = |n: u64, to: u64, paid: u64| TransferEvent {
        standard: TokenStandard::Erc721,
        contract: squat,
        from: Address::ZERO,
        to: Address::from_low_u64(to),
        token_id: TokenId::new(n),
        amount: U256::one(),
        kind: TransferKind::Mint,
        block: n,
        timestamp: 1_650_000_000 + n,
        tx_hash: Hash32::from_low_u64(n),
        log_index: 0,
        batch_index: None,
        tx_value_wei: milli_ether(paid),
    };
    let sale = |n: u64, seller: u64, buyer: u64, price: u64| TradeRecord {
        marketplace: Marketplace::OpenSea,
        tx_hash: Hash32::from_low_u64(100 + n),
        log_index: 1,
        seller: Address::from_low_u64(seller),
        buyer: Address::from_low_u64(buyer),
        contract: squat,
        token_id: TokenId::new(n),
        price_wei: milli_ether(price),
        block: 100 + n,
        timestamp: 1_650_100_000 + n,
    };
    let transfers = [mint(1, 0xc0, 0), mint(2, 0x11, 80), mint(3, 0x12, 80)];
    let trades = [sale(2, 0x11, 0x21, 900), sale(3, 0x12, 0xc0, 500)];
    let meta = BTreeMap::from([(
        squat,
        CollectionMetadata {
            contract: squat,
            name: "Azuki NFT".into(),
            creator,
            royalty_bps: 750,
            twitter_handle: None,
            external_link: None,
            token_uris: BTreeMap::new(),
            official_flag: false,
            external_labels: Vec::new(),
        },
    )]);
    let contracts = BTreeSet::from([squat]);
    let (reports, _) = profits(&contracts, &transfers, &trades, &meta, None);
    let p = &reports[0];
    println!(
        "mint fees {} ETH, royalties {} ETH, total {} ETH ({:?})",
        format_ether(p.mint_fee_wei),
        format_ether(p.creator_earnings_wei),
        format_ether(p.total_wei),
        p.class()
    );
    let scammers = BTreeMap::from([(squat, BTreeSet::from([creator]))]);
    let v = &victims(&contracts, &transfers, &trades, &scammers)[0];
    println!("{} victims: minters {:?}, buyers {:?}", v.victim_count, v.minter_victims, v.buyer_victims);
}
