//! Groups six squat collections into campaigns through a shared external
//! link, a shared creator and a shared exchange deposit address.

use std::collections::BTreeSet;

use nftsquat::cluster::{cluster, DepositBounds, SquatNode};
use nftsquat::ingest::PlainTransaction;
use nftsquat::types::{ether, milli_ether, Address, Hash32};

fn main() -> nftsquat::Result<()> {
    let a = Address::from_low_u64;
    let node = |n: u64, creator: u64, link: Option<&str>| SquatNode {
        contract: a(0x1000 + n),
        creator: a(creator),
        external_link: link.map(str::to_string),
    };
    let squats = [
        node(1, 0xa1, Some("https://claim-azuki.xyz/")),
        node(2, 0xa2, Some("claim-azuki.xyz")),
        node(3, 0xb0, None),
        node(4, 0xb0, None),
        node(5, 0xd1, None),
        node(6, 0xd2, None),
    ];
    let (deposit, exchange) = (a(0xde9), a(0xe1));
    let tx = |n: u64, from, to, value, block| PlainTransaction { tx_hash: Hash32::from_low_u64(n), from, to, value_wei: value, block };
    let txs = [
        tx(1, a(0xd1), deposit, ether(), 100),
        tx(2, deposit, exchange, ether() - milli_ether(2), 130),
        tx(3, a(0xd2), deposit, ether() * 3, 400),
        tx(4, deposit, exchange, ether() * 3, 420),
    ];
    let out = cluster(&squats, &[], &txs, &BTreeSet::from([exchange]), DepositBounds::default())?;
    for c in &out.campaigns {
        println!("{} {:?}: {} members via {:?}", c.id, c.archetype, c.members.len(), c.phases);
    }
    println!("{} deposit matches, {} singletons", out.deposits.len(), out.summary.singletons);
    Ok(())
}
