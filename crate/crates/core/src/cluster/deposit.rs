use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PlainTransaction;
use crate::types::{dec_u256, Address, U256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct DepositBounds {
    /// Inflow and outflow amounts must differ by strictly less than this.
    #[serde(with = "dec_u256")]
    pub max_diff_wei: U256,
    /// Outflow must follow its inflow by at most this many blocks.
    pub max_blocks: u64,
}

impl Default for DepositBounds {
    fn default() -> Self {
        DepositBounds { max_diff_wei: U256::exp10(16), max_blocks: 10_000 }
    }
}

impl DepositBounds {
    pub fn admits(&self, inflow: &PlainTransaction, outflow: &PlainTransaction) -> bool {
        let diff = if inflow.value_wei > outflow.value_wei {
            inflow.value_wei - outflow.value_wei
        } else {
            outflow.value_wei - inflow.value_wei
        };
        outflow.block >= inflow.block && outflow.block - inflow.block <= self.max_blocks && diff < self.max_diff_wei
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepositMatch {
    pub deposit: Address,
    pub inflow: PlainTransaction,
    pub outflow: PlainTransaction,
    pub exchange: Address,
}

/// Pairs each forwarding transfer into an exchange with the latest earlier,
/// still unmatched inflow to the same forwarding address.
///
/// Transactions are processed in (block, tx hash) order, so the result does
/// not depend on how same-block transactions were listed.
pub fn detect_deposits(
    txs: &[PlainTransaction],
    exchanges: &BTreeSet<Address>,
    bounds: DepositBounds,
) -> Result<Vec<DepositMatch>> {
    if exchanges.is_empty() {
        return Err(Error::invalid("exchange list", "no exchange addresses given"));
    }
    let mut ordered: Vec<&PlainTransaction> = txs.iter().collect();
    ordered.sort_by_key(|t| (t.block, t.tx_hash));

    // Per forwarding address: inflows seen so far and whether each is taken.
    let mut inflows: BTreeMap<Address, Vec<(&PlainTransaction, bool)>> = BTreeMap::new();
    let mut out = Vec::new();
    for tx in ordered {
        if tx.from == tx.to {
            continue;
        }
        if exchanges.contains(&tx.to) && !exchanges.contains(&tx.from) {
            if let Some(list) = inflows.get_mut(&tx.from) {
                let hit = list
                    .iter_mut()
                    .rev()
                    .take_while(|(inflow, _)| tx.block - inflow.block <= bounds.max_blocks)
                    .find(|(inflow, used)| !*used && bounds.admits(inflow, tx));
                if let Some((inflow, used)) = hit {
                    *used = true;
                    out.push(DepositMatch {
                        deposit: tx.from,
                        inflow: (*inflow).clone(),
                        outflow: tx.clone(),
                        exchange: tx.to,
                    });
                }
            }
        }
        if !exchanges.contains(&tx.to) {
            inflows.entry(tx.to).or_default().push((tx, false));
        }
    }
    Ok(out)
}

/// Each creator together with every address it sent to or received from
/// directly. Exchange hot wallets are left out so they cannot bridge
/// unrelated actors.
pub fn expand_addresses(
    creators: &BTreeSet<Address>,
    txs: &[PlainTransaction],
    exchanges: &BTreeSet<Address>,
) -> BTreeMap<Address, BTreeSet<Address>> {
    let mut out: BTreeMap<Address, BTreeSet<Address>> =
        creators.iter().map(|&c| (c, BTreeSet::from([c]))).collect();
    for tx in txs {
        for (me, other) in [(tx.from, tx.to), (tx.to, tx.from)] {
            if let Some(set) = out.get_mut(&me) {
                if !exchanges.contains(&other) {
                    set.insert(other);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{milli_ether, Hash32};

    const DEP: Address = Address([0xd0; 20]);
    const EX: Address = Address([0xee; 20]);

    fn tx(n: u64, from: Address, to: Address, value: U256, block: u64) -> PlainTransaction {
        PlainTransaction { tx_hash: Hash32::from_low_u64(n), from, to, value_wei: value, block }
    }

    fn run(txs: &[PlainTransaction]) -> Vec<DepositMatch> {
        detect_deposits(txs, &BTreeSet::from([EX]), DepositBounds::default()).unwrap()
    }

    fn user() -> Address {
        Address::from_low_u64(1)
    }

    #[test]
    fn forwarding_within_bounds_matches() {
        let m = run(&[tx(1, user(), DEP, milli_ether(1005), 100), tx(2, DEP, EX, milli_ether(1000), 150)]);
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].deposit, m[0].exchange, m[0].inflow.from), (DEP, EX, user()));
    }

    #[test]
    fn amount_bound_is_strict() {
        let near = U256::from(9_900_000_000_000_000u64);
        assert_eq!(run(&[tx(1, user(), DEP, milli_ether(1000) + near, 1), tx(2, DEP, EX, milli_ether(1000), 2)]).len(), 1);
        let exact = U256::exp10(16);
        assert!(run(&[tx(1, user(), DEP, milli_ether(1000) + exact, 1), tx(2, DEP, EX, milli_ether(1000), 2)]).is_empty());
    }

    #[test]
    fn block_gap_is_inclusive() {
        let v = milli_ether(1000);
        assert_eq!(run(&[tx(1, user(), DEP, v, 0), tx(2, DEP, EX, v, 10_000)]).len(), 1);
        assert!(run(&[tx(1, user(), DEP, v, 0), tx(2, DEP, EX, v, 10_001)]).is_empty());
    }

    #[test]
    fn greedy_takes_latest_unmatched_inflow() {
        let v = milli_ether(1000);
        let a = Address::from_low_u64(1);
        let b = Address::from_low_u64(2);
        let m = run(&[tx(1, a, DEP, v, 10), tx(2, b, DEP, v, 20), tx(3, DEP, EX, v, 30), tx(4, DEP, EX, v, 40)]);
        let senders: Vec<Address> = m.iter().map(|d| d.inflow.from).collect();
        assert_eq!(senders, vec![b, a]);
        // A third outflow has nothing left to pair with.
        let m = run(&[tx(1, a, DEP, v, 10), tx(3, DEP, EX, v, 30), tx(4, DEP, EX, v, 40)]);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn outflow_before_inflow_does_not_match() {
        let v = milli_ether(1000);
        assert!(run(&[tx(2, DEP, EX, v, 5), tx(1, user(), DEP, v, 10)]).is_empty());
    }

    #[test]
    fn same_block_order_is_by_hash() {
        let v = milli_ether(1000);
        let fwd = [tx(1, user(), DEP, v, 7), tx(2, DEP, EX, v, 7)];
        let rev = [fwd[1].clone(), fwd[0].clone()];
        assert_eq!(run(&fwd), run(&rev));
        assert_eq!(run(&fwd).len(), 1);
    }

    #[test]
    fn empty_exchange_list_is_rejected() {
        assert!(detect_deposits(&[], &BTreeSet::new(), DepositBounds::default()).is_err());
    }

    #[test]
    fn expansion_is_one_hop() {
        let c = Address::from_low_u64(1);
        let w = Address::from_low_u64(2);
        let far = Address::from_low_u64(3);
        let txs = [tx(1, c, w, 1.into(), 1), tx(2, w, far, 1.into(), 2), tx(3, EX, c, 1.into(), 3)];
        let x = expand_addresses(&BTreeSet::from([c]), &txs, &BTreeSet::from([EX]));
        assert_eq!(x[&c], BTreeSet::from([c, w]));
    }
}
