//! Groups lookalike collections into campaigns by shared external link,
//! shared creator, and shared exchange deposit address.

mod deposit;
mod graph;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::PlainTransaction;
use crate::types::Address;

pub use deposit::{detect_deposits, expand_addresses, DepositBounds, DepositMatch};
pub use graph::{ClusterGraph, Edge, Phase};

/// What the clustering phases need to know about one lookalike collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquatNode {
    pub contract: Address,
    pub creator: Address,
    pub external_link: Option<String>,
}

/// Scheme dropped, host lowercased, trailing slash removed, query kept.
pub fn normalize_url(url: &str) -> Option<String> {
    let url = url.trim();
    let rest = match url.find("://") {
        Some(i) => &url[i + 3..],
        None => url,
    };
    let split = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let (host, tail) = rest.split_at(split);
    let host = host.to_ascii_lowercase();
    if host.is_empty() {
        return None;
    }
    let (path, query) = match tail.find(['?', '#']) {
        Some(i) => tail.split_at(i),
        None => (tail, ""),
    };
    Some(format!("{host}{}{query}", path.trim_end_matches('/')))
}

/// Links every member of `group` to its first member.
fn star(group: &[Address], phase: Phase, evidence: &str) -> Vec<Edge> {
    group
        .iter()
        .skip(1)
        .map(|&b| Edge { a: group[0], b, phase, evidence: evidence.to_string() })
        .collect()
}

fn group_edges(groups: BTreeMap<String, BTreeSet<Address>>, phase: Phase) -> Vec<Edge> {
    groups
        .into_iter()
        .filter(|(_, members)| members.len() >= 2)
        .flat_map(|(key, members)| star(&members.into_iter().collect::<Vec<_>>(), phase, &key))
        .collect()
}

/// Collections sharing an external link that no official collection uses.
pub fn link_phase<'a>(squats: &[SquatNode], official_links: impl IntoIterator<Item = &'a str>) -> Vec<Edge> {
    let official: BTreeSet<String> = official_links.into_iter().filter_map(normalize_url).collect();
    let mut groups: BTreeMap<String, BTreeSet<Address>> = BTreeMap::new();
    for s in squats {
        if let Some(link) = s.external_link.as_deref().and_then(normalize_url) {
            if !official.contains(&link) {
                groups.entry(link).or_default().insert(s.contract);
            }
        }
    }
    group_edges(groups, Phase::ExternalLink)
}

/// Collections deployed by the same address.
pub fn creator_phase(squats: &[SquatNode]) -> Vec<Edge> {
    let mut groups: BTreeMap<String, BTreeSet<Address>> = BTreeMap::new();
    for s in squats {
        groups.entry(s.creator.to_string()).or_default().insert(s.contract);
    }
    group_edges(groups, Phase::Creator)
}

/// Collections whose creators' one-hop neighbourhoods both fed the same
/// deposit address.
pub fn deposit_phase(
    squats: &[SquatNode],
    matches: &[DepositMatch],
    expanded: &BTreeMap<Address, BTreeSet<Address>>,
) -> Vec<Edge> {
    let mut senders: BTreeMap<Address, BTreeSet<Address>> = BTreeMap::new();
    for m in matches {
        senders.entry(m.deposit).or_default().insert(m.inflow.from);
    }
    let mut groups: BTreeMap<String, BTreeSet<Address>> = BTreeMap::new();
    for (deposit, from) in &senders {
        for s in squats {
            let reach = expanded.get(&s.creator);
            let touches = match reach {
                Some(set) => !set.is_disjoint(from),
                None => from.contains(&s.creator),
            };
            if touches {
                groups.entry(deposit.to_string()).or_default().insert(s.contract);
            }
        }
    }
    group_edges(groups, Phase::Deposit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Archetype {
    LinkCentered,
    CreatorCentered,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Campaign {
    pub id: String,
    pub members: Vec<Address>,
    pub creators: BTreeSet<Address>,
    pub external_links: BTreeSet<String>,
    pub deposit_addresses: BTreeSet<Address>,
    pub phases: BTreeSet<Phase>,
    pub archetype: Archetype,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub collections: usize,
    pub campaigns: usize,
    pub singletons: usize,
    pub clustered_collections: usize,
    /// Campaign size to number of campaigns of that size.
    pub size_histogram: BTreeMap<usize, usize>,
    pub archetypes: BTreeMap<Archetype, usize>,
    pub edges_by_phase: BTreeMap<Phase, usize>,
}

#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub campaigns: Vec<Campaign>,
    pub summary: ClusterSummary,
    pub deposits: Vec<DepositMatch>,
    pub graph: ClusterGraph,
}

fn archetype(members: &[&SquatNode], creators: &BTreeSet<Address>, official: &BTreeSet<String>) -> Archetype {
    let links: Vec<Option<String>> = members
        .iter()
        .map(|m| m.external_link.as_deref().and_then(normalize_url).filter(|l| !official.contains(l)))
        .collect();
    if links[0].is_some() && links.iter().all(|l| *l == links[0]) {
        return Archetype::LinkCentered;
    }
    let mut seen = BTreeSet::new();
    let shared_link = links.iter().flatten().any(|l| !seen.insert(l));
    if creators.len() == 1 && !shared_link {
        Archetype::CreatorCentered
    } else {
        Archetype::Mixed
    }
}

/// Turns components of two or more collections into campaigns.
///
/// Campaigns are ordered by size (largest first), then by smallest member,
/// and numbered in that order.
pub fn finalize<'a>(
    graph: &ClusterGraph,
    squats: &[SquatNode],
    official_links: impl IntoIterator<Item = &'a str>,
) -> (Vec<Campaign>, ClusterSummary) {
    let official: BTreeSet<String> = official_links.into_iter().filter_map(normalize_url).collect();
    let by_contract: BTreeMap<Address, &SquatNode> = squats.iter().map(|s| (s.contract, s)).collect();
    let mut summary = ClusterSummary { collections: graph.len(), ..Default::default() };
    for e in graph.edge_log() {
        *summary.edges_by_phase.entry(e.phase).or_default() += 1;
    }

    let mut comps: Vec<Vec<Address>> = graph.components();
    summary.singletons = comps.iter().filter(|c| c.len() == 1).count();
    comps.retain(|c| c.len() >= 2);
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let mut campaigns = Vec::new();
    for (i, members) in comps.into_iter().enumerate() {
        let nodes: Vec<&SquatNode> = members.iter().filter_map(|m| by_contract.get(m).copied()).collect();
        let member_set: BTreeSet<Address> = members.iter().copied().collect();
        let creators: BTreeSet<Address> = nodes.iter().map(|n| n.creator).collect();
        let external_links: BTreeSet<String> = nodes
            .iter()
            .filter_map(|n| n.external_link.as_deref().and_then(normalize_url))
            .filter(|l| !official.contains(l))
            .collect();
        let inner: Vec<&Edge> = graph.edge_log().iter().filter(|e| member_set.contains(&e.a)).collect();
        let deposit_addresses = inner
            .iter()
            .filter(|e| e.phase == Phase::Deposit)
            .filter_map(|e| e.evidence.parse().ok())
            .collect();
        let phases = inner.iter().map(|e| e.phase).collect();
        let archetype = if nodes.len() == members.len() {
            archetype(&nodes, &creators, &official)
        } else {
            Archetype::Mixed
        };
        *summary.size_histogram.entry(members.len()).or_default() += 1;
        *summary.archetypes.entry(archetype).or_default() += 1;
        summary.clustered_collections += members.len();
        campaigns.push(Campaign {
            id: format!("campaign-{:03}", i + 1),
            members,
            creators,
            external_links,
            deposit_addresses,
            phases,
            archetype,
        });
    }
    summary.campaigns = campaigns.len();
    (campaigns, summary)
}

/// Runs the link, creator and deposit phases in that order and finalizes.
pub fn cluster(
    squats: &[SquatNode],
    official_links: &[String],
    txs: &[PlainTransaction],
    exchanges: &BTreeSet<Address>,
    bounds: DepositBounds,
) -> Result<ClusterOutput> {
    let mut graph = ClusterGraph::new(squats.iter().map(|s| s.contract));
    graph.apply(link_phase(squats, official_links.iter().map(String::as_str)));
    graph.apply(creator_phase(squats));
    let deposits = if exchanges.is_empty() {
        log::warn!("no exchange addresses; deposit clustering skipped");
        Vec::new()
    } else {
        detect_deposits(txs, exchanges, bounds)?
    };
    let creators: BTreeSet<Address> = squats.iter().map(|s| s.creator).collect();
    let expanded = expand_addresses(&creators, txs, exchanges);
    graph.apply(deposit_phase(squats, &deposits, &expanded));
    let (campaigns, summary) = finalize(&graph, squats, official_links.iter().map(String::as_str));
    Ok(ClusterOutput { campaigns, summary, deposits, graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{milli_ether, Hash32};
    use proptest::prelude::*;

    fn a(n: u64) -> Address {
        Address::from_low_u64(n)
    }

    fn node(c: u64, creator: u64, link: Option<&str>) -> SquatNode {
        SquatNode { contract: a(c), creator: a(creator), external_link: link.map(String::from) }
    }

    fn graph_with(squats: &[SquatNode], edges: Vec<Edge>) -> ClusterGraph {
        let mut g = ClusterGraph::new(squats.iter().map(|s| s.contract));
        g.apply(edges);
        g
    }

    #[test]
    fn url_normalization() {
        assert_eq!(normalize_url("https://GoblinTown.link/").as_deref(), Some("goblintown.link"));
        assert_eq!(normalize_url("http://goblintown.link").as_deref(), Some("goblintown.link"));
        assert_eq!(normalize_url("goblintown.link/Mint/?ref=A").as_deref(), Some("goblintown.link/Mint?ref=A"));
        assert_eq!(normalize_url("  "), None);
    }

    #[test]
    fn five_squats_on_one_link_form_one_component() {
        let squats: Vec<SquatNode> = (1..=5).map(|i| node(i, 100 + i, Some("https://goblintown.link"))).collect();
        let g = graph_with(&squats, link_phase(&squats, []));
        assert_eq!(g.components(), vec![(1..=5).map(a).collect::<Vec<_>>()]);
        let (campaigns, summary) = finalize(&g, &squats, []);
        assert_eq!(campaigns[0].archetype, Archetype::LinkCentered);
        assert_eq!(summary.singletons, 0);
    }

    #[test]
    fn official_link_is_not_evidence() {
        let squats = vec![node(1, 10, Some("https://azuki.com")), node(2, 11, Some("azuki.com/"))];
        assert!(link_phase(&squats, ["https://www.azuki.com", "https://AZUKI.com"]).is_empty());
        assert_eq!(link_phase(&squats, []).len(), 1);
    }

    #[test]
    fn distinct_links_and_creators_give_no_edges() {
        let squats = vec![node(1, 10, Some("a.io")), node(2, 11, Some("b.io")), node(3, 12, None)];
        assert!(link_phase(&squats, []).is_empty());
        assert!(creator_phase(&squats).is_empty());
    }

    #[test]
    fn one_creator_many_collections() {
        let squats: Vec<SquatNode> = (1..=67).map(|i| node(i, 7, None)).collect();
        let edges = creator_phase(&squats);
        assert_eq!(edges.len(), 66);
        let g = graph_with(&squats, edges);
        let (campaigns, _) = finalize(&g, &squats, []);
        assert_eq!(campaigns.len(), 1);
        assert_eq!(campaigns[0].members.len(), 67);
        assert_eq!(campaigns[0].archetype, Archetype::CreatorCentered);
    }

    #[test]
    fn archetypes() {
        let shared_link: Vec<SquatNode> = (1..=4).map(|i| node(i, 50 + i, Some("kill.in"))).collect();
        let g = graph_with(&shared_link, link_phase(&shared_link, []));
        assert_eq!(finalize(&g, &shared_link, []).0[0].archetype, Archetype::LinkCentered);

        let mixed = vec![node(1, 9, Some("x.io")), node(2, 9, Some("x.io")), node(3, 9, None), node(4, 8, Some("x.io"))];
        let mut edges = link_phase(&mixed, []);
        edges.extend(creator_phase(&mixed));
        let g = graph_with(&mixed, edges);
        let (campaigns, _) = finalize(&g, &mixed, []);
        assert_eq!(campaigns.len(), 1);
        assert_eq!(campaigns[0].archetype, Archetype::Mixed);
    }

    fn ptx(n: u64, from: Address, to: Address, milli: u64, block: u64) -> PlainTransaction {
        PlainTransaction { tx_hash: Hash32::from_low_u64(n), from, to, value_wei: milli_ether(milli), block }
    }

    #[test]
    fn creators_funding_one_deposit_are_merged() {
        let (dep, ex) = (a(900), a(999));
        let squats = vec![node(1, 101, None), node(2, 102, None), node(3, 103, None)];
        let txs = vec![
            ptx(1, a(101), dep, 1000, 10),
            ptx(2, dep, ex, 1000, 20),
            ptx(3, a(102), a(555), 2000, 30),
            ptx(4, a(555), dep, 2000, 40),
            ptx(5, dep, ex, 1995, 50),
        ];
        let out = cluster(&squats, &[], &txs, &BTreeSet::from([ex]), DepositBounds::default()).unwrap();
        assert_eq!(out.deposits.len(), 2);
        assert_eq!(out.campaigns.len(), 1);
        assert_eq!(out.campaigns[0].members, vec![a(1), a(2)]);
        assert_eq!(out.campaigns[0].deposit_addresses, BTreeSet::from([dep]));
        assert_eq!(out.campaigns[0].archetype, Archetype::Mixed);
        assert_eq!(out.summary.singletons, 1);
    }

    #[test]
    fn separate_deposits_do_not_link() {
        let (d1, d2, e1, e2) = (a(900), a(901), a(998), a(999));
        let squats = vec![node(1, 101, None), node(2, 102, None)];
        let txs = vec![
            ptx(1, a(101), d1, 1000, 10),
            ptx(2, d1, e1, 1000, 20),
            ptx(3, a(101), d2, 1000, 10),
            ptx(4, d2, e2, 1000, 20),
        ];
        let out = cluster(&squats, &[], &txs, &BTreeSet::from([e1, e2]), DepositBounds::default()).unwrap();
        assert_eq!(out.deposits.len(), 2);
        assert!(out.campaigns.is_empty());
        let none = cluster(&squats, &[], &[], &BTreeSet::from([e1]), DepositBounds::default()).unwrap();
        assert!(none.campaigns.is_empty());
        assert_eq!(none.summary.singletons, 2);
    }

    #[test]
    fn find_is_order_free() {
        let mut g = ClusterGraph::new([a(5), a(3), a(9)]);
        g.union(Edge { a: a(9), b: a(5), phase: Phase::Creator, evidence: String::new() });
        assert_eq!(g.find(&a(9)), Some(a(5)));
        g.union(Edge { a: a(3), b: a(9), phase: Phase::Creator, evidence: String::new() });
        assert_eq!(g.find(&a(5)), Some(a(3)));
        assert_eq!(g.find(&a(4)), None);
    }

    fn fixture() -> impl Strategy<Value = Vec<SquatNode>> {
        prop::collection::vec((0u64..4, prop::option::of(0u64..4)), 1..16).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (creator, link))| SquatNode {
                    contract: a(i as u64 + 1),
                    creator: a(100 + creator),
                    external_link: link.map(|l| format!("site{l}.io")),
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn phase_order_does_not_change_partition(squats in fixture(), order in Just([0usize, 1, 2]).prop_shuffle()) {
            let sets = [
                link_phase(&squats, ["site0.io"]),
                creator_phase(&squats),
                {
                    let first = squats[0].contract;
                    squats.iter().filter(|s| s.contract.0[19] % 3 == 0).map(|s| Edge { a: first, b: s.contract, phase: Phase::Deposit, evidence: "d".into() }).collect()
                },
            ];
            let base = graph_with(&squats, sets.iter().flatten().cloned().collect());
            let shuffled = graph_with(&squats, order.iter().flat_map(|&i| sets[i].iter().cloned()).collect());
            prop_assert_eq!(base.components(), shuffled.components());
            for s in &squats {
                prop_assert_eq!(base.find(&s.contract), shuffled.find(&s.contract));
            }
        }

        #[test]
        fn replay_reproduces_find(squats in fixture()) {
            let mut edges = link_phase(&squats, []);
            edges.extend(creator_phase(&squats));
            let g = graph_with(&squats, edges);
            let r = ClusterGraph::replay(squats.iter().map(|s| s.contract), g.edge_log());
            for s in &squats {
                prop_assert_eq!(g.find(&s.contract), r.find(&s.contract));
            }
        }

        #[test]
        fn deposit_detection_ignores_same_block_order(seed: u64) {
            use rand::{seq::SliceRandom, Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ex = a(999);
            let txs: Vec<PlainTransaction> = (0..30)
                .map(|n| {
                    let to = if rng.gen_bool(0.3) { ex } else { a(900 + rng.gen_range(0..3)) };
                    let from = if to == ex { a(900 + rng.gen_range(0..3)) } else { a(rng.gen_range(1..5)) };
                    ptx(n, from, to, 1000 + rng.gen_range(0..20), rng.gen_range(0..4))
                })
                .collect();
            let mut shuffled = txs.clone();
            shuffled.shuffle(&mut rng);
            let ex_set = BTreeSet::from([ex]);
            prop_assert_eq!(
                detect_deposits(&txs, &ex_set, DepositBounds::default()).unwrap(),
                detect_deposits(&shuffled, &ex_set, DepositBounds::default()).unwrap()
            );
        }
    }
}
