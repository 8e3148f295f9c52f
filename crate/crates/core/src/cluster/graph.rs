use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::Address;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    ExternalLink,
    Creator,
    Deposit,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: Address,
    pub b: Address,
    pub phase: Phase,
    pub evidence: String,
}

/// Disjoint sets over collection addresses, with a log of every edge applied.
#[derive(Debug, Clone, Default)]
pub struct ClusterGraph {
    index: BTreeMap<Address, usize>,
    nodes: Vec<Address>,
    parent: Vec<usize>,
    size: Vec<usize>,
    least: Vec<Address>,
    edge_log: Vec<Edge>,
}

impl ClusterGraph {
    pub fn new(nodes: impl IntoIterator<Item = Address>) -> Self {
        let mut g = ClusterGraph::default();
        for n in nodes {
            g.add_node(n);
        }
        g
    }

    pub fn add_node(&mut self, n: Address) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        self.index.insert(n, i);
        self.nodes.push(n);
        self.parent.push(i);
        self.size.push(1);
        self.least.push(n);
        i
    }

    pub fn contains(&self, n: &Address) -> bool {
        self.index.contains_key(n)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_log(&self) -> &[Edge] {
        &self.edge_log
    }

    fn root(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn root_mut(&mut self, i: usize) -> usize {
        let r = self.root(i);
        let mut cur = i;
        while self.parent[cur] != r {
            let next = self.parent[cur];
            self.parent[cur] = r;
            cur = next;
        }
        r
    }

    /// Representative of the set holding `n`: the smallest address in it.
    /// Independent of the order in which edges were applied.
    pub fn find(&self, n: &Address) -> Option<Address> {
        let r = self.root(*self.index.get(n)?);
        Some(self.least[r])
    }

    /// Applies one edge, adding unknown endpoints as nodes. Returns whether two
    /// sets were merged.
    pub fn union(&mut self, edge: Edge) -> bool {
        let a = self.add_node(edge.a);
        let b = self.add_node(edge.b);
        self.edge_log.push(edge);
        let (ra, rb) = (self.root_mut(a), self.root_mut(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.least[big] = self.least[big].min(self.least[small]);
        true
    }

    pub fn apply(&mut self, edges: impl IntoIterator<Item = Edge>) -> usize {
        edges.into_iter().map(|e| self.union(e) as usize).sum()
    }

    /// Rebuilds a graph from its node set and edge log.
    pub fn replay(nodes: impl IntoIterator<Item = Address>, log: &[Edge]) -> Self {
        let mut g = ClusterGraph::new(nodes);
        g.apply(log.iter().cloned());
        g
    }

    /// Every set as a sorted member list; sets ordered by their smallest member.
    pub fn components(&self) -> Vec<Vec<Address>> {
        let mut by_root: BTreeMap<usize, Vec<Address>> = BTreeMap::new();
        for (i, &n) in self.nodes.iter().enumerate() {
            by_root.entry(self.root(i)).or_default().push(n);
        }
        let mut out: Vec<Vec<Address>> = by_root
            .into_values()
            .map(|mut v| {
                v.sort();
                v
            })
            .collect();
        out.sort();
        out
    }
}
