//! Generates the squatting keyword corpus for a few official names and
//! prints how many keywords each tactic produced, with a sample of each.
//!
//! ```text
//! cargo run --example gen_corpus -- "Pudgy Penguins" "Azuki"
//! ```

use std::collections::BTreeMap;

use nftsquat::squatgen::{generate_corpus, SeedCollection, Tactic, WordLists};
use nftsquat::types::{Address, U256};

fn main() {
    let mut names: Vec<String> = std::env::args().skip(1).collect();
    if names.is_empty() {
        names = vec!["Azuki".into(), "Bored Ape Yacht Club".into()];
    }
    let seeds: Vec<SeedCollection> = names
        .iter()
        .enumerate()
        .map(|(i, n)| SeedCollection {
            rank: i as u32 + 1,
            name: n.clone(),
            contract_address: Address::from_low_u64(i as u64 + 1),
            deploy_block: 0,
            market_cap_wei: U256::zero(),
        })
        .collect();
    let corpus = generate_corpus(&seeds, &WordLists::builtin());

    for seed in &names {
        let mut by_tactic: BTreeMap<Tactic, Vec<&str>> = BTreeMap::new();
        for k in corpus.keywords.iter().filter(|k| &k.seed_name == seed) {
            by_tactic.entry(k.tactic).or_default().push(&k.text);
        }
        println!("{seed}");
        for (tactic, texts) in by_tactic {
            let sample: Vec<&str> = texts.iter().take(4).copied().collect();
            println!("  {:<24} {:>5}  {}", format!("{tactic:?}"), texts.len(), sample.join(" | "));
        }
    }
    println!("{} keywords total", corpus.keywords.len());
}
