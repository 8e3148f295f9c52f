//! Matches candidate collection names against a seed list and shows the
//! tactic each one was classified under.

use nftsquat::matcher::{levenshtein, CandidateCollection, Matcher};
use nftsquat::squatgen::{generate_corpus, SeedCollection, WordLists};
use nftsquat::types::{Address, TokenStandard, U256};

fn main() {
    let lists = WordLists::builtin();
    let seeds: Vec<SeedCollection> = ["Azuki", "Bored Ape Yacht Club", "Moonbirds", "Milady Maker", "CryptoDads"]
        .iter()
        .enumerate()
        .map(|(i, n)| SeedCollection {
            rank: i as u32 + 1,
            name: n.to_string(),
            contract_address: Address::from_low_u64(i as u64 + 1),
            deploy_block: 0,
            market_cap_wei: U256::zero(),
        })
        .collect();
    let corpus = generate_corpus(&seeds, &lists).keywords;
    let matcher = Matcher::new(&corpus, &seeds, &lists);

    let names = [
        "Azuki NFT",
        "AZUKl",
        "Board Ape Yacht Club",
        "Moonbhirds",
        "MIlady Maker",
        "Malady Maker Genesis",
        "CryptoCars",
        "Sunflower Club",
    ];
    for (i, name) in names.iter().enumerate() {
        let cand = CandidateCollection {
            contract_address: Address::from_low_u64(100 + i as u64),
            name: name.to_string(),
            standard: TokenStandard::Erc721,
            deploy_block: None,
            creator: Address::ZERO,
        };
        match matcher.match_candidate(&cand).expect("non-empty name") {
            Some(m) => println!(
                "{name:<22} -> {:<20} {:?} via {:?} (edit distance {})",
                m.seed_name,
                m.tactic,
                m.matched_keyword,
                levenshtein(name, &m.seed_name)
            ),
            None => println!("{name:<22} -> no match"),
        }
    }
}
