//! Builds the demo snapshot in `demo/` (or the directory given as the first
//! argument) together with `ground_truth.json`, the outcome a pipeline run
//! over it must reproduce.
//!
//! ```text
//! cargo run --example build_demo
//! cargo run --bin nftsquat -- --config demo/config.json pipeline
//! ```
//!
//! Expected values are tallied from the generator's own bookkeeping; nothing
//! here calls the detection code.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use nftsquat::ingest::{abi, CollectionMetadata, ExternalLabel, LabelKind, PlainTransaction, RawLogRecord};
use nftsquat::jsonl;
use nftsquat::matcher::CandidateCollection;
use nftsquat::pipeline::{LabelRecord, SocialRecord};
use nftsquat::squatgen::SeedCollection;
use nftsquat::types::{Address, Hash32, HexBytes, TokenId, TokenStandard, U256};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha3::{Digest, Keccak256};

const T0: u64 = 1_640_995_200; // 2022-01-01T00:00:00Z
const DAY: u64 = 86_400;
const BLOCK0: u64 = 13_916_000;
const ETH: u128 = 1_000_000_000_000_000_000;
const MILLI: u128 = ETH / 1000;
const LOOKSRARE: &str = "0x59728544b08ab483533076417fbbb2fd0b17ce3a";
const WETH: &str = "0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2";
const TAKER_ASK: &str = "TakerAsk(bytes32,uint256,address,address,address,address,address,uint256,uint256,uint256)";
const TAKER_BID: &str = "TakerBid(bytes32,uint256,address,address,address,address,address,uint256,uint256,uint256)";

type Grid = [[u8; 9]; 8];

fn keccak(label: &str) -> [u8; 32] {
    Keccak256::digest(label.as_bytes()).into()
}

fn addr(label: &str) -> Address {
    let h = keccak(label);
    let mut a = [0u8; 20];
    a.copy_from_slice(&h[12..]);
    Address(a)
}

fn word_u(v: u128) -> [u8; 32] {
    Hash32::from_u256(U256::from(v)).0
}

fn word_a(a: Address) -> Hash32 {
    Hash32(a.to_word())
}

fn grid_hash(g: &Grid) -> u64 {
    let mut h = 0u64;
    for r in 0..8 {
        for c in 0..8 {
            if g[r][c] < g[r][c + 1] {
                h |= 1 << (r * 8 + c);
            }
        }
    }
    h
}

fn distance(a: &Grid, b: &Grid) -> u32 {
    (grid_hash(a) ^ grid_hash(b)).count_ones()
}

fn random_grid(rng: &mut ChaCha8Rng) -> Grid {
    let mut g = [[0u8; 9]; 8];
    for row in g.iter_mut() {
        for c in 0..9 {
            loop {
                let v: u8 = rng.gen_range(16..=240);
                if c == 0 || v != row[c - 1] {
                    row[c] = v;
                    break;
                }
            }
        }
    }
    g
}

fn far_grid(rng: &mut ChaCha8Rng, avoid: &[Grid]) -> Grid {
    loop {
        let g = random_grid(rng);
        if avoid.iter().all(|a| distance(a, &g) >= 12) {
            return g;
        }
    }
}

fn write_png(path: &Path, g: &Grid) {
    let img = RgbImage::from_fn(72, 64, |x, y| {
        let v = g[(y / 8) as usize][(x / 8) as usize];
        Rgb([v, v, v])
    });
    img.save(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
}

#[derive(Clone, Copy, PartialEq)]
enum Activity {
    Scam { self_buy: bool },
    Healthy,
}

#[derive(Clone, Copy, PartialEq)]
enum Picture {
    Exact,
    Similar,
    Distinct,
    None,
}

#[derive(Clone, Copy, PartialEq)]
enum Outcome {
    Official,
    Squat(Option<char>),
    Benign,
    Whitelisted,
    Early,
    Unmatched,
}

#[derive(Clone)]
struct Coll {
    key: &'static str,
    name: &'static str,
    standard: TokenStandard,
    creator: &'static str,
    deploy: Option<u64>,
    target: Option<&'static str>,
    link: Option<&'static str>,
    activity: Activity,
    start: u64,
    label: Option<LabelKind>,
    label_in_metadata: bool,
    picture: Picture,
    steal_uris: bool,
    reuse_uri: bool,
    first_buyer: Option<&'static str>,
    royalty_bps: u32,
    tactic: Option<&'static str>,
    outcome: Outcome,
}

fn base() -> Coll {
    Coll {
        key: "",
        name: "",
        standard: TokenStandard::Erc721,
        creator: "",
        deploy: Some(13_600_000),
        target: None,
        link: None,
        activity: Activity::Scam { self_buy: false },
        start: 4,
        label: Some(LabelKind::Phishing),
        label_in_metadata: false,
        picture: Picture::Exact,
        steal_uris: false,
        reuse_uri: false,
        first_buyer: None,
        royalty_bps: 500,
        tactic: None,
        outcome: Outcome::Benign,
    }
}

struct SeedDef {
    rank: u32,
    name: &'static str,
    key: &'static str,
    deploy: u64,
    link: &'static str,
    cap_eth: u128,
}

const SEEDS: [SeedDef; 5] = [
    SeedDef { rank: 1, name: "Azuki", key: "azuki", deploy: 12_500_000, link: "https://www.azuki.com", cap_eth: 400_000 },
    SeedDef {
        rank: 2,
        name: "Bored Ape Yacht Club",
        key: "bayc",
        deploy: 12_000_000,
        link: "https://boredapeyachtclub.com",
        cap_eth: 350_000,
    },
    SeedDef { rank: 3, name: "Doodles", key: "doodles", deploy: 12_700_000, link: "https://doodles.app", cap_eth: 120_000 },
    SeedDef {
        rank: 4,
        name: "Moonbirds",
        key: "moonbirds",
        deploy: 12_900_000,
        link: "https://www.moonbirds.xyz",
        cap_eth: 90_000,
    },
    SeedDef {
        rank: 5,
        name: "Milady Maker",
        key: "milady",
        deploy: 12_800_000,
        link: "https://miladymaker.net",
        cap_eth: 30_000,
    },
];

fn collections() -> Vec<Coll> {
    let mut out: Vec<Coll> = SEEDS
        .iter()
        .map(|s| Coll {
            key: s.key,
            name: s.name,
            creator: s.key,
            deploy: Some(s.deploy),
            link: Some(s.link),
            activity: Activity::Healthy,
            start: 1,
            label: None,
            picture: Picture::Distinct,
            outcome: Outcome::Official,
            ..base()
        })
        .collect();
    let a = Some('A');
    let b = Some('B');
    let c = Some('C');
    out.extend([
        Coll {
            key: "azuki-nft",
            name: "Azuki NFT",
            creator: "cA1",
            target: Some("Azuki"),
            link: Some("https://azuki-mint.xyz/"),
            steal_uris: true,
            first_buyer: Some("cA3"),
            tactic: Some("CombinationSquatting"),
            outcome: Outcome::Squat(a),
            ..base()
        },
        Coll {
            key: "azukinft-official",
            name: "AzukiNFT Official",
            creator: "cA2",
            target: Some("Azuki"),
            link: Some("http://AZUKI-MINT.xyz"),
            activity: Activity::Scam { self_buy: true },
            start: 6,
            picture: Picture::Similar,
            tactic: Some("CombinationSquatting"),
            outcome: Outcome::Squat(a),
            ..base()
        },
        Coll {
            key: "azuki2",
            name: "Azuki2",
            creator: "cA3",
            target: Some("Azuki"),
            link: Some("azuki-mint.xyz"),
            start: 8,
            label: Some(LabelKind::Spam),
            reuse_uri: true,
            tactic: Some("CombinationSquatting"),
            outcome: Outcome::Squat(a),
            ..base()
        },
        Coll {
            key: "doodle",
            name: "Doodle",
            creator: "cB",
            target: Some("Doodles"),
            steal_uris: true,
            tactic: Some("CharacterOmission"),
            outcome: Outcome::Squat(b),
            ..base()
        },
        Coll {
            key: "moonbhirds",
            name: "Moonbhirds",
            standard: TokenStandard::Erc1155,
            creator: "cB",
            target: Some("Moonbirds"),
            start: 7,
            label: Some(LabelKind::Malicious),
            label_in_metadata: true,
            picture: Picture::Similar,
            royalty_bps: 750,
            tactic: Some("CharacterInsertion"),
            outcome: Outcome::Squat(b),
            ..base()
        },
        Coll {
            key: "malady-maker",
            name: "Malady Maker",
            creator: "cB",
            target: Some("Milady Maker"),
            activity: Activity::Scam { self_buy: true },
            start: 10,
            tactic: Some("MisspellingSubstitution"),
            outcome: Outcome::Squat(b),
            ..base()
        },
        Coll {
            key: "board-ape",
            name: "Board Ape Yacht Club",
            creator: "cD1",
            target: Some("Bored Ape Yacht Club"),
            steal_uris: true,
            tactic: Some("Homophone"),
            outcome: Outcome::Squat(c),
            ..base()
        },
        Coll {
            key: "milady-caps",
            name: "MIlady Maker",
            creator: "cD2",
            target: Some("Milady Maker"),
            link: Some("https://miladymaker.net/"),
            start: 12,
            picture: Picture::Similar,
            tactic: Some("CaseSubstitution"),
            outcome: Outcome::Squat(c),
            ..base()
        },
        Coll {
            key: "azuki-clone",
            name: "Azuki",
            creator: "cD3",
            target: Some("Azuki"),
            start: 9,
            label: None,
            tactic: Some("IdenticalName"),
            outcome: Outcome::Squat(None),
            ..base()
        },
        Coll {
            key: "milady-nft",
            name: "Milady Maker NFT",
            creator: "cD4",
            target: Some("Milady Maker"),
            link: Some("miladymaker.net"),
            start: 11,
            picture: Picture::Distinct,
            tactic: Some("CombinationSquatting"),
            outcome: Outcome::Squat(None),
            ..base()
        },
        Coll {
            key: "space-doodles",
            name: "Space Doodles",
            creator: "cE1",
            target: Some("Doodles"),
            outcome: Outcome::Whitelisted,
            ..base()
        },
        Coll {
            key: "doodles-old",
            name: "Doodles Old",
            creator: "cE2",
            deploy: Some(12_600_000),
            target: Some("Doodles"),
            outcome: Outcome::Early,
            ..base()
        },
        Coll {
            key: "azuki-fan-art",
            name: "Azuki Fan Art",
            creator: "cH1",
            deploy: None,
            target: Some("Azuki"),
            activity: Activity::Healthy,
            start: 3,
            label: Some(LabelKind::Clean),
            picture: Picture::Distinct,
            outcome: Outcome::Benign,
            ..base()
        },
        Coll {
            key: "moonbirds-genesis",
            name: "Moonbirds Genesis",
            creator: "cH2",
            target: Some("Moonbirds"),
            start: 5,
            label: None,
            picture: Picture::Distinct,
            outcome: Outcome::Benign,
            ..base()
        },
        Coll {
            key: "cryptocars",
            name: "CryptoCars",
            creator: "cN1",
            activity: Activity::Healthy,
            start: 2,
            label: None,
            picture: Picture::None,
            outcome: Outcome::Unmatched,
            ..base()
        },
        Coll {
            key: "sunflower",
            name: "Sunflower Club",
            creator: "cN2",
            deploy: None,
            activity: Activity::Healthy,
            start: 5,
            label: None,
            picture: Picture::None,
            outcome: Outcome::Unmatched,
            ..base()
        },
    ]);
    out
}

#[derive(Default)]
struct Book {
    fee: u128,
    royalty: u128,
    paid_minters: BTreeSet<Address>,
    buyers: BTreeSet<Address>,
}

struct Chain {
    logs: Vec<RawLogRecord>,
    txs: Vec<PlainTransaction>,
    seq: u64,
    transfer: Hash32,
    single: Hash32,
    batch: Hash32,
    ask: Hash32,
    bid: Hash32,
    books: BTreeMap<Address, Book>,
}

struct Slot {
    tx: Hash32,
    block: u64,
    ts: u64,
}

impl Chain {
    fn new() -> Self {
        Chain {
            logs: Vec::new(),
            txs: Vec::new(),
            seq: 0,
            transfer: abi::event_topic("Transfer(address,address,uint256)"),
            single: abi::event_topic("TransferSingle(address,address,address,uint256,uint256)"),
            batch: abi::event_topic("TransferBatch(address,address,address,uint256[],uint256[])"),
            ask: abi::event_topic(TAKER_ASK),
            bid: abi::event_topic(TAKER_BID),
            books: BTreeMap::new(),
        }
    }

    fn slot(&mut self, day: u64) -> Slot {
        self.seq += 1;
        let ts = T0 + day * DAY + self.seq * 60;
        Slot { tx: Hash32(keccak(&format!("tx-{}", self.seq))), block: BLOCK0 + (ts - T0) / 12, ts }
    }

    fn push(&mut self, s: &Slot, index: u64, contract: Address, topics: Vec<Hash32>, data: Vec<u8>, value: u128) {
        self.logs.push(RawLogRecord {
            tx_hash: s.tx,
            log_index: index,
            contract,
            topics,
            data: HexBytes(data),
            block: s.block,
            timestamp: s.ts,
            tx_value_wei: U256::from(value),
        });
    }

    /// NFT movement logs for one transaction, starting at `index`.
    #[allow(clippy::too_many_arguments)]
    fn movement(
        &mut self,
        s: &Slot,
        index: u64,
        std: TokenStandard,
        contract: Address,
        from: Address,
        to: Address,
        items: &[(u64, u64)],
        value: u128,
    ) -> u64 {
        let mut i = index;
        match std {
            TokenStandard::Erc721 => {
                for &(id, _) in items {
                    let topics = vec![self.transfer, word_a(from), word_a(to), Hash32::from_low_u64(id)];
                    self.push(s, i, contract, topics, Vec::new(), value);
                    i += 1;
                }
            }
            TokenStandard::Erc1155 if items.len() == 1 => {
                let data = [word_u(items[0].0 as u128), word_u(items[0].1 as u128)].concat();
                let topics = vec![self.single, word_a(to), word_a(from), word_a(to)];
                self.push(s, i, contract, topics, data, value);
                i += 1;
            }
            TokenStandard::Erc1155 => {
                let n = items.len() as u128;
                let mut data = vec![word_u(64), word_u(64 + 32 * (1 + n)), word_u(n)];
                data.extend(items.iter().map(|&(id, _)| word_u(id as u128)));
                data.push(word_u(n));
                data.extend(items.iter().map(|&(_, amt)| word_u(amt as u128)));
                let topics = vec![self.batch, word_a(to), word_a(from), word_a(to)];
                self.push(s, i, contract, topics, data.concat(), value);
                i += 1;
            }
        }
        i
    }

    fn mint(&mut self, c: &Coll, to: Address, items: &[(u64, u64)], value: u128, day: u64) {
        let s = self.slot(day);
        let contract = addr(c.key);
        self.movement(&s, 0, c.standard, contract, Address::ZERO, to, items, value);
        let book = self.books.entry(contract).or_default();
        book.fee += value;
        if value > 0 {
            book.paid_minters.insert(to);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn sale(&mut self, c: &Coll, token: u64, seller: Address, buyer: Address, price: u128, day: u64, taker_is_buyer: bool) {
        let s = self.slot(day);
        let contract = addr(c.key);
        let next = self.movement(&s, 0, c.standard, contract, seller, buyer, &[(token, 1)], price);
        let (topic, taker, maker) =
            if taker_is_buyer { (self.bid, buyer, seller) } else { (self.ask, seller, buyer) };
        let data = [
            keccak(&format!("order-{}", self.seq)),
            word_u(self.seq as u128),
            WETH.parse::<Address>().unwrap().to_word(),
            contract.to_word(),
            word_u(token as u128),
            word_u(1),
            word_u(price),
        ]
        .concat();
        let topics = vec![topic, word_a(taker), word_a(maker), word_a(addr("strategy-fixed-price"))];
        self.push(&s, next, LOOKSRARE.parse().unwrap(), topics, data, price);
        let book = self.books.entry(contract).or_default();
        book.royalty += price * u128::from(c.royalty_bps) / 10_000;
        book.buyers.insert(buyer);
    }

    fn pay(&mut self, from: Address, to: Address, value: u128, block: u64) {
        self.seq += 1;
        self.txs.push(PlainTransaction {
            tx_hash: Hash32(keccak(&format!("tx-{}", self.seq))),
            from,
            to,
            value_wei: U256::from(value),
            block,
        });
    }
}

fn scam(chain: &mut Chain, c: &Coll, self_buy: bool) {
    let s = c.start;
    let creator = addr(c.creator);
    let m = |i: u32| addr(&format!("{}-minter-{i}", c.key));
    let b1 = addr(c.first_buyer.map_or(format!("{}-buyer", c.key), str::to_string).as_str());
    let b2 = addr("collector-whale");
    let f = MILLI * 50;
    match c.standard {
        TokenStandard::Erc721 => {
            chain.mint(c, creator, &[(1, 1)], 0, s);
            chain.mint(c, m(1), &[(2, 1)], f, s);
            chain.mint(c, m(2), &[(3, 1)], f, s + 1);
            chain.mint(c, m(3), &[(4, 1)], f, s + 1);
        }
        TokenStandard::Erc1155 => {
            chain.mint(c, creator, &[(1, 10)], 0, s);
            chain.mint(c, m(1), &[(2, 2), (3, 1)], f, s);
            chain.mint(c, m(2), &[(3, 1)], f, s + 1);
            chain.mint(c, m(3), &[(2, 1)], f, s + 1);
        }
    }
    chain.sale(c, 2, m(1), b1, ETH, s + 3, true);
    if self_buy {
        chain.sale(c, 3, m(2), creator, MILLI * 500, s + 6, false);
    }
    chain.sale(c, 2, b1, b2, MILLI * 50, s + 10, false);
}

/// Monthly mint and resale through May, with a post after each sale.
fn healthy(chain: &mut Chain, c: &Coll, posts: &mut Vec<u64>) {
    for k in 0..5u64 {
        let day = c.start + 30 * k;
        let minter = addr(&format!("{}-minter-{k}", c.key));
        let holder = addr(&format!("{}-holder-{k}", c.key));
        chain.mint(c, minter, &[(10 + k, 1)], MILLI * 20, day);
        chain.sale(c, 10 + k, minter, holder, MILLI * 300, day + 2, k % 2 == 0);
        posts.push(T0 + (day + 4) * DAY);
    }
}

fn token_uris(c: &Coll, seed_key: Option<&str>) -> BTreeMap<TokenId, String> {
    let tag = |k: &str| format!("ipfs://Qm{}", &hex(&keccak(k))[..16]);
    (1..=4u64)
        .map(|id| {
            let uri = match (c.steal_uris, c.reuse_uri, seed_key) {
                (true, _, Some(k)) if id <= 2 => format!("{}/{id}", tag(k)),
                (_, true, _) if id <= 2 => format!("{}/0", tag(c.key)),
                _ => format!("{}/{id}", tag(c.key)),
            };
            (TokenId::new(id), uri)
        })
        .collect()
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

fn main() {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo"));
    if root.join("images").exists() {
        std::fs::remove_dir_all(root.join("images")).unwrap();
    }
    std::fs::create_dir_all(root.join("images")).unwrap();

    let colls = collections();
    let seed_of = |name: &str| SEEDS.iter().find(|s| s.name == name).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20220101);

    // Images: two tokens per collection, 72x64 pixels of flat 8x8 blocks.
    let mut official: BTreeMap<&str, [Grid; 2]> = BTreeMap::new();
    let mut all_official: Vec<Grid> = Vec::new();
    for s in &SEEDS {
        let g1 = far_grid(&mut rng, &all_official);
        all_official.push(g1);
        let g2 = far_grid(&mut rng, &all_official);
        all_official.push(g2);
        official.insert(s.name, [g1, g2]);
    }
    let mut grids: BTreeMap<Address, [Grid; 2]> = BTreeMap::new();
    for c in &colls {
        let g = match (c.outcome, c.picture, c.target) {
            (Outcome::Official, _, _) => official[c.name],
            (_, Picture::Exact, Some(t)) => official[t],
            (_, Picture::Similar, Some(t)) => {
                let mut g = official[t];
                for (i, grid) in g.iter_mut().enumerate() {
                    let r = 2 + 3 * i;
                    grid[r].swap(3, 4);
                }
                g
            }
            (_, Picture::Distinct, _) => [far_grid(&mut rng, &all_official), far_grid(&mut rng, &all_official)],
            _ => continue,
        };
        grids.insert(addr(c.key), g);
    }
    for (contract, g) in &grids {
        let dir = root.join("images").join(contract.to_string());
        std::fs::create_dir_all(&dir).unwrap();
        for (i, grid) in g.iter().enumerate() {
            write_png(&dir.join(format!("{}.png", i + 1)), grid);
        }
    }

    // Chain activity.
    let mut chain = Chain::new();
    let mut social = Vec::new();
    for c in &colls {
        let mut posts = Vec::new();
        match c.activity {
            Activity::Scam { self_buy } => scam(&mut chain, c, self_buy),
            Activity::Healthy => healthy(&mut chain, c, &mut posts),
        }
        if !posts.is_empty() {
            social.push(SocialRecord { contract: addr(c.key), post_timestamps: posts });
        }
    }
    // A fungible transfer and an unrelated event, both ignored by ingestion.
    let s = chain.slot(20);
    let weth: Address = WETH.parse().unwrap();
    let t = chain.transfer;
    chain.push(&s, 0, weth, vec![t, word_a(addr("x")), word_a(addr("y"))], word_u(ETH).to_vec(), 0);
    let approval = abi::event_topic("Approval(address,address,uint256)");
    chain.push(&s, 1, weth, vec![approval, word_a(addr("x")), word_a(addr("y"))], word_u(ETH).to_vec(), 0);

    // Plain transfers: deposit-address reuse linking cD1 and cD2.
    let ex = addr("exchange-hot-wallet");
    let ex2 = addr("exchange-cold-wallet");
    let dep = addr("deposit-1");
    let bk = 14_100_000;
    chain.pay(addr("cD1"), dep, ETH, bk);
    chain.pay(dep, ex, ETH - 5 * MILLI, bk + 40);
    chain.pay(addr("cD2"), addr("cD2-wallet"), 2500 * MILLI, bk + 100);
    chain.pay(addr("cD2-wallet"), dep, 2 * ETH, bk + 200);
    chain.pay(dep, ex, 2 * ETH - MILLI, bk + 260);
    // Near miss: 0.02 ETH apart, so cD3 stays apart.
    chain.pay(addr("cD3"), dep, 3 * ETH, bk + 300);
    chain.pay(dep, ex, 3 * ETH - 20 * MILLI, bk + 320);
    // A deposit used by a single squat creator.
    chain.pay(addr("cA1"), addr("deposit-2"), 400 * MILLI, bk + 500);
    chain.pay(addr("deposit-2"), ex2, 399 * MILLI, bk + 600);
    // Gap too long.
    chain.pay(addr("cD4"), addr("deposit-3"), ETH, bk + 1_000);
    chain.pay(addr("deposit-3"), ex, ETH, bk + 12_000);
    // Unrelated traffic.
    chain.pay(addr("collector-whale"), ex, 5 * ETH, bk + 700);
    chain.pay(addr("someone"), addr("someone-else"), 70 * MILLI, bk + 800);

    // Input files.
    let seeds: Vec<SeedCollection> = SEEDS
        .iter()
        .map(|s| SeedCollection {
            rank: s.rank,
            name: s.name.to_string(),
            contract_address: addr(s.key),
            deploy_block: s.deploy,
            market_cap_wei: U256::from(s.cap_eth) * U256::from(ETH),
        })
        .collect();
    let candidates: Vec<CandidateCollection> = colls
        .iter()
        .map(|c| CandidateCollection {
            contract_address: addr(c.key),
            name: c.name.to_string(),
            standard: c.standard,
            deploy_block: c.deploy,
            creator: addr(c.creator),
        })
        .collect();
    let metadata: Vec<CollectionMetadata> = colls
        .iter()
        .map(|c| CollectionMetadata {
            contract: addr(c.key),
            name: c.name.to_string(),
            creator: addr(c.creator),
            royalty_bps: c.royalty_bps,
            twitter_handle: (c.outcome == Outcome::Official).then(|| c.key.to_string()),
            external_link: c.link.map(str::to_string),
            token_uris: token_uris(c, c.target.map(|t| seed_of(t).key)),
            official_flag: c.outcome == Outcome::Official,
            external_labels: match (c.label, c.label_in_metadata) {
                (Some(label), true) => vec![ExternalLabel { source: "marketplace".into(), label }],
                _ => Vec::new(),
            },
        })
        .collect();
    let labels: Vec<LabelRecord> = colls
        .iter()
        .filter(|c| !c.label_in_metadata)
        .filter_map(|c| c.label.map(|label| LabelRecord { contract: addr(c.key), source: "etherscan".into(), label }))
        .collect();

    let mut logs = chain.logs.clone();
    logs.sort_by_key(|l| (l.block, l.log_index));
    let mut txs = chain.txs.clone();
    txs.sort_by_key(|t| (t.block, t.tx_hash));

    jsonl::write(root.join("seeds.jsonl"), &seeds).unwrap();
    jsonl::write(root.join("candidates.jsonl"), &candidates).unwrap();
    jsonl::write(root.join("metadata.jsonl"), &metadata).unwrap();
    jsonl::write(root.join("logs.jsonl"), &logs).unwrap();
    jsonl::write(root.join("transactions.jsonl"), &txs).unwrap();
    jsonl::write(root.join("labels.jsonl"), &labels).unwrap();
    jsonl::write(root.join("social.jsonl"), &social).unwrap();
    let list = |title: &str, items: &[Address]| {
        let mut s = format!("# {title}\n");
        for a in items {
            s.push_str(&format!("{a}\n"));
        }
        s
    };
    std::fs::write(root.join("exchanges.txt"), list("exchange hot and cold wallets", &[ex, ex2])).unwrap();
    std::fs::write(root.join("whitelist.txt"), list("licensed derivatives", &[addr("space-doodles")])).unwrap();
    std::fs::write(
        root.join("usd.csv"),
        "date,wei_per_usd\n2022-01-01,270270270270270\n2022-02-01,344827586206896\n2022-04-01,294117647058823\n",
    )
    .unwrap();
    let field = |kind: &str, n: usize| json!({ kind: n });
    let market = |event: &str, seller, buyer| {
        json!({
            "marketplace": "LooksRare",
            "address": LOOKSRARE,
            "event": event,
            "fields": {
                "seller": seller, "buyer": buyer,
                "collection": field("data", 3), "token_id": field("data", 4), "price": field("data", 6)
            }
        })
    };
    let map = json!({"markets": [
        market(TAKER_ASK, field("topic", 1), field("topic", 2)),
        market(TAKER_BID, field("topic", 2), field("topic", 1)),
    ]});
    std::fs::write(root.join("market_map.json"), serde_json::to_string_pretty(&map).unwrap() + "\n").unwrap();
    let config = json!({
        "seeds": "seeds.jsonl",
        "candidates": "candidates.jsonl",
        "logs": "logs.jsonl",
        "transactions": "transactions.jsonl",
        "metadata": "metadata.jsonl",
        "market-map": "market_map.json",
        "exchanges": "exchanges.txt",
        "whitelist": "whitelist.txt",
        "labels": "labels.jsonl",
        "social": "social.jsonl",
        "images": "images",
        "usd-table": "usd.csv",
        "out-dir": "out"
    });
    std::fs::write(root.join("config.json"), serde_json::to_string_pretty(&config).unwrap() + "\n").unwrap();

    // Expected outcome.
    let squats: Vec<&Coll> = colls.iter().filter(|c| matches!(c.outcome, Outcome::Squat(_))).collect();
    let mut campaigns: BTreeMap<char, Vec<&Coll>> = BTreeMap::new();
    for c in &squats {
        if let Outcome::Squat(Some(id)) = c.outcome {
            campaigns.entry(id).or_default().push(c);
        }
    }
    let mut victims_total = 0;
    let mut distinct = BTreeSet::new();
    let (mut fees, mut royalties) = (0u128, 0u128);
    let (mut exact, mut similar, mut uri_pairs, mut reuse) = (0, 0, 0, 0);
    for c in &squats {
        let contract = addr(c.key);
        let mut scammers = BTreeSet::from([addr(c.creator)]);
        if let Outcome::Squat(Some(id)) = c.outcome {
            scammers.extend(campaigns[&id].iter().map(|m| addr(m.creator)));
        }
        let book = &chain.books[&contract];
        fees += book.fee;
        royalties += book.royalty;
        let v: BTreeSet<Address> = book.paid_minters.union(&book.buyers).filter(|a| !scammers.contains(a)).copied().collect();
        victims_total += v.len();
        distinct.extend(v);

        let target = c.target.unwrap();
        for o in &official[target] {
            for s in &grids[&contract] {
                match distance(o, s) {
                    0 => exact += 1,
                    1..=4 => similar += 1,
                    _ => {}
                }
            }
        }
        let mine = token_uris(c, Some(seed_of(target).key));
        let theirs = token_uris(&Coll { key: seed_of(target).key, ..base() }, None);
        uri_pairs += mine.values().map(|u| theirs.values().filter(|t| *t == u).count()).sum::<usize>();
        if mine.values().collect::<BTreeSet<_>>().len() < mine.len() {
            reuse += 1;
        }
    }
    let mut by_tactic: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &squats {
        *by_tactic.entry(c.tactic.unwrap()).or_default() += 1;
    }
    let mut campaign_sets: Vec<Vec<String>> = campaigns
        .values()
        .map(|m| {
            let mut v: Vec<String> = m.iter().map(|c| addr(c.key).to_string()).collect();
            v.sort();
            v
        })
        .collect();
    campaign_sets.sort();
    let mut squat_contracts: Vec<String> = squats.iter().map(|c| addr(c.key).to_string()).collect();
    squat_contracts.sort();
    let matched = colls.iter().filter(|c| !matches!(c.outcome, Outcome::Official | Outcome::Unmatched)).count();
    let names = |o: Outcome| -> Vec<&str> { colls.iter().filter(|c| c.outcome == o).map(|c| c.name).collect() };
    let truth = json!({
        "matched_candidates": matched,
        "prefiltered": {"DerivativeWhitelist": names(Outcome::Whitelisted).len(), "DeployedBeforeOfficial": names(Outcome::Early).len()},
        "benign": names(Outcome::Benign),
        "unmatched": names(Outcome::Unmatched),
        "squat_collections": squats.len(),
        "squat_contracts": squat_contracts,
        "squats_by_tactic": by_tactic,
        "campaign_members": campaign_sets,
        "campaign_archetypes": {"LinkCentered": 1, "CreatorCentered": 1, "Mixed": 1},
        "singletons": squats.iter().filter(|c| c.outcome == Outcome::Squat(None)).count(),
        "deposit_matches": 3,
        "victims_total": victims_total,
        "victims_distinct": distinct.len(),
        "mint_fee_wei": fees.to_string(),
        "creator_earnings_wei": royalties.to_string(),
        "total_profit_wei": (fees + royalties).to_string(),
        "profitable_collections": squats.len(),
        "uri_theft_pairs": uri_pairs,
        "image_exact_pairs": exact,
        "image_similar_pairs": similar,
        "uri_reuse_collections": reuse,
    });
    std::fs::write(root.join("ground_truth.json"), serde_json::to_string_pretty(&truth).unwrap() + "\n").unwrap();
    println!(
        "wrote {} collections, {} logs, {} transactions to {}",
        colls.len(),
        logs.len(),
        txs.len(),
        root.display()
    );
}
