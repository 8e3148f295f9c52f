pub mod error;
pub mod jsonl;
pub mod matcher;
pub mod squatgen;
pub mod types;

pub use error::{Error, Result};
pub mod ingest;
pub mod imagehash;
pub mod fpfilter;
pub mod cluster;
pub mod analytics;
pub mod pipeline;
