//! Bounded exploration of the mutation tree and of the exchange graph.

mod canon;
mod graph;
mod mutability;
mod rank2;
mod search;
mod store;

use serde::{Deserialize, Serialize};

pub use canon::{brute_force_key, canonical_relabeling, canonicalize, CanonicalSeedKey};
pub use graph::{EdgeColor, ExchangeGraphStore, GraphEdge, GraphNode, ReddeningPath};
pub use mutability::{verify_total_mutability, MutabilityOptions, MutabilityVerdict};
pub use rank2::{rank2_certificate, Rank2Certificate, Rank2Outcome, Rank2Step};
pub use search::{
    enumerate_greening, enumerate_mgs, enumerate_reddening, find_mgs, find_reddening,
    SearchOutcome, SearchReport,
};
pub use store::{decode_store, encode_store, load_store, save_store, STORE_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 12,
            max_nodes: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub budget: SearchBudget,
    /// Skip mutations at the target of a heavy arrow (never part of a
    /// maximal green sequence).
    pub heavy_pruning: bool,
    /// Directions every result must start with.
    pub forced_prefix: Vec<usize>,
    /// Entries wider than this many bits trigger a warning.
    pub magnitude_bits: u64,
    /// Drop branches that exceed `magnitude_bits` instead of only warning.
    pub prune_on_magnitude: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: SearchBudget::default(),
            heavy_pruning: false,
            forced_prefix: Vec::new(),
            magnitude_bits: 64,
            prune_on_magnitude: false,
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: SearchBudget) -> SearchOptions {
        SearchOptions {
            budget,
            ..SearchOptions::default()
        }
    }
}
