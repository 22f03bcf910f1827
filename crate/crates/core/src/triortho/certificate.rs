use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GF2Matrix;

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum SearchResult {
    #[serde(rename = "NONE-FOUND")]
    NoneFound,
    #[serde(rename = "WITNESS")]
    Witness { matrix: GF2Matrix },
}

/// Record of what a search covered and what it found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub search: String,
    /// Inclusive column-count range covered.
    pub n_range: [usize; 2],
    /// Inclusive row-count range covered.
    pub m_range: [usize; 2],
    pub constraints: Vec<String>,
    pub symmetry_reductions: Vec<String>,
    pub nodes: u64,
    pub result: SearchResult,
    /// Search-specific extras (variant counts, re-verification results).
    pub details: BTreeMap<String, serde_json::Value>,
}

impl SearchCertificate {
    pub fn witness(&self) -> Option<&GF2Matrix> {
        match &self.result {
            SearchResult::Witness { matrix } => Some(matrix),
            SearchResult::NoneFound => None,
        }
    }

    pub fn is_none_found(&self) -> bool {
        self.result == SearchResult::NoneFound
    }
}
