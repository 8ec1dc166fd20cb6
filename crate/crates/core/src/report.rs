//! Shared vocabulary for verdict reports.

use serde::{Deserialize, Serialize};

/// How a hypothesis of a theorem audit was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Verified by exact computation.
    Certified,
    /// Verified to be false by exact computation.
    Failed,
    /// Cannot be decided from the available data and was not assumed.
    NotCertifiable,
    /// Supplied by the user; not checked.
    Assumed,
}

impl Status {
    /// Whether the hypothesis may be used to draw conclusions.
    pub fn usable(self) -> bool {
        matches!(self, Status::Certified | Status::Assumed)
    }

    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Status::Certified
        } else {
            Status::Failed
        }
    }
}

/// Linear-map verdict from ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapVerdict {
    Iso,
    Mono,
    Epi,
    Neither,
}

impl MapVerdict {
    pub fn from_ranks(src_dim: usize, tgt_dim: usize, rank: usize) -> Self {
        match (rank == src_dim, rank == tgt_dim) {
            (true, true) => MapVerdict::Iso,
            (true, false) => MapVerdict::Mono,
            (false, true) => MapVerdict::Epi,
            (false, false) => MapVerdict::Neither,
        }
    }

    pub fn is_mono(self) -> bool {
        matches!(self, MapVerdict::Iso | MapVerdict::Mono)
    }

    pub fn is_iso(self) -> bool {
        self == MapVerdict::Iso
    }
}
