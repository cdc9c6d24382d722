use serde::{Deserialize, Serialize};

/// Desk-scale guards shared by the enumerating operations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of tuples materialized or scanned by a single tuple-set operation.
    pub cap_tuples: u128,
    /// Maximum `|A|` for exhaustive subset searches (magnification).
    pub cap_subsets: usize,
    /// Maximum `|A|` for the pattern Gram matrix.
    pub cap_gram: usize,
    /// Maximum set size for exact dissociated dimension.
    pub cap_dim: usize,
    /// Jacobi sweep cap.
    pub max_sweeps: usize,
    /// Largest dense table allowed (lattice windows, tuple counters).
    pub cap_dense: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cap_tuples: 10_000_000,
            cap_subsets: 20,
            cap_gram: 512,
            cap_dim: 20,
            max_sweeps: 100,
            cap_dense: 1 << 26,
        }
    }
}
