use serde::{Deserialize, Serialize};

/// Where a constant fed into a bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Sampled supremum; a lower bound of the true constant.
    Fitted,
    /// Closed form for a built-in example.
    Analytic,
    /// Supplied by the caller.
    User,
}
