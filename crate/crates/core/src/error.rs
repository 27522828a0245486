use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Verification *verdicts* (a presheaf failing the sheaf condition, an exactness
/// clause failing) are not errors; they are reported through the report types.
/// `Error` is reserved for malformed inputs and refused searches.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid site: {0}")]
    InvalidSite(String),

    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid crossed data: {0}")]
    InvalidCrossed(String),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("{what}: search space ~{estimate} exceeds bound {bound}")]
    BoundExceeded {
        what: String,
        estimate: u128,
        bound: u64,
    },

    #[error("unliftable data: {0}")]
    Unliftable(String),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration guard. Every brute-force search threads one of these through
/// and refuses with a cardinality estimate instead of running away.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_nodes: u64,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 10_000_000;

    pub fn new(max_nodes: u64) -> Self {
        Budget { max_nodes }
    }

    /// Default budget, overridable through `CROSSED_COHOM_BOUND`.
    pub fn from_env() -> Self {
        let max_nodes = std::env::var("CROSSED_COHOM_BOUND")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(Self::DEFAULT_NODES);
        Budget { max_nodes }
    }

    pub fn check(&self, what: &str, estimate: u128) -> Result<()> {
        if estimate > self.max_nodes as u128 {
            Err(Error::BoundExceeded {
                what: what.to_string(),
                estimate,
                bound: self.max_nodes,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}
