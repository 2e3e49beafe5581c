use thiserror::Error;

use crate::valuation::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bundle overlap: increment and base share items {0:?}")]
    Overlap(Vec<usize>),

    #[error("item index {index} out of range for {num_items} items")]
    ItemOutOfRange { index: usize, num_items: usize },

    #[error("too many items: {got} (limit {limit})")]
    TooManyItems { got: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid valuation: {}", fmt_violations(.0))]
    InvalidValuation(Vec<Violation>),

    #[error("invalid economy: {0}")]
    InvalidEconomy(String),

    #[error("negative price {price} for item {item}")]
    NegativePrice { item: usize, price: f64 },

    #[error("allocation is partial: item {0} is unallocated")]
    PartialAllocation(usize),

    #[error("allocation is not a local optimum: {0}")]
    NotLocalOptimum(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
