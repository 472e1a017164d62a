use thiserror::Error;

/// Errors raised by the number-theory substrate and the pipeline built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("factorization of {n} exceeds the {budget_bits}-bit cofactor budget")]
    BudgetExceeded { n: String, budget_bits: u32 },

    #[error("moduli {first} and {second} are not coprime")]
    CrtConflict { first: String, second: String },

    #[error("not enough prime pairs: {}", format_shortfall(.0))]
    Insufficient(Vec<Shortfall>),

    #[error("covering prime {q} is used more than once")]
    DuplicateCoveringPrime { q: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("schema error: {0}")]
    Schema(String),
}

/// Missing pairs for one base when distributing pairs over the target triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortfall {
    pub a: u64,
    pub needed: usize,
    pub available: usize,
}

fn format_shortfall(items: &[Shortfall]) -> String {
    items
        .iter()
        .map(|s| format!("a={} needs {} has {}", s.a, s.needed, s.available))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
