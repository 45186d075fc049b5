use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field dimension {0} (supported: 1..=16)")]
    UnsupportedDimension(u32),
    #[error("polynomial {poly:#x} is not an irreducible polynomial of degree {n}")]
    NotIrreducible { n: u32, poly: u32 },
    #[error("no default polynomial for n = {0}; pass one explicitly")]
    NoDefaultPolynomial(u32),
    #[error("element {element} is outside F_2^{n}")]
    ElementOutOfRange { element: u64, n: u32 },
    #[error("subsets belong to different fields (n = {0} and n = {1})")]
    FieldMismatch(u32, u32),
    #[error("set must not contain 0")]
    ContainsZero,
    #[error("element {0} is already a member")]
    AlreadyMember(u32),
    #[error("cannot parse subset {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("hypothesis violated for {identity}: {reason}")]
    Hypothesis { identity: &'static str, reason: String },
    #[error("n = {0} is too large for an exhaustive sweep (max 5, or 6 in combinations mode)")]
    TooLarge(u32),
    #[error("invalid shard: {0}")]
    Shard(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("invalid table: {0}")]
    Table(String),
    #[error("witness for size {size}, r = {claimed} fails verification (computed r = {computed})")]
    BadWitness { size: usize, claimed: u32, computed: u32 },
    #[error("rule {rule} emitted a witness with r = {computed}, claimed {claimed} (subset {subset})")]
    RuleFailure { rule: &'static str, claimed: u32, computed: u32, subset: String },
    #[error("rule {rule}: {reason}")]
    RuleSearch { rule: &'static str, reason: String },
    #[error("pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
