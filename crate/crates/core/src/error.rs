use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric violation: {0}")]
    MetricViolation(String),
    #[error("atom {0} is not a point of the space")]
    UnknownAtom(String),
    #[error("empty point set")]
    EmptySet,
    #[error("measure is not a probability measure (total mass {0})")]
    NotProbability(String),
    #[error("measures live on different spaces")]
    SpaceMismatch,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("unsupported exponent p = {0}; only 1 and 2 are available")]
    UnsupportedP(u32),
    #[error("too many sets: m = {m}, limit {limit}")]
    TooManySets { m: usize, limit: usize },
    #[error("infeasible instance: subset {subset:?} has mass {mass} < target {target}")]
    InfeasibleInstance {
        subset: Vec<usize>,
        mass: String,
        target: String,
    },
    #[error("case precondition violated: {0}")]
    CasePreconditionViolated(String),
    #[error("support has {0} atoms, more than the enumeration limit")]
    SupportTooLarge(usize),
    #[error("epsilon {eps} is not below the clearance {clearance}")]
    EpsilonTooLarge { eps: f64, clearance: f64 },
    #[error("set is not invariant under the map")]
    NotInvariant,
    #[error("measure is not invariant under the pushforward")]
    NotInvariantMeasure,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
